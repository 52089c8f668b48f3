"""Multiplicatively decomposable kernels, samples, tensorization and the built-in kernels.

A component evaluator is vectorized by default: it receives one array per
argument, each of shape (..., d) with the observation's features on the last
axis and broadcastable leading axes, and returns the broadcast array of
values. Setting `vectorized=False` calls it once per index tuple with plain
observation rows instead.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from ..errors import (
    ComponentEvaluationError,
    InvalidSignature,
    SampleTooSmall,
    ShapeMismatch,
    UStatError,
)
from ..models import EngineConfig
from .tensors import DenseTensor, EinsumNotation, check_entries, tensor_from_function

logger = logging.getLogger(__name__)

FeatureMap = Callable[[np.ndarray], np.ndarray]


def _apply_features(feature_map: FeatureMap, z: np.ndarray) -> np.ndarray:
    phi = np.asarray(feature_map(z), dtype=np.float64)
    if phi.ndim < z.ndim:
        raise ShapeMismatch(
            f"feature map must keep a trailing feature axis: {z.shape} -> {phi.shape}"
        )
    return phi


@dataclass(frozen=True)
class Component:
    """One factor h_k of a decomposed kernel."""

    evaluate: Callable[..., np.ndarray]
    arity: int
    name: str = "h"
    vectorized: bool = True


@dataclass(frozen=True, eq=False)
class Sample:
    """n observations, one row each; 1-D input is read as one feature per row."""

    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2:
            raise ShapeMismatch(f"sample must be 1-D or 2-D, got shape {points.shape}")
        if points.shape[0] < 1:
            raise SampleTooSmall("sample needs at least one observation")
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.points[i]


@dataclass(frozen=True)
class MDKernel:
    """Kernel h(x_0, ..., x_{m-1}) = prod_k h_k(x[A_k]) with signature A over [m]."""

    components: tuple[Component, ...]
    signature: tuple[tuple[int, ...], ...]
    name: str = "kernel"

    def __post_init__(self) -> None:
        signature = tuple(tuple(int(i) for i in t) for t in self.signature)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "components", tuple(self.components))
        if not signature or any(len(t) == 0 for t in signature):
            raise InvalidSignature("signature needs nonempty tuples")
        if len(signature) != len(self.components):
            raise InvalidSignature(
                f"{len(self.components)} components for {len(signature)} signature tuples"
            )
        for comp, tup in zip(self.components, signature):
            if comp.arity != len(tup):
                raise InvalidSignature(f"component {comp.name} has arity {comp.arity}, tuple {tup}")
            if len(set(tup)) != len(tup):
                raise InvalidSignature(f"tuple {tup} repeats an index")
        used = {i for t in signature for i in t}
        if used != set(range(len(used))):
            raise InvalidSignature(f"signature indices {sorted(used)} do not cover [m]")

    @property
    def arity(self) -> int:
        return 1 + max(i for t in self.signature for i in t)

    @property
    def notation(self) -> EinsumNotation:
        return EinsumNotation(self.signature, ())

    def __call__(self, *points: np.ndarray) -> float:
        """Evaluate the full kernel on m observation rows."""
        if len(points) != self.arity:
            raise ShapeMismatch(f"kernel takes {self.arity} observations, got {len(points)}")
        value = 1.0
        for comp, tup in zip(self.components, self.signature):
            value *= float(comp.evaluate(*(points[i] for i in tup)))
        return value


def _axis_view(points: np.ndarray, axis: int, arity: int) -> np.ndarray:
    shape = [1] * arity
    shape[axis] = points.shape[0]
    return points[np.arange(points.shape[0]).reshape(shape)]


def tensorize_component(
    component: Component, sample: Sample, config: Optional[EngineConfig] = None
) -> DenseTensor:
    """T(alpha) = h(X[alpha]) for every alpha in [n]^arity."""
    config = config or EngineConfig()
    n, k = sample.n, component.arity
    check_entries(n**k, config)
    try:
        if component.vectorized:
            args = [_axis_view(sample.points, a, k) for a in range(k)]
            values = np.broadcast_to(
                np.asarray(component.evaluate(*args), dtype=np.float64), (n,) * k
            )
            tensor = DenseTensor(values, n)
        else:
            tensor = tensor_from_function(
                k, n, lambda *alpha: component.evaluate(*(sample.points[a] for a in alpha)), config
            )
    except UStatError:
        raise
    except Exception as exc:
        raise ComponentEvaluationError(f"component {component.name} failed: {exc}") from exc
    if config.strict_finite and not np.all(np.isfinite(tensor.data)):
        raise ComponentEvaluationError(f"component {component.name} produced non-finite values")
    return tensor


def tensorize(
    kernel: MDKernel, sample: Sample, config: Optional[EngineConfig] = None
) -> list[DenseTensor]:
    """Materialize every component of the kernel over the sample."""
    config = config or EngineConfig()
    check_entries(sum(sample.n ** c.arity for c in kernel.components), config, "tensorization")
    return [tensorize_component(c, sample, config) for c in kernel.components]


def sparsify(
    tensors: Sequence[DenseTensor], signature: Optional[Sequence[Sequence[int]]] = None
) -> list[DenseTensor]:
    """Zero every entry whose positions are not pairwise distinct."""
    if signature is not None:
        for tensor, tup in zip(tensors, signature):
            if tensor.order != len(tup):
                raise ShapeMismatch(f"tensor of order {tensor.order} for tuple {tuple(tup)}")
    result = []
    for tensor in tensors:
        k, n = tensor.order, tensor.extent
        if k < 2:
            result.append(tensor)
            continue
        axes = [np.arange(n).reshape([n if a == b else 1 for b in range(k)]) for a in range(k)]
        mask = np.ones((n,) * k, dtype=bool)
        for a in range(k):
            for b in range(a + 1, k):
                mask &= axes[a] != axes[b]
        result.append(DenseTensor(np.where(mask, tensor.data, 0.0), n))
    return result


# ---------------------------------------------------------------- built-in kernels


def _ones(x: np.ndarray) -> np.ndarray:
    return np.ones(x.shape[:-1])


ONE = Component(_ones, 1, name="one")


def product_kernel() -> MDKernel:
    """h(x_0, x_1) = x_0 * x_1 on the first feature, signature ((0,), (1,))."""
    first = Component(lambda x: x[..., 0], 1, name="x")
    return MDKernel((first, first), ((0,), (1,)), name="prod2")


def table_component(table: np.ndarray, name: str = "table") -> Component:
    """Pairwise component reading table[i, j] for observations that hold vertex ids."""
    table = np.asarray(table, dtype=np.float64)

    def lookup(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return table[x[..., 0].astype(np.intp), y[..., 0].astype(np.intp)]

    return Component(lookup, 2, name=name)


def distance_component(columns: slice, name: str = "dist") -> Component:
    """Euclidean distance between the selected feature columns of two observations."""

    def distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.linalg.norm(x[..., columns] - y[..., columns], axis=-1)

    return Component(distance, 2, name=name)


@dataclass(frozen=True)
class HOIFSpec:
    """Chain-structured kernel of order j on observations laid out as [A, Y, Z_1..Z_d].

    The feature map takes Z with shape (..., d) and returns (..., k).
    """

    order: int
    feature_map: FeatureMap = field(compare=False)

    def __post_init__(self) -> None:
        if self.order < 2:
            raise InvalidSignature(f"HOIF kernels need order >= 2, got {self.order}")

    @property
    def signature(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, i + 1) for i in range(self.order - 1))

    def _features(self, x: np.ndarray) -> np.ndarray:
        return _apply_features(self.feature_map, x[..., 2:])

    def middle(self) -> Component:
        def link(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            inner = np.sum(self._features(x) * self._features(y), axis=-1)
            return x[..., 0] * inner * y[..., 0]

        return Component(link, 2, name="hoif-link")

    def tail(self) -> Component:
        def last(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            inner = np.sum(self._features(x) * self._features(y), axis=-1)
            return x[..., 0] * inner * y[..., 1]

        return Component(last, 2, name="hoif-tail")

    def kernel(self) -> MDKernel:
        components = (self.middle(),) * (self.order - 2) + (self.tail(),)
        return MDKernel(components, self.signature, name=f"hoif:{self.order}")


def hoif_kernel(j: int, feature_map: FeatureMap) -> MDKernel:
    """Decomposed HOIF kernel of order j."""
    return HOIFSpec(j, feature_map).kernel()


def hoif_flat_kernel(
    j: int, feature_map: FeatureMap, subtract_identity: bool = False
) -> Callable[..., float]:
    """Undecomposed HOIF kernel on rows (x_1, x_2, x_3, ..., x_j).

    A_1 phi_1' [prod_{s>=3} (A_s phi_s A_s phi_s' - I?)] phi_2 Y_2, the identity
    subtracted only when asked.
    """

    def flat(*rows: np.ndarray) -> float:
        phis = [_apply_features(feature_map, np.asarray(r[2:], dtype=np.float64)) for r in rows]
        left = rows[0][0] * phis[0]
        for s in range(2, j):
            a = rows[s][0]
            middle = a * np.outer(phis[s], phis[s]) * a
            if subtract_identity:
                middle = middle - np.eye(len(phis[s]))
            left = left @ middle
        return float(left @ phis[1] * rows[1][1])

    return flat


@dataclass(frozen=True)
class MotifSpec:
    """Induced subgraph pattern as a product of adjacency (A) and non-adjacency (B) factors."""

    id: str
    vertex_count: int
    factors: tuple[tuple[int, int, str], ...]
    automorphisms: int

    @property
    def signature(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j, _ in self.factors)

    def graph(self) -> nx.Graph:
        """The motif itself, built from its A factors."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from((i, j) for i, j, which in self.factors if which == "A")
        return graph

    def kernel(self, adjacency: np.ndarray) -> MDKernel:
        adjacency = np.asarray(adjacency, dtype=np.float64)
        complement = 1.0 - adjacency
        np.fill_diagonal(complement, 0.0)
        tables = {"A": table_component(adjacency, "A"), "B": table_component(complement, "B")}
        return MDKernel(
            tuple(tables[which] for _, _, which in self.factors), self.signature, name=f"motif:{self.id}"
        )


def _motif(id: str, size: int, aut: int, *factors: str) -> MotifSpec:
    parsed = tuple((int(f[1]) - 1, int(f[2]) - 1, f[0]) for f in factors)
    return MotifSpec(id, size, parsed, aut)


MOTIFS: dict[str, MotifSpec] = {
    spec.id: spec
    for spec in (
        _motif("r1", 3, 2, "A12", "A23", "B31"),
        _motif("r2", 3, 6, "A12", "A23", "A31"),
        _motif("r3", 4, 6, "A12", "A13", "A14", "B23", "B24", "B34"),
        _motif("r4", 4, 2, "A12", "B13", "B14", "A23", "B24", "A34"),
        _motif("r5", 4, 2, "A12", "A13", "B14", "A23", "B24", "A34"),
        _motif("r6", 4, 8, "A12", "B13", "A14", "A23", "B24", "A34"),
        _motif("r7", 4, 4, "A12", "A13", "A14", "A23", "A24", "B34"),
        _motif("r8", 4, 24, "A12", "A13", "A14", "A23", "A24", "A34"),
    )
}
