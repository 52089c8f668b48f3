"""Dense tensors, einsum notations and einsum by iterated single-index elimination.

An einsum is executed as a sequence of steps. Each step picks one summed
index, contracts every tensor that carries it into a single tensor over the
remaining indices of those tensors, and puts the result back. The step
sequence mirrors vertex elimination on the notation's decomposition graph, so
the width of the elimination order bounds every intermediate.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import (
    IndexAbsent,
    InvalidOutput,
    InvalidSignature,
    MemoryCapExceeded,
    ShapeMismatch,
    TooLargeForExhaustive,
)
from ..models import EngineConfig, Heuristic, OrderStrategy
from .graphs import (
    EliminationOrder,
    SimpleGraph,
    branch_and_bound_order,
    decomposition_graph,
    elimination_width,
    greedy_order,
)

logger = logging.getLogger(__name__)

IndexTuple = tuple[int, ...]

# numpy's sublist einsum interface accepts labels 0..51
_MAX_LABELS = 52


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Immutable m-th order float64 array whose axes all have extent n."""

    data: np.ndarray
    extent: int = field(default=0)

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.float64)
        if len(set(data.shape)) > 1:
            raise ShapeMismatch(f"axes must share one extent, got shape {data.shape}")
        extent = data.shape[0] if data.ndim else (self.extent or 1)
        if data.ndim and self.extent and self.extent != extent:
            raise ShapeMismatch(f"extent {self.extent} disagrees with shape {data.shape}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "extent", extent)

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def flat(self) -> np.ndarray:
        """Entries in row-major order."""
        return self.data.ravel()

    def item(self) -> float:
        if self.order:
            raise ShapeMismatch(f"order-{self.order} tensor is not a scalar")
        return float(self.data)


def check_entries(count: int, config: EngineConfig, what: str = "tensor") -> None:
    if count > config.memory_cap:
        raise MemoryCapExceeded(f"{what} needs {count} entries, cap is {config.memory_cap}")


def tensor_from_function(
    order: int,
    extent: int,
    f: Callable[..., float],
    config: Optional[EngineConfig] = None,
) -> DenseTensor:
    """Materialize T(alpha) = f(*alpha) for every alpha in [extent]^order."""
    config = config or EngineConfig()
    if order < 0 or extent < 1:
        raise ShapeMismatch(f"need order >= 0 and extent >= 1, got {order}, {extent}")
    check_entries(extent**order, config)
    values = np.fromiter(
        (f(*alpha) for alpha in itertools.product(range(extent), repeat=order)),
        dtype=np.float64,
        count=extent**order,
    )
    return DenseTensor(values.reshape((extent,) * order), extent)


@dataclass(frozen=True)
class EinsumNotation:
    """Input index tuples plus an output tuple; doubles as a decomposition signature."""

    inputs: tuple[IndexTuple, ...]
    output: IndexTuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(tuple(int(i) for i in t) for t in self.inputs))
        object.__setattr__(self, "output", tuple(int(i) for i in self.output))

    @property
    def indices(self) -> list[int]:
        """Distinct indices in order of first appearance."""
        return list(dict.fromkeys(i for tup in self.inputs for i in tup))

    def graph(self) -> SimpleGraph:
        """Decomposition graph, with the output indices joined into a clique."""
        tuples = list(self.inputs)
        if self.output:
            tuples.append(self.output)
        return decomposition_graph(tuples)

    def __str__(self) -> str:
        letters = {i: _letter(i) for i in self.indices}
        lhs = ",".join("".join(letters[i] for i in t) for t in self.inputs)
        return f"{lhs}->{''.join(letters[i] for i in self.output)}"


def _letter(i: int) -> str:
    return chr(ord("a") + i) if i < 26 else chr(ord("A") + i - 26)


def _relabeling(notation: EinsumNotation) -> dict[int, int]:
    if not notation.inputs:
        raise InvalidSignature("notation needs at least one input tuple")
    if any(len(t) == 0 for t in notation.inputs):
        raise InvalidSignature("empty input tuples are not allowed")
    if any(i < 0 for t in notation.inputs for i in t):
        raise InvalidSignature("indices must be nonnegative")
    used = notation.indices
    if len(set(notation.output)) != len(notation.output):
        raise InvalidOutput(f"duplicate output index in {notation.output}")
    missing = set(notation.output) - set(used)
    if missing:
        raise InvalidOutput(f"output indices {sorted(missing)} appear in no input")
    if len(used) > _MAX_LABELS:
        raise InvalidSignature(f"{len(used)} distinct indices, at most {_MAX_LABELS} supported")
    return {i: k for k, i in enumerate(used)}


def validate_notation(notation: EinsumNotation) -> EinsumNotation:
    """Check the output constraints and relabel indices to 0..m-1 by first appearance."""
    relabel = _relabeling(notation)
    return EinsumNotation(
        tuple(tuple(relabel[i] for i in t) for t in notation.inputs),
        tuple(relabel[i] for i in notation.output),
    )


def _single_use(notation: EinsumNotation) -> list[int]:
    """Summed indices carried by exactly one input tuple."""
    counts: dict[int, int] = {}
    for tup in notation.inputs:
        for i in set(tup):
            counts[i] = counts.get(i, 0) + 1
    return sorted(i for i, c in counts.items() if c == 1 and i not in notation.output)


def optimize_order(
    notation: EinsumNotation,
    strategy: OrderStrategy = OrderStrategy.GREEDY_MIN_FILL,
    config: Optional[EngineConfig] = None,
) -> EliminationOrder:
    """Choose an elimination order over all indices; output indices go last.

    Indices used by a single tuple are marginalized first. The predicted width
    is the max degree met when simulating the order on the decomposition graph.
    """
    config = config or EngineConfig()
    strategy = OrderStrategy(strategy)
    _relabeling(notation)
    graph = notation.graph()
    adj = graph.adjacency()
    output = list(notation.output)
    summed = [i for i in notation.indices if i not in notation.output]

    if strategy is OrderStrategy.EXHAUSTIVE:
        if len(notation.indices) > config.exhaustive_limit:
            raise TooLargeForExhaustive(
                f"{len(notation.indices)} indices exceeds exhaustive limit {config.exhaustive_limit}"
            )
        head, _ = branch_and_bound_order(adj, summed if output else None)
    else:
        heuristic = (
            Heuristic.MIN_FILL
            if strategy is OrderStrategy.GREEDY_MIN_FILL
            else Heuristic.MIN_DEGREE
        )
        marginal = _single_use(notation)
        head, _ = greedy_order(adj, heuristic, marginal)
        rest, _ = greedy_order(adj, heuristic, [i for i in summed if i not in marginal])
        head = head + rest

    order = tuple(head) + tuple(output)
    width = elimination_width(graph, order)
    logger.debug("order %s for %s has width %d (%s)", order, notation, width, strategy.value)
    return EliminationOrder(order, width)


def elimination_sequence(
    notation: EinsumNotation, order: Sequence[int]
) -> list[EinsumNotation]:
    """Notations obtained after each step of eliminating `order`'s summed indices.

    Entry k is the notation after k steps; entry 0 is the notation itself.
    """
    current = [tuple(dict.fromkeys(t)) for t in notation.inputs]
    sequence = [EinsumNotation(tuple(current), notation.output)]
    for i in order:
        if i in notation.output:
            continue
        touched = [t for t in current if i in t]
        merged = tuple(dict.fromkeys(j for t in touched for j in t if j != i))
        current = [t for t in current if i not in t] + [merged]
        sequence.append(EinsumNotation(tuple(current), notation.output))
    return sequence


def count_flops(notation: EinsumNotation, order: Sequence[int], extent: int) -> int:
    """Multiply-adds of executing `notation` along `order` at the given extent.

    A step contracting K tensors over d distinct indices costs K * n^d; the
    final assembly of the remaining tensors costs K * n^|output|.
    """
    current = [tuple(dict.fromkeys(t)) for t in notation.inputs]
    total = 0
    for i in order:
        if i in notation.output:
            continue
        touched = [t for t in current if i in t]
        union = {j for t in touched for j in t}
        total += len(touched) * extent ** len(union)
        current = [t for t in current if i not in t] + [tuple(sorted(union - {i}))]
    if len(current) > 1 or (current and current[0] != notation.output):
        total += len(current) * extent ** len(notation.output)
    return total


def _diagonal(array: np.ndarray, tup: IndexTuple) -> tuple[np.ndarray, IndexTuple]:
    """Read the diagonal for repeated indices within one tuple."""
    distinct = tuple(dict.fromkeys(tup))
    if len(distinct) == len(tup):
        return array, tup
    return np.einsum(array, list(tup), list(distinct)), distinct


def eliminate_index(
    operands: Sequence[tuple[np.ndarray, IndexTuple]],
    index: int,
    config: Optional[EngineConfig] = None,
) -> tuple[np.ndarray, IndexTuple]:
    """Contract tensors that all carry `index` into one tensor over their other indices."""
    config = config or EngineConfig()
    if not operands:
        raise IndexAbsent(f"no tensors carry index {index}")
    for _, tup in operands:
        if index not in tup:
            raise IndexAbsent(f"tuple {tup} lacks index {index}")
    out = tuple(dict.fromkeys(j for _, tup in operands for j in tup if j != index))
    extent = next((a.shape[0] for a, _ in operands if a.ndim), 1)
    check_entries(extent ** len(out), config, "intermediate")
    if len(operands) > 2:
        # the greedy pairwise path may hold every index at once
        check_entries(extent ** (len(out) + 1), config, "intermediate")
    args: list = []
    for array, tup in operands:
        array, tup = _diagonal(array, tup)
        args.extend((array, list(tup)))
    args.append(list(out))
    if len(operands) > 2:
        return np.einsum(*args, optimize="greedy"), out
    return np.einsum(*args, optimize=len(operands) == 2), out


def _check_shapes(tensors: Sequence[DenseTensor], notation: EinsumNotation) -> int:
    if len(tensors) != len(notation.inputs):
        raise ShapeMismatch(f"{len(tensors)} tensors for {len(notation.inputs)} input tuples")
    extents = set()
    for k, (tensor, tup) in enumerate(zip(tensors, notation.inputs)):
        if tensor.order != len(tup):
            raise ShapeMismatch(f"tensor {k} has order {tensor.order}, tuple {tup} needs {len(tup)}")
        extents.add(tensor.extent)
    if len(extents) > 1:
        raise ShapeMismatch(f"tensors disagree on extent: {sorted(extents)}")
    return extents.pop()


def einsum(
    tensors: Sequence[DenseTensor],
    notation: EinsumNotation,
    order: Optional[EliminationOrder] = None,
    config: Optional[EngineConfig] = None,
) -> DenseTensor:
    """Sum over non-output indices of the product of the input tensors.

    Without an order, one is chosen with the configured strategy.
    """
    config = config or EngineConfig()
    extent = _check_shapes(tensors, notation)
    relabel = _relabeling(notation)
    canon = validate_notation(notation)
    if order is None:
        elimination = optimize_order(canon, config.order_strategy, config)
    else:
        if sorted(order.order) != sorted(relabel):
            raise ValueError(f"order {order.order} is not a permutation of {sorted(relabel)}")
        steps = tuple(relabel[i] for i in order.order)
        elimination = EliminationOrder(steps, elimination_width(canon.graph(), steps))
    check_entries(extent ** len(canon.output), config, "output")

    work = [
        _diagonal(t.data, tup) for t, tup in zip(tensors, canon.inputs)
    ]
    for i in elimination.order:
        if i in canon.output:
            continue
        touched = [op for op in work if i in op[1]]
        work = [op for op in work if i not in op[1]]
        work.append(eliminate_index(touched, i, config))

    args: list = []
    for array, tup in work:
        args.extend((array, list(tup)))
    args.append(list(canon.output))
    result = np.einsum(*args) if len(work) > 1 or work[0][1] != canon.output else work[0][0]
    return DenseTensor(result, extent)
