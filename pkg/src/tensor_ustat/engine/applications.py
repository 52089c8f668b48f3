"""Statistics built from the engine: HOIF estimators, motif counts and squared distance covariance."""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, NonIntegerResult, SampleTooSmall
from ..utils.data_io import KernelSpec, adjacency_matrix
from ..utils.graphs import SimpleGraph
from ..utils.kernels import (
    MOTIFS,
    ONE,
    FeatureMap,
    MDKernel,
    MotifSpec,
    Sample,
    distance_component,
    hoif_kernel,
    product_kernel,
)
from .ustat_engine import UStatEngine, create_engine

logger = logging.getLogger(__name__)

MOTIF_ORDERS = {3: ("r1", "r2"), 4: ("r3", "r4", "r5", "r6", "r7", "r8")}

# (signature, sign) of the four U-statistics making up dCov^2; unary tuples pad to order 4
DCOV_TERMS: tuple[tuple[tuple[tuple[int, ...], ...], int], ...] = (
    (((0, 1), (2, 3)), 1),
    (((0, 1), (0, 1), (2,), (3,)), 1),
    (((0, 1), (0, 2), (3,)), -1),
    (((0, 1), (1, 3), (2,)), -1),
)


def leading_features(k: Optional[int] = None) -> FeatureMap:
    """phi(Z) = the first k covariate columns (all of them when k is None)."""

    def phi(z: np.ndarray) -> np.ndarray:
        return z if k is None else z[..., :k]

    return phi


def hoif_chain_statistic(
    j: int, feature_map: FeatureMap, sample: Sample, engine: Optional[UStatEngine] = None
) -> float:
    """U-statistic of the identity-free HOIF chain kernel of order j."""
    engine = engine or create_engine()
    return engine.u_statistic(hoif_kernel(j, feature_map), sample)


def hoif_term(
    j: int, feature_map: FeatureMap, sample: Sample, engine: Optional[UStatEngine] = None
) -> float:
    """U-statistic of the order-j HOIF kernel with every middle factor centered by the identity.

    Expanding the product of (M_s - I) keeps k of the j-2 middle factors; the
    dropped positions range freely over the remaining observations.
    """
    engine = engine or create_engine()
    n = sample.n
    if n < j:
        raise SampleTooSmall(f"order {j} HOIF term needs n >= {j}, got {n}")
    total = []
    for k in range(j - 1):
        weight = math.comb(j - 2, k) * (-1) ** (j - 2 - k) * math.perm(n - k - 2, j - 2 - k)
        total.append(weight * hoif_chain_statistic(k + 2, feature_map, sample, engine))
    return math.fsum(total)


def hoif_estimator(
    m: int, feature_map: FeatureMap, sample: Sample, engine: Optional[UStatEngine] = None
) -> float:
    """Sum over j = 2..m of (-1)^j times the mean of the order-j HOIF term."""
    if m < 2:
        raise ValueError(f"HOIF estimator needs m >= 2, got {m}")
    engine = engine or create_engine()
    parts = [
        (-1) ** j * hoif_term(j, feature_map, sample, engine) / math.perm(sample.n, j)
        for j in range(2, m + 1)
    ]
    return math.fsum(parts)


def motif_count(
    graph: SimpleGraph, spec: MotifSpec, engine: Optional[UStatEngine] = None
) -> int:
    """Number of induced copies of the motif in the graph."""
    engine = engine or create_engine()
    size = max(graph.vertices, default=-1) + 1
    if size < spec.vertex_count:
        return 0
    kernel = spec.kernel(adjacency_matrix(graph))
    raw = engine.u_statistic(kernel, Sample(np.arange(size)[:, None]))
    value = raw / spec.automorphisms
    rounded = round(value)
    if abs(value - rounded) >= 1e-6:
        raise NonIntegerResult(f"{spec.id} count {value} is not an integer")
    return int(rounded)


def motif_counts(
    graph: SimpleGraph, order: int, engine: Optional[UStatEngine] = None
) -> dict[str, int]:
    """Counts of every motif with `order` vertices (3 or 4)."""
    if order not in MOTIF_ORDERS:
        raise ValueError(f"motif order must be 3 or 4, got {order}")
    engine = engine or create_engine()
    return {rid: motif_count(graph, MOTIFS[rid], engine) for rid in MOTIF_ORDERS[order]}


def paired_sample(x: np.ndarray, y: np.ndarray) -> tuple[Sample, int]:
    """Stack X and Y columns side by side; returns the sample and the X width."""
    xs, ys = Sample(x), Sample(y)
    if xs.n != ys.n:
        raise DimensionMismatch(f"x has {xs.n} observations, y has {ys.n}")
    return Sample(np.hstack([xs.points, ys.points]).astype(np.float64)), xs.dim


def dcov_kernels(split: int) -> list[tuple[MDKernel, int]]:
    """The four signed order-4 kernels of dCov^2 on samples whose first `split` columns are X."""
    h1 = distance_component(slice(0, split), name="dx")
    h2 = distance_component(slice(split, None), name="dy")
    kernels = []
    for signature, sign in DCOV_TERMS:
        components = (h1, h2) + (ONE,) * (len(signature) - 2)
        kernels.append((MDKernel(components, signature, name=f"dcov{signature}"), sign))
    return kernels


def dcov_sum(sample: Sample, split: int, kind: str, engine: UStatEngine) -> float:
    if kind == "u":
        parts = [sign * engine.u_statistic(k, sample) for k, sign in dcov_kernels(split)]
    else:
        parts = [sign * engine.v_statistic(k, sample) for k, sign in dcov_kernels(split)]
    return math.fsum(parts)


def dcov_squared(
    x: np.ndarray, y: np.ndarray, kind: str = "u", engine: Optional[UStatEngine] = None
) -> float:
    """Squared distance covariance; kind "u" is the unbiased U form, "v" the classical V form."""
    if kind not in ("u", "v"):
        raise ValueError(f"kind must be 'u' or 'v', got {kind!r}")
    engine = engine or create_engine()
    sample, split = paired_sample(x, y)
    n = sample.n
    if n < 4:
        raise SampleTooSmall(f"dCov needs at least 4 observations, got {n}")
    total = dcov_sum(sample, split, kind, engine)
    return total / (math.perm(n, 4) if kind == "u" else n**4)


def builtin_kernels(spec: KernelSpec, data: np.ndarray) -> tuple[list[tuple[MDKernel, int]], Sample]:
    """Signed kernels and the sample for a CLI kernel spec; the statistic is their signed sum.

    HOIF rows are [A, Y, Z_1..Z_d]; motif data is an adjacency matrix; dcov
    rows hold the X columns first.
    """
    if spec.family == "prod2":
        return [(product_kernel(), 1)], Sample(data)
    if spec.family == "hoif":
        sample = Sample(data)
        if sample.dim < 3:
            raise DimensionMismatch("HOIF rows need columns A, Y and at least one covariate")
        return [(hoif_kernel(spec.order, leading_features(spec.features)), 1)], sample
    if spec.family == "motif":
        return [(MOTIFS[spec.motif].kernel(data), 1)], Sample(np.arange(data.shape[0])[:, None])
    if spec.family == "dcov":
        sample = Sample(data)
        if not 0 < spec.split < sample.dim:
            raise DimensionMismatch(f"dcov split {spec.split} leaves no Y columns")
        return dcov_kernels(spec.split), sample
    raise ValueError(f"unknown kernel family {spec.family!r}")
