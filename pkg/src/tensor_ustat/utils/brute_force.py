"""Literal-definition oracles: nested-loop einsum, U/V sums and restricted sums.

These loop in Python and exist to cross-check the fast paths on small inputs.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import DimensionMismatch, SampleTooSmall, TooManyTerms
from ..models import EngineConfig
from .kernels import MDKernel, Sample
from .partitions import SetPartition
from .tensors import DenseTensor, EinsumNotation

logger = logging.getLogger(__name__)

FlatKernel = Callable[..., float]


def _arity(kernel: FlatKernel, m: Optional[int]) -> int:
    if m is not None:
        return m
    if isinstance(kernel, MDKernel):
        return kernel.arity
    raise TypeError("a flat kernel needs its order m")


def _guard(terms: int, config: EngineConfig) -> None:
    if terms > config.brute_force_cap:
        raise TooManyTerms(f"{terms} terms exceeds brute-force cap {config.brute_force_cap}")


def _sum(kernel: FlatKernel, sample: Sample, tuples: Iterable[Sequence[int]]) -> float:
    points = sample.points
    return math.fsum(kernel(*(points[i] for i in alpha)) for alpha in tuples)


def u_brute_force(
    kernel: FlatKernel,
    sample: Sample,
    m: Optional[int] = None,
    config: Optional[EngineConfig] = None,
) -> float:
    """Sum of the kernel over every ordered m-tuple of distinct observations."""
    config = config or EngineConfig()
    m = _arity(kernel, m)
    if sample.n < m:
        raise SampleTooSmall(f"order {m} needs at least {m} observations, got {sample.n}")
    _guard(math.perm(sample.n, m), config)
    return _sum(kernel, sample, itertools.permutations(range(sample.n), m))


def v_brute_force(
    kernel: FlatKernel,
    sample: Sample,
    m: Optional[int] = None,
    config: Optional[EngineConfig] = None,
) -> float:
    """Sum of the kernel over all of [n]^m."""
    config = config or EngineConfig()
    m = _arity(kernel, m)
    _guard(sample.n**m, config)
    return _sum(kernel, sample, itertools.product(range(sample.n), repeat=m))


def _expand(partition: SetPartition, assignment: Sequence[int]) -> tuple[int, ...]:
    return tuple(assignment[b] for b in partition.rgs)


def restricted_u_brute(
    kernel: FlatKernel,
    sample: Sample,
    partition: SetPartition,
    config: Optional[EngineConfig] = None,
) -> float:
    """Sum over tuples whose positions are equal exactly when they share a block."""
    config = config or EngineConfig()
    if sample.n < partition.size:
        return 0.0
    _guard(math.perm(sample.n, partition.size), config)
    tuples = (
        _expand(partition, a) for a in itertools.permutations(range(sample.n), partition.size)
    )
    return _sum(kernel, sample, tuples)


def restricted_v_brute(
    kernel: FlatKernel,
    sample: Sample,
    partition: SetPartition,
    config: Optional[EngineConfig] = None,
) -> float:
    """Sum over tuples that are constant on every block, filtered from all of [n]^m."""
    config = config or EngineConfig()
    m = partition.m
    _guard(sample.n**m, config)
    tuples = (
        alpha
        for alpha in itertools.product(range(sample.n), repeat=m)
        if all(len({alpha[e] for e in block}) == 1 for block in partition.blocks)
    )
    return _sum(kernel, sample, tuples)


def naive_einsum(
    tensors: Sequence[DenseTensor],
    notation: EinsumNotation,
    config: Optional[EngineConfig] = None,
) -> np.ndarray:
    """Einsum by looping over every assignment of every index."""
    config = config or EngineConfig()
    indices = notation.indices
    extent = tensors[0].extent
    _guard(extent ** len(indices), config)
    out = np.zeros((extent,) * len(notation.output))
    position = {i: k for k, i in enumerate(indices)}
    for values in itertools.product(range(extent), repeat=len(indices)):
        term = 1.0
        for tensor, tup in zip(tensors, notation.inputs):
            term *= tensor.data[tuple(values[position[i]] for i in tup)]
        out[tuple(values[position[i]] for i in notation.output)] += term
    return out


def dcov_oracle(x: np.ndarray, y: np.ndarray) -> float:
    """Squared distance covariance straight from its 4-permutation sum, one i_1 slice at a time."""
    x = Sample(x).points.astype(np.float64)
    y = Sample(y).points.astype(np.float64)
    n = x.shape[0]
    if y.shape[0] != n:
        raise DimensionMismatch(f"x has {n} rows, y has {y.shape[0]}")
    if n < 4:
        raise SampleTooSmall(f"dCov needs at least 4 observations, got {n}")
    a = cdist(x, x)
    b = cdist(y, y)
    idx = np.arange(n)
    distinct = (
        (idx[:, None, None] != idx[None, :, None])
        & (idx[:, None, None] != idx[None, None, :])
        & (idx[None, :, None] != idx[None, None, :])
    )
    partials = []
    for i1 in range(n):
        # axes (i2, i3, i4)
        inner = (
            b[None, :, :]
            + b[i1, :][:, None, None]
            - b[i1, :][None, :, None]
            - b[:, None, :]
        )
        mask = distinct & (idx[:, None, None] != i1) & (idx[None, :, None] != i1) & (
            idx[None, None, :] != i1
        )
        partials.append(np.sum(np.where(mask, a[i1, :][:, None, None] * inner, 0.0)))
    return math.fsum(partials) / math.perm(n, 4)
