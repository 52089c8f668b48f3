"""Exact U- and V-statistics of multiplicatively decomposable kernels."""

from __future__ import annotations

import itertools
import logging
import math
import os
import time
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import SampleTooSmall
from ..models import EngineConfig, StatisticReport
from ..utils.kernels import MDKernel, Sample, sparsify, tensorize
from ..utils.partitions import (
    SetPartition,
    coarsenings,
    induced_notation,
    mobius_coefficient,
    mobius_pair,
    partition_chunks,
)
from ..utils.tensors import (
    DenseTensor,
    EinsumNotation,
    count_flops,
    einsum,
    optimize_order,
    validate_notation,
)

logger = logging.getLogger(__name__)


@dataclass
class _Accumulation:
    value: float
    terms: int
    flops: int


@dataclass
class UStatEngine:
    """Evaluates V-statistics as one einsum and U-statistics as a Möbius-weighted sum of them.

    Every statistic is a sum, not a mean; the `*_mean` methods normalize.
    """

    config: EngineConfig = field(default_factory=EngineConfig)

    def tensorize(self, kernel: MDKernel, sample: Sample) -> list[DenseTensor]:
        return tensorize(kernel, sample, self.config)

    def _contract(
        self, tensors: Sequence[DenseTensor], notation: EinsumNotation
    ) -> tuple[float, int]:
        canon = validate_notation(notation)
        order = optimize_order(canon, self.config.order_strategy, self.config)
        value = einsum(tensors, canon, order, self.config).item()
        return value, count_flops(canon, order.order, tensors[0].extent)

    def v_statistic(
        self,
        kernel: MDKernel,
        sample: Sample,
        tensors: Optional[Sequence[DenseTensor]] = None,
    ) -> float:
        """Sum of the kernel over all of [n]^m."""
        tensors = tensors if tensors is not None else self.tensorize(kernel, sample)
        return self._contract(tensors, kernel.notation)[0]

    def restricted_v(
        self,
        kernel: MDKernel,
        sample: Sample,
        partition: SetPartition,
        tensors: Optional[Sequence[DenseTensor]] = None,
    ) -> float:
        """Sum over tuples constant on every block of the partition."""
        tensors = tensors if tensors is not None else self.tensorize(kernel, sample)
        return self._contract(tensors, induced_notation(kernel.signature, partition))[0]

    def _chunk(
        self,
        tensors: Sequence[DenseTensor],
        signature: Sequence[Sequence[int]],
        chunk: list[SetPartition],
    ) -> tuple[np.ndarray, int]:
        weighted = np.empty(len(chunk))
        flops = 0
        for k, pi in enumerate(chunk):
            value, cost = self._contract(tensors, induced_notation(signature, pi))
            weighted[k] = mobius_coefficient(pi) * value
            flops += cost
        return weighted, flops

    def _accumulate(
        self,
        tensors: Sequence[DenseTensor],
        kernel: MDKernel,
        use_sparsification: bool,
    ) -> _Accumulation:
        m = kernel.arity
        signature = kernel.signature
        if use_sparsification:
            tensors = sparsify(tensors, signature)
        chunks = partition_chunks(
            m, signature if use_sparsification else None, self.config.chunk_size, self.config
        )
        if self.config.threads == 1:
            results = [self._chunk(tensors, signature, c) for c in chunks]
        else:
            results = list(self._windowed(lambda c: self._chunk(tensors, signature, c), chunks))
        terms = np.concatenate([w for w, _ in results]) if results else np.zeros(0)
        logger.debug("accumulated %d V-terms for %s (sparsified=%s)",
                     terms.size, kernel.name, use_sparsification)
        return _Accumulation(float(np.sum(terms)), int(terms.size), sum(f for _, f in results))

    def _windowed(self, evaluate, chunks: Iterable[list[SetPartition]]) -> Iterator[tuple]:
        """Evaluate chunks on the pool, at most 2 * workers in flight, yielding in submission order."""
        workers = self.config.threads or os.cpu_count() or 1
        chunks = iter(chunks)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pending = deque(pool.submit(evaluate, c) for c in itertools.islice(chunks, 2 * workers))
            while pending:
                result = pending.popleft().result()
                for c in itertools.islice(chunks, 1):
                    pending.append(pool.submit(evaluate, c))
                yield result

    def _require(self, kernel: MDKernel, sample: Sample) -> None:
        if sample.n < kernel.arity:
            raise SampleTooSmall(
                f"order {kernel.arity} U-statistic needs n >= {kernel.arity}, got {sample.n}"
            )

    def u_statistic(
        self,
        kernel: MDKernel,
        sample: Sample,
        use_sparsification: bool = True,
        tensors: Optional[Sequence[DenseTensor]] = None,
    ) -> float:
        """Sum of the kernel over ordered m-tuples of distinct observations.

        With `use_sparsification=False` the full Bell sum over unsparsified
        tensors is evaluated instead; both give the same value.
        """
        self._require(kernel, sample)
        tensors = tensors if tensors is not None else self.tensorize(kernel, sample)
        return self._accumulate(tensors, kernel, use_sparsification).value

    def restricted_u(
        self,
        kernel: MDKernel,
        sample: Sample,
        partition: SetPartition,
        tensors: Optional[Sequence[DenseTensor]] = None,
    ) -> float:
        """Sum over tuples equal exactly within blocks, via Möbius inversion over coarsenings."""
        tensors = tensors if tensors is not None else self.tensorize(kernel, sample)
        parts = [
            mobius_pair(partition, rho) * self.restricted_v(kernel, sample, rho, tensors)
            for rho in coarsenings(partition)
        ]
        return float(np.sum(parts))

    def u_statistic_mean(self, kernel: MDKernel, sample: Sample) -> float:
        return self.u_statistic(kernel, sample) / math.perm(sample.n, kernel.arity)

    def v_statistic_mean(self, kernel: MDKernel, sample: Sample) -> float:
        return self.v_statistic(kernel, sample) / sample.n**kernel.arity

    def evaluate(
        self, kernel: MDKernel, sample: Sample, kind: str = "u", label: Optional[str] = None
    ) -> StatisticReport:
        """Compute U or V with timings split between tensorization and contraction."""
        if kind not in ("u", "v"):
            raise ValueError(f"kind must be 'u' or 'v', got {kind!r}")
        if kind == "u":
            self._require(kernel, sample)

        start = time.perf_counter()
        tensors = self.tensorize(kernel, sample)
        tensorized = time.perf_counter()
        if kind == "u":
            result = self._accumulate(tensors, kernel, True)
        else:
            value, flops = self._contract(tensors, kernel.notation)
            result = _Accumulation(value, 1, flops)
        done = time.perf_counter()
        logger.debug("%s-statistic of %s: tensorize %.3fs, contract %.3fs",
                     kind, kernel.name, tensorized - start, done - tensorized)

        return StatisticReport(
            kind=kind,
            kernel=label or kernel.name,
            value=result.value,
            n=sample.n,
            order=kernel.arity,
            terms=result.terms,
            tensorization_seconds=tensorized - start,
            contraction_seconds=done - tensorized,
            executed_flops=str(result.flops),
        )


def create_engine(config: Optional[EngineConfig] = None) -> UStatEngine:
    """Factory function to create an engine."""
    return UStatEngine(config=config or EngineConfig())
