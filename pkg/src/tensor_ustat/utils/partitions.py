"""Set partitions of [m], the refinement order, Möbius coefficients and induced notations.

Partitions are stored as restricted-growth strings over the 0-based ground set
{0, ..., m-1}; block labels follow first use, so blocks are ordered by their
smallest element.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from ..errors import (
    GroundSetMismatch,
    InvalidSignature,
    NotRefinement,
    OrderTooLarge,
    OverflowDetected,
)
from ..models import EngineConfig
from .tensors import EinsumNotation

logger = logging.getLogger(__name__)

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class SetPartition:
    """Partition of {0, ..., m-1} in canonical restricted-growth encoding."""

    rgs: tuple[int, ...]

    def __post_init__(self) -> None:
        rgs = tuple(int(b) for b in self.rgs)
        if not rgs:
            raise ValueError("a partition needs a nonempty ground set")
        top = -1
        for b in rgs:
            if b < 0 or b > top + 1:
                raise ValueError(f"{rgs} is not a restricted-growth string")
            top = max(top, b)
        object.__setattr__(self, "rgs", rgs)

    @classmethod
    def _trusted(cls, rgs: tuple[int, ...]) -> SetPartition:
        obj = object.__new__(cls)
        object.__setattr__(obj, "rgs", rgs)
        return obj

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], m: Optional[int] = None) -> SetPartition:
        """Build from any block listing; elements are 0-based."""
        blocks = [sorted(set(block)) for block in blocks]
        elements = sorted(e for block in blocks for e in block)
        m = len(elements) if m is None else m
        if elements != list(range(m)):
            raise GroundSetMismatch(f"blocks {blocks} do not partition [{m}]")
        owner = {e: k for k, block in enumerate(blocks) for e in block}
        relabel: dict[int, int] = {}
        rgs = []
        for e in range(m):
            rgs.append(relabel.setdefault(owner[e], len(relabel)))
        return cls._trusted(tuple(rgs))

    @classmethod
    def finest(cls, m: int) -> SetPartition:
        return cls._trusted(tuple(range(m)))

    @classmethod
    def coarsest(cls, m: int) -> SetPartition:
        return cls._trusted((0,) * m)

    @property
    def m(self) -> int:
        return len(self.rgs)

    @cached_property
    def size(self) -> int:
        return max(self.rgs) + 1

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        found: list[list[int]] = [[] for _ in range(self.size)]
        for e, b in enumerate(self.rgs):
            found[b].append(e)
        return tuple(tuple(block) for block in found)

    def __str__(self) -> str:
        inner = ",".join("{" + ",".join(str(e + 1) for e in block) + "}" for block in self.blocks)
        return "{" + inner + "}"


def bell_number(m: int) -> int:
    """Number of partitions of an m-element set (Bell triangle)."""
    row = [1]
    for _ in range(m - 1):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[-1] if m > 0 else 1


def _conflicts(m: int, signature: Optional[Sequence[Sequence[int]]]) -> list[tuple[int, ...]]:
    """For each element, the smaller elements it shares a signature tuple with."""
    found: list[set[int]] = [set() for _ in range(m)]
    for tup in signature or ():
        members = set(tup)
        if not members <= set(range(m)):
            raise InvalidSignature(f"tuple {tuple(tup)} has indices outside [{m}]")
        for i in members:
            found[i].update(j for j in members if j < i)
    return [tuple(sorted(c)) for c in found]


def enumerate_partitions(
    m: int,
    signature: Optional[Sequence[Sequence[int]]] = None,
    config: Optional[EngineConfig] = None,
) -> Iterator[SetPartition]:
    """Yield every partition of [m] once, in lexicographic rgs order.

    With a signature, only partitions passing the sparsification filter are
    produced; the filter prunes during generation.
    """
    config = config or EngineConfig()
    if not 1 <= m <= config.partition_order_limit:
        raise OrderTooLarge(f"m={m} outside 1..{config.partition_order_limit}")
    conflicts = _conflicts(m, signature)
    rgs = [0] * m
    if m == 1:
        yield SetPartition._trusted((0,))
        return
    top = [0] * m
    next_label = [0] * m
    i = 1
    while i >= 1:
        limit = top[i - 1] + 1
        b = next_label[i]
        while b <= limit and any(rgs[j] == b for j in conflicts[i]):
            b += 1
        if b > limit:
            i -= 1
            continue
        rgs[i] = b
        next_label[i] = b + 1
        top[i] = max(top[i - 1], b)
        if i == m - 1:
            yield SetPartition._trusted(tuple(rgs))
        else:
            i += 1
            next_label[i] = 0


def count_partitions(
    m: int,
    signature: Optional[Sequence[Sequence[int]]] = None,
    config: Optional[EngineConfig] = None,
) -> int:
    """|Π_m| or, with a signature, |Π_m^A|; counted by enumeration."""
    return sum(1 for _ in enumerate_partitions(m, signature, config))


def partition_chunks(
    m: int,
    signature: Optional[Sequence[Sequence[int]]] = None,
    size: int = 64,
    config: Optional[EngineConfig] = None,
) -> Iterator[list[SetPartition]]:
    """Consecutive chunks of the enumeration, for ordered parallel evaluation."""
    stream = enumerate_partitions(m, signature, config)
    while chunk := list(itertools.islice(stream, size)):
        yield chunk


def _checked(value: int) -> int:
    if abs(value) > _INT64_MAX:
        raise OverflowDetected(f"coefficient {value} exceeds 64 bits")
    return value


def mobius_coefficient(partition: SetPartition) -> int:
    """mu_pi = (-1)^(m - |pi|) * prod over blocks of (|C| - 1)!."""
    sign = -1 if (partition.m - partition.size) % 2 else 1
    return _checked(sign * math.prod(math.factorial(len(c) - 1) for c in partition.blocks))


def is_refinement(pi: SetPartition, rho: SetPartition) -> bool:
    """True iff every block of pi lies inside a block of rho."""
    if pi.m != rho.m:
        raise GroundSetMismatch(f"partitions of [{pi.m}] and [{rho.m}]")
    return all(len({rho.rgs[e] for e in block}) == 1 for block in pi.blocks)


def mobius_pair(pi: SetPartition, rho: SetPartition) -> int:
    """Möbius function of the partition lattice on a pair pi <= rho."""
    if not is_refinement(pi, rho):
        raise NotRefinement(f"{pi} does not refine {rho}")
    inside = [0] * rho.size
    for block in pi.blocks:
        inside[rho.rgs[block[0]]] += 1
    sign = -1 if (pi.size - rho.size) % 2 else 1
    return _checked(sign * math.prod(math.factorial(k - 1) for k in inside))


def coarsenings(pi: SetPartition) -> Iterator[SetPartition]:
    """Every rho with pi <= rho, obtained by merging blocks of pi."""
    for merge in enumerate_partitions(pi.size):
        yield SetPartition._trusted(tuple(merge.rgs[b] for b in pi.rgs))


def passes_sparsification(partition: SetPartition, signature: Sequence[Sequence[int]]) -> bool:
    """True iff no block meets any signature tuple in two or more indices."""
    rgs = partition.rgs
    for tup in signature:
        members = set(tup)
        if len({rgs[i] for i in members}) != len(members):
            return False
    return True


def induced_notation(signature: Sequence[Sequence[int]], partition: SetPartition) -> EinsumNotation:
    """Replace each index by the label of its block; the output is empty."""
    used = {i for tup in signature for i in tup}
    if used != set(range(partition.m)):
        raise GroundSetMismatch(f"signature indices {sorted(used)} are not [{partition.m}]")
    rgs = partition.rgs
    return EinsumNotation(tuple(tuple(rgs[i] for i in tup) for tup in signature), ())
