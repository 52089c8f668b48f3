"""Complexity reports: treewidth bounds and per-width V-term counts of a U-statistic."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidSignature
from ..models import (
    ComplexityReport,
    EngineConfig,
    GraphSummary,
    Heuristic,
    TermCounts,
    TreewidthBounds,
    TreewidthReport,
)
from ..utils.graphs import (
    SimpleGraph,
    decomposition_graph,
    degeneracy,
    quotient_graph,
    treewidth_exact,
    treewidth_upper,
)
from ..utils.partitions import bell_number, enumerate_partitions, induced_notation
from ..utils.tensors import count_flops, optimize_order, validate_notation

logger = logging.getLogger(__name__)


def chain_signature(m: int) -> tuple[tuple[int, int], ...]:
    """((0,1), (1,2), ..., (m-2, m-1)): the HOIF chain."""
    if m < 2:
        raise InvalidSignature(f"a chain needs at least 2 indices, got {m}")
    return tuple((i, i + 1) for i in range(m - 1))


@dataclass
class ComplexityAnalyzer:
    """Treewidth and term-count analysis of signatures.

    Quotient treewidths are cached by canonical form, since many partitions
    induce the same quotient graph.
    """

    config: EngineConfig = field(default_factory=EngineConfig)
    _widths: dict[tuple[tuple[int, ...], ...], int] = field(default_factory=dict, repr=False)

    def exact_width(self, graph: SimpleGraph) -> int:
        key = graph.canonical_form()
        if key not in self._widths:
            limit = max(self.config.treewidth_exact_limit, graph.vertex_count)
            config = self.config.model_copy(update={"treewidth_exact_limit": limit})
            self._widths[key] = treewidth_exact(graph, config)[0]
        return self._widths[key]

    def treewidth_report(self, graph: SimpleGraph, exact: bool = False) -> TreewidthReport:
        """Degeneracy, both heuristic widths, and optionally the exact width."""
        by_degree, degree_order = treewidth_upper(graph, Heuristic.MIN_DEGREE)
        by_fill, fill_order = treewidth_upper(graph, Heuristic.MIN_FILL)
        witness = fill_order if by_fill <= by_degree else degree_order
        width = None
        if exact:
            width, witness = treewidth_exact(graph, self.config)
        return TreewidthReport(
            vertices=graph.vertex_count,
            edges=graph.edge_count,
            degeneracy=degeneracy(graph),
            min_degree=by_degree,
            min_fill=by_fill,
            exact=width,
            order=list(witness.order),
        )

    def term_counts(self, signature: Sequence[Sequence[int]], m: int) -> TermCounts:
        """Histogram of quotient treewidths over the partitions that survive sparsification."""
        graph = decomposition_graph(signature)
        by_width: Counter[int] = Counter()
        for pi in enumerate_partitions(m, signature, self.config):
            by_width[self.exact_width(quotient_graph(graph, pi))] += 1
        sparsified = sum(by_width.values())
        logger.debug("m=%d: %d of %d partitions survive sparsification", m, sparsified, bell_number(m))
        return TermCounts(
            bell=bell_number(m),
            sparsified=sparsified,
            by_width=dict(sorted(by_width.items())),
            M=max(by_width, default=0),
        )

    def planned_flops(self, signature: Sequence[Sequence[int]], m: int, n: int) -> int:
        """Multiply-adds of the elimination paths the engine would run at extent n."""
        total = 0
        for pi in enumerate_partitions(m, signature, self.config):
            canon = validate_notation(induced_notation(signature, pi))
            order = optimize_order(canon, self.config.order_strategy, self.config)
            total += count_flops(canon, order.order, n)
        return total

    def complexity_report(
        self,
        signature: Sequence[Sequence[int]],
        m: Optional[int] = None,
        n: int = 1,
        planned: bool = False,
    ) -> ComplexityReport:
        """Full report; `planned` also counts the flops of the engine's actual paths."""
        signature = tuple(tuple(int(i) for i in t) for t in signature)
        if not signature or any(not t for t in signature):
            raise InvalidSignature("signature needs nonempty tuples")
        used = {i for t in signature for i in t}
        m = len(used) if m is None else m
        if used != set(range(m)):
            raise InvalidSignature(f"signature indices {sorted(used)} do not cover [{m}]")

        graph = decomposition_graph(signature)
        upper = min(
            treewidth_upper(graph, Heuristic.MIN_DEGREE)[0],
            treewidth_upper(graph, Heuristic.MIN_FILL)[0],
        )
        exact = None
        if graph.vertex_count <= self.config.treewidth_exact_limit:
            exact = treewidth_exact(graph, self.config)[0]
        terms = self.term_counts(signature, m)
        estimate = sum(count * n ** (width + 1) * len(signature)
                       for width, count in terms.by_width.items())
        return ComplexityReport(
            signature=list(signature),
            m=m,
            n=n,
            graph=GraphSummary(vertices=graph.vertices, edges=graph.edges),
            treewidth=TreewidthBounds(lower=degeneracy(graph), upper=upper, exact=exact),
            terms=terms,
            flops_estimate=str(estimate),
            executed_flops=str(self.planned_flops(signature, m, n)) if planned else None,
        )


def create_analyzer(config: Optional[EngineConfig] = None) -> ComplexityAnalyzer:
    """Factory function to create an analyzer."""
    return ComplexityAnalyzer(config=config or EngineConfig())
