"""Configuration and report models for tensor-ustat."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class OrderStrategy(str, Enum):
    """Strategies for choosing a vertex-elimination order."""

    GREEDY_MIN_DEGREE = "greedy-min-degree"
    GREEDY_MIN_FILL = "greedy-min-fill"
    EXHAUSTIVE = "exhaustive"


class Heuristic(str, Enum):
    """Elimination heuristics used for treewidth upper bounds."""

    MIN_DEGREE = "min-degree"
    MIN_FILL = "min-fill"


class EngineConfig(BaseModel):
    """Limits and knobs shared by every computation."""

    memory_cap: int = Field(2**31, gt=0, description="Maximum entries of any single tensor")
    exhaustive_limit: int = Field(12, ge=1, description="Max indices for exhaustive order search")
    treewidth_exact_limit: int = Field(10, ge=1, description="Max vertices for exact treewidth")
    partition_order_limit: int = Field(14, ge=1, description="Max m for partition enumeration")
    brute_force_cap: int = Field(10**7, gt=0, description="Max terms for brute-force oracles")
    order_strategy: OrderStrategy = Field(
        OrderStrategy.GREEDY_MIN_FILL, description="Elimination order strategy for einsum"
    )
    threads: Optional[int] = Field(
        None, ge=1, description="Worker threads for per-partition evaluation (None = all cores)"
    )
    strict_finite: bool = Field(False, description="Reject NaN/inf kernel outputs at tensorization")
    chunk_size: int = Field(64, ge=1, description="Partitions per parallel work unit")

    model_config = {"frozen": True}


class StatisticReport(BaseModel):
    """Result of a U- or V-statistic computation with its timing breakdown."""

    kind: str = Field(..., description="'u' or 'v'")
    kernel: str = Field(..., description="Kernel spec the value was computed for")
    value: float = Field(..., description="Value of the statistic (a sum, not a mean)")
    n: int = Field(..., description="Sample size")
    order: int = Field(..., description="Kernel arity m")
    terms: int = Field(..., description="Number of einsum evaluations")
    tensorization_seconds: float = Field(0.0, description="Kernel evaluation and tensorization")
    contraction_seconds: float = Field(0.0, description="Einsum contraction time")
    executed_flops: str = Field("0", description="Counted multiply-adds, decimal string")


class GraphSummary(BaseModel):
    """Vertex and edge listing of a decomposition graph."""

    vertices: list[int]
    edges: list[tuple[int, int]]


class TreewidthBounds(BaseModel):
    """Lower (degeneracy), upper (best heuristic) and optional exact treewidth."""

    lower: int
    upper: int
    exact: Optional[int] = None

    @model_validator(mode="after")
    def _sandwich(self) -> "TreewidthBounds":
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact is not None and not (self.lower <= self.exact <= self.upper):
            raise ValueError("exact treewidth outside its bounds")
        return self


class TermCounts(BaseModel):
    """V-statistic term counts of a U-to-V decomposition."""

    bell: int = Field(..., description="Partitions before sparsification")
    sparsified: int = Field(..., description="Partitions surviving the sparsification filter")
    by_width: dict[int, int] = Field(..., description="Treewidth of quotient graph -> count")
    M: int = Field(..., description="Largest quotient treewidth")

    @model_validator(mode="after")
    def _consistent(self) -> "TermCounts":
        if sum(self.by_width.values()) != self.sparsified:
            raise ValueError("by_width counts do not sum to the sparsified total")
        if self.by_width and max(self.by_width) != self.M:
            raise ValueError("M is not the largest width in by_width")
        return self


class ComplexityReport(BaseModel):
    """Complexity analysis of computing a U-statistic with a given signature.

    Serialized as the `analyze` command's JSON document; field order is the key order.
    """

    schema_version: int = Field(1, alias="schema", description="JSON schema version")
    signature: list[tuple[int, ...]]
    m: int
    n: int
    graph: GraphSummary
    treewidth: TreewidthBounds
    terms: TermCounts
    flops_estimate: str = Field(..., description="Sum_l N_l * n^(l+1) * |A|, decimal string")
    executed_flops: Optional[str] = Field(
        None, description="Counted multiply-adds of the planned elimination paths"
    )

    model_config = {"populate_by_name": True}


class TreewidthReport(BaseModel):
    """Treewidth bounds of a graph and the witness order of the best width found."""

    vertices: int
    edges: int
    degeneracy: int
    min_degree: int
    min_fill: int
    exact: Optional[int] = None
    order: list[int] = Field(default_factory=list, description="Witness elimination order")


class MotifReport(BaseModel):
    """Motif counts of a graph."""

    vertices: int
    edges: int
    order: int
    counts: dict[str, int]


class DcovReport(BaseModel):
    """Squared distance covariance with an optional oracle cross-check."""

    n: int
    value: float
    oracle: Optional[float] = None
    relative_error: Optional[float] = None
