"""Building blocks: tensors and einsum, set partitions, graphs, kernels and input readers."""

from .graphs import SimpleGraph, decomposition_graph, quotient_graph, treewidth_exact
from .kernels import MOTIFS, Component, MDKernel, Sample
from .partitions import SetPartition, enumerate_partitions, mobius_coefficient
from .tensors import DenseTensor, EinsumNotation, einsum

__all__ = [
    "MOTIFS",
    "Component",
    "DenseTensor",
    "EinsumNotation",
    "MDKernel",
    "Sample",
    "SetPartition",
    "SimpleGraph",
    "decomposition_graph",
    "einsum",
    "enumerate_partitions",
    "mobius_coefficient",
    "quotient_graph",
    "treewidth_exact",
]
