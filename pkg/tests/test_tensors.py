"""Tests for dense tensors, notations and einsum by single-index elimination."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from tensor_ustat.errors import (
    IndexAbsent,
    InvalidOutput,
    InvalidSignature,
    MemoryCapExceeded,
    ShapeMismatch,
    TooLargeForExhaustive,
)
from tensor_ustat.models import EngineConfig, OrderStrategy
from tensor_ustat.utils.brute_force import naive_einsum
from tensor_ustat.utils.graphs import (
    EliminationOrder,
    decomposition_graph,
    elimination_width,
    treewidth_exact,
)
from tensor_ustat.utils.tensors import (
    DenseTensor,
    EinsumNotation,
    count_flops,
    einsum,
    eliminate_index,
    elimination_sequence,
    optimize_order,
    tensor_from_function,
    validate_notation,
)


def random_tensors(rng, notation: EinsumNotation, extent: int) -> list[DenseTensor]:
    return [DenseTensor(rng.uniform(-1, 1, size=(extent,) * len(t)), extent) for t in notation.inputs]


def random_notation(rng, max_indices: int = 5, max_inputs: int = 4) -> EinsumNotation:
    m = int(rng.integers(1, max_indices + 1))
    inputs = []
    for _ in range(rng.integers(1, max_inputs + 1)):
        size = int(rng.integers(1, 4))
        inputs.append(tuple(int(i) for i in rng.integers(0, m, size=size)))
    used = sorted({i for t in inputs for i in t})
    k = int(rng.integers(0, min(2, len(used)) + 1))
    output = tuple(int(i) for i in rng.choice(used, size=k, replace=False))
    return EinsumNotation(tuple(inputs), output)


# ---------------------------------------------------------------- DenseTensor


def test_tensor_from_function_scalar():
    tensor = tensor_from_function(0, 5, lambda: 3.5)
    assert tensor.order == 0
    assert tensor.item() == 3.5
    assert tensor.flat.tolist() == [3.5]


def test_tensor_from_function_is_row_major():
    tensor = tensor_from_function(2, 2, lambda i, j: i + 2 * j)
    assert tensor.flat.tolist() == [0.0, 2.0, 1.0, 3.0]


def test_tensor_from_function_matches_loop(rng):
    points = rng.normal(size=4)
    tensor = tensor_from_function(3, 4, lambda i, j, k: points[i] * points[j] - points[k])
    for i, j, k in itertools.product(range(4), repeat=3):
        assert tensor.data[i, j, k] == pytest.approx(points[i] * points[j] - points[k])


def test_tensor_from_function_respects_memory_cap():
    with pytest.raises(MemoryCapExceeded):
        tensor_from_function(2, 4, lambda i, j: 0.0, EngineConfig(memory_cap=10))


def test_dense_tensor_is_read_only_and_square():
    tensor = DenseTensor(np.ones((3, 3)))
    assert tensor.extent == 3
    with pytest.raises(ValueError):
        tensor.data[0, 0] = 2.0
    with pytest.raises(ShapeMismatch):
        DenseTensor(np.ones((2, 3)))


# ---------------------------------------------------------------- notation


def test_validate_notation_relabels_by_first_appearance():
    canon = validate_notation(EinsumNotation(((7, 9), (9, 3))))
    assert canon.inputs == ((0, 1), (1, 2))
    assert canon.output == ()


@pytest.mark.parametrize(
    "inputs, output",
    [(((1, 2),), (3,)), (((1, 2), (2, 3)), (1, 1))],
)
def test_validate_notation_rejects_bad_output(inputs, output):
    with pytest.raises(InvalidOutput):
        validate_notation(EinsumNotation(inputs, output))


def test_validate_notation_rejects_empty():
    with pytest.raises(InvalidSignature):
        validate_notation(EinsumNotation(()))
    with pytest.raises(InvalidSignature):
        validate_notation(EinsumNotation(((0, 1), ())))


def test_notation_string_uses_letters():
    assert str(EinsumNotation(((0, 1), (1, 2)), (0, 2))) == "ab,bc->ac"


# ---------------------------------------------------------------- einsum


def test_einsum_matrix_multiplication_of_identities():
    eye = DenseTensor(np.eye(2))
    result = einsum([eye, eye], EinsumNotation(((1, 2), (2, 3)), (1, 3)))
    np.testing.assert_array_equal(result.data, np.eye(2))


def test_einsum_chain_of_ones_counts_terms():
    ones = DenseTensor(np.ones((2, 2)))
    result = einsum([ones] * 3, EinsumNotation(((1, 2), (2, 3), (3, 4))))
    assert result.order == 0
    assert result.item() == 16.0


def test_einsum_partial_trace_shape_matches_naive_loops(rng):
    notation = EinsumNotation(((1, 2, 3), (2, 4, 5), (3, 6)), (1, 5, 6))
    tensors = random_tensors(rng, notation, 3)
    result = einsum(tensors, notation)
    np.testing.assert_allclose(result.data, naive_einsum(tensors, notation), rtol=1e-12, atol=1e-12)


def test_einsum_reads_diagonals_for_repeated_indices(rng):
    table = rng.normal(size=(4, 4))
    result = einsum([DenseTensor(table)], EinsumNotation(((0, 0),)))
    assert result.item() == pytest.approx(np.trace(table))


def test_einsum_oracle_equivalence(rng):
    for _ in range(150):
        notation = random_notation(rng)
        extent = int(rng.integers(1, 6))
        tensors = random_tensors(rng, notation, extent)
        expected = naive_einsum(tensors, notation)
        result = einsum(tensors, notation)
        np.testing.assert_allclose(result.data, expected, rtol=1e-10, atol=1e-10)


def test_einsum_is_order_independent(rng):
    notation = validate_notation(EinsumNotation(((0, 1), (1, 2), (2, 3), (3, 0), (0, 2))))
    tensors = random_tensors(rng, notation, 4)
    baseline = einsum(tensors, notation).item()
    for order in itertools.permutations(range(4)):
        graph = notation.graph()
        elimination = EliminationOrder(order, elimination_width(graph, order))
        assert einsum(tensors, notation, elimination).item() == pytest.approx(baseline, rel=1e-9)


def test_einsum_rejects_mismatched_shapes():
    with pytest.raises(ShapeMismatch):
        einsum([DenseTensor(np.ones((2, 2)))], EinsumNotation(((0, 1), (1, 2))))
    with pytest.raises(ShapeMismatch):
        einsum(
            [DenseTensor(np.ones((2, 2))), DenseTensor(np.ones((3, 3)))],
            EinsumNotation(((0, 1), (1, 2))),
        )


def test_einsum_enforces_memory_cap_on_intermediates():
    ones = DenseTensor(np.ones((4, 4)))
    with pytest.raises(MemoryCapExceeded):
        einsum([ones, ones], EinsumNotation(((0, 1), (1, 2)), (0, 2)), config=EngineConfig(memory_cap=8))


# ---------------------------------------------------------------- eliminate_index


def test_eliminate_index_caps_the_joint_space_of_three_operands():
    ones = np.ones((3, 3))
    operands = [(ones, (0, 1)), (ones, (1, 2)), (ones, (1, 3))]
    out, tup = eliminate_index(operands, 1, EngineConfig(memory_cap=81))
    assert tup == (0, 2, 3)
    np.testing.assert_allclose(out, np.full((3, 3, 3), 3.0))
    with pytest.raises(MemoryCapExceeded):
        eliminate_index(operands, 1, EngineConfig(memory_cap=30))


def test_eliminate_index_single_tensor_is_marginal(rng):
    table = rng.normal(size=(3, 3))
    out, tup = eliminate_index([(table, (1, 2))], 2)
    assert tup == (1,)
    np.testing.assert_allclose(out, table.sum(axis=1))


def test_eliminate_index_two_matrices_is_product(rng):
    a, b = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    out, tup = eliminate_index([(a, (1, 2)), (b, (2, 3))], 2)
    assert tup == (1, 3)
    np.testing.assert_allclose(out, a @ b)


def test_eliminate_index_sequence_preserves_sum():
    ones = np.ones((2, 2))
    work = [(ones, (1, 2)), (ones, (2, 3)), (ones, (3, 4))]
    for index in (2, 3, 1, 4):
        touched = [op for op in work if index in op[1]]
        work = [op for op in work if index not in op[1]]
        work.append(eliminate_index(touched, index))
    assert len(work) == 1
    assert float(work[0][0]) == 16.0


def test_eliminate_index_requires_the_index():
    with pytest.raises(IndexAbsent):
        eliminate_index([(np.ones((2, 2)), (1, 2)), (np.ones(2), (3,))], 2)


# ---------------------------------------------------------------- orders


def test_exhaustive_order_on_chain_has_width_one():
    order = optimize_order(EinsumNotation(((0, 1), (1, 2), (2, 3))), OrderStrategy.EXHAUSTIVE)
    assert sorted(order.order) == [0, 1, 2, 3]
    assert order.predicted_width == 1


@pytest.mark.parametrize("strategy", list(OrderStrategy))
def test_triangle_has_width_two_under_any_strategy(strategy):
    order = optimize_order(EinsumNotation(((0, 1), (1, 2), (2, 0))), strategy)
    assert order.predicted_width == 2


def test_exhaustive_order_on_clique_signature():
    clique = EinsumNotation(tuple(itertools.combinations(range(4), 2)))
    assert optimize_order(clique, OrderStrategy.EXHAUSTIVE).predicted_width == 3


def test_exhaustive_order_respects_limit():
    notation = EinsumNotation(tuple((i, i + 1) for i in range(5)))
    with pytest.raises(TooLargeForExhaustive):
        optimize_order(notation, OrderStrategy.EXHAUSTIVE, EngineConfig(exhaustive_limit=4))


def test_output_indices_are_eliminated_last():
    order = optimize_order(EinsumNotation(((0, 1), (1, 2), (2, 3)), (0, 3)))
    assert order.order[-2:] == (0, 3)


def test_single_use_indices_go_first():
    order = optimize_order(EinsumNotation(((0, 1), (1, 2), (2, 0), (2, 3))))
    assert order.order[0] == 3


def test_predicted_width_is_recomputable(rng):
    for _ in range(50):
        notation = validate_notation(random_notation(rng, max_indices=6))
        for strategy in OrderStrategy:
            order = optimize_order(notation, strategy)
            assert sorted(order.order) == sorted(notation.indices)
            assert order.predicted_width == elimination_width(notation.graph(), order.order)


def test_exhaustive_width_equals_treewidth(rng):
    for _ in range(40):
        notation = validate_notation(random_notation(rng, max_indices=6))
        notation = EinsumNotation(notation.inputs)
        order = optimize_order(notation, OrderStrategy.EXHAUSTIVE)
        width, _ = treewidth_exact(decomposition_graph(notation.inputs))
        assert order.predicted_width == width


def test_intermediates_stay_within_predicted_peak(rng):
    for _ in range(40):
        notation = validate_notation(random_notation(rng, max_indices=6))
        order = optimize_order(notation)
        peak = max(
            len(t) for step in elimination_sequence(notation, order.order) for t in step.inputs
        )
        assert 3**peak <= order.predicted_peak_entries(3)


def test_elimination_sequence_starts_with_the_notation():
    notation = EinsumNotation(((0, 1), (1, 2), (2, 3)))
    steps = elimination_sequence(notation, (1, 0, 2, 3))
    assert steps[0] == notation
    assert steps[1].inputs == ((2, 3), (0, 2))
    assert len(steps) == 5


def test_count_flops_of_matrix_chain():
    notation = EinsumNotation(((0, 1), (1, 2)), (0, 2))
    # one step over three indices with two tensors, nothing left to assemble
    assert count_flops(notation, (1, 0, 2), 10) == 2 * 10**3
