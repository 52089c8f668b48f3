"""Tests for kernel types, tensorization, sparsification and the built-in kernels."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from tensor_ustat.errors import (
    ComponentEvaluationError,
    InvalidSignature,
    MemoryCapExceeded,
    ShapeMismatch,
)
from tensor_ustat.models import EngineConfig
from tensor_ustat.utils.kernels import (
    MOTIFS,
    Component,
    HOIFSpec,
    MDKernel,
    Sample,
    distance_component,
    hoif_flat_kernel,
    hoif_kernel,
    product_kernel,
    sparsify,
    tensorize,
    tensorize_component,
)
from tensor_ustat.utils.tensors import DenseTensor

PRODUCT = Component(lambda x, y: x[..., 0] * y[..., 0], 2, name="xy")


def hoif_rows(rng, n: int, k: int) -> np.ndarray:
    a = rng.integers(0, 2, size=n).astype(float)
    y = rng.normal(size=n)
    z = rng.normal(size=(n, k))
    return np.column_stack([a, y, z])


def test_sample_reshapes_vectors():
    sample = Sample(np.array([1.0, 2.0, 3.0]))
    assert sample.n == 3
    assert sample.dim == 1
    with pytest.raises(ShapeMismatch):
        Sample(np.zeros((2, 2, 2)))


def test_product_component_is_outer_product():
    tensor = tensorize_component(PRODUCT, Sample(np.array([1.0, 2.0, 3.0])))
    np.testing.assert_array_equal(tensor.data, np.outer([1, 2, 3], [1, 2, 3]))


def test_distance_component_is_a_metric_table(rng):
    points = rng.normal(size=(3, 2))
    table = tensorize_component(distance_component(slice(0, 2)), Sample(points)).data
    np.testing.assert_allclose(table, table.T)
    np.testing.assert_array_equal(np.diag(table), 0.0)
    assert table[0, 1] == pytest.approx(np.linalg.norm(points[0] - points[1]))


def test_hoif_component_matches_double_loop(rng):
    rows = hoif_rows(rng, 7, 3)
    spec = HOIFSpec(3, lambda z: z)
    link = tensorize_component(spec.middle(), Sample(rows)).data
    tail = tensorize_component(spec.tail(), Sample(rows)).data
    for i, j in itertools.product(range(7), repeat=2):
        inner = rows[i, 2:] @ rows[j, 2:]
        assert link[i, j] == pytest.approx(rows[i, 0] * inner * rows[j, 0], abs=1e-12)
        assert tail[i, j] == pytest.approx(rows[i, 0] * inner * rows[j, 1], abs=1e-12)


def test_scalar_component_falls_back_to_loops(rng):
    points = rng.normal(size=(4, 2))
    looped = Component(lambda x, y: float(np.dot(x, y)), 2, vectorized=False)
    tensor = tensorize_component(looped, Sample(points))
    np.testing.assert_allclose(tensor.data, points @ points.T)


def test_failing_component_is_wrapped():
    def broken(x, y):
        raise RuntimeError("boom")

    with pytest.raises(ComponentEvaluationError):
        tensorize_component(Component(broken, 2), Sample(np.arange(3.0)))


def test_strict_mode_rejects_non_finite():
    log = Component(lambda x: np.log(x[..., 0]), 1)
    sample = Sample(np.array([0.0, 1.0]))
    assert np.isneginf(tensorize_component(log, sample).data[0])
    with pytest.raises(ComponentEvaluationError):
        tensorize_component(log, sample, EngineConfig(strict_finite=True))


def test_tensorize_checks_total_entries():
    kernel = MDKernel((PRODUCT, PRODUCT), ((0, 1), (1, 2)))
    with pytest.raises(MemoryCapExceeded):
        tensorize(kernel, Sample(np.arange(4.0)), EngineConfig(memory_cap=20))


def test_kernel_validation():
    with pytest.raises(InvalidSignature):
        MDKernel((PRODUCT,), ((0, 2),))
    with pytest.raises(InvalidSignature):
        MDKernel((PRODUCT,), ((0, 1, 2),))
    with pytest.raises(InvalidSignature):
        MDKernel((PRODUCT, PRODUCT), ((0, 1),))
    with pytest.raises(InvalidSignature):
        MDKernel((PRODUCT,), ((1, 1),))


def test_kernel_call_is_the_product_of_components():
    kernel = MDKernel((PRODUCT, PRODUCT), ((0, 1), (1, 2)))
    rows = [np.array([2.0]), np.array([3.0]), np.array([5.0])]
    assert kernel.arity == 3
    assert kernel(*rows) == 2 * 3 * 3 * 5


# ---------------------------------------------------------------- sparsify


def test_sparsify_zeroes_matrix_diagonal(rng):
    table = rng.normal(size=(4, 4))
    (out,) = sparsify([DenseTensor(table)], ((0, 1),))
    np.testing.assert_array_equal(out.data, table - np.diag(np.diag(table)))


def test_sparsify_leaves_vectors_alone(rng):
    vector = rng.normal(size=5)
    (out,) = sparsify([DenseTensor(vector)])
    np.testing.assert_array_equal(out.data, vector)


def test_sparsify_third_order_cell_by_cell(rng):
    table = rng.normal(size=(3, 3, 3))
    (out,) = sparsify([DenseTensor(table)], ((0, 1, 2),))
    for alpha in itertools.product(range(3), repeat=3):
        expected = table[alpha] if len(set(alpha)) == 3 else 0.0
        assert out.data[alpha] == expected


def test_sparsify_checks_arities():
    with pytest.raises(ShapeMismatch):
        sparsify([DenseTensor(np.ones((2, 2)))], ((0,),))


# ---------------------------------------------------------------- built-ins


def test_product_kernel_signature():
    kernel = product_kernel()
    assert kernel.signature == ((0,), (1,))
    assert kernel(np.array([2.0]), np.array([4.0])) == 8.0


@pytest.mark.parametrize("j", range(2, 7))
def test_hoif_signature_is_a_chain(j):
    kernel = hoif_kernel(j, lambda z: z)
    assert kernel.signature == tuple((i, i + 1) for i in range(j - 1))
    assert kernel.arity == j


def test_hoif_order_must_be_at_least_two():
    with pytest.raises(InvalidSignature):
        HOIFSpec(1, lambda z: z)


def test_hoif_feature_map_must_keep_the_feature_axis(rng):
    rows = hoif_rows(rng, 5, 2)
    scalar = HOIFSpec(3, lambda z: z[..., 0])
    with pytest.raises(ShapeMismatch):
        tensorize_component(scalar.middle(), Sample(rows))
    with pytest.raises(ShapeMismatch):
        tensorize_component(scalar.tail(), Sample(rows))
    with pytest.raises(ShapeMismatch):
        hoif_flat_kernel(3, lambda z: z[0])(*rows[:3])
    kept = HOIFSpec(3, lambda z: z[..., :1])
    link = tensorize_component(kept.middle(), Sample(rows)).data
    expected = np.outer(rows[:, 0] * rows[:, 2], rows[:, 2] * rows[:, 0])
    np.testing.assert_allclose(link, expected, atol=1e-12)


def test_flat_hoif_kernel_matches_decomposed_on_a_reordered_chain(rng):
    rows = hoif_rows(rng, 4, 2)
    flat = hoif_flat_kernel(4, lambda z: z)
    decomposed = hoif_kernel(4, lambda z: z)
    # the flat kernel walks positions 1, 3, 4, 2
    assert flat(*rows) == pytest.approx(decomposed(rows[0], rows[2], rows[3], rows[1]))


def test_motif_registry():
    assert {rid: spec.automorphisms for rid, spec in MOTIFS.items()} == {
        "r1": 2, "r2": 6, "r3": 6, "r4": 2, "r5": 2, "r6": 8, "r7": 4, "r8": 24,
    }
    edges = {rid: spec.graph().number_of_edges() for rid, spec in MOTIFS.items()}
    assert edges == {"r1": 2, "r2": 3, "r3": 3, "r4": 3, "r5": 4, "r6": 4, "r7": 5, "r8": 6}
    for spec in MOTIFS.values():
        assert len(spec.factors) == spec.vertex_count * (spec.vertex_count - 1) // 2
