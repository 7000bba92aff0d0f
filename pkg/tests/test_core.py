import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bmspec.core import (
    T,
    T2,
    bm_product,
    bm_product_bg,
    bm_summand,
    cyclic_orbits,
    cyclic_symmetrize,
    cyclic_symmetry_residual,
    cyclic_transpose,
    delta,
    direct_sum,
    hadamard,
    hadamard_pow,
    multilinear_form,
    ones,
)
from bmspec.errors import DimensionError
from bmspec.oracles import (
    bm_product_bg_loops,
    bm_product_loops,
    cyclic_transpose_loops,
    trilinear_loops,
)
from bmspec.orthogonal import orth222

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def cubes(n):
    return arrays(np.float64, (n, n, n), elements=finite)


def test_delta_small_cases():
    assert delta(1).tolist() == [[[1.0]]]
    d = delta(2)
    assert np.argwhere(d).tolist() == [[0, 0, 0], [1, 1, 1]]
    for n in range(1, 7):
        assert delta(n).sum() == n


def test_delta_rejects_zero():
    with pytest.raises(DimensionError):
        delta(0)


def test_cyclic_transpose_moves_single_entry():
    A = np.zeros((2, 2, 2))
    A[0, 1, 0] = 5.0
    B = cyclic_transpose(A)
    assert np.argwhere(B).tolist() == [[1, 0, 0]]
    assert B[1, 0, 0] == 5.0


def test_cyclic_transpose_fixes_delta():
    for n in (2, 3, 4):
        assert np.array_equal(cyclic_transpose(delta(n)), delta(n))


@given(cubes(3))
def test_cyclic_transpose_order_three(A):
    assert np.array_equal(T(T(T(A))), A)
    assert np.array_equal(T2(A), T(T(A)))
    assert np.array_equal(cyclic_transpose(A), cyclic_transpose_loops(A))


def test_cyclic_transpose_rejects_non_cubic():
    with pytest.raises(DimensionError):
        cyclic_transpose(np.zeros((2, 2, 3)))


def test_bm_product_delta_and_ones():
    for n in range(1, 9):
        assert np.array_equal(bm_product(delta(n), delta(n), delta(n)), delta(n))
    J = ones(3)
    assert np.array_equal(bm_product(J, J, J), 3 * J)


def test_bm_product_orthogonal_at_zero():
    Q = orth222(np.zeros(6))
    assert np.max(np.abs(bm_product(Q, T2(Q), T(Q)) - delta(2))) < 1e-12


def test_bm_product_shape_mismatch():
    with pytest.raises(DimensionError):
        bm_product(delta(2), delta(3), delta(2))


@settings(max_examples=50)
@given(st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_bm_product_matches_loops(n, seed):
    rng = np.random.default_rng(seed)
    A, B, C = rng.standard_normal((3, n, n, n))
    P = bm_product(A, B, C)
    ref = bm_product_loops(A, B, C)
    assert np.max(np.abs(P - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


@settings(max_examples=50)
@given(st.sampled_from([2, 3]), st.integers(0, 2 ** 32 - 1))
def test_background_delta_collapses(n, seed):
    rng = np.random.default_rng(seed)
    A, B, C = rng.standard_normal((3, n, n, n))
    assert np.allclose(bm_product_bg(delta(n), A, B, C), bm_product(A, B, C), rtol=0, atol=1e-13)


def test_background_zero_and_oracle():
    rng = np.random.default_rng(3)
    A, B, C, U = rng.standard_normal((4, 2, 2, 2))
    assert np.array_equal(bm_product_bg(np.zeros((2, 2, 2)), A, B, C), np.zeros((2, 2, 2)))
    assert np.max(np.abs(bm_product_bg(U, A, B, C) - bm_product_bg_loops(U, A, B, C))) < 1e-13


def test_summands():
    for k in range(3):
        S = bm_summand(delta(3), delta(3), delta(3), k)
        assert np.argwhere(S).tolist() == [[k, k, k]] and S[k, k, k] == 1.0
        assert np.array_equal(bm_summand(ones(3), ones(3), ones(3), k), ones(3))
    rng = np.random.default_rng(4)
    for _ in range(50):
        A, B, C = rng.standard_normal((3, 3, 3, 3))
        total = sum(bm_summand(A, B, C, k) for k in range(3))
        assert np.max(np.abs(total - bm_product(A, B, C))) < 1e-13
    with pytest.raises(IndexError):
        bm_summand(delta(2), delta(2), delta(2), 2)


def test_multilinear_forms():
    rng = np.random.default_rng(5)
    x, y, z = rng.standard_normal((3, 3))
    assert np.isclose(multilinear_form(delta(3), x, y, z), np.sum(x * y * z), rtol=0, atol=1e-14)
    assert np.isclose(multilinear_form(ones(3), x, y, z), x.sum() * y.sum() * z.sum())
    A = rng.standard_normal((3, 3, 3))
    assert abs(multilinear_form(A, x, y, z) - trilinear_loops(A, x, y, z)) < 1e-13
    M = rng.standard_normal((3, 3))
    assert np.isclose(multilinear_form(M, x, y), x @ M @ y)
    with pytest.raises(DimensionError):
        multilinear_form(A, x, y)
    with pytest.raises(DimensionError):
        multilinear_form(A, x, y, z[:2])


def test_hadamard():
    assert hadamard(np.array([1.0, 2.0]), np.array([3.0, 4.0])).tolist() == [3.0, 8.0]
    assert hadamard_pow(np.array([5.0, -2.0]), 0).tolist() == [1.0, 1.0]
    x = np.random.default_rng(6).standard_normal(5)
    assert np.array_equal(hadamard_pow(x, 2), hadamard(x, x))
    with pytest.raises(DimensionError):
        hadamard(np.ones(2), np.ones(3))


def test_direct_sum():
    assert np.array_equal(direct_sum([delta(2), delta(3)]), delta(5))
    a, b = orth222(np.zeros(6)), orth222(np.full(6, 0.3))
    D = direct_sum([a, b])
    assert np.max(np.abs(bm_product(D, T2(D), T(D)) - delta(4))) < 1e-12
    mask = np.zeros((4, 4, 4), dtype=bool)
    mask[:2, :2, :2] = mask[2:, 2:, 2:] = True
    assert np.all(D[~mask] == 0.0)
    with pytest.raises(ValueError):
        direct_sum([])


def test_cyclic_orbits_count_and_cover():
    from math import comb

    for n in range(1, 6):
        orbits = cyclic_orbits(n)
        assert len(orbits) == n + 2 * comb(n, 2) + 2 * comb(n, 3)
        covered = set()
        for rep in orbits:
            i, j, k = rep
            covered |= {(i, j, k), (k, i, j), (j, k, i)}
        assert len(covered) == n ** 3


@given(cubes(3))
def test_cyclic_symmetrize(A):
    S = cyclic_symmetrize(A)
    assert cyclic_symmetry_residual(S) <= 1e-12 * max(1.0, np.max(np.abs(A)))
