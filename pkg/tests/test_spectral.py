import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmspec.core import T, T2, bm_product, bm_summand, cyclic_symmetry_residual, delta, ones
from bmspec.elim_matrix import MatrixSpectralData
from bmspec.errors import PreconditionError
from bmspec.instances import planted_matrix
from bmspec.oracles import bm_product_loops
from bmspec.orthogonal import OrthParams, orth222, orth_direct_sum
from bmspec.spectral import (
    HyperSpectralData,
    fit_alphas,
    hyper_bound_check,
    hyper_term_values,
    matrix_bound_check,
    symmetrize3,
)

DELTA_PATTERN = np.zeros((2, 2, 2))
DELTA_PATTERN[:, 0, 0] = DELTA_PATTERN[:, 1, 1] = 1.0  # Q[a, k, b] = [k == b]


def test_matrix_bound_identity_is_equality():
    data = MatrixSpectralData(np.eye(3), np.ones(3))
    x = np.random.default_rng(0).standard_normal(3)
    rep = matrix_bound_check(data, x, x)
    assert rep.admissible and rep.holds
    assert rep.lower == rep.value == rep.upper


def test_matrix_bound_hand_example():
    rep = matrix_bound_check(MatrixSpectralData(np.eye(2), [1.0, 2.0]), [1.0, 0.0], [1.0, 0.0])
    assert (rep.lower, rep.value, rep.upper) == (1.0, 1.0, 4.0) and rep.holds


def test_matrix_bound_inadmissible():
    rep = matrix_bound_check(MatrixSpectralData(np.eye(2), [1.0, 2.0]), [1.0, 1.0], [1.0, -1.0])
    assert not rep.admissible and not rep.holds


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
def test_matrix_bound_property(n, seed):
    rng = np.random.default_rng(seed)
    A, Q, lam = planted_matrix(n, rng)
    data = MatrixSpectralData(Q, lam)
    seen = 0
    for _ in range(2000):
        x, y = rng.standard_normal((2, n))
        rep = matrix_bound_check(data, x, y, A)
        if rep.admissible:
            seen += 1
            assert rep.holds, rep
        if seen >= 20:
            break


def test_hyper_bound_equal_slices():
    Q = orth222(np.random.default_rng(1).uniform(-1, 1, 6))
    data = HyperSpectralData(Q, np.full((2, 2), 1.3))
    x, y, z = np.abs(np.random.default_rng(2).standard_normal((3, 2)))
    rep = hyper_bound_check(data, x, y, z)
    assert abs(rep.upper - rep.lower) < 1e-12 * max(1.0, abs(rep.upper))


def test_hyper_bound_hand_example():
    W = np.array([[1.0, 2.0], [1.0, 2.0]])
    data = HyperSpectralData(DELTA_PATTERN, W)
    e0 = np.array([1.0, 0.0])
    A = data.reconstruct()
    rep = hyper_bound_check(data, e0, e0, e0)
    assert rep.value == A[0, 0, 0]
    assert rep.lower == 1.0 and rep.upper == 64.0
    assert rep.admissible and rep.holds


def test_hyper_bound_requires_monotone_slices():
    data = HyperSpectralData(DELTA_PATTERN, np.array([[2.0, 1.0], [2.0, 1.0]]))
    with pytest.raises(PreconditionError):
        hyper_bound_check(data, np.ones(2), np.ones(2), np.ones(2))


def test_hyper_term_values_sum_to_form():
    rng = np.random.default_rng(3)
    Q = orth222(rng.uniform(-1, 1, 6))
    data = HyperSpectralData(Q, np.full((2, 2), 0.9))
    x, y, z = rng.standard_normal((3, 2))
    A = data.reconstruct()
    total = hyper_term_values(data, x, y, z).sum()
    assert abs(total - np.einsum("ijl,i,j,l->", A, x, y, z)) < 1e-12


def test_symmetrize_reference_cases():
    for n in (2, 3):
        assert all(np.array_equal(S, delta(n)) for S in symmetrize3(delta(n)))
        assert all(np.array_equal(S, n * ones(n)) for S in symmetrize3(ones(n)))
    A = np.random.default_rng(4).standard_normal((3, 3, 3))
    S0, S1, S2 = symmetrize3(A)
    assert np.max(np.abs(S0 - bm_product_loops(A, T2(A), T(A)))) < 1e-12
    assert np.max(np.abs(S1 - bm_product_loops(T(A), A, T2(A)))) < 1e-12
    assert np.max(np.abs(S2 - bm_product_loops(T2(A), T(A), A))) < 1e-12
    assert len(symmetrize3(A).residuals) == 3


def test_symmetrize_cyclic_input_gives_equal_outputs():
    rng = np.random.default_rng(5)
    Q = orth_direct_sum(OrthParams.for_size(3, rng))
    from bmspec.elim_hyper import forward

    A = forward(Q, rng.uniform(0.5, 1.5, (3, 3)))
    assert cyclic_symmetry_residual(A) < 1e-12
    S0, S1, S2 = symmetrize3(A)
    assert np.allclose(S0, S1, atol=1e-12) and np.allclose(S1, S2, atol=1e-12)


def test_fit_alphas():
    rng = np.random.default_rng(6)
    Qt, Et, Ft = rng.standard_normal((3, 3, 3, 3))
    A = bm_product(Qt, Et, Ft)
    _, resid, _ = fit_alphas(A, Qt, Et, Ft)
    assert resid < 1e-8
    alpha, resid, _ = fit_alphas(np.zeros((3, 3, 3)), Qt, Et, Ft)
    assert np.all(alpha == 0) and resid == 0
    alpha, resid, _ = fit_alphas(3 * bm_summand(Qt, Et, Ft, 0), Qt, Et, Ft)
    assert abs(alpha[0] - 3) < 1e-8 and np.max(np.abs(alpha[1:])) < 1e-8 and resid < 1e-8


def test_fit_alphas_monotone_in_terms():
    rng = np.random.default_rng(7)
    Qt, Et, Ft = rng.standard_normal((3, 4, 4, 4))
    A = rng.standard_normal((4, 4, 4))
    prev = np.inf
    for m in range(0, 5):
        _, resid, _ = fit_alphas(A, Qt, Et, Ft, terms=range(m))
        assert resid <= prev + 1e-12
        prev = resid


def test_fit_alphas_degenerate_flag():
    Qt = np.zeros((2, 2, 2))
    _, _, degenerate = fit_alphas(np.ones((2, 2, 2)), Qt, Qt, Qt)
    assert degenerate
