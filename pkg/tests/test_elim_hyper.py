import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmspec.core import T, T2, bm_product, cyclic_symmetry_residual, delta
from bmspec.elim_hyper import (
    assemble222,
    charpoly222,
    consistency_from_values,
    delta_rows222,
    fibers,
    forward,
    general_forward,
    general_spectral_system,
    monomial_consistency_residual,
    spectral_system,
    u_sequence,
    vandermonde_relations222_residual,
    vandermonde_relations222_scale,
    variable_count,
    w_matrix,
    w_values,
)
from bmspec.errors import DegenerateInstanceError, IncompleteBasisError, PreconditionError
from bmspec.instances import planted_general
from bmspec.oracles import bm_product_bg_loops, bm_product_loops
from bmspec.orthogonal import OrthParams, orth222, orth_direct_sum
from bmspec.polyring import MultiPoly

E0, E1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
r6 = st.lists(st.floats(-0.5, 0.5), min_size=6, max_size=6)


def test_u_sequence_orthogonal_is_delta():
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        Q = orth_direct_sum(OrthParams.for_size(n, rng))
        assert all(np.max(np.abs(U - delta(n))) < 1e-9 for U in u_sequence(Q, n))
        assert all(np.array_equal(U, delta(n)) for U in u_sequence(delta(n), 3))


def test_u_sequence_generic_matches_loops():
    Q = np.random.default_rng(1).uniform(-1, 1, (2, 2, 2))
    Us = u_sequence(Q, 3)
    ref1 = bm_product_loops(Q, T2(Q), T(Q))
    assert np.max(np.abs(Us[1] - ref1)) < 1e-12
    assert np.max(np.abs(Us[2] - bm_product_bg_loops(ref1, Q, T2(Q), T(Q)))) < 1e-12


def test_assemble_hand_example():
    A = assemble222(E0, E1, E0, E1, [1.0, 2.0], [2.0, 3.0])
    assert (A[0, 0, 0], A[1, 1, 1], A[0, 1, 1], A[1, 0, 0]) == (1.0, 729.0, 0.0, 0.0)
    assert np.array_equal(assemble222(E0, E1, E0, E1, np.ones(2), np.ones(2)), delta(2))


@given(r6, st.lists(st.floats(0.2, 2.0), min_size=4, max_size=4))
def test_assemble_is_cyclic_and_delta_rows(r, w):
    f = fibers(orth222(r))
    A = assemble222(f[0, 0], f[0, 1], f[1, 0], f[1, 1], w[:2], w[2:])
    assert cyclic_symmetry_residual(A) == 0.0
    D = delta_rows222(f[0, 0], f[0, 1], f[1, 0], f[1, 1])
    assert np.max(np.abs(D - delta(2))) < 1e-12


@given(r6, st.floats(0.5, 1.5), st.floats(0.5, 1.5), st.floats(0.5, 1.5))
def test_forward_matches_assembly(r, w00, w01, w11):
    Q = orth222(r)
    f = fibers(Q)
    W = w_matrix(w00, w01, w11)
    ref = assemble222(f[0, 0], f[0, 1], f[1, 0], f[1, 1], W[0], W[1])
    assert np.allclose(forward(Q, W), ref, rtol=1e-12, atol=1e-12)


def test_charpoly_reference_values():
    u, v, t = MultiPoly.gens(("u", "v", "t"))
    p, _ = charpoly222(0, 0)
    assert p == u * t - v ** 2
    p, _ = charpoly222(1, 729)
    q = p.substitute({"u": 1, "t": 729})
    assert q == -(v - 1) * (v - 729)
    assert str(p) == "1 * u * t - 1 * v^2 - 729 * u + 730 * v - 1 * t"
    p1, _ = charpoly222(2, 5)
    p2, _ = charpoly222(5, 2)
    assert p1.substitute({"u": t, "t": u}) == p2


def test_relations_planted_and_degenerate():
    rng = np.random.default_rng(2)
    Q = orth222(rng.uniform(-0.5, 0.5, 6))
    w = (0.7, 1.0, 1.3)
    A = forward(Q, w_matrix(*w))
    base = vandermonde_relations222_residual(A, *w)
    assert base < 1e-8 * vandermonde_relations222_scale(A, *w)
    _, ev = charpoly222(A[0, 0, 0], A[1, 1, 1])
    assert abs(ev(*w)) < 1e-8 * max(1.0, 1.3 ** 6) ** 2
    bumped = vandermonde_relations222_residual(A, w[0], 1.1 * w[1], w[2])
    assert bumped > 1e3 * max(base, 1e-16)
    diag = assemble222(E0, E1, E0, E1, [1.0, 2.0], [2.0, 3.0])
    with pytest.raises(DegenerateInstanceError):
        vandermonde_relations222_residual(diag, 1.0, 2.0, 3.0)


def test_variable_counts():
    assert variable_count(2) == 8 and variable_count(3) == 33
    rng = np.random.default_rng(3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        Q2 = orth222(rng.uniform(-1, 1, 6))
        assert len(spectral_system(np.zeros((2, 2, 2)), Q2, 2).basis) == 8
        assert len(spectral_system(np.zeros((3, 3, 3)), rng.uniform(-1, 1, (3, 3, 3)), 1).basis) == 33


def test_count_mismatch_warns():
    Q = orth_direct_sum(OrthParams.for_size(3, np.random.default_rng(4)))
    with pytest.warns(RuntimeWarning):
        s = spectral_system(np.zeros((3, 3, 3)), Q, 3)
    assert s.warnings


def test_trivial_decomposition_of_delta():
    for n in (2, 3):
        s = spectral_system(delta(n), delta(n), n, check_count=False)
        assert s.residual(s.evaluate_basis(np.ones(n * n))) < 1e-9


def test_planted_system_and_consistency():
    rng = np.random.default_rng(5)
    Q = orth222(rng.uniform(-1, 1, 6))
    W = w_matrix(*rng.uniform(0.5, 1.5, 3))
    s = spectral_system(forward(Q, W), Q, 2)
    x = s.evaluate_basis(w_values(W))
    assert s.residual(x) < 1e-10
    assert monomial_consistency_residual(s, x) < 1e-10
    composite = next(i for i in range(len(s.basis)) if np.count_nonzero(s.d_exponents(i)) > 1)
    y = x.copy()
    y[composite] *= 1.01
    assert monomial_consistency_residual(s, y) > 1e-3 * abs(x[composite])


def test_rows_are_linear_in_basis():
    rng = np.random.default_rng(6)
    Q = rng.uniform(-1, 1, (2, 2, 2))
    s = spectral_system(np.zeros((2, 2, 2)), Q, 2, prune_rtol=0.0, check_count=False)
    W = rng.uniform(0.5, 1.5, (2, 2))
    vals = s.matrix @ s.evaluate_basis(w_values(W))
    B = Q * np.einsum("ij,lj->ijl", W, W)
    Us = u_sequence(Q, 2)
    from bmspec.core import bm_product_bg

    for r, (k, (i, j, l)) in enumerate(s.row_labels):
        ref = bm_product_bg(Us[k], B, T2(B), T(B))[i, j, l]
        assert abs(vals[r] - ref) < 1e-10


def test_consistency_reference_values():
    assert consistency_from_values({"a": 8.0, "b": 27.0}, [({"a": 4, "b": 2}, 12.0)]) == 0.0
    assert 12.0 ** 3 == 8.0 ** 2 * 27.0
    with pytest.raises(IncompleteBasisError):
        consistency_from_values({"a": 8.0}, [({"a": 4, "c": 2}, 12.0)])


def test_general_system():
    rng = np.random.default_rng(7)
    D = delta(2)
    s = general_spectral_system(D, D, D, D, 2)
    assert s.residual(s.evaluate_basis(np.ones(12))) < 1e-10
    A, (Q, U, V), ds = planted_general(2, rng)
    assert np.allclose(A, general_forward(Q, U, V, *ds))
    s = general_spectral_system(A, Q, U, V, 2)
    assert s.residual(s.evaluate_basis(np.concatenate([d.ravel() for d in ds]))) < 1e-6
    with pytest.raises(PreconditionError):
        general_spectral_system(A, Q, Q, Q, 1)


def test_general_reduces_to_symmetric():
    rng = np.random.default_rng(8)
    Q = orth222(rng.uniform(-1, 1, 6))
    W = w_matrix(*rng.uniform(0.5, 1.5, 3))
    A = forward(Q, W)
    g = general_spectral_system(A, Q, T2(Q), T(Q), 1)
    x = g.evaluate_basis(np.concatenate([W.ravel()] * 3))
    assert g.residual(x) < 1e-10
    assert np.allclose(general_forward(Q, T2(Q), T(Q), W, W, W), A)
    assert np.allclose(bm_product(Q, T2(Q), T(Q)), delta(2))
