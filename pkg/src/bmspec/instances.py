"""Seeded generators for planted (ground-truth) test instances."""

import numpy as np

from .core import T2, bm_product, delta
from .elim_hyper import general_forward
from .errors import SingularSystemError
from .orthogonal import OrthParams, orth_direct_sum
from .search import planted_instance, random_symmetric_instance

__all__ = [
    "random_rotation",
    "planted_matrix",
    "biorthogonal_pair",
    "complete_orthogonal_triple",
    "orthogonal_triple",
    "planted_general",
    "planted_instance",
    "random_symmetric_instance",
    "triple_residual",
]


def random_rotation(n, rng):
    """Haar-distributed orthogonal matrix."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def planted_matrix(n, rng, low=0.5, high=3.0, min_gap=0.05):
    """PSD matrix Q diag(lam^2) Q^T with distinct positive lam (returns A, Q, lam)."""
    while True:
        lam = np.sort(rng.uniform(low, high, n))
        if n == 1 or np.min(np.diff(lam ** 2)) > min_gap:
            break
    Q = random_rotation(n, rng)
    return (Q * lam ** 2) @ Q.T, Q, lam


def biorthogonal_pair(n, rng, cond_max=50.0):
    """(U, V) with U V^T = I and U reasonably conditioned."""
    while True:
        U = rng.standard_normal((n, n)) + 2.0 * np.eye(n)
        if np.linalg.cond(U) < cond_max:
            return U, np.linalg.inv(U).T


def complete_orthogonal_triple(Q, U):
    """V solving bm_product(Q, U, V) = delta, one linear system per (j, l)."""
    n = Q.shape[0]
    V = np.zeros((n, n, n))
    for j in range(n):
        for l in range(n):
            M = Q[:, :, l] * U[:, j, :]  # M[i, k] = Q[i,k,l] U[i,j,k]
            rhs = np.zeros(n)
            if j == l:
                rhs[j] = 1.0
            if abs(np.linalg.det(M)) < 1e-12:
                raise SingularSystemError(f"cannot complete the triple at (j, l) = ({j}, {l})")
            V[:, j, l] = np.linalg.solve(M, rhs)
    return V


def orthogonal_triple(n, rng, r_range=0.5):
    """(Q, U, V) with bm_product(Q, U, V) = delta.

    Q and U^T are independent members of the direct-sum family; V completes
    the triple.
    """
    Q = orth_direct_sum(OrthParams.for_size(n, rng, -r_range, r_range))
    U = T2(orth_direct_sum(OrthParams.for_size(n, rng, -r_range, r_range)))
    V = complete_orthogonal_triple(Q, U)
    return Q, U, V


def planted_general(n, rng, w_range=(0.5, 1.5)):
    """Non-symmetric planted instance; returns (A, (Q, U, V), (d0, d1, d2))."""
    Q, U, V = orthogonal_triple(n, rng)
    ds = tuple(rng.uniform(*w_range, size=(n, n)) for _ in range(3))
    return general_forward(Q, U, V, *ds), (Q, U, V), ds


def triple_residual(Q, U, V):
    return float(np.max(np.abs(bm_product(Q, U, V) - delta(Q.shape[0]))))
