"""Matrix spectral elimination.

Convention: ``A = Q @ diag(lam**2) @ Q.T`` with ``Q`` orthogonal, so
``A[i, j] = sum_k lam[k]**2 Q[i, k] Q[j, k]`` and ``q_i`` (row i of Q) enters
through Hadamard products ``q_i * q_j``.  Scaling is carried by ``lam``,
whose squares are the eigenvalues of ``A``.

Two elimination routes are provided:

* I_D: eliminate Q.  The Vandermonde system in ``lam**2`` yields candidate
  Hadamard products ``v_ij``; consistency demands ``v_ij**2 == v_ii * v_jj``.
* I_Q: eliminate the scaling.  For a fixed Q the products ``lam_s * lam_t``
  satisfy a linear system; consistency demands a rank-one product table.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import (
    DegeneratePatternError,
    DimensionError,
    NegativeSquareError,
    PreconditionError,
    SingularSystemError,
    UnsupportedSizeError,
)
from .polyring import MultiPoly, cramer_solve, vandermonde

ORTHO_TOL = 1e-8
# columns below this fraction of the largest column norm are treated as exactly zero
ANNIHILATED_RTOL = 1e-10


def _square(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    return A


def default_tol(A):
    return 1e-8 * max(1.0, float(np.max(np.abs(A))) ** 2)


@dataclass
class MatrixSpectralData:
    Q: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        self.Q = _square(self.Q, "Q")
        self.lam = np.asarray(self.lam, dtype=float).ravel()
        if self.lam.size != self.Q.shape[0]:
            raise DimensionError("lambda length must match Q")

    @property
    def n(self):
        return self.Q.shape[0]

    def reconstruct(self):
        return (self.Q * self.lam ** 2) @ self.Q.T

    def orthonormality_residual(self):
        return float(np.max(np.abs(self.Q @ self.Q.T - np.eye(self.n))))

    def sorted(self):
        """Copy with ``lam**2`` ascending (columns of Q permuted alongside)."""
        order = np.argsort(self.lam ** 2, kind="stable")
        return MatrixSpectralData(self.Q[:, order], self.lam[order])


@dataclass
class MuTable:
    """Pairwise products mu[(s, t)] = lam_s * lam_t (or lam_s * gamma_t)."""

    n: int
    mu: dict
    scale: float = 1.0
    equation_residual: float = 0.0
    identified: list = field(default_factory=list)

    def __getitem__(self, key):
        s, t = key
        if (s, t) in self.mu:
            return self.mu[(s, t)]
        return self.mu[(t, s)]

    def as_matrix(self):
        M = np.zeros((self.n, self.n))
        for s in range(self.n):
            for t in range(self.n):
                M[s, t] = self[s, t]
        return M


def power_moment_stack(A, K):
    """[A^0, A^1, ..., A^(K-1)]."""
    A = _square(A)
    if K < 1:
        raise ValueError("K must be at least 1")
    out = [np.eye(A.shape[0])]
    for _ in range(K - 1):
        out.append(out[-1] @ A)
    return out


def _check_distinct(nodes):
    scale = max(1.0, float(np.max(np.abs(nodes))))
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if abs(nodes[a] - nodes[b]) <= 1e-12 * scale:
                raise SingularSystemError(f"repeated squared spectral value {nodes[a]:.6g}")


def solve_hadamard_products(A, lam, squared=False):
    """Candidate Hadamard products q_i * q_j from the Vandermonde system in lam**2.

    With ``squared=True`` the argument already holds lam**2 (allows negative
    eigenvalues of indefinite A).
    """
    A = _square(A)
    n = A.shape[0]
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != n:
        raise DimensionError("lambda length must match A")
    nodes = lam if squared else lam ** 2
    _check_distinct(nodes)
    V = vandermonde(nodes)
    powers = power_moment_stack(A, n)
    out = {}
    for i in range(n):
        for j in range(i, n):
            rhs = np.array([P[i, j] for P in powers])
            out[(i, j)] = np.asarray(cramer_solve(V, rhs), dtype=float)
    return out


def id_residual(A, lam, squared=False):
    """Max over i<j of |v_ij**2 - v_ii * v_jj| for the solved Hadamard products."""
    v = solve_hadamard_products(A, lam, squared=squared)
    n = np.asarray(A).shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            worst = max(worst, float(np.max(np.abs(v[(i, j)] ** 2 - v[(i, i)] * v[(j, j)]))))
    return worst


ID_VARS = ("a00", "a01", "a11", "l0", "l1")


def id_generators_symbolic(n=2):
    """Numerators of the n=2 consistency relations with Q eliminated.

    Returns polynomials in (a00, a01, a11, l0, l1), one per Vandermonde node.
    """
    if n != 2:
        raise UnsupportedSizeError("symbolic generators are implemented for n = 2 only")
    a00, a01, a11, l0, l1 = MultiPoly.gens(ID_VARS)
    V = vandermonde([l0 ** 2, l1 ** 2])
    A = {(0, 0): a00, (0, 1): a01, (1, 1): a11}
    one = MultiPoly.const(ID_VARS, 1)
    zero = MultiPoly(ID_VARS)
    sol = {}
    for (i, j), a in A.items():
        sol[(i, j)] = cramer_solve(V, [one if i == j else zero, a])
    gens = []
    for k in range(2):
        v01, v00, v11 = sol[(0, 1)][k], sol[(0, 0)][k], sol[(1, 1)][k]
        # all share the denominator det V, so the numerators carry the relation
        gens.append(v01.num ** 2 - v00.num * v11.num)
    return gens


def _check_orthonormal(Q, tol=ORTHO_TOL):
    Q = _square(Q, "Q")
    err = float(np.max(np.abs(Q @ Q.T - np.eye(Q.shape[0]))))
    if err > tol:
        raise PreconditionError(f"Q is not orthonormal (residual {err:.3g})")
    return Q


def _solve_identified(M, rhs, cols):
    """Solve the columns not annihilated by orthonormality via normal equations."""
    norms = np.linalg.norm(M, axis=0)
    live = [c for c in range(M.shape[1]) if norms[c] > ANNIHILATED_RTOL * max(norms.max(), 1e-300)]
    row_norms = np.linalg.norm(M[:, live], axis=1)
    if np.any(row_norms <= ANNIHILATED_RTOL * max(row_norms.max(), 1e-300)):
        raise DegeneratePatternError("an equation of the linear system vanishes identically")
    Ml = M[:, live]
    try:
        x = cramer_solve(Ml.T @ Ml, Ml.T @ rhs)
    except SingularSystemError as exc:
        raise DegeneratePatternError(str(exc)) from exc
    resid = float(np.max(np.abs(Ml @ x - rhs))) if rhs.size else 0.0
    return {cols[c]: float(v) for c, v in zip(live, x)}, resid


def iq_system(A, Q):
    """Coefficient matrix and rhs of the linear system in mu_st (s <= t)."""
    A, Q = _square(A), _square(Q, "Q")
    n = A.shape[0]
    if Q.shape != A.shape:
        raise DimensionError("A and Q must have the same shape")
    pairs = list(combinations_with_replacement(range(n), 2))
    G = Q.T @ Q  # G[s, t] = sum_k q_ks q_kt
    M = np.zeros((len(pairs), len(pairs)))
    rhs = np.zeros(len(pairs))
    for r, (i, j) in enumerate(pairs):
        rhs[r] = A[i, j]
        for c, (s, t) in enumerate(pairs):
            if s == t:
                M[r, c] = G[s, s] * Q[i, s] * Q[j, s]
            else:
                M[r, c] = G[s, t] * (Q[i, s] * Q[j, t] + Q[i, t] * Q[j, s])
    return M, rhs, pairs


def iq_solve(A, Q):
    """Solve for mu_st = lam_s lam_t given orthonormal Q.

    Orthonormality makes every cross coefficient sum_k q_ks q_kt vanish, so
    the cross unknowns drop out; the diagonal ones are solved and the table is
    completed with principal roots mu_st = sqrt(mu_ss mu_tt).
    """
    A = _square(A)
    Q = _check_orthonormal(Q)
    M, rhs, pairs = iq_system(A, Q)
    solved, resid = _solve_identified(M, rhs, pairs)
    n = A.shape[0]
    mu = dict(solved)
    for s, t in pairs:
        if (s, t) not in mu:
            mu[(s, t)] = float(np.sqrt(max(mu.get((s, s), 0.0), 0.0) * max(mu.get((t, t), 0.0), 0.0)))
    return MuTable(n, mu, scale=float(np.max(np.abs(A))), equation_residual=resid,
                   identified=sorted(solved))


def iq_consistency(mu: MuTable, tol=None):
    """Rank-one residual of the mu table and, when consistent, the recovered lam."""
    n = mu.n
    if tol is None:
        tol = 1e-8 * max(1.0, mu.scale ** 2)
    for i in range(n):
        if mu[i, i] < -tol:
            raise NegativeSquareError(f"mu[{i},{i}] = {mu[i, i]:.6g} is negative")
    resid = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            resid = max(resid, abs(mu[i, j] ** 2 - mu[i, i] * mu[j, j]))
    if resid > tol:
        return resid, None
    lam = np.sqrt(np.maximum([mu[i, i] for i in range(n)], 0.0))
    for j in range(1, n):
        if mu[0, j] < 0:
            lam[j] = -lam[j]
    return resid, lam


def offdiag_residual(A, Q):
    """Largest off-diagonal entry of Q^T A Q plus the orthonormality defect of Q."""
    A, Q = _square(A), _square(Q, "Q")
    if A.shape != Q.shape:
        raise DimensionError("A and Q must have the same shape")
    B = Q.T @ A @ Q
    off = B - np.diag(np.diag(B))
    n = A.shape[0]
    return float(np.max(np.abs(off))) + float(np.max(np.abs(Q.T @ Q - np.eye(n))))


def uv_system(A, U, V):
    """Coefficient matrix and rhs of the n^2 system in mu_st = lam_s gamma_t."""
    A, U, V = _square(A), _square(U, "U"), _square(V, "V")
    n = A.shape[0]
    if U.shape != A.shape or V.shape != A.shape:
        raise DimensionError("A, U, V must share one shape")
    grid = [(i, j) for i in range(n) for j in range(n)]
    G = U.T @ V  # G[s, t] = sum_k u_ks v_kt
    M = np.zeros((n * n, n * n))
    rhs = np.zeros(n * n)
    for r, (i, j) in enumerate(grid):
        rhs[r] = A[i, j]
        for c, (s, t) in enumerate(grid):
            M[r, c] = G[s, t] * U[i, s] * V[j, t]
    return M, rhs, grid


def uv_solve(A, U, V, tol=ORTHO_TOL):
    """Solve the general (U, V) system for mu_st = lam_s gamma_t.

    Only the diagonal products are identifiable (A is unchanged under
    lam_s -> c lam_s, gamma_s -> gamma_s / c); off-diagonal entries are
    completed in the gauge |lam_s| = |gamma_s|.  ``consistency_residual`` is
    the rank-one defect max |mu_ij mu_kl - mu_il mu_kj|.
    """
    A, U, V = _square(A), _square(U, "U"), _square(V, "V")
    n = A.shape[0]
    err = float(np.max(np.abs(U @ V.T - np.eye(n))))
    if err > tol:
        raise PreconditionError(f"U V^T is not the identity (residual {err:.3g})")
    M, rhs, grid = uv_system(A, U, V)
    solved, resid = _solve_identified(M, rhs, grid)
    mu = dict(solved)
    d = np.array([mu.get((s, s), 0.0) for s in range(n)])
    for s, t in grid:
        if (s, t) not in mu:
            mu[(s, t)] = float(np.sqrt(abs(d[s])) * np.sign(d[t]) * np.sqrt(abs(d[t])))
    table = MuTable(n, mu, scale=float(np.max(np.abs(A))), equation_residual=resid,
                    identified=sorted(solved))
    table.consistency_residual = rank_one_residual(table.as_matrix())
    return table


def rank_one_residual(M):
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    worst = 0.0
    for i in range(n):
        for k in range(n):
            for j in range(n):
                for l in range(n):
                    worst = max(worst, abs(M[i, j] * M[k, l] - M[i, l] * M[k, j]))
    return worst


def matrix_resolution_residual(Q, u, v):
    """|<u, v> - sum_t (q_t . u)(q_t . v)| for the rows q_t of Q."""
    Q = _square(Q, "Q")
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    if u.size != Q.shape[0] or v.size != Q.shape[0]:
        raise DimensionError("vector length must match Q")
    return abs(float(u @ v) - float(np.sum((Q @ u) * (Q @ v))))
