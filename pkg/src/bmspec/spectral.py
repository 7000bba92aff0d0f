"""Spectral bounds and the symmetrization SVD."""

from dataclasses import dataclass, field

import numpy as np

from .core import as_cubic, bm_product, bm_summand, cyclic_symmetry_residual, T, T2
from .elim_hyper import forward, scaling_factor
from .elim_matrix import MatrixSpectralData
from .errors import DimensionError, PreconditionError, SingularSystemError
from .polyring import cramer_solve
from .search import SearchConfig, decomposability_search

BOUND_TOL = 1e-10


@dataclass
class BoundReport:
    lower: float
    value: float
    upper: float
    admissible: bool
    holds: bool
    witness: tuple = ()

    @property
    def violation(self):
        """How far the value leaves [lower, upper]; zero when inside."""
        return max(self.lower - self.value, self.value - self.upper, 0.0)


@dataclass
class HyperSpectralData:
    """Orthogonal factor Q and scaling table W.

    ``slice(k)[i] = W[i, k]**2`` is the weight of the k-th rank-one term, so
    ``A = sum_k bm_summand(Q, Q^T2, Q^T, k) * outer3(slice(k))``.
    """

    Q: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        self.Q = as_cubic(self.Q, "Q")
        self.W = np.asarray(self.W, dtype=float)
        if self.W.shape != self.Q.shape[:2]:
            raise DimensionError(f"W must have shape {self.Q.shape[:2]}")

    @property
    def n(self):
        return self.Q.shape[0]

    def slice(self, k):
        return self.W[:, k] ** 2

    def slices(self):
        return (self.W ** 2).T

    def reconstruct(self):
        return forward(self.Q, self.W)

    def rank_one_terms(self):
        Q = self.Q
        return [bm_summand(Q, T2(Q), T(Q), k) for k in range(self.n)]


def matrix_bound_check(data: MatrixSpectralData, x, y, A=None, tol=BOUND_TOL):
    """Check lam2_min <x,y> <= <x,y>_A <= lam2_max <x,y> for an admissible pair.

    A pair is admissible when every rank-one term (q_k . x)(q_k . y) is
    nonnegative, q_k being the k-th eigenvector of the decomposition.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size != data.n or y.size != data.n:
        raise DimensionError("vector length must match the decomposition")
    if A is None:
        A = data.reconstruct()
    terms = (data.Q.T @ x) * (data.Q.T @ y)
    admissible = bool(np.all(terms >= -tol))
    lam2 = data.lam ** 2
    base = float(x @ y)
    value = float(x @ A @ y)
    lower, upper = float(lam2.min()) * base, float(lam2.max()) * base
    scale = max(1.0, abs(value), abs(lower), abs(upper))
    holds = admissible and (lower - tol * scale <= value <= upper + tol * scale)
    return BoundReport(lower, value, upper, admissible, holds, (x, y))


def check_monotone_slices(data: HyperSpectralData, tol=0.0):
    S = data.slices()
    if np.any(S < -tol) or np.any(np.diff(S, axis=0) < -tol):
        raise PreconditionError("scaling slices must be nonnegative and nondecreasing in k")


def hyper_term_values(data: HyperSpectralData, x, y, z):
    """Weighted rank-one forms <s_k*x, s_k*y, s_k*z>_{T_k}, one per k."""
    out = []
    for k, Tk in enumerate(data.rank_one_terms()):
        s = data.slice(k)
        out.append(float(np.einsum("ijl,i,j,l->", Tk, s * x, s * y, s * z)))
    return np.array(out)


def hyper_bound_check(data: HyperSpectralData, x, y, z, A=None, tol=BOUND_TOL):
    """Sandwich the trilinear form of A between the extreme scaling slices."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if not (x.size == y.size == z.size == data.n):
        raise DimensionError("vector length must match the decomposition")
    check_monotone_slices(data)
    if A is None:
        A = data.reconstruct()
    terms = hyper_term_values(data, x, y, z)
    admissible = bool(np.all(terms >= -tol))
    value = float(np.einsum("ijl,i,j,l->", A, x, y, z))
    s_lo, s_hi = data.slice(0), data.slice(data.n - 1)
    lower = float(np.sum(s_lo ** 3 * x * y * z))
    upper = float(np.sum(s_hi ** 3 * x * y * z))
    scale = max(1.0, abs(value), abs(lower), abs(upper))
    holds = admissible and (lower - tol * scale <= value <= upper + tol * scale)
    return BoundReport(lower, value, upper, admissible, holds, (x, y, z))


@dataclass
class SymmetrizedTriple:
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    residuals: tuple = ()

    def __iter__(self):
        return iter((self.S0, self.S1, self.S2))


def symmetrize3(A):
    """The three BM products of A with its cyclic transposes, and their symmetry defects."""
    A = as_cubic(A)
    At, At2 = T(A), T2(A)
    S = (bm_product(A, At2, At), bm_product(At, A, At2), bm_product(At2, At, A))
    return SymmetrizedTriple(*S, residuals=tuple(cyclic_symmetry_residual(s) for s in S))


def fit_alphas(A, Qt, Et, Ft, terms=None):
    """Least-squares weights of the rank-one terms bm_summand(Qt, Et, Ft, k).

    Returns (alpha, residual, degenerate).  ``terms`` restricts the fit to a
    subset of k; unused weights are reported as 0.  A singular Gram matrix
    falls back to the minimum-norm solution with ``degenerate=True``.
    """
    A = as_cubic(A)
    n = A.shape[0]
    ks = list(range(n)) if terms is None else list(terms)
    Phi = np.stack([bm_summand(Qt, Et, Ft, k).ravel() for k in ks], axis=1) if ks else np.zeros((n ** 3, 0))
    a = A.ravel()
    alpha = np.zeros(n)
    degenerate = False
    if ks:
        G = Phi.T @ Phi
        rhs = Phi.T @ a
        try:
            sol = np.asarray(cramer_solve(G, rhs), dtype=float)
        except SingularSystemError:
            sol = np.linalg.pinv(Phi) @ a
            degenerate = True
        alpha[ks] = sol
        fit = Phi @ sol
    else:
        fit = np.zeros_like(a)
    residual = float(np.linalg.norm(a - fit))
    return alpha, residual, degenerate


@dataclass
class SVD3Report:
    alpha: np.ndarray
    residual: float
    degenerate: bool
    symmetry_residuals: tuple
    factor_residuals: tuple
    Qt: np.ndarray
    Et: np.ndarray
    Ft: np.ndarray
    reports: list = field(default_factory=list)

    def to_dict(self):
        return {
            "alpha": self.alpha.tolist(),
            "residual": float(self.residual),
            "degenerate": bool(self.degenerate),
            "symmetry_residuals": [float(r) for r in self.symmetry_residuals],
            "factor_residuals": [float(r) for r in self.factor_residuals],
        }


def svd3(A, config: SearchConfig = None):
    """Symmetrize, decompose each symmetric product, then fit the weights.

    Each S_i is decomposed as bm_product(B, B^T2, B^T); the factors are placed
    as Qt = B_0, Et = B_1^T2, Ft = B_2^T.
    """
    A = as_cubic(A)
    triple = symmetrize3(A)
    factors, reports = [], []
    for S in triple:
        # tiny asymmetry left by round-off is averaged away before the search
        S = (S + T(S) + T2(S)) / 3.0
        rep = decomposability_search(S, config)
        reports.append(rep)
        factors.append(scaling_factor(rep.Q, rep.W))
    Qt, Et, Ft = factors[0], T2(factors[1]), T(factors[2])
    alpha, residual, degenerate = fit_alphas(A, Qt, Et, Ft)
    return SVD3Report(alpha, residual, degenerate, triple.residuals,
                      tuple(r.residual for r in reports), Qt, Et, Ft, reports)
