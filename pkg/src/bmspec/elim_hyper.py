"""Hypermatrix spectral elimination for cyclically symmetric 3-hypermatrices.

Model: ``A = bm_product(B, T2(B), T(B))`` with ``B = bm_product(Q, D, T(D))``,
``Q`` orthogonal and ``D[i, j, k] = (j == k) * W[i, j]``.  Expanding gives::

    B[i, j, l] = Q[i, j, l] * W[i, j] * W[l, j]
    A[i, j, l] = sum_k Q[i,k,l] Q[j,k,i] Q[l,k,j] * (W[i,k] W[j,k] W[l,k])**2

The semi-symbolic assembly keeps one symbol ``s_ikl`` per entry of ``B``
(``B[i,k,l] = Q[i,k,l] * s_ikl``, with ``s_ikl = W[i,k] W[l,k]``), so every
entry of ``A`` is linear in cubic monomials of these symbols.

At n = 2 the scaling vectors are ``w0 = (w00, w01)`` and ``w1 = (w01, w11)``,
i.e. ``W`` is symmetric.
"""

import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .core import as_cubic, bm_product, bm_product_bg, cyclic_orbits, delta, T, T2
from .errors import (
    DegenerateInstanceError,
    DimensionError,
    IncompleteBasisError,
    PreconditionError,
    SingularSystemError,
)
from .orthogonal import orthogonality_residual
from .polyring import MultiPoly, cramer_solve

PRUNE_RTOL = 1e-12


# ---------------------------------------------------------------- recurrences

def u_sequence(Q, K):
    """[U_0, ..., U_{K-1}] with U_0 = delta and U_{k+1} = bg-product of (Q, Q^T2, Q^T) over U_k."""
    Q = as_cubic(Q, "Q")
    if K < 1:
        raise ValueError("K must be at least 1")
    Qt2, Qt = T2(Q), T(Q)
    out = [delta(Q.shape[0])]
    for _ in range(K - 1):
        out.append(bm_product_bg(out[-1], Q, Qt2, Qt))
    return out


def g_sequence(Q, U, V, K):
    """[G_0, ..., G_{K-1}] with G_0 = delta and G_{k+1} = bg-product of (Q, U, V) over G_k."""
    Q, U, V = (as_cubic(X, name) for X, name in ((Q, "Q"), (U, "U"), (V, "V")))
    if K < 1:
        raise ValueError("K must be at least 1")
    out = [delta(Q.shape[0])]
    for _ in range(K - 1):
        out.append(bm_product_bg(out[-1], Q, U, V))
    return out


# ---------------------------------------------------------------- forward map

def scaling_factor(Q, W):
    """B = bm_product(Q, D, T(D)) for the diagonal-pattern D built from W."""
    Q = as_cubic(Q, "Q")
    W = np.asarray(W, dtype=float)
    if W.shape != Q.shape[:2]:
        raise DimensionError(f"W must have shape {Q.shape[:2]}, got {W.shape}")
    return Q * W[:, :, None] * W.T[None, :, :]


def forward(Q, W):
    """Cyclically symmetric hypermatrix with orthogonal factor Q and scaling W."""
    Q = as_cubic(Q, "Q")
    W2 = np.asarray(W, dtype=float) ** 2
    if W2.shape != Q.shape[:2]:
        raise DimensionError(f"W must have shape {Q.shape[:2]}, got {W2.shape}")
    return np.einsum("ikl,jki,lkj,ik,jk,lk->ijl", Q, Q, Q, W2, W2, W2, optimize=True)


def w_matrix(w00, w01, w11):
    return np.array([[w00, w01], [w01, w11]], dtype=float)


def fibers(Q):
    """Mode-2 fibres q_ab = (Q[a, k, b])_k of a 2x2x2 hypermatrix, keyed by (a, b)."""
    Q = as_cubic(Q, "Q")
    if Q.shape[0] != 2:
        raise DimensionError("fibers are defined for 2x2x2 input")
    return {(a, b): Q[a, :, b].copy() for a in range(2) for b in range(2)}


def assemble222(q00, q01, q10, q11, w0, w1):
    """2x2x2 cyclically symmetric hypermatrix from fibres and scaling vectors."""
    q00, q01, q10, q11, w0, w1 = (np.asarray(v, dtype=float) for v in (q00, q01, q10, q11, w0, w1))
    if any(v.shape != (2,) for v in (q00, q01, q10, q11, w0, w1)):
        raise DimensionError("assemble222 needs six vectors of length 2")
    a000 = float(np.sum(w0 ** 6 * q00 ** 3))
    a111 = float(np.sum(w1 ** 6 * q11 ** 3))
    a011 = float(np.sum(w0 ** 2 * w1 ** 4 * q01 * q10 * q11))
    a100 = float(np.sum(w0 ** 4 * w1 ** 2 * q10 * q01 * q00))
    A = np.empty((2, 2, 2))
    A[0, 0, 0] = a000
    A[1, 1, 1] = a111
    A[0, 1, 1] = A[1, 1, 0] = A[1, 0, 1] = a011
    A[1, 0, 0] = A[0, 0, 1] = A[0, 1, 0] = a100
    return A


def delta_rows222(q00, q01, q10, q11):
    """The assembly with all weights at the zeroth Hadamard power (all ones)."""
    one = np.ones(2)
    return assemble222(q00, q01, q10, q11, one, one)


# ---------------------------------------------------------------- 2x2x2 relations

CHAR_VARS = ("u", "v", "t")


def charpoly222(a000, a111):
    """Characteristic polynomial p(u, v, t) in u = w00^6, v = w01^6, t = w11^6.

    Returns (poly, evaluator) where evaluator takes (w00, w01, w11).
    """
    u, v, t = MultiPoly.gens(CHAR_VARS)
    p = (u * t - v ** 2) + v * (a000 + a111) - (a111 * u + a000 * t)

    def evaluate(w00, w01, w11):
        return p.evaluate([w00 ** 6, w01 ** 6, w11 ** 6])

    return p, evaluate


def _relation_sides222(A, w00, w01, w11):
    A = as_cubic(A)
    if A.shape[0] != 2:
        raise DimensionError("the 2x2x2 relations need a 2x2x2 input")
    a000, a111, a001, a011 = A[0, 0, 0], A[1, 1, 1], A[0, 0, 1], A[0, 1, 1]
    scale = max(1.0, float(np.max(np.abs(A))))
    u, v, t = w00 ** 6, w01 ** 6, w11 ** 6
    wscale = max(abs(u), abs(v), abs(t), 1e-300)
    if abs(a001) <= 1e-14 * scale or abs(a011) <= 1e-14 * scale:
        raise DegenerateInstanceError("a001 or a011 vanishes; the relations are undefined")
    if abs(u - v) <= 1e-14 * wscale or abs(v - t) <= 1e-14 * wscale:
        raise DegenerateInstanceError("sixth powers of the scaling entries must be distinct")
    X = (w00 ** 4 * w01 ** 2 - w01 ** 4 * w11 ** 2) ** 3 / (a001 ** 3 * (u - v))
    Y = (w00 ** 2 * w01 ** 4 - w01 ** 2 * w11 ** 4) ** 3 / (a011 ** 3 * (v - t))
    return [(X * (a000 - v), Y * (a111 - t)), (X * (u - a000), Y * (v - a111))]


def vandermonde_relations222_residual(A, w00, w01, w11):
    """Max violation of the two block-Vandermonde relations of a 2x2x2 instance."""
    return max(abs(l - r) for l, r in _relation_sides222(A, w00, w01, w11))


def vandermonde_relations222_scale(A, w00, w01, w11):
    """Magnitude of the relation terms, for relative comparisons."""
    return max(max(abs(l), abs(r)) for l, r in _relation_sides222(A, w00, w01, w11))


# ---------------------------------------------------------------- monomial systems

def variable_count(n):
    """n * (number of cyclic orbits on index triples)."""
    return n * (n + 2 * comb(n, 2) + 2 * comb(n, 3))


@dataclass
class MonomialSystem:
    """Linear system whose unknowns are monomials in scaling symbols.

    ``svars`` are the symbols; ``s_map[v]`` gives the exponents of symbol v in
    the underlying scaling entries ``dvars``.  Row r reads
    ``matrix[r] @ monomial_values == rhs[r]``.
    """

    svars: tuple
    dvars: tuple
    s_map: np.ndarray
    basis: list
    matrix: np.ndarray
    rhs: np.ndarray
    row_labels: list
    expected_count: int = None
    warnings: list = field(default_factory=list)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def underdetermined(self):
        return self.matrix.shape[1] > np.linalg.matrix_rank(self.matrix) if self.matrix.size else True

    def d_exponents(self, idx):
        """Exponent vector over ``dvars`` of basis monomial ``idx``."""
        return np.asarray(self.basis[idx], dtype=int) @ self.s_map

    def symbol_values(self, dvals):
        dvals = np.asarray(dvals, dtype=float).ravel()
        if dvals.size != len(self.dvars):
            raise DimensionError(f"expected {len(self.dvars)} scaling values, got {dvals.size}")
        return np.prod(dvals[None, :] ** self.s_map, axis=1)

    def evaluate_basis(self, dvals):
        s = self.symbol_values(dvals)
        E = np.asarray(self.basis, dtype=int)
        return np.prod(s[None, :] ** E, axis=1)

    def residual(self, x):
        x = np.asarray(x, dtype=float)
        if not self.rhs.size:
            return 0.0
        return float(np.max(np.abs(self.matrix @ x - self.rhs)))

    def solve(self):
        """Least-squares (minimum-norm) solution for the monomial values."""
        M, b = self.matrix, self.rhs
        if M.shape[0] == M.shape[1]:
            try:
                return np.asarray(cramer_solve(M, b), dtype=float)
            except SingularSystemError:
                pass
        return np.linalg.lstsq(M, b, rcond=None)[0]


def _s_name(prefix, t):
    return prefix + "_" + "_".join(str(i) for i in t)


def _expand(entries, rhs_of, levels, factors, svars, dvars, s_map, expected=None, prune_rtol=PRUNE_RTOL):
    """Shared expansion: entries are (i, j, l); factors(i, j, l, a, b, c) -> list of (coef, exps)."""
    collected = []
    labels = []
    for k, U in enumerate(levels):
        for (i, j, l) in entries:
            acc = {}
            nz = np.argwhere(U != 0)
            for a, b, c in nz:
                w = U[a, b, c]
                for coef, e in factors(i, j, l, a, b, c):
                    if coef:
                        acc[e] = acc.get(e, 0.0) + w * coef
            collected.append(acc)
            labels.append((k, (i, j, l)))
    big = max((abs(c) for acc in collected for c in acc.values()), default=0.0)
    cut = prune_rtol * big
    basis_set = set()
    for acc in collected:
        for e in [e for e, c in acc.items() if abs(c) <= cut]:
            del acc[e]
        basis_set.update(acc)
    basis = sorted(basis_set, reverse=True)
    col = {e: idx for idx, e in enumerate(basis)}
    M = np.zeros((len(collected), len(basis)))
    for r, acc in enumerate(collected):
        for e, c in acc.items():
            M[r, col[e]] = c
    rhs = np.array([rhs_of(i, j, l) for _, (i, j, l) in labels], dtype=float)
    system = MonomialSystem(tuple(svars), tuple(dvars), s_map, basis, M, rhs, labels, expected)
    if expected is not None and len(basis) != expected:
        msg = f"monomial basis has {len(basis)} elements, count formula gives {expected}"
        system.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
    if len(basis) > len(collected):
        system.warnings.append(f"underdetermined: {len(basis)} unknowns, {len(collected)} rows")
    return system


def _poly_product_terms(polys):
    """Multiply MultiPoly factors and return their (coef, exps) terms."""
    out = polys[0]
    for p in polys[1:]:
        out = out * p
    return [(c, e) for e, c in out.terms.items()]


def spectral_system(A, Q, K, prune_rtol=PRUNE_RTOL, check_count=True):
    """Semi-symbolic linear system for the monomials of the scaling symbols.

    One equation per (level k < K, cyclic orbit representative).  Terms whose
    coefficient is below ``prune_rtol`` times the largest one are dropped
    (round-off left by backgrounds that equal delta analytically).  The basis
    size is compared with ``variable_count(n)`` when ``check_count`` is set.
    """
    A, Q = as_cubic(A), as_cubic(Q, "Q")
    n = Q.shape[0]
    if A.shape != Q.shape:
        raise DimensionError("A and Q must have the same shape")
    if not (1 <= K <= n):
        raise ValueError(f"K must lie in [1, {n}]")
    triples = [(i, k, l) for i in range(n) for k in range(n) for l in range(n)]
    svars = [_s_name("s", t) for t in triples]
    dvars = [f"d_{i}_{k}" for i in range(n) for k in range(n)]
    s_map = np.zeros((len(svars), len(dvars)), dtype=int)
    for v, (i, k, l) in enumerate(triples):
        s_map[v, i * n + k] += 1
        s_map[v, l * n + k] += 1
    S = MultiPoly.gens(svars)
    B = {t: Q[t] * S[v] for v, t in enumerate(triples)}

    def factors(i, j, l, a, b, c):
        # bg product of (B, B^T2, B^T): B[i,a,l] * B[j,b,i] * B[l,c,j]
        return _poly_product_terms([B[(i, a, l)], B[(j, b, i)], B[(l, c, j)]])

    levels = u_sequence(Q, K)
    return _expand(cyclic_orbits(n), lambda i, j, l: A[i, j, l], levels, factors,
                   svars, dvars, s_map, expected=variable_count(n) if check_count else None,
                   prune_rtol=prune_rtol)


def w_values(W):
    """Scaling values in the order of ``spectral_system(...).dvars``."""
    return np.asarray(W, dtype=float).ravel()


def general_spectral_system(A, Q, U, V, K, tol=1e-8, prune_rtol=PRUNE_RTOL):
    """Linear system for the general model with three scaling tables.

    Factors: ``B0[i,j,l] = Q[i,j,l] d0[i,j] d0[l,j]``,
    ``B1[i,j,l] = U[i,j,l] d1[i,l] d1[j,l]``,
    ``B2[i,j,l] = V[i,j,l] d2[l,i] d2[j,i]``, and
    ``A = bg-product over G_k of (B0, B1, B2)``.  One equation per entry.
    """
    A = as_cubic(A)
    Q, U, V = (as_cubic(X, name) for X, name in ((Q, "Q"), (U, "U"), (V, "V")))
    n = Q.shape[0]
    if not (A.shape == Q.shape == U.shape == V.shape):
        raise DimensionError("A, Q, U, V must share one shape")
    err = float(np.max(np.abs(bm_product(Q, U, V) - delta(n))))
    if err > tol:
        raise PreconditionError(f"(Q, U, V) is not an orthogonal triple (residual {err:.3g})")
    if not (1 <= K <= n):
        raise ValueError(f"K must lie in [1, {n}]")
    triples = [(i, j, l) for i in range(n) for j in range(n) for l in range(n)]
    svars, rows = [], []
    nd = n * n
    dvars = [f"{p}_{i}_{k}" for p in ("d0", "d1", "d2") for i in range(n) for k in range(n)]
    for p, prefix in enumerate(("x", "y", "z")):
        for (i, j, l) in triples:
            svars.append(_s_name(prefix, (i, j, l)))
            m = np.zeros(3 * nd, dtype=int)
            if p == 0:
                m[i * n + j] += 1
                m[l * n + j] += 1
            elif p == 1:
                m[nd + i * n + l] += 1
                m[nd + j * n + l] += 1
            else:
                m[2 * nd + l * n + i] += 1
                m[2 * nd + j * n + i] += 1
            rows.append(m)
    s_map = np.array(rows, dtype=int)
    S = MultiPoly.gens(svars)
    m3 = n ** 3
    idx = {t: v for v, t in enumerate(triples)}
    B0 = {t: Q[t] * S[idx[t]] for t in triples}
    B1 = {t: U[t] * S[m3 + idx[t]] for t in triples}
    B2 = {t: V[t] * S[2 * m3 + idx[t]] for t in triples}

    def factors(i, j, l, a, b, c):
        return _poly_product_terms([B0[(i, a, l)], B1[(i, j, b)], B2[(c, j, l)]])

    levels = g_sequence(Q, U, V, K)
    return _expand(triples, lambda i, j, l: A[i, j, l], levels, factors, svars, dvars, s_map,
                   prune_rtol=prune_rtol)


def general_forward(Q, U, V, d0, d1, d2, G=None):
    """Forward map of the general model (background delta unless G given)."""
    Q, U, V = (as_cubic(X) for X in (Q, U, V))
    d0, d1, d2 = (np.asarray(d, dtype=float) for d in (d0, d1, d2))
    B0 = Q * np.einsum("ij,lj->ijl", d0, d0)
    B1 = U * np.einsum("il,jl->ijl", d1, d1)
    B2 = V * np.einsum("li,ji->ijl", d2, d2)
    if G is None:
        return bm_product(B0, B1, B2)
    return bm_product_bg(G, B0, B1, B2)


# ---------------------------------------------------------------- consistency

def monomial_consistency_residual(system: MonomialSystem, solution, pure_power=6):
    """Largest gap between composite monomial values and the products of pure powers.

    For a composite with scaling exponents alpha the prediction is
    prod_v (pure_v ** (1/3)) ** (alpha_v / 2), where pure_v is the value of the
    basis monomial d_v**6.  Odd exponents leave a sign undetermined, so
    absolute values are compared there.
    """
    x = np.asarray(solution, dtype=float).ravel()
    if x.size != len(system.basis):
        raise DimensionError("solution length must match the monomial basis")
    dexp = [system.d_exponents(i) for i in range(len(system.basis))]
    pure = {}
    for idx, e in enumerate(dexp):
        nz = np.flatnonzero(e)
        if nz.size == 1 and e[nz[0]] == pure_power:
            pure.setdefault(int(nz[0]), []).append(x[idx])
    root = {v: np.cbrt(np.mean(vals)) for v, vals in pure.items()}
    worst = 0.0
    for idx, e in enumerate(dexp):
        nz = np.flatnonzero(e)
        if nz.size == 1 and e[nz[0]] == pure_power:
            continue
        missing = [system.dvars[v] for v in nz if v not in root]
        if missing:
            raise IncompleteBasisError(f"no pure power for {', '.join(missing)}")
        odd = bool(np.any(e[nz] % 2))
        if odd:
            target = np.prod([abs(root[v]) ** (e[v] / 2.0) for v in nz])
            val = abs(x[idx])
        else:
            target = np.prod([root[v] ** (e[v] // 2) for v in nz])
            val = x[idx]
        worst = max(worst, abs(val - target))
    # pure powers listed more than once must agree
    for vals in pure.values():
        worst = max(worst, float(np.ptp(vals)))
    return worst


def consistency_from_values(pure_values, composites):
    """Direct form of the check on explicit values.

    ``pure_values`` maps a scaling name to the value of its sixth power;
    ``composites`` is a list of (exponent dict, value).  Returns the max gap.
    """
    worst = 0.0
    for exps, val in composites:
        target = 1.0
        for name, a in exps.items():
            if name not in pure_values:
                raise IncompleteBasisError(f"no pure power for {name}")
            target *= np.cbrt(pure_values[name]) ** (a / 2.0)
        worst = max(worst, abs(val - target))
    return worst


def check_orthogonal(Q, tol=1e-8):
    err = orthogonality_residual(Q)
    if err > tol:
        raise PreconditionError(f"Q is not orthogonal (residual {err:.3g})")
    return err
