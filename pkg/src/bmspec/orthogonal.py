"""Orthogonal 3-hypermatrices: the closed-form 2x2x2 family and its direct sums."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import as_cubic, bm_product, bm_summand, delta, direct_sum, T, T2
from .errors import DimensionError, NumericRangeError

R_LIMIT = 300.0
_EXP_LIMIT = 709.0


@dataclass(frozen=True)
class OrthParams:
    """Parameters of a direct sum of 2x2x2 orthogonal blocks.

    ``blocks`` holds one 6-tuple per 2x2x2 block; ``singleton`` appends a
    trailing 1x1x1 block with entry 1 (used to pad odd sizes).
    """

    blocks: tuple = ()
    singleton: bool = False

    def __post_init__(self):
        blocks = tuple(tuple(float(v) for v in b) for b in self.blocks)
        for b in blocks:
            if len(b) != 6:
                raise ValueError(f"each block needs exactly 6 parameters, got {len(b)}")
            if not all(np.isfinite(b)):
                raise ValueError("block parameters must be finite")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "singleton", bool(self.singleton))

    @property
    def n(self):
        return 2 * len(self.blocks) + int(self.singleton)

    def flat(self):
        return np.array([v for b in self.blocks for v in b], dtype=float)

    @classmethod
    def from_flat(cls, r, singleton=False):
        r = np.asarray(r, dtype=float).ravel()
        if r.size % 6:
            raise ValueError("flat parameter vector length must be a multiple of 6")
        return cls(tuple(tuple(r[i:i + 6]) for i in range(0, r.size, 6)), singleton)

    @classmethod
    def for_size(cls, n, rng=None, low=-1.0, high=1.0):
        """Random parameters for an n x n x n direct sum (zeros when rng is None)."""
        if n < 1:
            raise DimensionError("n must be positive")
        nb = n // 2
        if rng is None:
            r = np.zeros(6 * nb)
        else:
            r = rng.uniform(low, high, size=6 * nb)
        return cls.from_flat(r, singleton=bool(n % 2))


def _exp(x):
    if x > _EXP_LIMIT:
        raise NumericRangeError(f"exponent {x:.3g} overflows double precision")
    return float(np.exp(x))


def orth222(r: Sequence[float]):
    """Member of the closed-form 2x2x2 orthogonal family.

    Entries (r1..r6 = r[0]..r[5])::

        q000 = e^{r3} / (e^{3r3} + e^{3r6})^{1/3}
        q001 = e^{r4}
        q010 = e^{r6} / (e^{3r3} + e^{3r6})^{1/3}
        q011 = e^{r2}
        q100 = -e^{r2 - r3 - r4 + r5 + r6}
        q101 = e^{r1 + r3 - r6} / (e^{3r1} + e^{3r1 + 3r3 - 3r6})^{1/3}
        q110 = e^{r5}
        q111 = e^{r1} / (e^{3r1} + e^{3r1 + 3r3 - 3r6})^{1/3}

    The cube-root denominators are evaluated in log space.
    """
    r = np.asarray(r, dtype=float).ravel()
    if r.size != 6:
        raise ValueError(f"orth222 needs 6 parameters, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise NumericRangeError("parameters must be finite")
    if np.max(np.abs(r)) > R_LIMIT:
        raise NumericRangeError(f"|r_k| must not exceed {R_LIMIT}")
    r1, r2, r3, r4, r5, r6 = r
    log_d0 = np.logaddexp(3 * r3, 3 * r6) / 3.0
    log_d1 = np.logaddexp(3 * r1, 3 * r1 + 3 * r3 - 3 * r6) / 3.0
    Q = np.empty((2, 2, 2))
    Q[0, 0, 0] = _exp(r3 - log_d0)
    Q[0, 0, 1] = _exp(r4)
    Q[0, 1, 0] = _exp(r6 - log_d0)
    Q[0, 1, 1] = _exp(r2)
    Q[1, 0, 0] = -_exp(r2 - r3 - r4 + r5 + r6)
    Q[1, 0, 1] = _exp(r1 + r3 - r6 - log_d1)
    Q[1, 1, 0] = _exp(r5)
    Q[1, 1, 1] = _exp(r1 - log_d1)
    if not np.all(np.isfinite(Q)):
        raise NumericRangeError("non-finite entry in orth222")
    return Q


def orth_direct_sum(params: OrthParams, n=None):
    """Block-diagonal orthogonal hypermatrix from ``params``."""
    if n is not None and n != params.n:
        raise ValueError(f"parameters describe n={params.n}, requested n={n}")
    blocks = [orth222(b) for b in params.blocks]
    if params.singleton:
        blocks.append(np.ones((1, 1, 1)))
    if not blocks:
        raise ValueError("no blocks to sum")
    return direct_sum(blocks)


def orthogonality_residual(Q):
    """Max-norm distance of bm_product(Q, Q^{T^2}, Q^T) from delta."""
    Q = as_cubic(Q, "Q")
    P = bm_product(Q, T2(Q), T(Q))
    return float(np.max(np.abs(P - delta(Q.shape[0]))))


def resolution_residual(Q, x, y, z):
    """Gap between the delta form and its split into BM summand forms of Q."""
    Q = as_cubic(Q, "Q")
    n = Q.shape[0]
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if not (x.size == y.size == z.size == n):
        raise DimensionError(f"vectors must have length {n}")
    lhs = float(np.sum(x * y * z))
    Qt2, Qt = T2(Q), T(Q)
    rhs = 0.0
    for k in range(n):
        rhs += float(np.einsum("ijl,i,j,l->", bm_summand(Q, Qt2, Qt, k), x, y, z))
    return abs(lhs - rhs)
