"""Dense order-3 hypermatrices and the Bhattacharya-Mesner (BM) algebra.

A hypermatrix is a plain ``numpy.ndarray`` of shape ``(n, n, n)``.  Numpy's
C order is the storage contract: entry ``(i, j, k)`` sits at flat offset
``(i*n + j)*n + k``.

Conventions used throughout the package:

* cyclic transpose ``T``:  ``A^T[i, j, k] = A[k, i, j]``
* BM product:              ``P[i, j, l] = sum_k A[i, k, l] B[i, j, k] C[k, j, l]``
* background product:      ``P[i, j, l] = sum_{a,b,c} A[i, a, l] B[i, j, b] C[c, j, l] U[a, b, c]``

Under these conventions a hypermatrix ``Q`` is orthogonal when
``bm_product(Q, T(T(Q)), T(Q)) == delta(n)``.
"""

import numpy as np

from .errors import DimensionError


def as_cubic(A, name="A"):
    """Return ``A`` as a float array of shape (n, n, n), or raise."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 3 or not (A.shape[0] == A.shape[1] == A.shape[2]) or A.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty cubic 3-hypermatrix, got shape {A.shape}")
    return A


def _same_side(*arrays):
    arrays = [as_cubic(a, f"operand {i}") for i, a in enumerate(arrays)]
    n = arrays[0].shape[0]
    if any(a.shape[0] != n for a in arrays):
        raise DimensionError("operands must share the same side length, got "
                             + ", ".join(str(a.shape) for a in arrays))
    return arrays


def delta(n):
    """Kronecker delta hypermatrix: 1 where i == j == k, else 0."""
    if int(n) != n or n < 1:
        raise DimensionError(f"delta needs n >= 1, got {n}")
    n = int(n)
    D = np.zeros((n, n, n))
    idx = np.arange(n)
    D[idx, idx, idx] = 1.0
    return D


def ones(n):
    return np.ones((n, n, n))


def cyclic_transpose(A, times=1):
    """Cyclic index shift, ``B[i, j, k] = A[k, i, j]``, applied ``times`` times."""
    A = as_cubic(A)
    for _ in range(times % 3):
        A = np.transpose(A, (1, 2, 0))
    return np.ascontiguousarray(A)


def T(A):
    return cyclic_transpose(A, 1)


def T2(A):
    return cyclic_transpose(A, 2)


def bm_product(A, B, C):
    """BM ternary product of three cubic hypermatrices."""
    A, B, C = _same_side(A, B, C)
    return np.einsum("ikl,ijk,kjl->ijl", A, B, C)


def bm_product_bg(U, A, B, C):
    """BM product with background hypermatrix ``U``.

    ``bm_product_bg(delta(n), A, B, C)`` equals ``bm_product(A, B, C)``.
    """
    U, A, B, C = _same_side(U, A, B, C)
    return np.einsum("ial,ijb,cjl,abc->ijl", A, B, C, U, optimize=True)


def bm_summand(A, B, C, k):
    """The k-th term of the BM sum: ``A[i, k, l] * B[i, j, k] * C[k, j, l]``."""
    A, B, C = _same_side(A, B, C)
    n = A.shape[0]
    if not (0 <= k < n):
        raise IndexError(f"summand index {k} out of range for n={n}")
    return np.einsum("il,ij,jl->ijl", A[:, k, :], B[:, :, k], C[k, :, :])


def multilinear_form(T_, x, y, z=None):
    """Bilinear form of a matrix or trilinear form of a 3-hypermatrix.

    ``z`` must be supplied iff ``T_`` has order 3.
    """
    T_ = np.asarray(T_, dtype=float)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if T_.ndim == 2:
        if z is not None:
            raise DimensionError("a matrix form takes exactly two vectors")
        if T_.shape != (x.size, y.size):
            raise DimensionError(f"form of shape {T_.shape} does not match vectors {x.size}, {y.size}")
        return float(x @ T_ @ y)
    if T_.ndim == 3:
        if z is None:
            raise DimensionError("a 3-hypermatrix form takes three vectors")
        z = np.asarray(z, dtype=float)
        if T_.shape != (x.size, y.size, z.size):
            raise DimensionError(f"form of shape {T_.shape} does not match vectors")
        return float(np.einsum("ijk,i,j,k->", T_, x, y, z))
    raise DimensionError(f"forms are defined for order 2 or 3, got order {T_.ndim}")


def hadamard(A, B):
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise DimensionError(f"Hadamard product needs equal shapes, got {A.shape} and {B.shape}")
    return A * B


def hadamard_pow(A, m):
    """Elementwise power; the zeroth power is all ones (including for zero entries)."""
    if int(m) != m or m < 0:
        raise ValueError(f"Hadamard exponent must be a non-negative integer, got {m}")
    A = np.asarray(A, dtype=float)
    if m == 0:
        return np.ones_like(A)
    return A ** int(m)


def direct_sum(blocks):
    """Block-diagonal hypermatrix built from cubic blocks."""
    blocks = [as_cubic(b, "block") for b in blocks]
    if not blocks:
        raise ValueError("direct_sum needs at least one block")
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n, n))
    o = 0
    for b in blocks:
        m = b.shape[0]
        out[o:o + m, o:o + m, o:o + m] = b
        o += m
    return out


def cyclic_symmetry_residual(A):
    """Max deviation of ``A`` from invariance under the cyclic index shift."""
    A = as_cubic(A)
    return float(np.max(np.abs(A - T(A))))


def cyclic_symmetrize(A):
    A = as_cubic(A)
    return (A + T(A) + T2(A)) / 3.0


def cyclic_orbits(n):
    """Representatives of the cyclic orbits on index triples, in lexicographic order.

    The representative of an orbit is its lexicographically smallest rotation.
    There are ``n + 2*C(n,2) + 2*C(n,3)`` of them.
    """
    reps = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                t = (i, j, k)
                if t == min(t, (j, k, i), (k, i, j)):
                    reps.append(t)
    return reps


def orbit_of(t):
    i, j, k = t
    return min((i, j, k), (j, k, i), (k, i, j))
