"""Slow reference implementations used to cross-check the library.

Nothing in the pipelines calls into this module.
"""

import numpy as np


def bm_product_loops(A, B, C):
    n = len(A)
    P = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = 0.0
                for k in range(n):
                    s += A[i][k][l] * B[i][j][k] * C[k][j][l]
                P[i, j, l] = s
    return P


def bm_product_bg_loops(U, A, B, C):
    n = len(A)
    P = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = 0.0
                for a in range(n):
                    for b in range(n):
                        for c in range(n):
                            s += A[i][a][l] * B[i][j][b] * C[c][j][l] * U[a][b][c]
                P[i, j, l] = s
    return P


def trilinear_loops(T, x, y, z):
    n = len(x)
    s = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s += T[i][j][k] * x[i] * y[j] * z[k]
    return s


def cyclic_transpose_loops(A):
    n = len(A)
    B = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                B[i, j, k] = A[k][i][j]
    return B


def matrix_power_loops(A, m):
    n = len(A)
    P = np.eye(n)
    for _ in range(m):
        Q = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                Q[i, j] = sum(P[i, k] * A[k][j] for k in range(n))
        P = Q
    return P


def cofactor_det(M):
    """Laplace expansion along the first row."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        minor = [list(row[:j]) + list(row[j + 1:]) for row in M[1:]]
        term = M[0][j] * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobi_eigh(A, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi rotations for a real symmetric matrix.

    Returns (eigenvalues ascending, eigenvectors as columns).
    """
    a = np.array(A, dtype=float)
    n = a.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.linalg.norm(a)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(n)
                R[p, p] = R[q, q] = c
                R[p, q], R[q, p] = s, -s
                a = R.T @ a @ R
                V = V @ R
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], V[:, order]
