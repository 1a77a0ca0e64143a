"""Dense tableau simplex for the small packing LPs behind the multi-sample kappa.

Only the shape the exact engine needs is supported::

    maximize  sum(nu)
    s.t.      A @ nu <= b,  nu >= 0,  with b >= 0

so the slack basis is always feasible and no phase one is required. Pivoting
uses Bland's rule, which rules out cycling and makes the result a
deterministic function of the inputs.
"""

import numpy as np


class Unbounded(ArithmeticError):
    pass


def _pivot(T, rhs, basis, row, col):
    piv = T[row, col]
    T[row] /= piv
    rhs[row] /= piv
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            f = T[i, col]
            T[i] -= f * T[row]
            rhs[i] -= f * rhs[row]
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _optimize(T, rhs, basis, c, allowed, tol, max_iter):
    """Phase-two simplex with Bland's rule; returns final reduced costs."""
    for _ in range(max_iter):
        reduced = c - c[basis] @ T
        in_basis = np.zeros(T.shape[1], dtype=bool)
        in_basis[basis] = True
        entering = np.flatnonzero(allowed & ~in_basis & (reduced > tol))
        if entering.size == 0:
            return reduced
        col = entering[0]
        column = T[:, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise Unbounded("objective is unbounded on the feasible set")
        ratios = rhs[rows] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = ties[np.argmin(np.asarray(basis)[ties])]
        _pivot(T, rhs, basis, row, col)
        np.maximum(rhs, 0.0, out=rhs)
    raise RuntimeError("simplex iteration limit reached")


def solve_packing(A, b, tol=1e-12, lexicographic=True, max_iter=10_000):
    """Maximize ``sum(x)`` subject to ``A x <= b``, ``x >= 0`` (requires ``b >= 0``).

    With ``lexicographic=True`` the returned optimum is the lexicographically
    smallest one: after the main solve the optimal face is fixed by locking out
    columns with strictly negative reduced cost, then ``x[0]``, ``x[1]``, ...
    are minimized in turn over that face.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")
    T = np.hstack([A, np.eye(m)])
    rhs = b.copy()
    basis = list(range(n, n + m))
    allowed = np.ones(n + m, dtype=bool)

    c = np.zeros(n + m)
    c[:n] = 1.0
    reduced = _optimize(T, rhs, basis, c, allowed, tol, max_iter)

    if lexicographic:
        for k in range(n):
            allowed &= reduced >= -tol
            c = np.zeros(n + m)
            c[k] = -1.0
            reduced = _optimize(T, rhs, basis, c, allowed, tol, max_iter)

    x = np.zeros(n + m)
    x[basis] = rhs
    return x[:n]
