"""Independent reference computations used by the tests.

Everything here is written from the definitions with plain loops or brute
force, without calling into the package's solvers.
"""

from functools import lru_cache
from itertools import combinations_with_replacement, permutations

import numpy as np


def min_ratio_kappa(eta0, eta1, tol=1e-9):
    """Largest k with eta0 - k eta1 >= 0, found coordinate by coordinate.

    Entries at or below ``tol`` are outside the support, as in the library.
    """
    best = 1.0
    for a, b in zip(eta0, eta1):
        if b > tol:
            best = min(best, (a if a > tol else 0.0) / b)
    return max(best, 0.0)


def simplex_grid(K, step):
    """All points of the K-simplex whose coordinates are multiples of ``step``."""
    r = int(round(1 / step))
    for cuts in combinations_with_replacement(range(r + 1), K - 1):
        edges = (0,) + cuts + (r,)
        yield np.diff(edges) / r


def _compositions(K, r):
    """All nonnegative integer K-vectors summing to r."""
    if K == 1:
        return np.array([[r]])
    if K == 2:
        i = np.arange(r + 1)
        return np.column_stack([i, r - i])
    return np.vstack([np.column_stack([np.full(len(c), a), c]) for a in range(r + 1) for c in [_compositions(K - 1, r - a)]])


@lru_cache(maxsize=None)
def simplex_grid_array(K, step):
    """Same points as ``simplex_grid``, as one array (cached)."""
    r = int(round(1 / step))
    return _compositions(K, r) / r


def grid_multi_kappa(eta0, etas, step=1e-3):
    """max over directions mu on a grid of the largest feasible scale t <= 1."""
    eta0 = np.asarray(eta0, dtype=float)
    E = np.asarray(etas, dtype=float)
    mus = simplex_grid_array(len(E), step)
    D = mus @ E
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(D > 1e-15, eta0[None, :] / D, np.inf)
    t = np.minimum(ratio.min(axis=1), 1.0)
    return float(t.max())


def self_mixing_matrix(rng, L):
    """Rows pi_i = k_i e_i + (1 - k_i) (convex combination of the other rows).

    Solving the defining linear system gives Pi = (I - diag(1-k) W)^-1 diag(k)
    with W row-stochastic and zero on the diagonal.
    """
    k = rng.uniform(0.05, 1.0, size=L)
    W = np.zeros((L, L))
    for i in range(L):
        others = [j for j in range(L) if j != i]
        W[i, others] = rng.dirichlet(np.ones(L - 1))
    A = np.diag(1 - k) @ W
    return np.linalg.solve(np.eye(L) - A, np.diag(k)), k, W


def inverse_sign_ok(pi):
    inv = np.linalg.inv(pi)
    off = inv - np.diag(np.diag(inv))
    return bool(np.all(np.diag(inv) > 1e-9) and np.all(off < 1e-9))


def best_match_error(estimates, truth):
    """Smallest max componentwise error over all matchings."""
    est = [np.asarray(getattr(e, "weights", e), dtype=float) for e in estimates]
    tru = [np.asarray(t, dtype=float) for t in truth]
    return min(
        max(np.abs(est[p[i]] - tru[i]).max() for i in range(len(tru)))
        for p in permutations(range(len(tru)))
    )


def brute_kappa_hat(f, h, eps_f, eps_h):
    """Infimum of (F+e)/(H-e)_+ over every interval (a, b] with a < b among sorted atoms.

    ``f`` and ``h`` map atom positions to masses.
    """
    xs = sorted(set(f) | set(h))
    best = np.inf
    for i in range(len(xs)):
        F = H = 0.0
        for j in range(i, len(xs)):
            F += f.get(xs[j], 0.0)
            H += h.get(xs[j], 0.0)
            if H - eps_h > 1e-12:
                best = min(best, (F + eps_f) / (H - eps_h))
    return max(best, 0.0)


def brute_interval_sup(points_a, w_a, points_b, w_b):
    """max over intervals of |A(I) - B(I)| for two discrete measures, by enumeration."""
    xs = np.unique(np.concatenate([points_a, points_b]))
    best = 0.0
    for i in range(len(xs)):
        for j in range(i, len(xs)):
            lo, hi = xs[i], xs[j]
            a = np.sum(w_a[(points_a >= lo) & (points_a <= hi)])
            b = np.sum(w_b[(points_b >= lo) & (points_b <= hi)])
            best = max(best, abs(a - b))
    return best
