"""Finite-sample machinery: samples, data-anchored set families and kappa estimators.

All estimators produced by the finite-sample algorithms are affine
combinations of the empirical distributions of the observed samples, so they
are stored as coefficient vectors (:class:`SignedMixture`). A
:class:`EmpiricalPool` precomputes, for every candidate set of the chosen VC
family, the empirical mass of each sample; evaluating any estimator on every
set is then one matrix-vector product.
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .config import EPS_SCALE, RADIUS, TOL
from .errors import EmptyCandidateFamily, KappaOne, LengthMismatch

FAMILIES = ("intervals-1d", "axis-rectangles", "balls")
BINARY_MAGIC = b"MCMS"
DEFAULT_BUDGET = 200_000


# -- samples -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` points in ``R^d`` drawn from one contaminated source.

    ``weights`` is optional; when given the set describes a discrete
    distribution exactly (atoms with probabilities) instead of an i.i.d. sample.
    """

    points: np.ndarray
    source_label: Union[int, str] = 0
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("a sample needs at least one point")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.array(self.weights, dtype=float).reshape(-1)
            if w.size != pts.shape[0] or w.min() < 0 or abs(w.sum() - 1) > TOL.eq:
                raise ValueError("weights must be nonnegative, one per point, summing to 1")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.weights is not None

    def point_weights(self) -> np.ndarray:
        return self.weights if self.weights is not None else np.full(self.n, 1.0 / self.n)

    def fraction_in_box(self, lo, hi) -> float:
        """Empirical mass of the box ``{x : lo < x <= hi}`` (coordinatewise)."""
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.d,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.d,))
        inside = np.all((self.points > lo) & (self.points <= hi), axis=1)
        return float(self.point_weights()[inside].sum())

    # serialization

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{j}" for j in range(self.d)])
            for row in self.points:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, source_label=0) -> "SampleSet":
        text = Path(path).read_text()
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        try:
            [float(v) for v in rows[0]]
        except ValueError:
            rows = rows[1:]
        return cls(np.array([[float(v) for v in r] for r in rows]), source_label)

    def to_binary(self, path) -> None:
        header = BINARY_MAGIC + struct.pack("<II", self.n, self.d)
        body = np.ascontiguousarray(self.points, dtype="<f8").tobytes()
        Path(path).write_bytes(header + body)

    @classmethod
    def from_binary(cls, path, source_label=0) -> "SampleSet":
        raw = Path(path).read_bytes()
        if raw[:4] != BINARY_MAGIC:
            raise ValueError("not an MCMS sample file")
        n, d = struct.unpack("<II", raw[4:12])
        pts = np.frombuffer(raw[12:], dtype="<f8")
        if pts.size != n * d:
            raise ValueError(f"expected {n * d} values, found {pts.size}")
        return cls(pts.reshape(n, d), source_label)


# -- VC classes and candidate families ---------------------------------------


@dataclass(frozen=True)
class VCClassSpec:
    family: str = "intervals-1d"
    dim: int = 1
    # max number of candidate sets; None keeps every data-anchored set
    anchor_budget: Optional[int] = DEFAULT_BUDGET

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.family == "intervals-1d" and self.dim != 1:
            raise ValueError("intervals-1d requires one-dimensional data")
        if self.anchor_budget is not None and self.anchor_budget < 1:
            raise ValueError("anchor_budget must be positive")

    @property
    def vc_dimension(self) -> int:
        if self.family == "intervals-1d":
            return 2
        if self.family == "axis-rectangles":
            return 2 * self.dim
        return self.dim + 1


def vc_epsilon(V: int, n: int, delta: float) -> float:
    """Uniform deviation radius ``3 sqrt((V ln(n+1) - ln(delta/2)) / n)``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n < 1 or V < 1:
        raise ValueError("need n >= 1 and V >= 1")
    return 3.0 * math.sqrt((V * math.log(n + 1) - math.log(delta / 2.0)) / n)


def _strided_cuts(values: np.ndarray, max_cuts: Optional[int]) -> np.ndarray:
    """Distinct sorted values thinned by a power-of-two stride, always keeping the max.

    Power-of-two strides make the cut sets for larger budgets supersets of
    those for smaller budgets, so families grow monotonically with the budget.
    """
    u = np.unique(values)
    if max_cuts is None or u.size <= max_cuts:
        return u
    stride = 1
    while math.ceil(u.size / stride) + 1 > max_cuts:
        stride *= 2
    idx = np.arange(0, u.size, stride)
    if idx[-1] != u.size - 1:
        idx = np.append(idx, u.size - 1)
    return u[idx]


def _pairs(m: int):
    a, b = np.triu_indices(m, k=1)
    return a, b


class IntervalFamily:
    """Half-open intervals ``(c_a, c_b]`` between data-anchored cut points.

    The first cut is ``-inf`` so that left tails (and the whole line) are included.
    """

    kind = "intervals-1d"

    def __init__(self, pooled: np.ndarray, budget: Optional[int]):
        x = np.asarray(pooled, dtype=float).reshape(-1)
        max_cuts = None
        if budget is not None:
            # m cuts (including -inf) give m (m - 1) / 2 intervals
            max_cuts = max(1, int((1 + math.isqrt(1 + 8 * budget)) // 2) - 1)
        self.cuts = np.concatenate([[-np.inf], _strided_cuts(x, max_cuts)])
        self.lo_idx, self.hi_idx = _pairs(self.cuts.size)

    @property
    def n_sets(self) -> int:
        return self.lo_idx.size

    def bounds(self, s: int):
        return self.cuts[self.lo_idx[s]], self.cuts[self.hi_idx[s]]

    def _cumulative(self, points, weights) -> np.ndarray:
        x = np.asarray(points, dtype=float).reshape(-1)
        order = np.argsort(x, kind="stable")
        xs = x[order]
        cw = np.concatenate([[0.0], np.cumsum(weights[order])])
        return cw[np.searchsorted(xs, self.cuts, side="right")]

    def measure(self, points, weights) -> np.ndarray:
        c = self._cumulative(points, weights)
        return c[self.hi_idx] - c[self.lo_idx]

    def measure_cdf(self, cdf) -> np.ndarray:
        """Masses of every set under a distribution given by its CDF."""
        c = np.zeros(self.cuts.size)
        c[1:] = cdf(self.cuts[1:])
        return c[self.hi_idx] - c[self.lo_idx]


class RectangleFamily:
    """Axis-aligned boxes ``prod_j (c_{j,a_j}, c_{j,b_j}]`` on per-coordinate cuts."""

    kind = "axis-rectangles"

    def __init__(self, pooled: np.ndarray, budget: Optional[int]):
        X = np.asarray(pooled, dtype=float)
        self.d = X.shape[1]
        max_cuts = None
        if budget is not None:
            per_axis = budget ** (1.0 / self.d)
            max_cuts = max(1, int((1 + math.isqrt(1 + int(8 * per_axis))) // 2) - 1)
        self.cuts = [np.concatenate([[-np.inf], _strided_cuts(X[:, j], max_cuts)]) for j in range(self.d)]
        axis_pairs = [_pairs(c.size) for c in self.cuts]
        grids = np.meshgrid(*[np.arange(p[0].size) for p in axis_pairs], indexing="ij")
        flat = [g.reshape(-1) for g in grids]
        self.lo_idx = np.stack([axis_pairs[j][0][flat[j]] for j in range(self.d)], axis=1)
        self.hi_idx = np.stack([axis_pairs[j][1][flat[j]] for j in range(self.d)], axis=1)

    @property
    def n_sets(self) -> int:
        return self.lo_idx.shape[0]

    def bounds(self, s: int):
        lo = np.array([self.cuts[j][self.lo_idx[s, j]] for j in range(self.d)])
        hi = np.array([self.cuts[j][self.hi_idx[s, j]] for j in range(self.d)])
        return lo, hi

    def measure(self, points, weights) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        shape = tuple(c.size for c in self.cuts)
        # cell index k on axis j means cuts[j][k-1] < x <= cuts[j][k]
        cell = [np.searchsorted(self.cuts[j], X[:, j], side="left") for j in range(self.d)]
        keep = np.all([c < shape[j] for j, c in enumerate(cell)], axis=0)
        hist = np.zeros(shape)
        np.add.at(hist, tuple(c[keep] for c in cell), weights[keep])
        C = hist
        for j in range(self.d):
            C = np.cumsum(C, axis=j)
        total = np.zeros(self.n_sets)
        for signs in np.ndindex(*(2,) * self.d):
            idx = tuple(
                np.where(signs[j], self.hi_idx[:, j], self.lo_idx[:, j]) for j in range(self.d)
            )
            sign = (-1) ** (self.d - sum(signs))
            total += sign * C[idx]
        return total


class BallFamily:
    """Closed Euclidean balls centred at sample points with data-anchored radii."""

    kind = "balls"

    def __init__(self, pooled: np.ndarray, budget: Optional[int]):
        X = np.unique(np.asarray(pooled, dtype=float), axis=0)
        n = X.shape[0]
        if budget is None:
            n_centers, n_radii = n, n
        else:
            n_centers = max(1, min(n, int(math.isqrt(budget))))
            n_radii = max(1, min(n, budget // n_centers))
        centers = X[_stride_index(n, n_centers)]
        radii = []
        for c in centers:
            dist = np.sort(np.linalg.norm(X - c, axis=1))
            radii.append(dist[_stride_index(n, n_radii)])
        self.centers = centers
        self.radii = np.array(radii)

    @property
    def n_sets(self) -> int:
        return self.radii.size

    def bounds(self, s: int):
        c, r = divmod(s, self.radii.shape[1])
        return self.centers[c], self.radii[c, r]

    def measure(self, points, weights) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        out = np.empty(self.radii.shape)
        for k, c in enumerate(self.centers):
            dist = np.linalg.norm(X - c, axis=1)
            order = np.argsort(dist, kind="stable")
            cw = np.concatenate([[0.0], np.cumsum(weights[order])])
            out[k] = cw[np.searchsorted(dist[order], self.radii[k], side="right")]
        return out.reshape(-1)


def _stride_index(n: int, k: int) -> np.ndarray:
    if k >= n:
        return np.arange(n)
    stride = 1
    while math.ceil(n / stride) > k:
        stride *= 2
    return np.arange(0, n, stride)


def build_family(vc: VCClassSpec, pooled: np.ndarray):
    pooled = np.asarray(pooled, dtype=float)
    if pooled.ndim == 1:
        pooled = pooled[:, None]
    if pooled.shape[1] != vc.dim:
        raise LengthMismatch(f"data dimension {pooled.shape[1]} does not match VC class dim {vc.dim}")
    if vc.family == "intervals-1d":
        fam = IntervalFamily(pooled[:, 0], vc.anchor_budget)
    elif vc.family == "axis-rectangles":
        fam = RectangleFamily(pooled, vc.anchor_budget)
    else:
        fam = BallFamily(pooled, vc.anchor_budget)
    if fam.n_sets == 0:
        raise EmptyCandidateFamily("candidate family is empty")
    return fam


# -- pools and signed mixtures -----------------------------------------------


RADIUS_MODES = ("shared", "l1")


class EmpiricalPool:
    """The observed samples together with their masses on every candidate set.

    ``eps_scale`` multiplies every deviation radius (``0`` disables the
    correction entirely); ``eps_override`` replaces the per-sample radii.
    Exact (weighted) samples have zero deviation radius.

    ``radius="shared"`` gives every estimator the pooled radius ``eps_n``
    (the sum of the per-sample radii). ``radius="l1"`` gives the estimator
    ``sum_i c_i P_i`` the radius ``sum_i |c_i| eps_i``, which bounds its
    deviation whenever every empirical distribution is within its own radius.
    """

    def __init__(
        self,
        samples: Sequence[SampleSet],
        vc: VCClassSpec,
        eps_scale: float = EPS_SCALE,
        eps_override: Optional[Sequence[float]] = None,
        radius: str = RADIUS,
    ):
        if radius not in RADIUS_MODES:
            raise ValueError(f"unknown radius mode {radius!r}; choose from {RADIUS_MODES}")
        self.radius = radius
        if not samples:
            raise ValueError("need at least one sample")
        d = {s.d for s in samples}
        if len(d) != 1:
            raise LengthMismatch("samples differ in dimension")
        self.samples = list(samples)
        self.vc = vc
        pooled = np.vstack([s.points for s in samples])
        self.family = build_family(vc, pooled)
        self.masses = np.column_stack(
            [self.family.measure(s.points, s.point_weights()) for s in samples]
        )
        if eps_override is not None:
            eps = np.asarray(eps_override, dtype=float)
            if eps.shape != (len(samples),):
                raise LengthMismatch("need one epsilon per sample")
        else:
            V = vc.vc_dimension
            eps = np.array(
                [0.0 if s.is_exact else vc_epsilon(V, s.n, 1.0 / s.n) for s in samples]
            )
            eps = eps * eps_scale
        self.eps_each = eps
        self.eps_n = float(eps.sum())

    @property
    def size(self) -> int:
        return len(self.samples)

    def empirical(self, i: int) -> "SignedMixture":
        c = np.zeros(self.size)
        c[i] = 1.0
        return SignedMixture(c, 0, self)

    def empiricals(self):
        return [self.empirical(i) for i in range(self.size)]

    def mixture(self, coefficients, order: int = 0) -> "SignedMixture":
        return SignedMixture(np.asarray(coefficients, dtype=float), order, self)

    def eps_of(self, m: "SignedMixture") -> float:
        """Deviation radius used for one estimator (see ``radius``)."""
        if self.radius == "l1":
            return float(np.abs(m.coefficients) @ self.eps_each)
        return self.eps_n


@dataclass(frozen=True, eq=False)
class SignedMixture:
    """Affine combination ``sum_i c_i P_i`` of the pool's empirical distributions.

    ``order`` counts nested residue steps: plain empirical distributions have
    order 0 and every residue adds one to the larger order of its inputs.
    """

    coefficients: np.ndarray
    order: int = 0
    pool: Optional[EmpiricalPool] = field(default=None, repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).reshape(-1)
        if abs(c.sum() - 1.0) > TOL.eq:
            raise ValueError(f"coefficients sum to {c.sum():.12g}, not 1")
        if self.pool is not None and c.size != self.pool.size:
            raise LengthMismatch("coefficient vector does not match the pool")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def evaluate(self) -> np.ndarray:
        """Mass of every candidate set of the pool's family."""
        return self.pool.masses @ self.coefficients

    def mass_in_box(self, lo, hi) -> float:
        return float(
            sum(c * s.fraction_in_box(lo, hi) for c, s in zip(self.coefficients, self.pool.samples))
        )

    def to_dict(self):
        return {"coefficients": [float(v) for v in self.coefficients], "order": self.order}


def blend_mixtures(x: SignedMixture, y: SignedMixture, nu: float) -> SignedMixture:
    """``(1 - nu) x + nu y``."""
    c = (1.0 - nu) * x.coefficients + nu * y.coefficients
    return SignedMixture(c, max(x.order, y.order), x.pool)


def combine(weights, mixtures: Sequence[SignedMixture]) -> SignedMixture:
    w = np.asarray(weights, dtype=float)
    c = w @ np.vstack([m.coefficients for m in mixtures])
    return SignedMixture(c / c.sum(), max(m.order for m in mixtures), mixtures[0].pool)


# -- estimators ----------------------------------------------------------------


def _eps_pair(eps_n, fhat, hhat):
    if eps_n is None:
        pool = fhat.pool
        return pool.eps_of(fhat), pool.eps_of(hhat)
    if np.ndim(eps_n) == 0:
        return float(eps_n), float(eps_n)
    ef, eh = eps_n
    return float(ef), float(eh)


def kappa_hat_two(fhat: SignedMixture, hhat: SignedMixture, eps_n=None, cap: bool = True) -> float:
    """Estimate the largest proportion of H inside F.

    ``inf_S (F(S) + eps) / (H(S) - eps)_+`` over the candidate sets, with the
    ratio taken as +inf when the denominator is not positive. ``eps_n`` is a
    scalar, an ``(eps_f, eps_h)`` pair, or ``None`` for the pool's shared
    radius. The result is clipped below at 0 and, with ``cap``, above at 1.
    """
    ef, eh = _eps_pair(eps_n, fhat, hhat)
    if ef < 0 or eh < 0:
        raise ValueError("deviation radius must be nonnegative")
    f = fhat.evaluate()
    h = hhat.evaluate()
    if f.size == 0:
        raise EmptyCandidateFamily("no candidate sets")
    den = h - eh
    ok = den > TOL.clamp
    if not ok.any():
        k = math.inf
    else:
        k = max(0.0, float(np.min((f[ok] + ef) / den[ok])))
    return min(k, 1.0) if cap else k


def residue_hat(fhat: SignedMixture, hhat: SignedMixture, eps_n=None):
    """Estimated residue of F with respect to H as a signed mixture.

    Returns ``(kappa_hat, ghat)`` with ``(1 - k) ghat + k hhat == fhat`` as
    coefficient vectors.
    """
    k = kappa_hat_two(fhat, hhat, eps_n, cap=False)
    if k >= 1.0 - TOL.eq:
        raise KappaOne(f"estimated kappa {k:.6g} is not below one")
    c = (fhat.coefficients - k * hhat.coefficients) / (1.0 - k)
    return k, SignedMixture(c, max(fhat.order, hhat.order) + 1, fhat.pool)


def _multi_rows(f0, fhats, eps0, eps):
    F = np.column_stack([m.evaluate() for m in fhats]) - eps[None, :]
    b = f0.evaluate() + eps0
    keep = np.any(F > 0, axis=1)
    return F[keep], b[keep]


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u - css / np.arange(1, v.size + 1) > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _inner_inf(mu, F, b) -> float:
    den = F @ mu
    ok = den > TOL.clamp
    if not ok.any():
        return math.inf
    return float(np.min(b[ok] / den[ok]))


def _compositions(M: int, r: int):
    if M == 1:
        yield (r,)
        return
    for first in range(r + 1):
        for rest in _compositions(M - 1, r - first):
            yield (first,) + rest


def _simplex_grid(M: int, r: int):
    for comp in _compositions(M, r):
        yield np.array(comp, dtype=float) / r


def kappa_hat_multi(
    f0hat: SignedMixture,
    fhats: Sequence[SignedMixture],
    method: str = "lp",
    grid_resolution: int = 50,
    eps=None,
):
    """Estimate the multi-sample kappa of F0 with respect to F1..FM.

    Maximizes over ``mu`` in the simplex the infimum over candidate sets of
    ``(F0(S) + e0) / (sum_i mu_i (Fi(S) - ei))_+``. With ``nu = kappa * mu``
    the problem is the linear program ``max sum(nu)`` subject to
    ``sum_i nu_i (Fi(S) - ei) <= F0(S) + e0`` for every set, ``nu >= 0``, which
    ``method="lp"`` solves exactly. ``method="grid"`` scans a simplex grid of
    the given resolution and polishes the best point with Nelder-Mead.

    Returns ``(kappa_hat, nu_hat)``; an unbounded estimate gives ``(inf, None)``.
    """
    pool = f0hat.pool
    if not fhats:
        raise ValueError("need at least one distribution to remove")
    if eps is None:
        eps0 = pool.eps_of(f0hat)
        eps_i = np.array([pool.eps_of(m) for m in fhats])
    else:
        eps0, eps_i = float(eps[0]), np.asarray(eps[1:], dtype=float)
    F, b = _multi_rows(f0hat, fhats, eps0, eps_i)
    M = len(fhats)
    if F.shape[0] == 0:
        return math.inf, None

    if method == "lp":
        res = optimize.linprog(
            -np.ones(M),
            A_ub=F,
            b_ub=b,
            bounds=[(0, None)] * M,
            method="highs",
            options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
        )
        if res.status == 3:
            return math.inf, None
        if res.status != 0:
            raise RuntimeError(f"LP solver failed: {res.message}")
        nu = np.maximum(res.x, 0.0)
        return float(nu.sum()), nu

    if method != "grid":
        raise ValueError(f"unknown method {method!r}")
    best_val, best_mu = -1.0, None
    for mu in _simplex_grid(M, grid_resolution):
        v = _inner_inf(mu, F, b)
        if v > best_val:
            best_val, best_mu = v, mu
    if math.isinf(best_val):
        return math.inf, None
    if M > 1:
        res = optimize.minimize(
            lambda z: -min(_inner_inf(_project_simplex(z), F, b), 1e6),
            best_mu,
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000},
        )
        mu = _project_simplex(res.x)
        v = _inner_inf(mu, F, b)
        if v > best_val:
            best_val, best_mu = v, mu
    return best_val, best_val * best_mu


def _masses_of(x, family) -> np.ndarray:
    if isinstance(x, SignedMixture):
        return x.evaluate()
    if hasattr(x, "set_masses"):
        return x.set_masses(family)
    return np.asarray(x, dtype=float)


def sup_deviation(a, b, family=None) -> float:
    """``max_S |a(S) - b(S)|`` over the candidate family.

    ``a`` and ``b`` may be signed mixtures, ground-truth objects exposing
    ``set_masses(family)``, or precomputed mass vectors.
    """
    if family is None:
        for x in (a, b):
            if isinstance(x, SignedMixture):
                family = x.pool.family
                break
    ma, mb = _masses_of(a, family), _masses_of(b, family)
    if ma.size == 0:
        raise EmptyCandidateFamily("no candidate sets")
    return float(np.max(np.abs(ma - mb)))


def interval_sup_deviation(estimate: SignedMixture, cdf, points=None) -> float:
    """Exact sup over all intervals of ``|estimate(I) - P(I)|`` for a 1-d truth.

    ``cdf`` is the right-continuous distribution function of the truth. When the
    truth is discrete its atoms must be included in ``points`` (or lie among the
    sample points). The signed difference only changes at those points, so the
    supremum equals the range of its cumulative function evaluated at every
    point, from both sides.
    """
    pool = estimate.pool
    xs = np.unique(np.concatenate([s.points[:, 0] for s in pool.samples]) if points is None else points)
    right = np.zeros(xs.size)
    left = np.zeros(xs.size)
    for c, s in zip(estimate.coefficients, pool.samples):
        x = s.points[:, 0]
        order = np.argsort(x, kind="stable")
        cw = np.concatenate([[0.0], np.cumsum(s.point_weights()[order])])
        right += c * cw[np.searchsorted(x[order], xs, side="right")]
        left += c * cw[np.searchsorted(x[order], xs, side="left")]
    F = cdf(xs)
    F_left = cdf(np.nextafter(xs, -np.inf))
    vals = np.concatenate([[0.0, float(np.sum(estimate.coefficients)) - 1.0], right - F, left - F_left])
    return float(vals.max() - vals.min())
