"""Decontamination from samples: the population control flow driven by estimators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import TOL
from .empirical import (
    EmpiricalPool,
    SignedMixture,
    VCClassSpec,
    blend_mixtures,
    combine,
    kappa_hat_multi,
    kappa_hat_two,
    residue_hat,
)
from .errors import (
    ConditionDViolated,
    DuplicateColumns,
    KappaOne,
    LengthMismatch,
    LoopCapExceeded,
    RankDeficient,
)
from .population import VertexTestResult, match_columns
from .simplex_core import PartialLabelMatrix

DEFAULT_EPSILON = 0.2
MAX_FACE_ITER = 10_000


@dataclass
class HatResult:
    estimates: List[SignedMixture]
    # order[l] = index of the estimate identified as class l; None when unordered
    permutation: Optional[np.ndarray] = None
    diagnostics: Dict = field(default_factory=dict)

    @property
    def max_order(self) -> int:
        return max(m.order for m in self.estimates)

    def to_dict(self):
        return {
            "estimates": [m.to_dict() for m in self.estimates],
            "permutation": None if self.permutation is None else [int(i) for i in self.permutation],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data, pool: Optional[EmpiricalPool] = None) -> "HatResult":
        est = [SignedMixture(np.array(e["coefficients"]), e["order"], pool) for e in data["estimates"]]
        perm = None if data["permutation"] is None else np.array(data["permutation"], dtype=int)
        return cls(est, perm, data["diagnostics"])

    @classmethod
    def from_json(cls, text: str, pool: Optional[EmpiricalPool] = None) -> "HatResult":
        return cls.from_dict(json.loads(text), pool)


def as_pool(samples, vc: Optional[VCClassSpec] = None, **pool_kw) -> EmpiricalPool:
    """Accept a ready pool or build one from sample sets."""
    if isinstance(samples, EmpiricalPool):
        return samples
    samples = list(samples)
    if vc is None:
        vc = VCClassSpec("intervals-1d" if samples[0].d == 1 else "axis-rectangles", samples[0].d)
    return EmpiricalPool(samples, vc, **pool_kw)


def _check_order(estimates, L):
    bound = max(1, (L - 1) ** 3)
    worst = max(m.order for m in estimates)
    assert worst <= bound, f"estimator order {worst} exceeds {bound}"
    return worst


# -- multiclass ------------------------------------------------------------------


def multiclass_hat(samples, vc=None, **pool_kw) -> HatResult:
    """Remove from each empirical distribution the largest mixture of the others."""
    pool = as_pool(samples, vc, **pool_kw)
    L = pool.size
    if L < 2:
        raise ValueError("need at least two samples")
    P = pool.empiricals()
    est, kappas = [], []
    for i in range(L):
        others = [P[j] for j in range(L) if j != i]
        k, nu = kappa_hat_multi(P[i], others)
        if not k < 1.0 - TOL.eq:
            raise KappaOne(f"estimated kappa for sample {i} is {k:.6g}")
        c = P[i].coefficients.copy()
        for j, v in zip([j for j in range(L) if j != i], nu):
            c -= v * P[j].coefficients
        est.append(SignedMixture(c / (1.0 - k), 1, pool))
        kappas.append(float(k))
    diag = {"kappa": kappas, "orders": [m.order for m in est]}
    return HatResult(est, np.arange(L), diag)


# -- demixing ---------------------------------------------------------------------


def face_test_hat(qhats: Sequence[SignedMixture], epsilon: float = DEFAULT_EPSILON, eps_n=None) -> bool:
    """True iff every off-diagonal estimated kappa exceeds ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    for i, a in enumerate(qhats):
        for j, b in enumerate(qhats):
            if i != j and kappa_hat_two(a, b, eps_n) <= epsilon:
                return False
    return True


def _demix_hat(S, rng, epsilon, max_face_iter, diag):
    K = len(S)
    if K == 2:
        k0, g0 = residue_hat(S[0], S[1])
        k1, g1 = residue_hat(S[1], S[0])
        diag["kappa"].append([k0, k1])
        return [g0, g1]

    anchor = S[0]
    w = rng.dirichlet(np.ones(K - 1))
    q = combine(w, S[1:])
    n = 1
    while True:
        n += 1
        if n - 1 > max_face_iter:
            raise LoopCapExceeded(f"face test never passed within {max_face_iter} iterations")
        R = []
        ks = []
        for s in S[1:]:
            k, g = residue_hat(blend_mixtures(s, q, (n - 1) / n), anchor)
            R.append(g)
            ks.append(k)
        if face_test_hat(R, epsilon):
            break
    diag["iterations"].append(n - 1)
    diag["kappa"].append(ks)

    Q = _demix_hat(R, rng, epsilon, max_face_iter, diag)
    cur = combine(np.ones(K), S)
    chain = []
    for v in Q:
        k, cur = residue_hat(cur, v)
        chain.append(k)
    diag["kappa"].append(chain)
    return Q + [cur]


def demix_hat(
    samples,
    vc=None,
    epsilon: float = DEFAULT_EPSILON,
    rng_seed=None,
    max_face_iter: int = MAX_FACE_ITER,
    inputs: Optional[Sequence[SignedMixture]] = None,
    **pool_kw,
) -> HatResult:
    """Estimate the pure distributions, up to order, from L contaminated samples.

    ``inputs`` replaces the plain empirical distributions as starting points
    (used when more samples than classes are available).
    """
    pool = as_pool(samples, vc, **pool_kw)
    S = list(inputs) if inputs is not None else pool.empiricals()
    if len(S) < 2:
        raise ValueError("demixing needs at least two distributions")
    rng = np.random.default_rng(rng_seed)
    diag = {"iterations": [], "kappa": []}
    est = _demix_hat(S, rng, epsilon, max_face_iter, diag)
    diag["orders"] = [m.order for m in est]
    diag["max_order"] = _check_order(est, len(S))
    return HatResult(est, None, diag)


# -- partial labels ----------------------------------------------------------------


def _as_labels(S) -> PartialLabelMatrix:
    S = S if isinstance(S, PartialLabelMatrix) else PartialLabelMatrix(S)
    if not S.has_unique_columns():
        raise DuplicateColumns("columns of the partial label matrix are not distinct")
    return S


def vertex_test_hat(S, contaminated: Sequence[SignedMixture], qhats: Sequence[SignedMixture], eps_n=None):
    """Match candidate estimates to classes through the |S| largest estimated kappas.

    Entries are ranked by estimated kappa (uncapped), ties going to the
    row-major earlier entry. Returns a ``VertexTestResult`` whose ``order``
    maps each class to a candidate index, plus the kappa matrix.
    """
    S = _as_labels(S)
    if not S.satisfies_d():
        raise ConditionDViolated("a contaminated source contains a single class")
    M, L = S.shape
    if len(contaminated) != M or len(qhats) != L:
        raise LengthMismatch(f"S has shape {S.shape}, got {len(contaminated)} sources and {len(qhats)} candidates")
    K = np.array([[kappa_hat_two(p, q, eps_n, cap=False) for q in qhats] for p in contaminated])
    top = np.lexsort((np.arange(M * L), -K.reshape(-1)))[: S.count()]
    Z = np.zeros(M * L, dtype=int)
    Z[top] = 1
    order = match_columns(Z.reshape(M, L), S.entries)
    return VertexTestResult(order is not None, order), K


def _dirichlet_inputs(pool, L, rng):
    W = rng.dirichlet(np.ones(pool.size), size=L)
    return [pool.mixture(w) for w in W]


def partial_label_hat(
    S,
    samples,
    vc=None,
    epsilon: float = DEFAULT_EPSILON,
    rng_seed=None,
    max_face_iter: int = MAX_FACE_ITER,
    **pool_kw,
) -> HatResult:
    """Demix, then put the estimates in class order using the partial labels.

    With more samples than classes, demixing starts from L random convex
    combinations of the empirical distributions.
    """
    S = _as_labels(S)
    if not S.satisfies_d():
        raise ConditionDViolated("a contaminated source contains a single class; reduce it first")
    M, L = S.shape
    samples = samples if isinstance(samples, EmpiricalPool) else list(samples)
    n_src = samples.size if isinstance(samples, EmpiricalPool) else len(samples)
    if n_src != M:
        raise LengthMismatch(f"S has {M} rows but {n_src} samples were given")
    if M < L:
        raise RankDeficient("fewer contaminated sources than classes")
    pool = as_pool(samples, vc, **pool_kw)
    rng = np.random.default_rng(rng_seed)
    inputs = None if M == L else _dirichlet_inputs(pool, L, rng)
    dm = demix_hat(pool, epsilon=epsilon, rng_seed=rng, max_face_iter=max_face_iter, inputs=inputs)
    vt, K = vertex_test_hat(S, pool.empiricals(), dm.estimates)
    diag = dict(dm.diagnostics)
    diag["vertex_kappa"] = K.tolist()
    diag["found"] = vt.found
    if not vt.found:
        return HatResult(dm.estimates, None, diag)
    return HatResult([dm.estimates[j] for j in vt.order], vt.order, diag)


@dataclass
class ReducedProblem:
    """Result of peeling single-class sources off a partial-label problem."""

    labels: PartialLabelMatrix
    estimates: List[SignedMixture]
    classes: List[int]  # original index of each remaining column
    pinned: Dict[int, SignedMixture]  # original class index -> estimate
    rows: List[int]  # original index of each remaining row

    @property
    def is_trivial(self) -> bool:
        return not self.classes


def reduce_condition_d(S, samples, vc=None, **pool_kw) -> ReducedProblem:
    """Repeatedly take a single-class source as that class's estimate and remove it elsewhere.

    Every other source containing the pinned class is replaced by its
    estimated residue with respect to the pinned estimate; the class column
    and the single-class row are then dropped. Stops once no row has a single
    nonzero entry.
    """
    S = _as_labels(S)
    pool = as_pool(samples, vc, **pool_kw)
    E = S.entries.copy()
    est = pool.empiricals()
    if len(est) != E.shape[0]:
        raise LengthMismatch("S rows do not match the number of samples")
    rows = list(range(E.shape[0]))
    classes = list(range(E.shape[1]))
    pinned: Dict[int, SignedMixture] = {}
    while E.shape[1] > 0:
        singles = np.flatnonzero(E.sum(axis=1) == 1)
        if singles.size == 0:
            break
        i = int(singles[0])
        j = int(np.flatnonzero(E[i])[0])
        pure = est[i]
        pinned[classes[j]] = pure
        drop = [r for r in range(E.shape[0]) if E[r, j] == 1 and E[r].sum() == 1]
        for r in range(E.shape[0]):
            if E[r, j] == 1 and r not in drop:
                _, est[r] = residue_hat(est[r], pure)
        keep = [r for r in range(E.shape[0]) if r not in drop]
        E = np.delete(E[keep], j, axis=1)
        est = [est[r] for r in keep]
        rows = [rows[r] for r in keep]
        del classes[j]
    labels = PartialLabelMatrix(E) if E.size else PartialLabelMatrix(np.zeros((0, 0), dtype=int))
    return ReducedProblem(labels, est, classes, pinned, rows)


__all__ = [
    "HatResult",
    "ReducedProblem",
    "as_pool",
    "multiclass_hat",
    "face_test_hat",
    "demix_hat",
    "vertex_test_hat",
    "partial_label_hat",
    "reduce_condition_d",
    "DEFAULT_EPSILON",
]
