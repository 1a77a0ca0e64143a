"""Exact decontamination algorithms operating on mixture proportions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .config import TOL
from .errors import (
    DuplicateColumns,
    LengthMismatch,
    LoopCapExceeded,
    PreconditionB1,
    RankDeficient,
)
from .simplex_core import (
    MixtureProportion,
    PartialLabelMatrix,
    check_b1,
    multi_sample_kappa,
    proportion,
    residue,
    two_sample_kappa,
)

MAX_FACE_ITER = 10_000
MAX_K = 10_000


@dataclass
class DemixResult:
    vertices: List[MixtureProportion]
    iterations_used: List[int] = field(default_factory=list)

    def to_dict(self):
        return {
            "vertices": [[float(v) for v in q.weights] for q in self.vertices],
            "permutation": None,
            "iterations": list(self.iterations_used),
        }


@dataclass
class VertexTestResult:
    found: bool
    # order[l] = index of the candidate identified as class l
    order: Optional[np.ndarray] = None

    @property
    def permutation(self) -> Optional[np.ndarray]:
        """Matrix C with Z C = S; ``C.T @ candidates`` lists candidates in class order."""
        if self.order is None:
            return None
        L = len(self.order)
        C = np.zeros((L, L), dtype=int)
        C[self.order, np.arange(L)] = 1
        return C

    def to_dict(self):
        return {
            "found": self.found,
            "permutation": None if self.order is None else [int(i) for i in self.order],
        }


def _stack(props) -> np.ndarray:
    return np.vstack([proportion(p).weights for p in props])


def _rank(props) -> int:
    return int(np.linalg.matrix_rank(_stack(props), tol=TOL.eq))


def _dirichlet_point(rng: np.random.Generator, generators) -> MixtureProportion:
    w = rng.dirichlet(np.ones(len(generators)))
    return MixtureProportion(w @ _stack(generators))


def multiclass_decontaminate(contaminated: Sequence) -> List[MixtureProportion]:
    """Residue of each contaminated row with respect to all the others.

    Under the low-noise condition every residue is the pure class at the same
    index, so the class order is preserved.
    """
    rows = [proportion(r) for r in contaminated]
    if not check_b1(_stack(rows)):
        raise PreconditionB1("mixing matrix fails the low-noise (B1) sign condition")
    out = []
    for i, r in enumerate(rows):
        sol = multi_sample_kappa(r, [rows[j] for j in range(len(rows)) if j != i])
        if sol.residue is None:
            raise PreconditionB1(f"row {i} is fully explained by the other rows")
        out.append(sol.residue)
    return out


def face_test(etas: Sequence) -> bool:
    """True iff every pairwise two-sample kappa is positive (one common face)."""
    etas = [proportion(e) for e in etas]
    for i, a in enumerate(etas):
        for j, b in enumerate(etas):
            if i != j and two_sample_kappa(a, b) <= 0.0:
                return False
    return True


def residue_chain(q, anchors: Sequence) -> MixtureProportion:
    """Peel off each anchor in turn with two-sample residues."""
    cur = proportion(q)
    for a in anchors:
        _, cur = residue(cur, a)
    return cur


def _demix(S, rng, variant, max_face_iter, iterations) -> List[MixtureProportion]:
    K = len(S)
    if K == 2:
        return [residue(S[0], S[1])[1], residue(S[1], S[0])[1]]

    anchor = S[0]
    q = _dirichlet_point(rng, S[1:])
    n = 1
    while True:
        n += 1
        if n - 1 > max_face_iter:
            raise LoopCapExceeded(f"face test never passed within {max_face_iter} iterations")
        w = (n - 1) / n
        R = [residue(MixtureProportion(s.weights / n + w * q.weights), anchor)[1] for s in S[1:]]
        if face_test(R):
            break
    iterations.append(n - 1)

    Q = _demix(R, rng, variant, max_face_iter, iterations)
    center = MixtureProportion(_stack(S).mean(axis=0))
    if variant == "multi-sample":
        sol = multi_sample_kappa(center, Q)
        if sol.residue is None:
            raise RankDeficient("center is explained by the recovered vertices")
        last = sol.residue
    else:
        last = residue_chain(center, Q)
    return Q + [last]


def demix(
    contaminated: Sequence,
    rng_seed=None,
    variant: str = "multi-sample",
    max_face_iter: int = MAX_FACE_ITER,
) -> DemixResult:
    """Recover the pure distributions, up to order, from K linearly independent mixtures.

    ``variant="multi-sample"`` finishes each level with one multi-sample
    residue; ``"residue-chain"`` uses a chain of two-sample residues instead.
    ``rng_seed`` may be a seed or a ``numpy.random.Generator``.
    """
    if variant not in ("multi-sample", "residue-chain"):
        raise ValueError(f"unknown variant {variant!r}")
    S = [proportion(s) for s in contaminated]
    if len(S) < 2:
        raise ValueError("demix needs at least two distributions")
    if len({len(s) for s in S}) != 1:
        raise LengthMismatch("mixture proportions differ in length")
    if _rank(S) < len(S):
        raise RankDeficient("input proportions are linearly dependent")
    rng = np.random.default_rng(rng_seed)
    iterations: List[int] = []
    vertices = _demix(S, rng, variant, max_face_iter, iterations)
    return DemixResult(vertices, iterations)


def nonsquare_demix(
    contaminated: Sequence,
    L: int,
    rng_seed=None,
    variant: str = "multi-sample",
    max_face_iter: int = MAX_FACE_ITER,
) -> DemixResult:
    """Demix ``M >= L`` mixtures by first drawing L random convex combinations."""
    rows = [proportion(r) for r in contaminated]
    if _rank(rows) < L:
        raise RankDeficient(f"mixing matrix has rank below {L}")
    rng = np.random.default_rng(rng_seed)
    W = rng.dirichlet(np.ones(len(rows)), size=L)
    R = [MixtureProportion(w @ _stack(rows)) for w in W]
    return demix(R, rng, variant=variant, max_face_iter=max_face_iter)


def match_columns(Z: np.ndarray, S: np.ndarray) -> Optional[np.ndarray]:
    """Find ``order`` with ``Z[:, order] == S`` (columns of S assumed unique).

    Columns are compared through a canonical key (the column bytes), which is
    equivalent to sorting both matrices' columns and comparing.
    """
    Z = np.asarray(Z, dtype=int)
    S = np.asarray(S, dtype=int)
    if Z.shape != S.shape:
        return None
    index = {}
    for j, col in enumerate(Z.T):
        index.setdefault(col.tobytes(), []).append(j)
    order = []
    for col in S.T:
        js = index.get(col.tobytes())
        if not js:
            return None
        order.append(js.pop(0))
    return np.array(order, dtype=int)


def _require_unique_columns(S: PartialLabelMatrix):
    if not S.has_unique_columns():
        raise DuplicateColumns("columns of the partial label matrix are not distinct")


def vertex_test(S, contaminated: Sequence, candidates: Sequence) -> VertexTestResult:
    """Decide whether ``candidates`` are the pure classes and, if so, in which order."""
    S = S if isinstance(S, PartialLabelMatrix) else PartialLabelMatrix(S)
    _require_unique_columns(S)
    P = [proportion(p) for p in contaminated]
    Q = [proportion(q) for q in candidates]
    if S.shape != (len(P), len(Q)):
        raise LengthMismatch(f"S has shape {S.shape}, expected {(len(P), len(Q))}")
    for i, a in enumerate(Q):
        for j, b in enumerate(Q):
            if i != j and two_sample_kappa(a, b) > 0.0:
                return VertexTestResult(False)
    Z = np.array([[int(two_sample_kappa(p, q) > 0.0) for q in Q] for p in P])
    order = match_columns(Z, S.entries)
    if order is None:
        return VertexTestResult(False)
    return VertexTestResult(True, order)


def partial_label_decontaminate(
    S,
    contaminated: Sequence,
    rng_seed=None,
    max_k: int = MAX_K,
    return_k: bool = False,
):
    """Recover the pure classes in class order from partially labelled mixtures."""
    S = S if isinstance(S, PartialLabelMatrix) else PartialLabelMatrix(S)
    _require_unique_columns(S)
    P = [proportion(p) for p in contaminated]
    M, L = S.shape
    if len(P) != M:
        raise LengthMismatch(f"S has {M} rows but {len(P)} contaminated sources were given")
    if _rank(P) < L:
        raise RankDeficient(f"mixing matrix has rank below {L}")

    rng = np.random.default_rng(rng_seed)
    Q = [_dirichlet_point(rng, P) for _ in range(L)]
    W = list(Q)
    k = 2
    while True:
        if k - 1 > max_k:
            raise LoopCapExceeded(f"no vertex set found within {max_k} rounds")
        for i in range(L):
            others = Q[i + 1 :] + W[:i]
            avg = _stack(others).mean(axis=0)
            target = MixtureProportion(Q[i].weights / k + (1.0 - 1.0 / k) * avg)
            sol = multi_sample_kappa(target, others)
            if sol.residue is None:
                raise RankDeficient("target fully explained by the other candidates")
            W[i] = sol.residue
        k += 1
        result = vertex_test(S, P, W)
        if result.found:
            break
    ordered = [W[j] for j in result.order]
    return (ordered, k - 1) if return_k else ordered


def resample_matrix(pi) -> np.ndarray:
    """Pairwise-average resampling used as a baseline for three-class instances.

    Row order follows (1,2), (1,3), (2,3) averages of the contaminated rows.
    """
    a = np.asarray(pi, dtype=float)
    if a.shape != (3, 3):
        raise LengthMismatch("pairwise resampling is defined for 3 x 3 matrices")
    return np.vstack([(a[0] + a[1]) / 2, (a[0] + a[2]) / 2, (a[1] + a[2]) / 2])


def is_vertex_set(props: Sequence, tol: float = 1e-7) -> bool:
    """True when ``props`` is a permutation of distinct standard basis vectors."""
    idx = []
    for p in props:
        w = proportion(p).weights
        j = int(np.argmax(w))
        if abs(w[j] - 1.0) > tol:
            return False
        idx.append(j)
    return len(set(idx)) == len(idx)


__all__ = [
    "DemixResult",
    "VertexTestResult",
    "multiclass_decontaminate",
    "face_test",
    "demix",
    "nonsquare_demix",
    "vertex_test",
    "partial_label_decontaminate",
    "residue_chain",
    "match_columns",
    "resample_matrix",
    "is_vertex_set",
]
