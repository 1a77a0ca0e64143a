"""Exact (population) arithmetic on mixture proportions.

Every distribution of the population engine is represented by its mixture
proportion, a point of the probability simplex. Under joint irreducibility of
the base distributions the kappa operators, residues and faces of the
distributions coincide with those of their proportions, so everything here is
plain vector arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _lp
from .config import TOL
from .errors import (
    EqualInputs,
    InvalidProportion,
    LengthMismatch,
    NonSquare,
)


def _as_vector(x) -> np.ndarray:
    if isinstance(x, MixtureProportion):
        return x.weights
    return np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class MixtureProportion:
    """A point of the simplex: nonnegative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if w.size == 0:
            raise InvalidProportion("empty proportion vector")
        if not np.all(np.isfinite(w)):
            raise InvalidProportion("non-finite entry")
        if w.min() < -TOL.clamp:
            raise InvalidProportion(f"negative entry {w.min():.3g}")
        w[w < 0] = 0.0
        if abs(w.sum() - 1.0) > TOL.eq:
            raise InvalidProportion(f"entries sum to {w.sum():.12g}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __getitem__(self, i):
        return self.weights[i]

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, MixtureProportion):
            return NotImplemented
        return len(self) == len(other) and bool(np.all(self.weights == other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"MixtureProportion({np.array2string(self.weights, precision=6)})"

    @classmethod
    def basis(cls, i: int, L: int) -> "MixtureProportion":
        e = np.zeros(L)
        e[i] = 1.0
        return cls(e)

    @classmethod
    def cleaned(cls, w) -> "MixtureProportion":
        """Build from a computed vector, zeroing entries below the support tolerance.

        Residues and LP solutions carry rounding noise of either sign in
        coordinates that are exactly zero in theory.
        """
        w = np.array(w, dtype=float)
        w[np.abs(w) <= TOL.eq] = 0.0
        if w.min() < 0:
            raise InvalidProportion(f"negative entry {w.min():.3g}")
        return cls(w / w.sum())


def proportion(x) -> MixtureProportion:
    return x if isinstance(x, MixtureProportion) else MixtureProportion(x)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """A distribution on a finite set of named atoms."""

    atoms: tuple
    probs: np.ndarray

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom identifiers must be unique")
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size != len(atoms):
            raise LengthMismatch("atoms and probs differ in length")
        if p.min() < -TOL.clamp or abs(p.sum() - 1.0) > TOL.eq:
            raise InvalidProportion("probs must be nonnegative and sum to 1")
        p[p < 0] = 0.0
        p.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", p)


class MixingMatrix:
    """Row-stochastic M x L matrix; row i is the proportion of contaminated source i."""

    def __init__(self, rows):
        props = [proportion(r) for r in rows]
        if not props:
            raise InvalidProportion("mixing matrix needs at least one row")
        L = len(props[0])
        if any(len(p) != L for p in props):
            raise LengthMismatch("rows differ in length")
        self.rows = tuple(props)
        arr = np.vstack([p.weights for p in props])
        arr.setflags(write=False)
        self._array = arr

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def shape(self):
        return self._array.shape

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __array__(self, dtype=None, copy=None):
        return self._array if dtype is None else self._array.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, MixingMatrix) and np.array_equal(self._array, other._array)

    def __repr__(self):
        return f"MixingMatrix({np.array2string(self._array, precision=4)})"

    def support_pattern(self, tol: float = TOL.eq) -> np.ndarray:
        """The partial label matrix implied by this mixing matrix."""
        return (self._array > tol).astype(int)

    def to_json(self) -> str:
        return json.dumps(
            {"L": self.shape[1], "rows": [[float(v) for v in r.weights] for r in self.rows]}
        )

    @classmethod
    def from_json(cls, text: str) -> "MixingMatrix":
        data = json.loads(text)
        rows = data["rows"]
        if any(len(r) != data["L"] for r in rows):
            raise LengthMismatch("row length disagrees with L")
        return cls(rows)


def proportion_to_json(p: MixtureProportion) -> str:
    return json.dumps({"L": len(p), "rows": [[float(v) for v in p.weights]]})


def proportion_from_json(text: str) -> MixtureProportion:
    data = json.loads(text)
    (row,) = data["rows"]
    if len(row) != data["L"]:
        raise LengthMismatch("row length disagrees with L")
    return MixtureProportion(row)


class PartialLabelMatrix:
    """Binary M x L matrix; entry (i, j) says class j may appear in source i."""

    def __init__(self, entries):
        a = np.asarray(entries)
        if a.ndim != 2:
            raise ValueError("partial label matrix must be 2-d")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("partial label matrix must be binary")
        a = a.astype(int)
        if np.any(a.sum(axis=1) == 0):
            raise ValueError("partial label matrix has an all-zero row")
        a.setflags(write=False)
        self.entries = a

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, PartialLabelMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return f"PartialLabelMatrix({self.entries.tolist()})"

    def has_unique_columns(self) -> bool:
        cols = {tuple(c) for c in self.entries.T}
        return len(cols) == self.entries.shape[1]

    def has_zero_column(self) -> bool:
        return bool(np.any(self.entries.sum(axis=0) == 0))

    def satisfies_d(self) -> bool:
        """No row selects exactly one class."""
        return bool(np.all(self.entries.sum(axis=1) != 1))

    def consistent_with(self, pi: MixingMatrix, tol: float = TOL.eq) -> bool:
        return np.array_equal(self.entries, pi.support_pattern(tol))

    def count(self) -> int:
        return int(self.entries.sum())

    @classmethod
    def from_mixing(cls, pi: MixingMatrix, tol: float = TOL.eq) -> "PartialLabelMatrix":
        return cls(pi.support_pattern(tol))


@dataclass(frozen=True)
class KappaSolution:
    """Maximizer of the multi-sample kappa: weights ``nu`` and the leftover distribution."""

    kappa: float
    nu: np.ndarray
    residue: Optional[MixtureProportion]


def _check_lengths(*vs):
    L = len(vs[0])
    if any(len(v) != L for v in vs):
        raise LengthMismatch("mixture proportions differ in length")


def _snap(v: np.ndarray, tol: float) -> np.ndarray:
    v = np.array(v, dtype=float)
    v[v <= tol] = 0.0
    return v


def support_set(eta, tol: float = TOL.eq) -> frozenset:
    """Indices of the entries of ``eta`` strictly above ``tol``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return frozenset(int(i) for i in np.flatnonzero(_as_vector(eta) > tol))


def two_sample_kappa(eta0, eta1, tol: float = TOL.eq) -> float:
    """Largest proportion of ``eta1`` contained in ``eta0``.

    Equals the minimum of ``eta0[i] / eta1[i]`` over the support of ``eta1``.
    Entries at or below ``tol`` count as zero.
    """
    a, b = _as_vector(eta0), _as_vector(eta1)
    _check_lengths(a, b)
    a, b = _snap(a, tol), _snap(b, tol)
    supp = b > 0
    if not supp.any():
        raise InvalidProportion("eta1 has empty support")
    return float(min(1.0, np.min(a[supp] / b[supp])))


def residue(eta0, eta1, tol: float = TOL.eq):
    """Two-sample residue: ``(kappa, G)`` with ``eta0 = (1 - kappa) G + kappa eta1``."""
    a, b = _as_vector(eta0), _as_vector(eta1)
    _check_lengths(a, b)
    if np.max(np.abs(a - b)) <= TOL.clamp:
        raise EqualInputs("residue of a distribution with respect to itself")
    kappa = two_sample_kappa(a, b, tol)
    if kappa >= 1.0 - TOL.clamp:
        raise EqualInputs("kappa is one; residue undefined")
    g = (a - kappa * b) / (1.0 - kappa)
    # the minimizing coordinates vanish exactly in theory
    bs = _snap(b, tol)
    supp = bs > 0
    ratios = np.full(a.shape, np.inf)
    ratios[supp] = _snap(a, tol)[supp] / bs[supp]
    g[ratios <= kappa + TOL.eq * max(1.0, kappa)] = 0.0
    return kappa, MixtureProportion.cleaned(np.maximum(g, 0.0))


def multi_sample_kappa(eta0, etas: Sequence, tol: float = TOL.eq) -> KappaSolution:
    """Multi-sample kappa of ``eta0`` with respect to ``etas`` via a packing LP.

    Solves ``max sum(nu)`` subject to ``nu >= 0``, ``sum(nu) <= 1`` and
    ``eta0 - sum_k nu_k etas[k] >= 0``; among optimal ``nu`` the
    lexicographically smallest is returned.
    """
    if len(etas) < 1:
        raise ValueError("need at least one distribution to remove")
    a = _as_vector(eta0)
    E = np.vstack([_as_vector(e) for e in etas])
    _check_lengths(a, *E)
    a = _snap(a, tol)
    E = np.where(E <= tol, 0.0, E)
    K = E.shape[0]
    A = np.vstack([E.T, np.ones((1, K))])
    b = np.concatenate([a, [1.0]])
    nu = _lp.solve_packing(A, b, tol=TOL.pivot)
    nu[nu < 0] = 0.0
    kappa = float(nu.sum())
    if kappa >= 1.0 - TOL.eq:
        return KappaSolution(min(kappa, 1.0), nu, None)
    g = (a - nu @ E) / (1.0 - kappa)
    return KappaSolution(kappa, nu, MixtureProportion.cleaned(np.maximum(g, 0.0)))


def blend(x, y, nu: float) -> MixtureProportion:
    """``(1 - nu) x + nu y``."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"blend weight {nu} outside [0, 1]")
    a, b = _as_vector(x), _as_vector(y)
    _check_lengths(a, b)
    return MixtureProportion((1.0 - nu) * a + nu * b)


def _square(pi) -> np.ndarray:
    a = np.asarray(pi, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    return a


def check_b1(pi) -> bool:
    """Low-noise multiclass condition: inverse has positive diagonal, nonpositive off-diagonal."""
    a = _square(pi)
    if not np.isfinite(np.linalg.cond(a)) or np.linalg.cond(a) >= TOL.max_cond:
        return False
    inv = np.linalg.inv(a)
    off = inv[~np.eye(a.shape[0], dtype=bool)]
    return bool(np.all(np.diag(inv) > TOL.eq) and np.all(off < TOL.eq))


def check_full_column_rank(pi, tol: float = TOL.eq) -> bool:
    a = np.asarray(pi, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    return bool(s.size == a.shape[1] and s[-1] > tol * max(1.0, s[0]))


def check_b2(pi) -> bool:
    """Demixing condition: full column rank."""
    return check_full_column_rank(pi)


def check_b3(pi, S: PartialLabelMatrix) -> bool:
    """Partial-label condition: full column rank and unique columns of ``S``."""
    return check_full_column_rank(pi) and S.has_unique_columns()


def check_identifiable_labels(S: PartialLabelMatrix) -> bool:
    """Necessary condition for identifiability: distinct columns of ``S``."""
    return S.has_unique_columns()


def check_separable(bases: Iterable[DiscreteDistribution]) -> bool:
    """Each base puts mass on some atom that no other base touches."""
    bases = list(bases)
    supports = [{a for a, p in zip(b.atoms, b.probs) if p > TOL.eq} for b in bases]
    for i, s in enumerate(supports):
        others = set().union(*(supports[j] for j in range(len(bases)) if j != i))
        if s <= others:
            return False
    return True


def common_background_noise(c, gammas) -> MixingMatrix:
    """Rows ``gamma_i c + (1 - gamma_i) e_i``: every vertex pulled toward ``c``."""
    c = proportion(c).weights
    g = np.asarray(gammas, dtype=float)
    if g.shape != c.shape:
        raise LengthMismatch("need one gamma per class")
    if np.any(g < 0) or np.any(g >= 1):
        raise ValueError("each gamma must lie in [0, 1)")
    rows = g[:, None] * c[None, :] + (1.0 - g)[:, None] * np.eye(c.size)
    return MixingMatrix(rows)


def basis_vectors(L: int):
    return [MixtureProportion.basis(i, L) for i in range(L)]
