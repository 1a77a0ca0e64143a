"""Ground-truth problem generation with recorded seeds."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .empirical import SampleSet
from .errors import DuplicateColumns, LengthMismatch
from .simplex_core import (
    DiscreteDistribution,
    MixingMatrix,
    PartialLabelMatrix,
    check_b1,
    check_full_column_rank,
    common_background_noise,
)

BASE_KINDS = ("discrete-separable", "gaussian-1d", "gaussian-bump")


# -- base distributions ----------------------------------------------------------


class DiscreteBase:
    """Discrete distribution on atoms placed at integer positions of the line."""

    separable = True

    def __init__(self, dist: DiscreteDistribution, positions=None):
        self.dist = dist
        self.positions = (
            np.arange(len(dist.atoms), dtype=float) if positions is None else np.asarray(positions, float)
        )

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(self.dist.probs[None, :] * (self.positions[None, :] <= x.reshape(-1, 1)), axis=1).reshape(x.shape)

    def sample(self, rng, n):
        return rng.choice(self.positions, size=n, p=self.dist.probs)

    def set_masses(self, family):
        return family.measure(self.positions[:, None], self.dist.probs)

    def to_dict(self):
        return {
            "kind": "discrete",
            "atoms": list(self.dist.atoms),
            "probs": [float(p) for p in self.dist.probs],
            "positions": [float(p) for p in self.positions],
        }


class GaussianBase:
    """``(1 - bump) N(mean, sigma^2) + bump U(bump_lo, bump_lo + 1)``; ``bump = 0`` gives a plain Gaussian."""

    def __init__(self, mean, sigma=1.0, bump=0.0, bump_lo=None):
        self.mean, self.sigma, self.bump, self.bump_lo = float(mean), float(sigma), float(bump), bump_lo
        if self.bump > 0 and bump_lo is None:
            raise ValueError("a bump needs a location")

    @property
    def separable(self):
        return self.bump > 0

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = (1.0 - self.bump) * stats.norm.cdf(x, self.mean, self.sigma)
        if self.bump > 0:
            out = out + self.bump * np.clip(x - self.bump_lo, 0.0, 1.0)
        return out

    def sample(self, rng, n):
        x = rng.normal(self.mean, self.sigma, size=n)
        if self.bump > 0:
            in_bump = rng.random(n) < self.bump
            x[in_bump] = self.bump_lo + rng.random(int(in_bump.sum()))
        return x

    def set_masses(self, family):
        return family.measure_cdf(self.cdf)

    def to_dict(self):
        return {"kind": "gaussian", "mean": self.mean, "sigma": self.sigma, "bump": self.bump, "bump_lo": self.bump_lo}


class Mixture:
    """``sum_j w_j base_j``; exposes the same evaluation interface as a base."""

    def __init__(self, bases, weights):
        self.bases = list(bases)
        self.weights = np.asarray(weights, dtype=float)

    def cdf(self, x):
        return sum(w * b.cdf(x) for w, b in zip(self.weights, self.bases) if w != 0)

    def set_masses(self, family):
        return sum(w * b.set_masses(family) for w, b in zip(self.weights, self.bases) if w != 0)


def base_from_dict(d):
    if d["kind"] == "discrete":
        return DiscreteBase(DiscreteDistribution(tuple(d["atoms"]), d["probs"]), d["positions"])
    return GaussianBase(d["mean"], d["sigma"], d["bump"], d["bump_lo"])


@dataclass(frozen=True)
class BaseSpec:
    kind: str = "gaussian-bump"
    spacing: float = 4.0
    sigma: float = 1.0
    bump: float = 0.05
    n_atoms: Optional[int] = None
    bump_starts: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.kind not in BASE_KINDS:
            raise ValueError(f"unknown base kind {self.kind!r}")

    @property
    def certifies_separability(self) -> bool:
        return self.kind in ("discrete-separable", "gaussian-bump")

    def to_dict(self):
        return {
            "kind": self.kind,
            "spacing": self.spacing,
            "sigma": self.sigma,
            "bump": self.bump,
            "n_atoms": self.n_atoms,
            "bump_starts": None if self.bump_starts is None else list(self.bump_starts),
        }


def gen_bases(spec: BaseSpec, L: int, rng_seed=None) -> list:
    """L base distributions of the requested kind."""
    if L < 2:
        raise ValueError("need at least two classes")
    rng = np.random.default_rng(rng_seed)
    if spec.kind == "discrete-separable":
        A = spec.n_atoms if spec.n_atoms is not None else L + 2
        if A < L:
            raise ValueError("need at least one private atom per class")
        shared = np.arange(L, A)
        out = []
        for i in range(L):
            w = rng.dirichlet(np.ones(1 + shared.size))
            p = np.zeros(A)
            p[i] = w[0]
            p[shared] = w[1:]
            out.append(DiscreteBase(DiscreteDistribution(tuple(range(A)), p)))
        return out

    means = spec.spacing * np.arange(L)
    if spec.kind == "gaussian-1d":
        return [GaussianBase(m, spec.sigma) for m in means]

    if not 0 < spec.bump < 1:
        raise ValueError("bump mass must lie in (0, 1)")
    floor = means.max() + 10 * spec.sigma
    starts = (
        floor + 2.0 * np.arange(L) if spec.bump_starts is None else np.asarray(spec.bump_starts, float)
    )
    if starts.size != L:
        raise LengthMismatch("need one bump per class")
    s = np.sort(starts)
    if np.any(np.diff(s) < 1.0):
        raise ValueError("bump intervals overlap")
    if np.any((starts < means.max() + 10 * spec.sigma) & (starts + 1 > means.min() - 10 * spec.sigma)):
        raise ValueError("bumps must lie beyond ten standard deviations of every mean")
    return [GaussianBase(m, spec.sigma, spec.bump, b) for m, b in zip(means, starts)]


# -- mixing matrices -----------------------------------------------------------


def gen_mixing(
    mode: str,
    L: int,
    M: Optional[int] = None,
    rng_seed=None,
    noise_level: float = 0.3,
    S=None,
    fill: str = "dirichlet",
    max_tries: int = 10_000,
) -> MixingMatrix:
    """Draw a mixing matrix.

    ``b1-background`` pulls every vertex toward the barycentre by
    ``noise_level``; ``full-rank`` draws Dirichlet rows until the condition
    number drops below 1e6; ``partial-label`` fills the support of ``S``
    (uniform or Dirichlet weights) and rejects rank-deficient draws.
    """
    rng = np.random.default_rng(rng_seed)
    M = L if M is None else M
    if mode == "b1-background":
        if M != L:
            raise ValueError("b1-background needs M == L")
        gam = np.broadcast_to(np.asarray(noise_level, dtype=float), (L,))
        pi = common_background_noise(np.full(L, 1.0 / L), gam)
        assert check_b1(pi)
        return pi
    if mode == "full-rank":
        if M < L:
            raise ValueError("full column rank needs M >= L")
        for _ in range(max_tries):
            a = rng.dirichlet(np.ones(L), size=M)
            if np.linalg.cond(a) < 1e6:
                return MixingMatrix(a)
        raise RuntimeError("could not draw a well-conditioned mixing matrix")
    if mode == "partial-label":
        S = S if isinstance(S, PartialLabelMatrix) else PartialLabelMatrix(S)
        if S.shape[1] != L:
            raise LengthMismatch("S must have L columns")
        if not S.has_unique_columns() or S.has_zero_column():
            raise DuplicateColumns("S must have distinct, nonzero columns")
        E = S.entries
        for _ in range(max_tries):
            rows = []
            for r in E:
                idx = np.flatnonzero(r)
                w = np.full(idx.size, 1.0 / idx.size) if fill == "uniform" else rng.dirichlet(np.ones(idx.size))
                row = np.zeros(L)
                row[idx] = w
                rows.append(row)
            a = np.vstack(rows)
            if check_full_column_rank(a) and np.linalg.cond(a) < 1e6:
                return MixingMatrix(a)
            if fill == "uniform":
                break
        raise ValueError("S admits no full-column-rank mixing matrix with this fill")
    raise ValueError(f"unknown mixing mode {mode!r}")


def random_partial_labels(L: int, M: int, rng_seed=None, max_tries: int = 10_000) -> PartialLabelMatrix:
    """Random binary S with nonzero rows and distinct nonzero columns."""
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_tries):
        E = (rng.random((M, L)) < 0.5).astype(int)
        if np.any(E.sum(axis=1) == 0) or np.any(E.sum(axis=0) == 0):
            continue
        S = PartialLabelMatrix(E)
        if S.has_unique_columns():
            return S
    raise RuntimeError("could not draw a valid partial label matrix")


# -- problem instances -----------------------------------------------------------


@dataclass
class ProblemInstance:
    mixing: MixingMatrix
    bases: Optional[List] = None
    base_spec: Optional[BaseSpec] = None
    partial_labels: Optional[PartialLabelMatrix] = None
    samples: Optional[List[SampleSet]] = None
    components: Optional[List[np.ndarray]] = None
    seed: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        if self.partial_labels is not None and not self.partial_labels.consistent_with(self.mixing):
            raise ValueError("partial labels are inconsistent with the mixing matrix")

    @property
    def L(self) -> int:
        return self.mixing.shape[1]

    @property
    def M(self) -> int:
        return self.mixing.shape[0]

    def contaminated_truth(self, i: int) -> Mixture:
        return Mixture(self.bases, self.mixing.array[i])

    def with_bases(self, spec: BaseSpec, rng_seed=None) -> "ProblemInstance":
        return ProblemInstance(
            self.mixing, gen_bases(spec, self.L, rng_seed), spec, self.partial_labels, None, None, self.seed, self.name
        )

    def to_dict(self):
        return {
            "name": self.name,
            "seed": self.seed,
            "mixing": json.loads(self.mixing.to_json()),
            "partial_labels": None if self.partial_labels is None else self.partial_labels.entries.tolist(),
            "base_spec": None if self.base_spec is None else self.base_spec.to_dict(),
            "bases": None if self.bases is None else [b.to_dict() for b in self.bases],
            "n_per_row": None if self.samples is None else [s.n for s in self.samples],
        }

    def save(self, directory, fmt: str = "csv") -> Path:
        """Write ``instance.json`` plus one sample file per row."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        (out / "instance.json").write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        for i, s in enumerate(self.samples or []):
            if fmt == "csv":
                s.to_csv(out / f"sample_{i}.csv")
            else:
                s.to_binary(out / f"sample_{i}.bin")
        return out

    @classmethod
    def load(cls, directory) -> "ProblemInstance":
        d = Path(directory)
        data = json.loads((d / "instance.json").read_text())
        mixing = MixingMatrix(data["mixing"]["rows"])
        S = None if data["partial_labels"] is None else PartialLabelMatrix(data["partial_labels"])
        spec = None if data["base_spec"] is None else BaseSpec(**data["base_spec"])
        bases = None if data["bases"] is None else [base_from_dict(b) for b in data["bases"]]
        samples = None
        if data.get("n_per_row"):
            samples = []
            for i in range(len(data["n_per_row"])):
                csv_path, bin_path = d / f"sample_{i}.csv", d / f"sample_{i}.bin"
                s = SampleSet.from_csv(csv_path, i) if csv_path.exists() else SampleSet.from_binary(bin_path, i)
                samples.append(s)
        return cls(mixing, bases, spec, S, samples, None, data["seed"], data["name"])


def sample_instance(instance: ProblemInstance, n_per_row, rng_seed=None) -> ProblemInstance:
    """Draw ``n_i`` points from each contaminated source: a class from row i, then a point."""
    if instance.bases is None:
        raise ValueError("instance has no base distributions to sample from")
    rng = np.random.default_rng(rng_seed)
    n = np.broadcast_to(np.asarray(n_per_row, dtype=int), (instance.M,))
    if np.any(n < 1):
        raise ValueError("every row needs at least one point")
    samples, comps = [], []
    for i, row in enumerate(instance.mixing.array):
        z = rng.choice(instance.L, size=int(n[i]), p=row)
        x = np.empty(int(n[i]))
        for j in range(instance.L):
            mask = z == j
            if mask.any():
                x[mask] = instance.bases[j].sample(rng, int(mask.sum()))
        samples.append(SampleSet(x, i))
        comps.append(z)
    return ProblemInstance(
        instance.mixing,
        instance.bases,
        instance.base_spec,
        instance.partial_labels,
        samples,
        comps,
        None if rng_seed is None or isinstance(rng_seed, np.random.Generator) else int(rng_seed),
        instance.name,
    )


def exact_samples(instance: ProblemInstance) -> List[SampleSet]:
    """Weighted atom sets that represent the contaminated distributions exactly (discrete bases only)."""
    if not instance.bases or not all(isinstance(b, DiscreteBase) for b in instance.bases):
        raise ValueError("exact samples need discrete bases")
    pos = instance.bases[0].positions
    P = np.vstack([b.dist.probs for b in instance.bases])
    out = []
    for i, row in enumerate(instance.mixing.array):
        p = row @ P
        keep = p > 0
        out.append(SampleSet(pos[keep], i, p[keep] / p[keep].sum()))
    return out


EQ3 = [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]]
EQ4 = [[0.1, 0.9, 0.0], [0.9, 0.0, 0.1], [0.0, 0.1, 0.9]]


def builtin_instances() -> Dict[str, ProblemInstance]:
    """Named instance templates (no samples) with Gaussian-bump bases attached."""
    spec = BaseSpec("gaussian-bump")
    out = {}

    def add(name, rows, with_labels=True):
        pi = MixingMatrix(rows)
        S = PartialLabelMatrix.from_mixing(pi) if with_labels else None
        out[name] = ProblemInstance(pi, gen_bases(spec, pi.shape[1], 0), spec, S, name=name)

    add("eq3", EQ3)
    add("eq4", EQ4)
    add("bg-gamma-0.3", common_background_noise([1 / 3] * 3, [0.3] * 3).array)
    add("binary-noise", [[0.8, 0.2], [0.3, 0.7]])
    # classes 0 and 1 always appear together: not identifiable from S
    add("dup-columns", [[0.5, 0.5, 0.0], [0.25, 0.25, 0.5], [0.0, 0.0, 1.0]])
    return out


def list_instances() -> List[str]:
    return sorted(builtin_instances())

