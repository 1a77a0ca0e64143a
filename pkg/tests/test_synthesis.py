import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from decontam.errors import DuplicateColumns
from decontam.simplex_core import MixingMatrix, PartialLabelMatrix, check_b1
from decontam.synthesis import (
    EQ3,
    EQ4,
    BaseSpec,
    DiscreteBase,
    GaussianBase,
    ProblemInstance,
    builtin_instances,
    gen_bases,
    gen_mixing,
    list_instances,
    random_partial_labels,
    sample_instance,
)

BG = [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]


# -- bases -----------------------------------------------------------------------------


def test_discrete_separable_bases_have_private_atoms():
    bases = gen_bases(BaseSpec("discrete-separable", n_atoms=4), 2, 0)
    P = np.vstack([b.dist.probs for b in bases])
    assert P.shape == (2, 4)
    assert np.allclose(P.sum(axis=1), 1)
    # atom i belongs to class i alone
    assert P[0, 0] > 0 and P[1, 0] == 0 and P[1, 1] > 0 and P[0, 1] == 0
    assert all(isinstance(b, DiscreteBase) and b.separable for b in bases)
    assert BaseSpec("discrete-separable").certifies_separability


def test_gaussian_bases_do_not_certify_separability():
    bases = gen_bases(BaseSpec("gaussian-1d"), 2, 0)
    assert [b.mean for b in bases] == [0.0, 4.0]
    assert all(b.sigma == 1.0 and not b.separable for b in bases)
    assert not BaseSpec("gaussian-1d").certifies_separability


def test_gaussian_bump_bases():
    bases = gen_bases(BaseSpec("gaussian-bump", bump=0.05), 3, 0)
    assert BaseSpec("gaussian-bump").certifies_separability
    for i, b in enumerate(bases):
        assert b.separable and b.bump == 0.05
        assert b.bump_lo >= 8 + 10
        # the bump interval carries exactly the bump mass, all other bumps none
        for j, other in enumerate(bases):
            mass = other.cdf(b.bump_lo + 1) - other.cdf(b.bump_lo)
            assert mass == pytest.approx(0.05 if i == j else 0.0, abs=1e-12)


def test_gen_bases_errors():
    with pytest.raises(ValueError):
        gen_bases(BaseSpec("gaussian-bump", bump_starts=[20.0, 20.5]), 2)
    with pytest.raises(ValueError):
        gen_bases(BaseSpec("gaussian-bump", bump_starts=[1.0, 30.0]), 2)
    with pytest.raises(ValueError):
        gen_bases(BaseSpec("discrete-separable", n_atoms=1), 2)
    with pytest.raises(ValueError):
        gen_bases(BaseSpec(), 1)
    with pytest.raises(ValueError):
        BaseSpec("uniform")


# -- mixing matrices ----------------------------------------------------------------------


def test_background_mixing_example():
    assert np.allclose(gen_mixing("b1-background", 3, noise_level=0.3).array, BG)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.floats(0.0, 0.9), st.integers(0, 2**31 - 1))
def test_background_mixing_always_passes_b1(L, noise, seed):
    assert check_b1(gen_mixing("b1-background", L, noise_level=noise, rng_seed=seed))


def test_partial_label_uniform_fill_reproduces_eq3():
    S = PartialLabelMatrix([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    assert np.array_equal(gen_mixing("partial-label", 3, S=S, fill="uniform").array, EQ3)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_full_rank_mixing(L, seed):
    pi = gen_mixing("full-rank", L, rng_seed=seed).array
    assert np.linalg.matrix_rank(pi) == L and np.linalg.cond(pi) < 1e6
    assert np.allclose(pi.sum(axis=1), 1)


def test_partial_label_mixing_rejects_infeasible_labels():
    with pytest.raises(DuplicateColumns):
        gen_mixing("partial-label", 3, S=[[1, 1, 0], [1, 1, 1], [0, 0, 1]])
    with pytest.raises(ValueError):
        gen_mixing("partial-label", 3, S=[[1, 1, 0], [1, 1, 0], [1, 0, 0]])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_generated_partial_labels_are_valid(L, extra, seed):
    S = random_partial_labels(L, L + extra, seed)
    assert S.has_unique_columns() and not S.has_zero_column()
    pi = gen_mixing("partial-label", L, L + extra, seed, S=S)
    assert S.consistent_with(pi)
    assert np.linalg.matrix_rank(pi.array) == L


def test_background_mode_requires_square():
    with pytest.raises(ValueError):
        gen_mixing("b1-background", 3, 4)


# -- sampling -------------------------------------------------------------------------------


def test_identity_mixing_samples_each_base_purely():
    inst = ProblemInstance(MixingMatrix(np.eye(2)), gen_bases(BaseSpec("gaussian-1d", spacing=100), 2, 0))
    out = sample_instance(inst, 1000, 0)
    for i, (s, z) in enumerate(zip(out.samples, out.components)):
        assert np.all(z == i)
        assert abs(s.points.mean() - 100 * i) < 0.5


def test_component_frequencies_concentrate():
    inst = builtin_instances()["eq4"]
    n = 100_000
    out = sample_instance(inst, n, 1)
    for row, z in zip(inst.mixing.array, out.components):
        counts = np.bincount(z, minlength=3)
        for p, c in zip(row, counts):
            assert abs(c / n - p) <= 3 * np.sqrt(p * (1 - p) / n) + 1e-15
        keep = row > 0
        assert stats.chisquare(counts[keep], n * row[keep]).pvalue > 0.001


def test_sampling_is_deterministic():
    inst = builtin_instances()["eq3"]
    a = sample_instance(inst, [50, 60, 70], 9)
    b = sample_instance(inst, [50, 60, 70], 9)
    assert [s.n for s in a.samples] == [50, 60, 70]
    assert all(np.array_equal(x.points, y.points) for x, y in zip(a.samples, b.samples))
    with pytest.raises(ValueError):
        sample_instance(inst, 0, 0)


# -- instances -------------------------------------------------------------------------------


def test_builtin_instances():
    inst = builtin_instances()
    assert np.array_equal(inst["eq3"].mixing.array, EQ3)
    assert np.array_equal(inst["eq4"].mixing.array, EQ4)
    assert np.allclose(inst["bg-gamma-0.3"].mixing.array, BG)
    assert not inst["dup-columns"].partial_labels.has_unique_columns()
    assert list_instances() == sorted(inst)


def test_instance_rejects_inconsistent_labels():
    with pytest.raises(ValueError):
        ProblemInstance(MixingMatrix(EQ3), partial_labels=PartialLabelMatrix(np.ones((3, 3), dtype=int)))


@pytest.mark.parametrize("fmt", ["csv", "binary"])
@pytest.mark.parametrize("kind", ["gaussian-bump", "discrete-separable"])
def test_instance_save_load_round_trip(tmp_path, fmt, kind):
    base = builtin_instances()["eq4"].with_bases(BaseSpec(kind), 2)
    inst = sample_instance(base, 40, 3)
    inst.save(tmp_path, fmt)
    back = ProblemInstance.load(tmp_path)
    assert back.to_dict() == inst.to_dict()
    assert all(np.array_equal(a.points, b.points) for a, b in zip(back.samples, inst.samples))
    x = np.linspace(-5, 30, 50)
    assert all(np.allclose(a.cdf(x), b.cdf(x)) for a, b in zip(back.bases, inst.bases))


def test_gaussian_base_cdf_and_sampling_agree():
    b = GaussianBase(1.0, 2.0, 0.1, 30.0)
    x = b.sample(np.random.default_rng(0), 50_000)
    assert stats.kstest(x, b.cdf).pvalue > 0.001
