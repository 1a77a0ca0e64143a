from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decontam.empirical import EmpiricalPool, SampleSet, VCClassSpec, interval_sup_deviation, sup_deviation
from decontam.errors import (
    ConditionDViolated,
    DuplicateColumns,
    KappaOne,
    LengthMismatch,
    LoopCapExceeded,
    RankDeficient,
)
from decontam.finite_sample import (
    HatResult,
    demix_hat,
    face_test_hat,
    multiclass_hat,
    partial_label_hat,
    reduce_condition_d,
    vertex_test_hat,
)
from decontam.population import demix, match_columns, multiclass_decontaminate, partial_label_decontaminate
from decontam.simplex_core import MixingMatrix, PartialLabelMatrix
from decontam.synthesis import (
    EQ3,
    EQ4,
    BaseSpec,
    GaussianBase,
    Mixture,
    ProblemInstance,
    builtin_instances,
    exact_samples,
    gen_bases,
    gen_mixing,
    sample_instance,
)

from oracles import best_match_error

EXACT = VCClassSpec(anchor_budget=None)
S3 = PartialLabelMatrix([[1, 1, 0], [1, 0, 1], [0, 1, 1]])


def matched_deviation(estimates, bases):
    D = np.array([[interval_sup_deviation(e, b.cdf) for b in bases] for e in estimates])
    L = len(bases)
    return min(max(D[p[i], i] for i in range(L)) for p in permutations(range(L)))


def class_deviation(estimates, bases):
    return max(interval_sup_deviation(e, b.cdf) for e, b in zip(estimates, bases))


@pytest.fixture(scope="module")
def eq3_samples():
    inst = builtin_instances()["eq3"]
    return inst, sample_instance(inst, 100_000, 11).samples


@pytest.fixture(scope="module")
def eq3_demix(eq3_samples):
    inst, samples = eq3_samples
    return inst, demix_hat(samples, rng_seed=3)


# -- multiclass ----------------------------------------------------------------------


def test_multiclass_hat_identity_mixing():
    inst = ProblemInstance(MixingMatrix(np.eye(2)), gen_bases(BaseSpec("gaussian-bump"), 2, 0))
    samples = sample_instance(inst, 10_000, 0).samples
    res = multiclass_hat(samples)
    pool = res.estimates[0].pool
    for i, e in enumerate(res.estimates):
        assert abs(e.coefficients.sum() - 1) <= 1e-12
        assert sup_deviation(e, pool.empirical(i)) <= 0.05


def test_multiclass_hat_binary_gaussians():
    bases = [GaussianBase(0), GaussianBase(4)]
    inst = ProblemInstance(MixingMatrix([[0.8, 0.2], [0.3, 0.7]]), bases)
    res = multiclass_hat(sample_instance(inst, 50_000, 1).samples)
    assert matched_deviation(res.estimates, bases) <= 0.2
    assert np.array_equal(res.permutation, [0, 1])
    assert all(abs(e.coefficients.sum() - 1) <= 1e-12 for e in res.estimates)


def test_multiclass_hat_identical_samples_raise_kappa_one():
    x = np.random.default_rng(0).normal(size=500)
    with pytest.raises(KappaOne):
        multiclass_hat([SampleSet(x, 0), SampleSet(x, 1)])


def test_multiclass_hat_needs_two_samples():
    with pytest.raises(ValueError):
        multiclass_hat([SampleSet(np.arange(5.0))])


# -- face test -------------------------------------------------------------------------


def test_face_test_hat_examples():
    rng = np.random.default_rng(2)
    x = rng.normal(size=20_000)
    pool = EmpiricalPool([SampleSet(x, 0), SampleSet(x, 1)], VCClassSpec())
    assert face_test_hat(pool.empiricals(), 0.5)
    nested = EmpiricalPool(
        [SampleSet(rng.uniform(0, 1, 100_000), 0), SampleSet(rng.uniform(0, 2, 100_000), 1)], VCClassSpec()
    )
    assert not face_test_hat(nested.empiricals(), 0.5)
    assert face_test_hat([pool.empirical(0)], 0.5)
    with pytest.raises(ValueError):
        face_test_hat(pool.empiricals(), 1.0)


# -- demixing ----------------------------------------------------------------------------


def test_demix_hat_two_classes_planted():
    a = 0.7 / 0.94
    b = 0.2 * a
    bases = gen_bases(BaseSpec("gaussian-bump"), 2, 0)
    inst = ProblemInstance(MixingMatrix([[a, 1 - a], [b, 1 - b]]), bases)
    res = demix_hat(sample_instance(inst, 50_000, 2).samples, rng_seed=0)
    assert len(res.estimates) == 2
    assert matched_deviation(res.estimates, bases) <= 0.2
    # base case: kappa(P0|P1) = 0.3 and kappa(P1|P0) = 0.2
    assert np.allclose(res.diagnostics["kappa"][0], [0.3, 0.2], atol=0.05)


def test_demix_hat_duplicate_samples_are_diagnosed():
    x = np.random.default_rng(3).normal(size=2000)
    samples = [SampleSet(x, i) for i in range(3)]
    with pytest.raises((KappaOne, LoopCapExceeded)):
        demix_hat(samples, rng_seed=0, max_face_iter=50)


def test_demix_hat_eq3_estimates_are_distinct(eq3_demix):
    inst, res = eq3_demix
    est = res.estimates
    assert len(est) == 3
    for i in range(3):
        for j in range(i + 1, 3):
            assert sup_deviation(est[i], est[j]) >= 0.3
    assert matched_deviation(est, inst.bases) <= 0.25


def test_demix_hat_orders_and_affine_coefficients(eq3_demix):
    _, res = eq3_demix
    assert res.max_order <= (3 - 1) ** 3
    assert res.diagnostics["orders"] == [e.order for e in res.estimates]
    assert all(abs(e.coefficients.sum() - 1) <= 1e-12 for e in res.estimates)
    assert all(n >= 1 for n in res.diagnostics["iterations"])


def test_demix_hat_is_deterministic(eq3_samples):
    _, samples = eq3_samples
    small = [SampleSet(s.points[:5000], s.source_label) for s in samples]
    a = demix_hat(small, rng_seed=5)
    b = demix_hat(small, rng_seed=5)
    assert a.to_json() == b.to_json()


def test_hat_result_json_round_trip(eq3_demix):
    _, res = eq3_demix
    pool = res.estimates[0].pool
    back = HatResult.from_json(res.to_json(), pool)
    assert back.to_json() == res.to_json()
    assert all(np.array_equal(a.coefficients, b.coefficients) for a, b in zip(back.estimates, res.estimates))
    assert back.estimates[0].pool is pool


def test_demix_hat_rejects_single_input():
    with pytest.raises(ValueError):
        demix_hat([SampleSet(np.arange(4.0))])


# -- vertex test ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def eq3_vertex_pool(eq3_samples):
    inst, samples = eq3_samples
    rng = np.random.default_rng(21)
    pure = [SampleSet(b.sample(rng, 100_000), 3 + j) for j, b in enumerate(inst.bases)]
    return EmpiricalPool(list(samples) + pure, VCClassSpec())


def test_vertex_test_hat_true_vertices(eq3_vertex_pool):
    P = eq3_vertex_pool.empiricals()
    res, K = vertex_test_hat(S3, P[:3], P[3:])
    assert res.found and np.array_equal(res.order, [0, 1, 2])
    assert K.shape == (3, 3)


@pytest.mark.parametrize("shuffle", list(permutations(range(3))))
def test_vertex_test_hat_is_shuffle_equivariant(eq3_vertex_pool, shuffle):
    P = eq3_vertex_pool.empiricals()
    q = [P[3 + j] for j in shuffle]
    res, _ = vertex_test_hat(S3, P[:3], q)
    assert res.found
    # class l is found at the shuffled position of the true vertex l
    assert np.array_equal(res.order, np.argsort(shuffle))


def test_vertex_test_hat_degenerate_threshold():
    # thresholding at |S| = M L marks every entry, which only an all-ones S could match
    assert match_columns(np.ones((3, 3), dtype=int), S3.entries) is None
    # and an all-ones S with L >= 2 has repeated columns
    x = SampleSet(np.arange(5.0))
    with pytest.raises(DuplicateColumns):
        vertex_test_hat(np.ones((3, 3), dtype=int), [x] * 3, [x] * 3)


def test_vertex_test_hat_errors():
    pool = EmpiricalPool([SampleSet(np.arange(5.0) + i, i) for i in range(3)], VCClassSpec())
    P = pool.empiricals()
    with pytest.raises(ConditionDViolated):
        vertex_test_hat([[1, 0, 0], [1, 1, 0], [0, 1, 1]], P, P)
    with pytest.raises(LengthMismatch):
        vertex_test_hat(S3, P[:2], P)


# -- partial labels ------------------------------------------------------------------------


@pytest.mark.parametrize("name, seed", [("eq3", 0), ("eq4", 1)])
def test_partial_label_hat_worked_instances(name, seed):
    inst = builtin_instances()[name]
    samples = sample_instance(inst, 100_000, 100 + seed).samples
    res = partial_label_hat(inst.partial_labels, samples, rng_seed=seed)
    assert res.permutation is not None and res.diagnostics["found"]
    assert class_deviation(res.estimates, inst.bases) <= 0.25


def test_partial_label_hat_validates_labels_before_any_work():
    with pytest.raises(DuplicateColumns):
        partial_label_hat([[1, 1, 0], [1, 1, 1], [0, 0, 1]], [])
    with pytest.raises(ConditionDViolated):
        partial_label_hat([[1, 0], [1, 1]], [])
    with pytest.raises(LengthMismatch):
        partial_label_hat(S3, [SampleSet(np.arange(4.0))])


def test_partial_label_hat_more_sources_than_classes():
    S = PartialLabelMatrix([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]])
    pi = gen_mixing("partial-label", 3, 4, 0, S=S, fill="uniform")
    inst = ProblemInstance(pi, gen_bases(BaseSpec("gaussian-bump"), 3, 0), partial_labels=S)
    res = partial_label_hat(S, sample_instance(inst, 100_000, 4).samples, rng_seed=4)
    assert res.permutation is not None
    assert class_deviation(res.estimates, inst.bases) <= 0.25


def test_partial_label_hat_rank_deficient():
    x = [SampleSet(np.arange(5.0) + i, i) for i in range(2)]
    with pytest.raises(RankDeficient):
        partial_label_hat([[1, 1, 0], [1, 0, 1]], x)


# -- reduction to condition D ----------------------------------------------------------------


def _pool(n_rows):
    return [SampleSet(np.random.default_rng(i).normal(i, 1, 200), i) for i in range(n_rows)]


def test_reduce_condition_d_no_op():
    samples = _pool(3)
    red = reduce_condition_d(S3, samples)
    assert np.array_equal(red.labels.entries, S3.entries)
    assert red.classes == [0, 1, 2] and red.rows == [0, 1, 2] and not red.pinned
    assert all(e.order == 0 for e in red.estimates)


def test_reduce_condition_d_single_peel():
    S = PartialLabelMatrix([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 1], [0, 0, 0, 1]])
    pi = MixingMatrix([[0.5, 0.5, 0, 0], [0, 0.5, 0.5, 0], [0.4, 0, 0.3, 0.3], [0, 0, 0, 1]])
    bases = gen_bases(BaseSpec("gaussian-bump"), 4, 0)
    inst = sample_instance(ProblemInstance(pi, bases, partial_labels=S), 50_000, 6)
    red = reduce_condition_d(S, inst.samples)
    assert red.classes == [0, 1, 2] and list(red.pinned) == [3] and red.rows == [0, 1, 2]
    assert red.labels.entries.tolist() == [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert red.labels.satisfies_d()
    # the peeled row is now the mixture of classes 0 and 2 only
    truth = Mixture(bases[:3], [4 / 7, 0, 3 / 7])
    assert interval_sup_deviation(red.estimates[2], truth.cdf) <= 0.1
    assert red.estimates[2].order == 1
    assert interval_sup_deviation(red.pinned[3], bases[3].cdf) <= 0.05


def test_reduce_condition_d_full_reduction():
    perm = [2, 0, 1]
    S = np.eye(3, dtype=int)[perm]
    samples = _pool(3)
    red = reduce_condition_d(S, samples)
    assert red.is_trivial and sorted(red.pinned) == [0, 1, 2]
    pool = red.pinned[0].pool
    for row, cls in enumerate(perm):
        assert np.array_equal(red.pinned[cls].coefficients, pool.empirical(row).coefficients)


# -- agreement with the population algorithms on exact inputs --------------------------------


def _exact_pool(pi, L, seed):
    inst = ProblemInstance(pi, gen_bases(BaseSpec("discrete-separable"), L, seed))
    return EmpiricalPool(exact_samples(inst), EXACT, eps_override=np.zeros(pi.shape[0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.floats(0.0, 0.6), st.integers(0, 2**31 - 1))
def test_multiclass_hat_matches_population_on_exact_inputs(L, noise, seed):
    pi = gen_mixing("b1-background", L, noise_level=noise, rng_seed=seed)
    res = multiclass_hat(_exact_pool(pi, L, seed))
    pop = multiclass_decontaminate(pi.array)
    for e, q in zip(res.estimates, pop):
        assert np.abs(e.coefficients @ pi.array - q.weights).max() <= 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_demix_hat_matches_population_on_exact_inputs(L, seed):
    pi = gen_mixing("full-rank", L, rng_seed=seed)
    res = demix_hat(_exact_pool(pi, L, seed), rng_seed=seed)
    pop = demix(pi.array, rng_seed=seed, variant="residue-chain").vertices
    implied = [e.coefficients @ pi.array for e in res.estimates]
    assert best_match_error(implied, [q.weights for q in pop]) <= 1e-7


@pytest.mark.parametrize("pi", [EQ3, EQ4])
def test_partial_label_hat_matches_population_on_exact_inputs(pi):
    pi = MixingMatrix(pi)
    res = partial_label_hat(S3, _exact_pool(pi, 3, 0), rng_seed=0)
    pop = partial_label_decontaminate(S3, pi.array, rng_seed=0)
    for e, q in zip(res.estimates, pop):
        assert np.abs(e.coefficients @ pi.array - q.weights).max() <= 1e-7
