"""Recovering pure class distributions from mixed (contaminated) samples.

``simplex_core`` and ``population`` work on mixture proportions exactly;
``empirical`` and ``finite_sample`` estimate the same quantities from
samples; ``synthesis`` builds ground-truth problems and ``harness`` runs and
scores experiments.
"""

from .errors import (
    ConditionDViolated,
    ConfigError,
    DecontamError,
    DuplicateColumns,
    EmptyCandidateFamily,
    EqualInputs,
    InvalidProportion,
    KappaOne,
    LengthMismatch,
    LoopCapExceeded,
    NonSquare,
    PreconditionB1,
    RankDeficient,
)
from .simplex_core import (
    DiscreteDistribution,
    KappaSolution,
    MixingMatrix,
    MixtureProportion,
    PartialLabelMatrix,
    check_b1,
    check_b2,
    check_b3,
    common_background_noise,
    multi_sample_kappa,
    residue,
    two_sample_kappa,
)
from .population import (
    DemixResult,
    VertexTestResult,
    demix,
    face_test,
    multiclass_decontaminate,
    nonsquare_demix,
    partial_label_decontaminate,
    vertex_test,
)
from .empirical import (
    EmpiricalPool,
    SampleSet,
    SignedMixture,
    VCClassSpec,
    interval_sup_deviation,
    kappa_hat_multi,
    kappa_hat_two,
    residue_hat,
    sup_deviation,
    vc_epsilon,
)
from .finite_sample import (
    HatResult,
    demix_hat,
    face_test_hat,
    multiclass_hat,
    partial_label_hat,
    reduce_condition_d,
    vertex_test_hat,
)
from .synthesis import BaseSpec, ProblemInstance, builtin_instances, gen_bases, gen_mixing, sample_instance
from .harness import ExperimentConfig, RecoveryReport, evaluate_recovery, run_experiment

__version__ = "0.1.0"

__all__ = [
    "ConditionDViolated",
    "ConfigError",
    "DecontamError",
    "DuplicateColumns",
    "EmptyCandidateFamily",
    "EqualInputs",
    "InvalidProportion",
    "KappaOne",
    "LengthMismatch",
    "LoopCapExceeded",
    "NonSquare",
    "PreconditionB1",
    "RankDeficient",
    "DiscreteDistribution",
    "KappaSolution",
    "MixingMatrix",
    "MixtureProportion",
    "PartialLabelMatrix",
    "check_b1",
    "check_b2",
    "check_b3",
    "common_background_noise",
    "multi_sample_kappa",
    "residue",
    "two_sample_kappa",
    "DemixResult",
    "VertexTestResult",
    "demix",
    "face_test",
    "multiclass_decontaminate",
    "nonsquare_demix",
    "partial_label_decontaminate",
    "vertex_test",
    "EmpiricalPool",
    "SampleSet",
    "SignedMixture",
    "VCClassSpec",
    "interval_sup_deviation",
    "kappa_hat_multi",
    "kappa_hat_two",
    "residue_hat",
    "sup_deviation",
    "vc_epsilon",
    "HatResult",
    "demix_hat",
    "face_test_hat",
    "multiclass_hat",
    "partial_label_hat",
    "reduce_condition_d",
    "vertex_test_hat",
    "BaseSpec",
    "ProblemInstance",
    "builtin_instances",
    "gen_bases",
    "gen_mixing",
    "sample_instance",
    "ExperimentConfig",
    "RecoveryReport",
    "evaluate_recovery",
    "run_experiment",
]
