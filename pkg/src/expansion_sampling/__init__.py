"""Sequential identification of feasible domains in unbounded input spaces.

A Gaussian process classifier (probit likelihood, Laplace approximation)
drives a two-stage sampling loop: refine the decision boundary inside the
region already visited, then push outward until every candidate in reach
fails a confidence margin. The search needs no bounding box; a bounded
variance-straddling baseline is included for comparison.
"""
from .acquisition import (
    AcquisitionParams,
    aes_constraint_satisfied,
    epsilon_margin_probability,
    margin_probability_many,
    misclassification_loss,
    straddle_score,
    straddle_score_many,
)
from .baselines import BoundedBox, straddle_run
from .engine import (
    AesConfig,
    AesState,
    DegenerateGeometryError,
    EngineStallError,
    QueryRecord,
    Stage,
    compute_beta,
    compute_gamma,
    detect_stage,
    expansion_coefficient,
    refinement_coefficient,
    run,
    sample_ball,
    select_query,
    step,
)
from .evaluation import (
    F1Point,
    TestSet,
    explored_region_f1,
    f1_curve,
    f1_score,
    grid_test_set,
    predicted_labels,
    random_test_set,
)
from .gpc import (
    FitConvergenceError,
    GpcFit,
    KernelConfig,
    LabeledSet,
    Prediction,
    fit,
    kernel_eval,
    predict,
    predict_many,
)
from .problems import (
    BRANIN_RULE,
    HOSAKI_RULE,
    NowackiBeamParams,
    Oracle,
    ThresholdRule,
    bernoulli_noise,
    branin_label,
    branin_oracle,
    branin_value,
    double_sphere_label,
    double_sphere_oracle,
    gaussian_noise,
    hosaki_label,
    hosaki_oracle,
    hosaki_value,
    nowacki_label,
    nowacki_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionParams",
    "AesConfig",
    "AesState",
    "BRANIN_RULE",
    "HOSAKI_RULE",
    "BoundedBox",
    "DegenerateGeometryError",
    "EngineStallError",
    "F1Point",
    "FitConvergenceError",
    "GpcFit",
    "KernelConfig",
    "LabeledSet",
    "NowackiBeamParams",
    "Oracle",
    "Prediction",
    "QueryRecord",
    "Stage",
    "TestSet",
    "ThresholdRule",
    "aes_constraint_satisfied",
    "bernoulli_noise",
    "branin_label",
    "branin_oracle",
    "branin_value",
    "compute_beta",
    "compute_gamma",
    "detect_stage",
    "double_sphere_label",
    "double_sphere_oracle",
    "epsilon_margin_probability",
    "expansion_coefficient",
    "explored_region_f1",
    "f1_curve",
    "f1_score",
    "fit",
    "gaussian_noise",
    "grid_test_set",
    "hosaki_label",
    "hosaki_oracle",
    "hosaki_value",
    "kernel_eval",
    "margin_probability_many",
    "misclassification_loss",
    "nowacki_label",
    "nowacki_oracle",
    "predict",
    "predict_many",
    "predicted_labels",
    "random_test_set",
    "refinement_coefficient",
    "run",
    "sample_ball",
    "select_query",
    "step",
    "straddle_run",
    "straddle_score",
    "straddle_score_many",
]
