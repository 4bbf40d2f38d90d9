"""Sparse learning with l0, l1 and l2 penalties solved through its dual.

Typical use::

    from l0pd import Hyperparams, LossModel, generate_synthetic, SyntheticSpec, solve

    data, beta_true = generate_synthetic(SyntheticSpec(n=200, p=300, seed=1))
    report = solve(data, Hyperparams(0.03, 0.02, 1.0), LossModel.square())
"""

from .active_set import FeatureSets, batch_size, init_active_set, add_features, screen
from .baselines import CDConfig, cd_solve, dual_ascent_solve, oracle_solve
from .bench import ExperimentConfig, estimation_error, pssr, run_experiment
from .data import (
    SyntheticSpec,
    generate_synthetic,
    load_beta,
    load_libsvm,
    normalize_columns,
    subsample,
    write_libsvm,
)
from .duality import (
    Hyperparams,
    ProblemData,
    ball_radius,
    dual_from_primal,
    dual_objective,
    duality_gap,
    eta,
    primal_from_dual,
    primal_objective,
    psi,
    super_gradient,
)
from .errors import (
    BoundsError,
    DomainError,
    FeasibilityError,
    L0PDError,
    NumericalDivergenceError,
    ParseError,
    ShapeError,
    UnsupportedConfigurationError,
)
from .inner import FixedStep, InnerConfig, InverseTimeStep, cd_pass, inner_solve, lipschitz_step
from .losses import LossKind, LossModel
from .outer import OuterConfig, SolveReport, solve

__version__ = "0.1.0"
