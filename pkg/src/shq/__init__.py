"""shq: a verification laboratory and Dirichlet solver for sum Hessian quotients.

The operator under study acts on the spectrum eta of (Laplacian u) I -
(Hessian u) through the quotient

    (sigma_k(eta) + alpha sigma_{k-1}(eta)) / (sigma_l(eta) + alpha sigma_{l-1}(eta)).

Modules: symfunc (symmetric-function calculus), cones (Garding cones and
samplers), quotient (values, derivatives, inequality checks), matrixcalc
(frame-covariant matrix calculus), solver (finite-difference Dirichlet
solver), probes (interior-estimate probes), verify (sweep driver),
report/figures (delimited reports and companion plots), cli (the shq
command).
"""

from .errors import (
    AdmissibilityError,
    ConfigurationError,
    CorruptInputError,
    InputDomainError,
    MaximumPrincipleError,
    NoConvergenceError,
    OutsideDomainError,
    SamplingExhaustedError,
    ShqError,
)
from .symfunc import EigenTuple, OperatorSpec, s_sum, s_sum_grad, s_sum_hess, sigma, sigma_deleted
from .cones import (
    ConeSample,
    EtaTuple,
    eta_from_lambda,
    in_gamma,
    in_gamma_prime,
    in_gamma_tilde,
    sample_cone,
)
from .quotient import (
    GradBounds,
    QuotientGradient,
    check_concavity_defect,
    check_grad_bounds,
    check_maclaurin,
    check_quotient_monotone,
    f_grad,
    f_hess,
    f_value,
)
from .matrixcalc import (
    SymmetricField,
    f_matrix_grad,
    second_derivative_form,
    t_diagonal,
    u_transform,
)
from .solver import (
    DomainSpec,
    Grid,
    GridSolution,
    RHSSpec,
    SolveOptions,
    discretize,
    load_snapshot,
    newton_step,
    residual,
    save_snapshot,
    solve,
)
from .presets import (
    ManufacturedCase,
    bump_rhs,
    constant_rhs,
    quadratic_case,
    radial_quartic_case,
    seed_constant,
)
from .probes import (
    EstimateReport,
    InteriorProbeConfig,
    PogorelovProbeConfig,
    interior_probe,
    merge_reports,
    pogorelov_probe,
    rescale_to_unit_ball,
)
from .verify import (
    CheckResult,
    SweepGrid,
    Tolerances,
    check_names,
    run_check,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ShqError",
    "InputDomainError",
    "OutsideDomainError",
    "SamplingExhaustedError",
    "ConfigurationError",
    "CorruptInputError",
    "NoConvergenceError",
    "AdmissibilityError",
    "MaximumPrincipleError",
    "EigenTuple",
    "OperatorSpec",
    "sigma",
    "sigma_deleted",
    "s_sum",
    "s_sum_grad",
    "s_sum_hess",
    "EtaTuple",
    "ConeSample",
    "eta_from_lambda",
    "in_gamma",
    "in_gamma_tilde",
    "in_gamma_prime",
    "sample_cone",
    "QuotientGradient",
    "GradBounds",
    "f_value",
    "f_grad",
    "f_hess",
    "check_concavity_defect",
    "check_maclaurin",
    "check_quotient_monotone",
    "check_grad_bounds",
    "SymmetricField",
    "u_transform",
    "f_matrix_grad",
    "second_derivative_form",
    "t_diagonal",
    "DomainSpec",
    "RHSSpec",
    "SolveOptions",
    "Grid",
    "GridSolution",
    "discretize",
    "residual",
    "newton_step",
    "solve",
    "save_snapshot",
    "load_snapshot",
    "ManufacturedCase",
    "seed_constant",
    "constant_rhs",
    "bump_rhs",
    "quadratic_case",
    "radial_quartic_case",
    "EstimateReport",
    "InteriorProbeConfig",
    "PogorelovProbeConfig",
    "interior_probe",
    "pogorelov_probe",
    "rescale_to_unit_ball",
    "merge_reports",
    "Tolerances",
    "SweepGrid",
    "CheckResult",
    "check_names",
    "run_check",
    "run_sweep",
    "__version__",
]
