"""Executable checks for a zero-full Hausdorff-measure criterion on
weighted inhomogeneous Dirichlet non-improvable affine forms: series
verdicts, rectangle contents, transference tests and the divergence-side
limsup construction."""

from .content_engine import (
    ContentEstimate,
    Hyperrectangle,
    gamma_via_cover,
    neighborhood_cover_count,
    rect_content_closed,
    rect_content_oracle,
)
from .core_model import (
    ApproxFunction,
    DimensionFunction,
    IntegerVector,
    WeightVector,
    f_bracket,
    f_eval,
    psi_eval,
    psi_inverse,
    shell,
    shell_count,
    t_of_u,
    t_of_u_clamped,
    validate_lambda_decay,
)
from .errors import (
    BracketError,
    BudgetError,
    CertificationError,
    ConfigError,
    ConstructionError,
    DirichletLabError,
    DomainError,
    InvariantViolation,
    NoValidKError,
)
from .limsup_lab import (
    LambdaSelection,
    LimsupParams,
    McEstimate,
    PhiProfile,
    QiRecord,
    QiReport,
    delta_membership,
    gamma_set,
    inner_rectangle,
    k_of_u,
    lambda_selection,
    mc_measure,
    phi_profile,
    quasi_independence_scan,
    rprime_membership,
    totient_density,
    varpi_u,
)
from .series_engine import (
    GammaTerm,
    SeriesParams,
    SeriesReport,
    gamma_u,
    jarnik_partial,
    khintchine_groshev_partial,
    series_verdict,
    shell_sum,
)
from .transference_lab import (
    AffineSystem,
    TransferConstants,
    cassels_backward_scan,
    dirichlet_uniform_witness,
    dual_condition,
    epsilon_b,
    is_dirichlet_at_t,
    nearest_int_dist,
    tau_b_u,
    tau_const,
    transfer_constants,
)

__version__ = "0.1.0"
