"""gqcon: one-parameter concurrence-family entanglement measures.

Library layout:

- linalg: Jacobi eigendecomposition, PSD square root, partial trace,
  Schmidt spectra (array level).
- states: PureState / DensityMatrix on labeled qubit registers, canonical
  families, seeded random sampling, JSON state files.
- measures: pure-state measure values, Wootters concurrence, the
  concurrence-to-measure conversion h_q, two-qubit closed forms and
  assistance bounds.
- roof: ensemble (convex-roof) minimization and maximization.
- inequalities: monogamy/polygamy residuals, multipartite indicators,
  scalar diagnostics with sign audits.
- cli: the `gqcon` command-line front end.
"""

from .errors import (
    BadAlpha,
    BadCut,
    BadDimension,
    BadDomain,
    BadFocus,
    BadParameter,
    BadQ,
    BadRank,
    BadSubsystem,
    GqconError,
    NegativeEigenvalue,
    NonFinite,
    NonHermitianInput,
    NotIsometry,
    ParseError,
    RegimeError,
    SizeOutOfRange,
)
from .inequalities import (
    ResidualReport,
    SignAuditCheck,
    alpha_monogamy_residual,
    diag_f,
    diag_h,
    diag_htilde,
    diag_l,
    diag_ltilde,
    diag_m,
    diag_mtilde,
    diagnostic_eval,
    f_decrease_margin,
    h_subadditivity_margin,
    h_superadditivity_margin,
    m_limit_at_one,
    monogamy_profile,
    monogamy_residual,
    pairwise_concurrences,
    polygamy_residual,
    sign_audit,
    tau_indicator,
    tau_indicator_mixed,
    tau_w_closed_form,
)
from .linalg import (
    HermitianEig,
    amplitude_matrix,
    hermitian_eig,
    partial_trace,
    psd_sqrt,
    pure_marginal,
    schmidt_values,
)
from .measures import (
    MeasureKind,
    MeasureValue,
    QParam,
    coa_two_qubit,
    concurrence_pure,
    gq_functional,
    gq_lower_bound_2xd,
    gq_max_two_qubit,
    gq_pure,
    gq_two_qubit_mixed,
    gqcoa_lower_bound,
    h_q,
    wootters_concurrence,
    wootters_spectrum,
)
from .roof import (
    EnsembleDecomposition,
    RoofConfig,
    RoofResult,
    decomposition_from_isometry,
    ensemble_average,
    roof_maximize,
    roof_minimize,
)
from .states import (
    DensityMatrix,
    PureState,
    bell_state,
    ghz_state,
    haar_random_pure,
    haar_unitary,
    load_state_file,
    make_rng,
    product_state,
    random_local_unitary,
    random_mixed,
    save_state_file,
    state_from_json,
    state_to_json,
    w_state,
    werner,
)

__version__ = "0.1.0"
