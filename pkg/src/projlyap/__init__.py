"""Average projective log-norms and Lyapunov exponents.

The core quantity is the average of log ||g x|| over a probability
measure on projective space.  For the rotation-invariant measure this
average has a rapidly convergent series in the singular values of g,
which in turn gives closed-form largest Lyapunov exponents for
rotation-averaged random matrix products.  The package evaluates the
series (two independent routes), cross-checks it by Monte Carlo,
simulates the matrix products directly, and tabulates one explicit
family of exponents.
"""

from .apps import (
    FamilyPoint,
    figure1_data,
    figure_grid,
    lambda_family_limit,
    lambda_family_t,
    lambda_product,
    write_figure_csv,
)
from .combin import (
    composition_count,
    compositions,
    monomial_integral,
    multinomial,
    theta_measure,
    theta_uniform,
)
from .errors import (
    BudgetExceeded,
    InputError,
    InvalidLambdaStar,
    NoConvergence,
    NonInvertible,
    NotSymmetric,
    NumericalError,
    ProjlyapError,
    RankDeficient,
    UnsupportedMeasure,
)
from .linalg import (
    SingularSpectrum,
    SLDeviationWarning,
    determinant,
    qr_orthonormalize,
    read_matrix,
    singular_spectrum,
    spectral_radius,
    write_matrix,
)
from .measures import (
    MatrixEnsemble,
    ProjectiveMeasure,
    act,
    empirical_stationary,
    momenta,
    read_ensemble,
    read_measure,
    read_weighted_matrices,
    sample_matrix,
    sample_matrix_batch,
    stationarity_residual,
    write_ensemble,
    write_measure,
)
from .montecarlo import (
    ConjectureProbe,
    McEstimate,
    RngConfig,
    conjecture_probe,
    fk_simulate,
    mc_r_nu,
    sample_haar_so,
    sample_projective_uniform,
)
from .series import (
    SeriesParams,
    SeriesResult,
    choose_lambda_star,
    quadratic_form_moment,
    r_measure,
    r_uniform,
)
from .specfun import (
    ball_volume,
    double_factorial,
    gamma_half_integer,
    rising_even_product,
    sphere_area,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ProjlyapError",
    "InputError",
    "NonInvertible",
    "NotSymmetric",
    "RankDeficient",
    "UnsupportedMeasure",
    "InvalidLambdaStar",
    "NumericalError",
    "NoConvergence",
    "BudgetExceeded",
    # special functions
    "double_factorial",
    "rising_even_product",
    "gamma_half_integer",
    "ball_volume",
    "sphere_area",
    # compositions and moment coefficients
    "compositions",
    "composition_count",
    "multinomial",
    "monomial_integral",
    "theta_uniform",
    "theta_measure",
    # linear algebra
    "SingularSpectrum",
    "SLDeviationWarning",
    "singular_spectrum",
    "determinant",
    "qr_orthonormalize",
    "spectral_radius",
    "read_matrix",
    "write_matrix",
    # series
    "SeriesParams",
    "SeriesResult",
    "choose_lambda_star",
    "r_uniform",
    "r_measure",
    "quadratic_form_moment",
    # measures
    "ProjectiveMeasure",
    "MatrixEnsemble",
    "act",
    "momenta",
    "sample_matrix",
    "sample_matrix_batch",
    "stationarity_residual",
    "empirical_stationary",
    "read_measure",
    "write_measure",
    "read_ensemble",
    "write_ensemble",
    "read_weighted_matrices",
    # Monte Carlo
    "RngConfig",
    "McEstimate",
    "ConjectureProbe",
    "mc_r_nu",
    "fk_simulate",
    "conjecture_probe",
    "sample_projective_uniform",
    "sample_haar_so",
    # applications
    "FamilyPoint",
    "lambda_family_t",
    "lambda_family_limit",
    "lambda_product",
    "figure_grid",
    "figure1_data",
    "write_figure_csv",
]
