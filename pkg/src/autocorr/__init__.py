"""Numerical toolkit for sharp autocorrelation inequalities on the real line.

Computes the explicit constants of the mean / Gaussian-mean / window-minimum
autocorrelation inequalities, evaluates the inequality ratios on test
functions and measures through both the time side and the Fourier side,
searches parametrized families for lower-bound examples, and desk-checks the
computable residues of the qualitative arguments (dual positive-mass bound,
spectral inequality at the sinc minimizer, the two-atom non-solution).
"""

__version__ = "0.1.0"

from .constants import (
    BoundReport,
    SincRoots,
    gaussian_mean_lower,
    hy_coefficient,
    indicator_min_lower,
    mean_upper_constant,
    min_l1_constant,
    min_mixed_constant,
    minimize_over_p,
    sinc_min_roots,
)
from .correlate import (
    Correlation,
    ConvolutionStructure,
    autocorrelate,
    autocorrelate_singular,
    convolution_structure,
    dilate,
    dilate_mollify,
    measure_autocorrelate,
    mollify,
    periodize,
)
from .dualcheck import (
    BetaPowerBump,
    CosineBump,
    StandardBump,
    case2bb_residual,
    case2bb_scan,
    dual_mass_report,
    negative_part_bound_check,
    nu_spectrum_check,
    positive_part_mass,
)
from .funcspace import (
    AnalyticFamily,
    BSExample,
    Gaussian,
    GridFunction,
    Indicator,
    MixedMeasure,
    PiecewiseConstant,
    bs_l1,
    family_from_spec,
    norms,
    sample,
)
from .functionals import (
    InvariantViolation,
    RatioResult,
    ZeroFunctionError,
    q_gauss,
    q_mean,
    q_min_01,
    q_min_01_bs,
    q_min_12,
)
from .search import SearchRecord, baseline, search
from .spectral import (
    GaussianWeight,
    IntervalWeight,
    MomentResult,
    fourier,
    fourier_measure,
    fourier_piecewise,
    mean_functional_fourier,
    weight_lp_moment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
