"""Resonance-fluctuation simulation and strength-function estimation.

Simulates fluctuating spectra from seeded level ladders through a
coherent multi-level collision amplitude, composes multi-scale synthetic
index sessions from the same machinery, and estimates the coherence
width, mean spacing, and their ratio back from observed series.
"""

__version__ = "0.1.0"

from .ensembles import (
    EnsembleSpec,
    Level,
    build_level_ladder,
    empirical_strength_ratio,
    n_levels_to_cover,
    sample_scaled_chi2,
    sample_wigner_spacings,
    wigner_spacing_pdf,
)
from .errors import (
    ConfigError,
    CorrelationWarning,
    DegenerateInputError,
    FlatSeriesError,
    IngestError,
    ModelConsistencyError,
    NormalizationError,
    ParameterError,
    PoleError,
    ResolutionError,
    ResolutionWarning,
    SingularDenominatorError,
    ToolkitError,
)
from .estimator import (
    PredictionReport,
    StrengthEstimate,
    detrend_keep_mean,
    estimate_coherence_width,
    estimate_mean_spacing,
    predict_day,
    strength_function,
)
from .fluctuations import (
    BivariateParams,
    MEAN_NORMALIZED,
    VARIANCE_NORMALIZED,
    amplitude_autocorr,
    bivariate_pdf,
    intensity_autocorr,
    lorentzian_amplitude,
    lorentzian_autocorr,
    normalized_intensity,
    sample_complex_bivariate,
)
from .index_model import (
    IndexModel,
    StructureSpec,
    compose_index,
    ensemble_for_component,
    synthesize_component,
)
from .rfunction import (
    AmplitudeTriple,
    ReactionConfig,
    amplitude_sums,
    collision_element,
    eliminated_width,
    evaluate_spectrum,
    inelastic_cross_section,
    sample_amplitude_signs,
)
from .series import SpectrumSeries

__all__ = [
    "AmplitudeTriple",
    "BivariateParams",
    "ConfigError",
    "CorrelationWarning",
    "DegenerateInputError",
    "EnsembleSpec",
    "FlatSeriesError",
    "IndexModel",
    "IngestError",
    "Level",
    "MEAN_NORMALIZED",
    "ModelConsistencyError",
    "NormalizationError",
    "ParameterError",
    "PoleError",
    "PredictionReport",
    "ReactionConfig",
    "ResolutionError",
    "ResolutionWarning",
    "SingularDenominatorError",
    "SpectrumSeries",
    "StrengthEstimate",
    "StructureSpec",
    "ToolkitError",
    "VARIANCE_NORMALIZED",
    "amplitude_autocorr",
    "amplitude_sums",
    "bivariate_pdf",
    "build_level_ladder",
    "collision_element",
    "compose_index",
    "detrend_keep_mean",
    "eliminated_width",
    "empirical_strength_ratio",
    "ensemble_for_component",
    "estimate_coherence_width",
    "estimate_mean_spacing",
    "evaluate_spectrum",
    "inelastic_cross_section",
    "intensity_autocorr",
    "lorentzian_amplitude",
    "lorentzian_autocorr",
    "n_levels_to_cover",
    "normalized_intensity",
    "predict_day",
    "sample_amplitude_signs",
    "sample_complex_bivariate",
    "sample_scaled_chi2",
    "sample_wigner_spacings",
    "strength_function",
    "synthesize_component",
    "wigner_spacing_pdf",
]
