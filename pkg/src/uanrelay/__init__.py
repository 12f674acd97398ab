"""Underwater acoustic link budgets, power-law fits, and relay planning.

The pipeline: acoustics gives absorption, spreading loss, and ambient noise;
linkbudget turns those into an optimal band and transmit power per distance;
fitmodels compresses the link budget into distance power laws; planner makes
closed-form relay deployment decisions from the fitted constants; oracle
cross-checks those decisions against exhaustive search on the exact model.
"""

from .acoustics import (
    Environment,
    absorption_db_per_km,
    attenuation_noise_product_db,
    noise_components_db,
    noise_psd_db,
    path_loss_db,
)
from .errors import (
    BandTruncationError,
    BoundaryMinimumError,
    BracketError,
    FitRankError,
    ModelMismatchError,
    QuadratureError,
    UanRelayError,
    ValidationError,
)
from .fitmodels import (
    FitModel,
    GoFReport,
    PolySurface,
    default_fit_distances,
    eval_surface,
    fit_bandwidth_model,
    fit_channel_model,
    fit_channel_models,
    fit_open_distance_surface,
    fit_power_model,
    fit_psi_trend,
    load_reference_surface,
    validate_ranges,
)
from .linkbudget import (
    ACOUSTIC_TO_ELECTRIC,
    DEFAULT_WINDOW,
    FrequencyBand,
    adaptive_simpson,
    band_integrals,
    effective_band,
    electrical_power,
    optimal_frequency,
    required_transmit_power_acoustic,
)
from .oracle import (
    ChannelCache,
    OracleResult,
    grid_argmin_relay,
    numeric_energy,
    realistic_open_distance,
)
from .planner import (
    CaseLabel,
    DeploymentPlan,
    EnergyDelayReport,
    LinkSpec,
    classify_case,
    compare,
    direct_delay,
    direct_energy,
    open_distance,
    plan_link,
    relay_delay,
    relay_energy,
)

__version__ = "0.1.0"

__all__ = [
    "Environment",
    "absorption_db_per_km",
    "path_loss_db",
    "noise_components_db",
    "noise_psd_db",
    "attenuation_noise_product_db",
    "DEFAULT_WINDOW",
    "ACOUSTIC_TO_ELECTRIC",
    "FrequencyBand",
    "adaptive_simpson",
    "optimal_frequency",
    "effective_band",
    "band_integrals",
    "required_transmit_power_acoustic",
    "electrical_power",
    "FitModel",
    "PolySurface",
    "GoFReport",
    "default_fit_distances",
    "fit_bandwidth_model",
    "fit_power_model",
    "fit_channel_model",
    "fit_channel_models",
    "fit_psi_trend",
    "validate_ranges",
    "fit_open_distance_surface",
    "eval_surface",
    "load_reference_surface",
    "LinkSpec",
    "EnergyDelayReport",
    "DeploymentPlan",
    "CaseLabel",
    "direct_delay",
    "direct_energy",
    "relay_delay",
    "relay_energy",
    "open_distance",
    "classify_case",
    "plan_link",
    "compare",
    "ChannelCache",
    "OracleResult",
    "numeric_energy",
    "grid_argmin_relay",
    "realistic_open_distance",
    "UanRelayError",
    "ValidationError",
    "ModelMismatchError",
    "FitRankError",
    "BoundaryMinimumError",
    "BandTruncationError",
    "BracketError",
    "QuadratureError",
    "__version__",
]
