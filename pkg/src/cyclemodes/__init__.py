"""Spectral and eigenmode factor analysis of monthly business-cycle panels.

The pipeline: level panels -> normalized log growth -> averaged power spectra
(discrete, chopped, continuous) -> correlation-matrix eigendecomposition with
Marchenko-Pastur significance -> eigenmode decomposition and band-limited
cycle reconstruction -> lead-lag phase delays with reshuffle significance ->
cross-spectrum coherency/phase verification -> out-of-sample volatility
decomposition.  A batch CLI (``cyclemodes``) orchestrates all stages.
"""

from .errors import (
    CycleModesError,
    DegenerateSeriesError,
    NumericalError,
    PanelFormatError,
    PhaseUndefinedError,
    SimulationDegenerateError,
)
from .estimators import CorrelationEigenmodes, GrowthNormalizer
from .growth import AutocorrProfile, GrowthPanel, autocorrelation, moving_average, to_growth
from .leadlag import (
    LagEstimate,
    MonteCarloLagSummary,
    phase_delay,
    reshuffle_significance,
    residual_rates,
)
from .modes import (
    BinnedContribution,
    CycleReconstruction,
    ModeDecomposition,
    binned_relative_contribution,
    mode_power_spectrum,
    project_modes,
    reconstruct_cycles,
)
from .numerics import (
    RngStream,
    SummaryStats,
    SymmetricEigenResult,
    dft_at_frequency,
    dft_forward,
    dft_inverse,
    eig_symmetric,
    summary_stats,
)
from .oos import VolatilityReport, auxiliary_overlay, project_out_of_sample
from .panel import (
    AuxSeries,
    GoodDescriptor,
    Panel,
    chop,
    load_aux_series,
    load_goods_table,
    load_panel,
    save_panel,
    split_in_sample,
)
from .rmt import (
    CorrelationModel,
    RmtParams,
    SignificanceReport,
    classify_significance,
    correlation_matrix,
    mp_density,
    rotation_null,
    semicircle_density,
)
from .spectrum import (
    ContinuousSpectrum,
    SpectrumSet,
    averaged_power_spectrum,
    chopped_spectra,
    continuous_spectrum,
)
from .xspectrum import (
    CrossSpectrumEstimate,
    DelayEstimate,
    coherency_phase,
    daniell_weights,
    delay_in_months,
    periodograms,
    smooth_daniell,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CycleModesError", "PanelFormatError", "DegenerateSeriesError",
    "NumericalError", "PhaseUndefinedError", "SimulationDegenerateError",
    "RngStream", "SummaryStats", "SymmetricEigenResult",
    "dft_forward", "dft_inverse", "dft_at_frequency", "eig_symmetric",
    "summary_stats",
    "Panel", "GoodDescriptor", "AuxSeries", "load_panel", "save_panel",
    "load_goods_table", "load_aux_series", "chop", "split_in_sample",
    "GrowthPanel", "AutocorrProfile", "to_growth", "autocorrelation",
    "moving_average",
    "SpectrumSet", "ContinuousSpectrum", "averaged_power_spectrum",
    "chopped_spectra", "continuous_spectrum",
    "RmtParams", "CorrelationModel", "SignificanceReport", "mp_density",
    "semicircle_density", "correlation_matrix", "classify_significance",
    "rotation_null",
    "ModeDecomposition", "CycleReconstruction", "BinnedContribution",
    "project_modes", "mode_power_spectrum", "binned_relative_contribution",
    "reconstruct_cycles",
    "LagEstimate", "MonteCarloLagSummary", "phase_delay", "residual_rates",
    "reshuffle_significance",
    "CrossSpectrumEstimate", "DelayEstimate", "periodograms",
    "daniell_weights", "smooth_daniell", "coherency_phase", "delay_in_months",
    "VolatilityReport", "project_out_of_sample", "auxiliary_overlay",
    "GrowthNormalizer", "CorrelationEigenmodes",
]
