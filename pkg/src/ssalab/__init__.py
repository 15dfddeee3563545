"""Singular spectrum analysis, subspace estimation, and a Monte-Carlo error lab."""

from .core import (
    EigentripleSet,
    Eigentriple,
    LeadingTriples,
    as_series,
    center,
    decompose,
    decompose_toeplitz,
    diagonal_counts,
    embed,
    group_matrix,
    hankelize,
    lag_covariance_matrix,
    leading_triples,
    rank_reconstruction,
    reconstruct,
    snr,
)
from .errors import SsaError
from .estimate import (
    ParamEstimates,
    Pseudospectrum,
    ShiftMatrixEstimate,
    esprit_ls,
    esprit_tls,
    find_peaks,
    minnorm_alignment,
    music_alignment,
    pair_frequencies,
    poles_to_params,
    pooled_roots,
    pseudospectrum_minnorm,
    pseudospectrum_music,
    root_min_norm,
    root_music,
)
from .forecast import (
    LinearRecurrence,
    PoleSet,
    SignalModel,
    characteristic_roots,
    companion_matrix,
    fit_signal_model,
    forward_backward_root_pair,
    min_norm_lrf,
    recurrent_forecast,
)
from .signals import (
    NoiseSpec,
    SignalSpec,
    exact_basis,
    exact_rank,
    gen_series,
    red_noise,
    signal_values,
    true_frequencies,
    true_poles,
    white_noise,
)
from .simlab import (
    ConvergenceReport,
    ErrorSurface,
    ExperimentConfig,
    ForecastErrorSplit,
    asymptotic_variance,
    convergence_ratio,
    derive_seed,
    forecast_error_split,
    hash64,
    mc_error_surface,
    mc_point_errors,
    red_noise_projector_bound,
    run_experiment,
    window_for_policy,
)
from .subspace import (
    SubspaceBasis,
    noise_complement,
    projector,
    projector_distance,
    signal_basis,
    subspace_distance,
)

__version__ = "0.1.0"
