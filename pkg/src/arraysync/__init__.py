"""Decentralized frequency/phase synchronization simulator for distributed arrays."""

from .analysis import PhaseErrorBudget, coherent_gain, phase_error_budget, residual_error_std
from .consensus import ArrayState, Trace, dfpc_step, init_state, run_dfpc, total_phase_std
from .harness import Scenario, SweepRecord, load_config, run_scenario, sweep
from .kalman import (
    MeasurementNoise,
    NodeFilter,
    Observation,
    ProcessNoise,
    initial_prior,
    kf_correct,
    kf_predict,
    measurement_noise,
    mix_covariances,
    process_noise,
    run_kf_dfpc,
)
from .oscillator import (
    ErrorDraw,
    ErrorStats,
    EstimationParams,
    OscillatorParams,
    adev_components,
    adev_std,
    draw_errors,
    drift_phase_adjustment,
    error_stats,
    estimation_stds,
    jitter_std,
)
from .topology import (
    MixingMatrix,
    Topology,
    build_random_graph,
    edge_list_text,
    mixing_matrix,
    parse_edge_list,
    spectral_gap,
)

__version__ = "0.1.0"
