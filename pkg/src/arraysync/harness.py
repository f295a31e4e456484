"""Scenario configuration, seeded Monte Carlo sweeps, and CSV emission.

A Scenario bundles every knob of one experiment.  Each trial derives its own
random stream from ``(master_seed, trial_index)`` so results are bitwise
reproducible and independent of how many trials run or in what order; a fresh
random graph is drawn per trial.  Sweeps vary one scenario field over a list
of values and aggregate the per-trial final dispersion and stopping
iteration into one record per value.

CSV conventions: angles in degrees, floats at 6 significant digits, stable
column order (golden-tested).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .consensus import Trace, run_dfpc
from .kalman import run_kf_dfpc
from .oscillator import EstimationParams, OscillatorParams
from .topology import build_random_graph

__all__ = [
    "Scenario",
    "SweepRecord",
    "TrialResult",
    "load_config",
    "run_scenario",
    "sweep",
    "sweep_csv_text",
    "trace_csv_text",
    "trajectory_csv_text",
    "SWEEPABLE_PARAMS",
    "SWEEP_PRESETS",
    "TRAJECTORY_PRESETS",
]

ALGORITHMS = ("dfpc", "kf-dfpc")
SWEEPABLE_PARAMS = ("n_nodes", "connectivity", "T", "snr_db")

SWEEP_CSV_COLUMNS = (
    "param_name",
    "param_value",
    "mean_sigma_phi_deg",
    "std_sigma_phi_deg",
    "mean_iters",
    "std_iters",
    "mean_lambda2",
    "trials",
    "trials_converged",
)


@dataclass(frozen=True)
class Scenario:
    """Full description of one Monte Carlo experiment."""

    algorithm: str = "dfpc"
    n_nodes: int = 100
    connectivity: float = 0.2
    f_c: float = 1e9
    f_s: float = 1e7
    T: float = 1e-4
    snr_db: float = 0.0
    beta1: float = 5e-19
    beta2: float = 5e-19
    phase_noise_A_db: float = -53.46
    init_ppm: float = 1e-4
    access_mode: str = "single"
    eta_deg: float = 1.0
    max_iters: int = 500
    trials: int = 200
    master_seed: int = 20220

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        # fail fast on parameter combinations the modules would reject later
        self.oscillator_params()
        self.estimation_params(avg_connections=max(1.0, self.connectivity * (self.n_nodes - 1)))

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def eta_rad(self) -> float:
        return math.radians(self.eta_deg)

    def oscillator_params(self) -> OscillatorParams:
        return OscillatorParams(
            f_c=self.f_c,
            beta1=self.beta1,
            beta2=self.beta2,
            phase_noise_A_db=self.phase_noise_A_db,
            init_ppm_sigma=self.init_ppm * self.f_c,
        )

    def estimation_params(self, avg_connections: float) -> EstimationParams:
        return EstimationParams(
            f_s=self.f_s,
            T=self.T,
            snr=self.snr_linear,
            access_mode=self.access_mode,
            avg_connections=avg_connections,
        )


@dataclass(frozen=True)
class TrialResult:
    trial: int
    sigma_phi_final: float  # rad
    stop_iteration: int
    converged: bool
    lambda2: float


@dataclass(frozen=True)
class SweepRecord:
    """Aggregate of one sweep point (angles already in degrees)."""

    param_name: str
    param_value: float
    mean_sigma_phi_deg: float
    std_sigma_phi_deg: float
    mean_iters: float
    std_iters: float
    mean_lambda2: float
    trials: int
    trials_converged: int

    def __post_init__(self):
        if self.std_sigma_phi_deg < 0 or self.std_iters < 0:
            raise ValueError("std fields must be nonnegative")
        if self.trials_converged > self.trials:
            raise ValueError("trials_converged cannot exceed trials")


_FIELD_TYPES = {f.name: f.type for f in fields(Scenario)}


def _coerce(name: str, raw: str):
    if name not in _FIELD_TYPES:
        raise ValueError(f"unknown scenario field {name!r}")
    kind = _FIELD_TYPES[name]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def load_config(path: str, overrides: dict | None = None) -> Scenario:
    """Parse a flat ``key = value`` config file into a Scenario.

    Blank lines and ``#`` comments are ignored.  ``overrides`` (already-typed
    values, e.g. from CLI flags) win over file entries.
    """
    values: dict = {}
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = (part.strip() for part in line.split("=", 1))
            values[key] = _coerce(key, raw)
    if overrides:
        for key in overrides:
            if key not in _FIELD_TYPES:
                raise ValueError(f"unknown scenario field {key!r}")
        values.update(overrides)
    return Scenario(**values)


def run_trial(scenario: Scenario, trial: int) -> tuple[TrialResult, Trace]:
    """Execute one independent trial with its own derived random stream."""
    rng = np.random.default_rng([scenario.master_seed, trial])
    try:
        topo = build_random_graph(scenario.n_nodes, scenario.connectivity, rng)
        p = scenario.oscillator_params()
        e = scenario.estimation_params(avg_connections=topo.avg_degree)
        runner = run_dfpc if scenario.algorithm == "dfpc" else run_kf_dfpc
        trace = runner(topo, p, e, scenario.eta_rad, scenario.max_iters, rng)
    except ValueError as err:
        raise ValueError(f"trial {trial}: {err}") from err
    result = TrialResult(
        trial=trial,
        sigma_phi_final=trace.final_sigma_phi(),
        stop_iteration=trace.stop_iteration(),
        converged=trace.converged_at is not None,
        lambda2=trace.lambda2,
    )
    return result, trace


def _aggregate(scenario: Scenario, results: list, param_name: str, param_value: float) -> SweepRecord:
    sig_deg = np.degrees([r.sigma_phi_final for r in results])
    iters = np.array([r.stop_iteration for r in results], dtype=float)
    return SweepRecord(
        param_name=param_name,
        param_value=param_value,
        mean_sigma_phi_deg=float(sig_deg.mean()),
        std_sigma_phi_deg=float(sig_deg.std()),
        mean_iters=float(iters.mean()),
        std_iters=float(iters.std()),
        mean_lambda2=float(np.mean([r.lambda2 for r in results])),
        trials=len(results),
        trials_converged=sum(r.converged for r in results),
    )


def run_scenario(
    scenario: Scenario,
    jobs: int = 1,
    keep_traces: bool = True,
    param_name: str = "scenario",
    param_value: float = 0.0,
) -> tuple[list, SweepRecord]:
    """Run all trials of a scenario and aggregate them.

    Returns ``(traces, record)``; ``traces`` is empty when ``keep_traces`` is
    off (sweeps drop them to bound memory).  Results are keyed by trial index,
    so the aggregate is identical for any ``jobs`` level.
    """
    indices = range(scenario.trials)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(run_trial, [scenario] * scenario.trials, indices))
    else:
        pairs = [run_trial(scenario, t) for t in indices]
    results = [pair[0] for pair in pairs]
    traces = [pair[1] for pair in pairs] if keep_traces else []
    return traces, _aggregate(scenario, results, param_name, param_value)


def sweep(scenario: Scenario, param: str, values, jobs: int = 1) -> list:
    """Vary one scenario field over ``values``; one SweepRecord per value."""
    if param not in SWEEPABLE_PARAMS:
        raise ValueError(f"cannot sweep {param!r}; choose from {SWEEPABLE_PARAMS}")
    records = []
    for value in values:
        point = replace(scenario, **{param: int(value) if param == "n_nodes" else float(value)})
        _, record = run_scenario(
            point, jobs=jobs, keep_traces=False, param_name=param, param_value=float(value)
        )
        records.append(record)
    return records


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6g}"


def sweep_csv_text(records) -> str:
    lines = [",".join(SWEEP_CSV_COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                [
                    r.param_name,
                    _fmt(r.param_value),
                    _fmt(r.mean_sigma_phi_deg),
                    _fmt(r.std_sigma_phi_deg),
                    _fmt(r.mean_iters),
                    _fmt(r.std_iters),
                    _fmt(r.mean_lambda2),
                    _fmt(r.trials),
                    _fmt(r.trials_converged),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def trace_csv_text(traces) -> str:
    """Per-iteration dispersion of every trial: trial, iter, sigma_phi_deg."""
    lines = ["trial,iter,sigma_phi_deg"]
    for trial, trace in enumerate(traces):
        for k, sigma in enumerate(trace.sigma_phi_history, start=1):
            lines.append(f"{trial},{k},{_fmt(math.degrees(sigma))}")
    return "\n".join(lines) + "\n"


def trajectory_csv_text(trace: Trace) -> str:
    """Per-node deviation trajectories of a single run (long format)."""
    lines = ["iter,node,freq_dev_hz,phase_dev_rad"]
    for k in range(trace.iterations):
        for node in range(trace.freq_dev_history.shape[1]):
            lines.append(
                f"{k + 1},{node},{_fmt(trace.freq_dev_history[k, node])},"
                f"{_fmt(trace.phase_dev_history[k, node])}"
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# presets reproducing the reference experiments (reduced trial counts)
# ---------------------------------------------------------------------------

_BASE = Scenario()

# sweep presets: (scenario, param, values); steady-state presets disable the
# convergence threshold so every run samples the error floor at max_iters.
SWEEP_PRESETS = {
    "fig3": (
        replace(_BASE, algorithm="dfpc", connectivity=0.2, eta_deg=1e-9, max_iters=300, trials=100),
        "n_nodes",
        (20, 35, 50, 65, 80, 100, 150, 200),
    ),
    "fig4": (
        replace(_BASE, algorithm="dfpc", n_nodes=100, eta_deg=1.0, max_iters=2000, trials=100),
        "connectivity",
        (0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0),
    ),
    "fig5": (
        replace(_BASE, algorithm="kf-dfpc", connectivity=0.2, eta_deg=1e-9, max_iters=300, trials=100),
        "n_nodes",
        (20, 35, 50, 65, 80, 100, 150, 200),
    ),
    "fig6": (
        replace(_BASE, algorithm="kf-dfpc", n_nodes=100, eta_deg=1.0, max_iters=2000, trials=100),
        "connectivity",
        (0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0),
    ),
    "fig7": (
        replace(_BASE, algorithm="dfpc", connectivity=0.5, eta_deg=1e-9, max_iters=300, trials=50),
        "T",
        (1e-4, 1e-3, 2e-2, 2e-1, 1.0),
    ),
    "fig8": (
        replace(
            _BASE,
            algorithm="kf-dfpc",
            connectivity=0.5,
            access_mode="tdma",
            eta_deg=1e-9,
            max_iters=300,
            trials=50,
        ),
        "snr_db",
        (-5.0, 0.0, 5.0, 10.0, 15.0),
    ),
}

# single fixed-seed runs for the node-trajectory figures
TRAJECTORY_PRESETS = {
    "fig1": tuple(
        replace(_BASE, algorithm="dfpc", n_nodes=n, eta_deg=1e-9, max_iters=60, trials=1)
        for n in (20, 65, 100)
    ),
}
TRAJECTORY_PRESETS["fig2"] = TRAJECTORY_PRESETS["fig1"]  # same runs, phase column plotted
