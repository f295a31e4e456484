"""Decentralized frequency/phase consensus (DFPC) with injected error sources.

Each iteration, every node's oscillator drifts, jitters, and is re-estimated;
the corrupted frequency and phase vectors are then averaged with the mixing
matrix.  The across-node dispersion of the total per-node phase
``2*pi*f_n*T + theta_n`` is the convergence metric: it is invariant to a
common shift of all frequencies or phases, which is exactly the freedom a
coherent array retains (consensus at *any* common value supports coherence).

Phases are deliberately left unwrapped during the iterations: averaging
wrapped phases across a branch cut is ill-defined, and constants cancel in
the dispersion metric anyway.  Wrapping only matters when evaluating coherent
gain, which works on complex phasors and is wrap-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oscillator import EstimationParams, ErrorStats, OscillatorParams, draw_errors, error_stats
from .topology import MixingMatrix, Topology, mixing_matrix

__all__ = ["ArrayState", "Trace", "init_state", "total_phase_std", "dfpc_step", "run_dfpc"]


@dataclass
class ArrayState:
    """True per-node frequencies (Hz) and phases (rad) at one iteration."""

    freqs: np.ndarray
    phases: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        if self.freqs.shape != self.phases.shape or self.freqs.ndim != 1:
            raise ValueError("freqs and phases must be 1-D vectors of equal length")
        if self.freqs.size < 2:
            raise ValueError("need at least 2 nodes")
        if not (np.all(np.isfinite(self.freqs)) and np.all(np.isfinite(self.phases))):
            raise ValueError("state contains non-finite entries")

    @property
    def n_nodes(self) -> int:
        return self.freqs.size


@dataclass
class Trace:
    """Per-iteration history of one synchronization run.

    ``converged_at`` is the first iteration whose post-mixing dispersion fell
    at or below the threshold; absent (None) when the run hit the iteration
    cap without converging.  Deviations are relative to the mean of the
    respective initial vectors, matching how node trajectories are plotted.
    """

    sigma_phi_history: np.ndarray  # (K,) rad
    freq_dev_history: np.ndarray   # (K, N) Hz
    phase_dev_history: np.ndarray  # (K, N) rad
    converged_at: int | None
    lambda2: float | None = None   # realized spectral gap of the trial's graph

    @property
    def iterations(self) -> int:
        return self.sigma_phi_history.size

    def stop_iteration(self) -> int:
        return self.converged_at if self.converged_at is not None else self.iterations

    def final_sigma_phi(self) -> float:
        return float(self.sigma_phi_history[-1])


def init_state(n: int, p: OscillatorParams, rng: np.random.Generator) -> ArrayState:
    """Initial oscillator states: 100 ppm-class frequency spread, uniform phases."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    freqs = p.f_c + rng.normal(0.0, p.init_ppm_sigma, n)
    phases = rng.uniform(0.0, 2.0 * math.pi, n)
    return ArrayState(freqs=freqs, phases=phases, iteration=0)


def total_phase_std(state: ArrayState, T: float) -> float:
    """Across-node sample standard deviation of the total phase, rad.

    The total per-node phase is ``2*pi*f_n*T + theta_n``; the 1/(N-1)
    normalization makes this the unbiased sample deviation.
    """
    # center each component at its own scale first: the dispersion is
    # shift-invariant, and carrier-scale magnitudes would otherwise swamp
    # sub-radian spreads
    f_dev = state.freqs - state.freqs.mean()
    th_dev = state.phases - state.phases.mean()
    phi = 2.0 * math.pi * f_dev * T + th_dev
    return float(np.std(phi, ddof=1))


def dfpc_step(
    state: ArrayState,
    w: MixingMatrix,
    stats: ErrorStats,
    T: float,
    rng: np.random.Generator,
) -> ArrayState:
    """One consensus iteration: inject errors, then average with the mixing matrix.

    Estimation errors corrupt the shared values themselves; the nodes average
    what they (imperfectly) measured.
    """
    if w.n_nodes != state.n_nodes:
        raise ValueError(f"mixing matrix is {w.n_nodes}x{w.n_nodes} but state has {state.n_nodes} nodes")
    draw = draw_errors(stats, T, state.n_nodes, rng)
    freqs = state.freqs + draw.delta_f
    phases = state.phases + draw.delta_theta_f + draw.delta_theta
    freqs = freqs + draw.eps_f
    phases = phases + draw.eps_theta
    freqs = _mix(w.w, freqs)
    phases = _mix(w.w, phases)
    return ArrayState(freqs=freqs, phases=phases, iteration=state.iteration + 1)


def _mix(w: np.ndarray, values: np.ndarray) -> np.ndarray:
    # mix deviations about the mean: identical to w @ values for a stochastic
    # matrix, but roundoff then scales with the spread, not the carrier
    mu = values.mean()
    return mu + w @ (values - mu)


def run_dfpc(
    topo: Topology,
    p: OscillatorParams,
    e: EstimationParams,
    eta: float,
    max_iters: int,
    rng: np.random.Generator,
) -> Trace:
    """Run the consensus algorithm until the dispersion threshold or the cap.

    Error statistics are computed once from the parameters and treated as
    time-invariant across the run.  Non-convergence is reported through the
    trace, not as an error.
    """
    if eta <= 0:
        raise ValueError(f"threshold must be positive, got {eta}")
    if max_iters < 1:
        raise ValueError(f"need at least one iteration, got {max_iters}")
    stats = error_stats(p, e)
    w = mixing_matrix(topo)
    state = init_state(topo.n_nodes, p, rng)
    # the whole update chain is shift-equivariant and the dispersion metric is
    # shift-invariant, so iterate on deviations about the initial means; this
    # keeps roundoff at the spread scale instead of the carrier scale
    state = ArrayState(
        freqs=state.freqs - state.freqs.mean(),
        phases=state.phases - state.phases.mean(),
    )

    sigma_hist = []
    freq_hist = []
    phase_hist = []
    converged_at = None
    for _ in range(max_iters):
        state = dfpc_step(state, w, stats, e.T, rng)
        sigma_phi = total_phase_std(state, e.T)
        sigma_hist.append(sigma_phi)
        freq_hist.append(state.freqs)
        phase_hist.append(state.phases)
        if sigma_phi <= eta:
            converged_at = state.iteration
            break
    return Trace(
        sigma_phi_history=np.array(sigma_hist),
        freq_dev_history=np.array(freq_hist),
        phase_dev_history=np.array(phase_hist),
        converged_at=converged_at,
        lambda2=w.lambda2,
    )
