"""Kalman-filtered decentralized frequency/phase consensus (KF-DFPC).

Each node carries a 2-state filter on ``x = [frequency, phase]`` with an
identity transition corrupted by the drift/jitter process noise

    Q = [[s_f^2,            -pi*T*s_f^2          ],
         [-pi*T*s_f^2,  pi^2*T^2*s_f^2 + s_th^2 ]]

(the off-diagonal term is the exact drift/phase-adjustment coupling), and a
direct observation of both components with diagonal noise
``Sigma = diag(s_mf^2, s_mth^2)``.  Unlike plain consensus, estimation noise
enters only the observations; each iteration the nodes correct their MMSE
estimates with the new observation and then retune their oscillators to the
mixed estimates ``W @ m``.

Mixing the estimates requires re-initializing every filter: the mean is the
node's post-consensus value, and the covariance follows the linear
transformation through the matrix row, built from neighbors' per-node
covariance entries only (each entry mixes as ``sum_j w_nj^2 * v_j``).
Cross-node correlations created by mixing are dropped by construction; that
is the decentralization constraint, since a node cannot know the full joint
covariance of the array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .consensus import ArrayState, Trace, _mix, init_state, total_phase_std
from .oscillator import EstimationParams, OscillatorParams, draw_errors, error_stats
from .topology import Topology, mixing_matrix

__all__ = [
    "ProcessNoise",
    "MeasurementNoise",
    "NodeFilter",
    "Observation",
    "process_noise",
    "measurement_noise",
    "kf_predict",
    "kf_correct",
    "initial_prior",
    "mix_covariances",
    "run_kf_dfpc",
]

_DET_GUARD = 1e-300  # 2x2 inversions below this determinant are degenerate


@dataclass(frozen=True)
class ProcessNoise:
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class MeasurementNoise:
    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)


@dataclass
class NodeFilter:
    """Gaussian belief ``N(mean, cov)`` over one node's [freq, phase] state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(2)
        self.cov = np.asarray(self.cov, dtype=float).reshape(2, 2)


@dataclass(frozen=True)
class Observation:
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(2)
        if not np.all(np.isfinite(y)):
            raise ValueError("observation contains non-finite entries")
        object.__setattr__(self, "y", y)


def process_noise(sigma_f: float, sigma_theta: float, T: float) -> ProcessNoise:
    """Drift/jitter covariance of the per-iteration state disturbance.

    PSD by construction: it is E[u u^T] for ``u = [df, -pi*T*df + dth]``.
    """
    if sigma_f < 0 or sigma_theta < 0 or T < 0:
        raise ValueError("noise parameters must be nonnegative")
    vf = sigma_f**2
    c = -math.pi * T * vf
    return ProcessNoise(q=np.array([[vf, c], [c, math.pi**2 * T**2 * vf + sigma_theta**2]]))


def measurement_noise(sigma_m_f: float, sigma_m_theta: float) -> MeasurementNoise:
    """Diagonal covariance of the frequency/phase estimation errors."""
    if sigma_m_f < 0 or sigma_m_theta < 0:
        raise ValueError("noise parameters must be nonnegative")
    return MeasurementNoise(r=np.diag([sigma_m_f**2, sigma_m_theta**2]))


def kf_predict(f: NodeFilter, q: ProcessNoise) -> NodeFilter:
    """Prediction through the identity transition: mean kept, covariance grows by Q."""
    return NodeFilter(mean=f.mean.copy(), cov=f.cov + q.q)


def _inv2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < _DET_GUARD:
        raise ZeroDivisionError(
            "degenerate filter: prior covariance plus measurement noise is singular"
        )
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def kf_correct(f: NodeFilter, y: Observation, r: MeasurementNoise) -> NodeFilter:
    """Fold one observation into the belief.

    Gain ``K = V (V + Sigma)^-1``; the posterior covariance ``V - K V`` is
    re-symmetrized to keep long runs from accumulating asymmetry.
    """
    gain = f.cov @ _inv2(f.cov + r.r)
    mean = f.mean + gain @ (y.y - f.mean)
    cov = f.cov - gain @ f.cov
    cov = 0.5 * (cov + cov.T)
    return NodeFilter(mean=mean, cov=cov)


def initial_prior(p: OscillatorParams) -> NodeFilter:
    """Shared first-iteration prior: carrier-centered, phase uniform over a turn.

    The phase variance ``(2*pi)^2 / 12`` is exactly the variance of the
    uniform initial phase distribution.
    """
    return NodeFilter(
        mean=np.array([p.f_c, math.pi]),
        cov=np.diag([p.init_ppm_sigma**2, 4.0 * math.pi**2 / 12.0]),
    )


def mix_covariances(w_row: np.ndarray, per_node_covs) -> np.ndarray:
    """Covariance of one node's state after averaging with a mixing-matrix row.

    Each of the three distinct entries transforms independently through the
    diagonal construction, i.e. elementwise ``sum_j w_j^2 * V_j``.
    """
    w_row = np.asarray(w_row, dtype=float)
    covs = np.asarray(per_node_covs, dtype=float)
    return np.einsum("j,jab->ab", w_row**2, covs)


# ---------------------------------------------------------------------------
# batch helpers: the run loop applies the per-node operations to all N nodes
# at once; tests pin these to the scalar operations above.
# ---------------------------------------------------------------------------


def _batch_correct(means: np.ndarray, covs: np.ndarray, ys: np.ndarray, r: np.ndarray):
    s = covs + r  # (N, 2, 2)
    det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    # a singular row means prior and observation are both exact (noiseless
    # limit); keeping the prior (zero gain) is the correct posterior there
    safe = np.where(np.abs(det) < _DET_GUARD, 1.0, det)
    s_inv = np.empty_like(s)
    s_inv[:, 0, 0] = s[:, 1, 1]
    s_inv[:, 1, 1] = s[:, 0, 0]
    s_inv[:, 0, 1] = -s[:, 0, 1]
    s_inv[:, 1, 0] = -s[:, 1, 0]
    s_inv /= safe[:, None, None]
    s_inv[np.abs(det) < _DET_GUARD] = 0.0
    gain = np.einsum("nij,njk->nik", covs, s_inv)
    means_post = means + np.einsum("nij,nj->ni", gain, ys - means)
    covs_post = covs - np.einsum("nij,njk->nik", gain, covs)
    covs_post = 0.5 * (covs_post + np.transpose(covs_post, (0, 2, 1)))
    return means_post, covs_post


def _batch_mix_covariances(w: np.ndarray, covs: np.ndarray) -> np.ndarray:
    return np.einsum("nj,jab->nab", w**2, covs)


def run_kf_dfpc(
    topo: Topology,
    p: OscillatorParams,
    e: EstimationParams,
    eta: float,
    max_iters: int,
    rng: np.random.Generator,
) -> Trace:
    """Run the Kalman-filtered consensus loop until the threshold or the cap.

    Per iteration: the true state drifts, every node observes its own noisy
    frequency/phase estimate, filters it against the (re-initialized) prior,
    and the array retunes to the mixed MMSE estimates.
    """
    if eta <= 0:
        raise ValueError(f"threshold must be positive, got {eta}")
    if max_iters < 1:
        raise ValueError(f"need at least one iteration, got {max_iters}")
    n = topo.n_nodes
    stats = error_stats(p, e)
    mm = mixing_matrix(topo)
    w = mm.w
    q = process_noise(stats.sigma_f, stats.sigma_theta, e.T).q
    r = measurement_noise(stats.sigma_m_f, stats.sigma_m_theta).r
    prior0 = initial_prior(p)

    state = init_state(n, p, rng)
    # rebase to deviations about the initial means (shift-equivariant chain,
    # shift-invariant metric); the shared prior mean is rebased to match
    base_f = state.freqs.mean()
    base_th = state.phases.mean()
    freqs = state.freqs - base_f
    phases = state.phases - base_th
    prior_mean = prior0.mean - np.array([base_f, base_th])

    covs_post = None  # per-node posterior covariances from the previous iteration
    sigma_hist = []
    freq_hist = []
    phase_hist = []
    converged_at = None

    for k in range(1, max_iters + 1):
        prev_f, prev_th = freqs, phases
        draw = draw_errors(stats, e.T, n, rng)
        freqs = freqs + draw.delta_f
        phases = phases + draw.delta_theta_f + draw.delta_theta
        ys = np.stack([freqs + draw.eps_f, phases + draw.eps_theta], axis=1)

        if k == 1:
            means_prior = np.tile(prior_mean, (n, 1))
            covs_prior = np.tile(prior0.cov, (n, 1, 1)) + q
        else:
            means_prior = np.stack([prev_f, prev_th], axis=1)
            covs_prior = _batch_mix_covariances(w, covs_post) + q

        means_post, covs_post = _batch_correct(means_prior, covs_prior, ys, r)

        freqs = _mix(w, means_post[:, 0])
        phases = _mix(w, means_post[:, 1])

        sigma_phi = total_phase_std(ArrayState(freqs, phases, k), e.T)
        sigma_hist.append(sigma_phi)
        freq_hist.append(freqs)
        phase_hist.append(phases)
        if sigma_phi <= eta:
            converged_at = k
            break

    return Trace(
        sigma_phi_history=np.array(sigma_hist),
        freq_dev_history=np.array(freq_hist),
        phase_dev_history=np.array(phase_hist),
        converged_at=converged_at,
        lambda2=mm.lambda2,
    )
