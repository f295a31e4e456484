"""Oscillator and estimation error statistics, and per-iteration error draws.

Every error source in the synchronization loop is a zero-mean Gaussian whose
standard deviation is set by hardware or estimation physics:

* frequency drift over an update interval ``T``: Allan-deviation model
  ``sigma_f = f_c * sqrt(beta1/T + beta2*T)`` combining white frequency noise
  (``beta1`` term) and frequency random walk (``beta2`` term);
* the intra-interval phase adjustment induced by a linearly varying drift,
  which integrates in closed form to ``-pi*T*delta_f``;
* phase jitter ``sigma_theta = sqrt(2 * 10**(A/10))`` from the integrated
  phase-noise power ``A`` (dB);
* frequency/phase estimation errors at the Cramer-Rao bound for a single
  complex tone observed over ``L = T*f_s`` samples.

The dimensionless CRLB ``sqrt(6 / ((2*pi)^2 L^3 SNR))`` is per-sample
normalized; it is converted to Hz by multiplying by the sampling rate.  The
phase bound is used as printed, a standard deviation of ``2/(L*SNR)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OscillatorParams",
    "EstimationParams",
    "ErrorStats",
    "ErrorDraw",
    "adev_std",
    "adev_components",
    "jitter_std",
    "drift_phase_adjustment",
    "estimation_stds",
    "error_stats",
    "draw_errors",
]

ACCESS_MODES = ("single", "broadcast", "tdma")


@dataclass(frozen=True)
class OscillatorParams:
    """Hardware parameters of the per-node local oscillators."""

    f_c: float = 1e9
    beta1: float = 5e-19
    beta2: float = 5e-19
    phase_noise_A_db: float = -53.46
    init_ppm_sigma: float | None = None  # defaults to 1e-4 * f_c (100 ppm clock)

    def __post_init__(self):
        if self.f_c <= 0:
            raise ValueError(f"carrier frequency must be positive, got {self.f_c}")
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError("Allan deviation coefficients must be nonnegative")
        if self.init_ppm_sigma is None:
            object.__setattr__(self, "init_ppm_sigma", 1e-4 * self.f_c)


@dataclass(frozen=True)
class EstimationParams:
    """Observation-window parameters for frequency/phase estimation.

    ``avg_connections`` is the average node degree D; it matters only for the
    broadcast (SNR gain) and tdma (window splitting) access modes.
    """

    f_s: float = 1e7
    T: float = 1e-4
    snr: float = 1.0
    access_mode: str = "single"
    avg_connections: float = 1.0

    def __post_init__(self):
        if self.f_s <= 0 or self.T <= 0:
            raise ValueError("sampling frequency and update interval must be positive")
        if self.snr <= 0:
            raise ValueError(f"linear SNR must be positive, got {self.snr}")
        if self.access_mode not in ACCESS_MODES:
            raise ValueError(f"access_mode must be one of {ACCESS_MODES}, got {self.access_mode!r}")
        if self.samples < 1:
            raise ValueError(f"observation window holds {self.samples} samples; need at least 1")
        if self.access_mode == "tdma" and self.samples / self.avg_connections < 1:
            raise ValueError("tdma window split leaves fewer than one sample per node")

    @property
    def samples(self) -> float:
        return self.T * self.f_s


@dataclass(frozen=True)
class ErrorStats:
    """Standard deviations of the four independent error sources."""

    sigma_f: float        # frequency drift, Hz
    sigma_theta: float    # phase jitter, rad
    sigma_m_f: float      # frequency estimation, Hz
    sigma_m_theta: float  # phase estimation, rad

    def __post_init__(self):
        for name in ("sigma_f", "sigma_theta", "sigma_m_f", "sigma_m_theta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")

    @classmethod
    def zero(cls) -> "ErrorStats":
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ErrorDraw:
    """One iteration worth of error realizations for every node."""

    delta_f: np.ndarray        # oscillator drift, Hz
    delta_theta_f: np.ndarray  # drift-induced phase adjustment, rad
    delta_theta: np.ndarray    # phase jitter, rad
    eps_f: np.ndarray          # frequency estimation error, Hz
    eps_theta: np.ndarray      # phase estimation error, rad


def adev_std(p: OscillatorParams, T: float) -> float:
    """Frequency drift standard deviation over an update interval, in Hz."""
    if T <= 0:
        raise ValueError(f"update interval must be positive, got {T}")
    return p.f_c * math.sqrt(p.beta1 / T + p.beta2 * T)


def adev_components(p: OscillatorParams, T: float) -> tuple[float, float]:
    """White-frequency-noise and frequency-random-walk parts of the drift std.

    Squares sum to ``adev_std(p, T)**2`` exactly.
    """
    if T <= 0:
        raise ValueError(f"update interval must be positive, got {T}")
    sigma_wf = p.f_c * math.sqrt(p.beta1 / T)
    sigma_rw = p.f_c * math.sqrt(p.beta2 * T)
    return sigma_wf, sigma_rw


def jitter_std(p: OscillatorParams) -> float:
    """Phase jitter standard deviation from integrated phase-noise power, rad."""
    return math.sqrt(2.0 * 10.0 ** (p.phase_noise_A_db / 10.0))


def drift_phase_adjustment(delta_f, T: float) -> np.ndarray:
    """Phase adjustment from a drift ramping linearly over the interval.

    The ramp ``delta_f * t/T`` accrues half the phase of a constant offset,
    so the adjustment relative to the constant-offset reference is exactly
    ``-pi * T * delta_f`` per node.
    """
    if T <= 0:
        raise ValueError(f"update interval must be positive, got {T}")
    return -math.pi * T * np.asarray(delta_f, dtype=float)


def estimation_stds(e: EstimationParams) -> tuple[float, float]:
    """CRLB standard deviations (frequency Hz, phase rad) for one estimate.

    broadcast mode pools D neighbor signals (SNR gain); tdma splits the
    observation window D ways, shrinking the usable sample count to L/D.
    """
    L = e.samples
    base = math.sqrt(6.0 / ((2.0 * math.pi) ** 2 * L**3 * e.snr))  # normalized units
    d = e.avg_connections
    if e.access_mode == "single":
        return e.f_s * base, 2.0 / (L * e.snr)
    if e.access_mode == "broadcast":
        return e.f_s * base / math.sqrt(d), 2.0 / (math.sqrt(d) * L * e.snr)
    # tdma: L -> L/D inside the bound
    return e.f_s * base * d, math.sqrt(4.0 * d) / (L * e.snr)


def error_stats(p: OscillatorParams, e: EstimationParams) -> ErrorStats:
    """Assemble all four error standard deviations for an update interval."""
    sigma_m_f, sigma_m_theta = estimation_stds(e)
    return ErrorStats(
        sigma_f=adev_std(p, e.T),
        sigma_theta=jitter_std(p),
        sigma_m_f=sigma_m_f,
        sigma_m_theta=sigma_m_theta,
    )


def draw_errors(stats: ErrorStats, T: float, n: int, rng: np.random.Generator) -> ErrorDraw:
    """Draw one iteration of independent Gaussian errors for ``n`` nodes."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    delta_f = rng.normal(0.0, stats.sigma_f, n)
    delta_theta = rng.normal(0.0, stats.sigma_theta, n)
    eps_f = rng.normal(0.0, stats.sigma_m_f, n)
    eps_theta = rng.normal(0.0, stats.sigma_m_theta, n)
    return ErrorDraw(
        delta_f=delta_f,
        delta_theta_f=drift_phase_adjustment(delta_f, T),
        delta_theta=delta_theta,
        eps_f=eps_f,
        eps_theta=eps_theta,
    )
