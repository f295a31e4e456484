import math

import numpy as np
import pytest

from arraysync.oscillator import (
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


def params(**kw):
    return OscillatorParams(**kw)


class TestAdev:
    def test_one_second_interval(self):
        # sqrt(1e-18) * 1e9, consistent with 1e-9-class fractional stability
        assert adev_std(params(), 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_noiseless_oscillator(self):
        assert adev_std(params(beta1=0.0, beta2=0.0), 0.37) == 0.0

    def test_short_interval(self):
        assert adev_std(params(), 1e-4) == pytest.approx(70.71067847220813, rel=1e-12)

    def test_rejects_nonpositive_interval(self):
        with pytest.raises(ValueError):
            adev_std(params(), 0.0)
        with pytest.raises(ValueError):
            adev_std(params(), -1.0)

    @pytest.mark.parametrize("T", [1e-4, 1e-2, 1.0, 3.0])
    def test_component_decomposition_exact(self, T):
        p = params()
        wf, rw = adev_components(p, T)
        assert wf**2 + rw**2 == pytest.approx(adev_std(p, T) ** 2, rel=1e-14)


class TestJitter:
    def test_high_phase_noise_oscillator(self):
        assert jitter_std(params(phase_noise_A_db=-53.46)) == pytest.approx(3.0027211143942756e-3, rel=1e-12)

    def test_low_phase_noise_oscillator(self):
        assert jitter_std(params(phase_noise_A_db=-103.05)) == pytest.approx(9.954397930611278e-6, rel=1e-12)

    def test_no_phase_noise_limit(self):
        assert jitter_std(params(phase_noise_A_db=-math.inf)) == 0.0


class TestDriftPhaseAdjustment:
    def test_zero_drift(self):
        np.testing.assert_array_equal(drift_phase_adjustment(np.zeros(4), 1.0), np.zeros(4))

    def test_unit_drift_one_second(self):
        assert drift_phase_adjustment(1.0, 1.0) == pytest.approx(-math.pi, rel=1e-15)

    def test_typical_interval(self):
        assert drift_phase_adjustment(100.0, 1e-4) == pytest.approx(-0.031415926535897934, rel=1e-12)

    def test_quadrature_oracle(self):
        # numerically integrate the ramped offset minus the constant offset
        delta_f, T = 37.5, 2e-3
        t = np.linspace(0.0, T, 200_001)
        actual = 2 * math.pi * np.trapezoid(delta_f * t / T, t)
        reference = 2 * math.pi * delta_f * T
        assert drift_phase_adjustment(delta_f, T) == pytest.approx(actual - reference, rel=1e-9)

    def test_rejects_nonpositive_interval(self):
        with pytest.raises(ValueError):
            drift_phase_adjustment(1.0, 0.0)


class TestEstimationStds:
    def test_single_mode_values(self):
        e = EstimationParams(f_s=1e7, T=1e-4, snr=1.0, access_mode="single")
        smf, smt = estimation_stds(e)
        assert smf == pytest.approx(123.28088881229996, rel=1e-12)
        assert smt == pytest.approx(2.0e-3, rel=1e-12)

    def test_tdma_mode_values(self):
        e = EstimationParams(f_s=1e7, T=1e-4, snr=1.0, access_mode="tdma", avg_connections=10.0)
        smf, smt = estimation_stds(e)
        assert smf == pytest.approx(1232.8088881229996, rel=1e-12)
        assert smt == pytest.approx(6.324555320336759e-3, rel=1e-12)

    def test_infinite_snr_noiseless(self):
        e = EstimationParams(f_s=1e7, T=1e-4, snr=math.inf, access_mode="single")
        assert estimation_stds(e) == (0.0, 0.0)

    @pytest.mark.parametrize("mode", ["broadcast", "tdma"])
    def test_d_equals_one_matches_single(self, mode):
        base = EstimationParams(access_mode="single")
        variant = EstimationParams(access_mode=mode, avg_connections=1.0)
        assert estimation_stds(variant) == estimation_stds(base)

    def test_broadcast_gain(self):
        single = estimation_stds(EstimationParams(access_mode="single"))
        bcast = estimation_stds(EstimationParams(access_mode="broadcast", avg_connections=4.0))
        assert bcast[0] == pytest.approx(single[0] / 2.0, rel=1e-12)
        assert bcast[1] == pytest.approx(single[1] / 2.0, rel=1e-12)

    def test_normalized_ratio_identity(self):
        # the normalized frequency bound over the phase bound obeys
        # sqrt((3/2) SNR / ((2 pi)^2 L)) as an exact algebraic identity
        for L, snr in [(1000.0, 1.0), (500.0, 3.16), (20000.0, 0.25)]:
            e = EstimationParams(f_s=1.0, T=L, snr=snr)  # f_s=1 leaves normalized units
            smf, smt = estimation_stds(e)
            assert smf / smt == pytest.approx(
                math.sqrt(1.5 * snr / ((2 * math.pi) ** 2 * L)), rel=1e-12
            )

    def test_rejects_window_below_one_sample(self):
        with pytest.raises(ValueError, match="at least 1"):
            EstimationParams(f_s=1e3, T=1e-4)

    def test_rejects_tdma_oversplit(self):
        with pytest.raises(ValueError, match="tdma"):
            EstimationParams(f_s=1e3, T=1e-2, access_mode="tdma", avg_connections=50.0)


class TestErrorStats:
    def test_assembly_matches_pieces(self):
        p, e = params(), EstimationParams()
        st = error_stats(p, e)
        assert st.sigma_f == adev_std(p, e.T)
        assert st.sigma_theta == jitter_std(p)
        assert (st.sigma_m_f, st.sigma_m_theta) == estimation_stds(e)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ErrorStats(-1.0, 0.0, 0.0, 0.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ErrorStats(math.nan, 0.0, 0.0, 0.0)


class TestDrawErrors:
    def test_all_zero_stats(self):
        draw = draw_errors(ErrorStats.zero(), 1e-4, 8, np.random.default_rng(0))
        for name in ("delta_f", "delta_theta_f", "delta_theta", "eps_f", "eps_theta"):
            np.testing.assert_array_equal(getattr(draw, name), np.zeros(8))

    def test_coupling_identity_exact(self):
        stats = ErrorStats(3.0, 0.5, 10.0, 0.1)
        T = 2.5e-4
        draw = draw_errors(stats, T, 1000, np.random.default_rng(1))
        np.testing.assert_array_equal(draw.delta_theta_f, -math.pi * T * draw.delta_f)

    def test_sample_std_tracks_target(self):
        stats = ErrorStats(1.0, 0.0, 0.0, 0.0)
        draw = draw_errors(stats, 1e-4, 100_000, np.random.default_rng(2))
        assert np.std(draw.delta_f) == pytest.approx(1.0, rel=0.01)

    def test_deterministic_given_stream(self):
        stats = ErrorStats(1.0, 2.0, 3.0, 4.0)
        a = draw_errors(stats, 1e-4, 16, np.random.default_rng(42))
        b = draw_errors(stats, 1e-4, 16, np.random.default_rng(42))
        np.testing.assert_array_equal(a.eps_theta, b.eps_theta)

    def test_large_sample_statistics(self):
        # each component within 0.5% of target; drift/jitter uncorrelated
        stats = ErrorStats(2.0, 0.03, 150.0, 0.004)
        draw = draw_errors(stats, 1e-4, 1_000_000, np.random.default_rng(3))
        assert np.std(draw.delta_f) == pytest.approx(2.0, rel=5e-3)
        assert np.std(draw.delta_theta) == pytest.approx(0.03, rel=5e-3)
        assert np.std(draw.eps_f) == pytest.approx(150.0, rel=5e-3)
        assert np.std(draw.eps_theta) == pytest.approx(0.004, rel=5e-3)
        corr = np.corrcoef(draw.delta_f, draw.delta_theta)[0, 1]
        assert abs(corr) < 0.01

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            draw_errors(ErrorStats.zero(), 1e-4, 0, np.random.default_rng(0))


class TestParamValidation:
    def test_default_init_spread_is_100_ppm(self):
        assert params().init_ppm_sigma == pytest.approx(1e5)

    def test_rejects_nonpositive_carrier(self):
        with pytest.raises(ValueError):
            params(f_c=0.0)

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            params(beta1=-1e-19)

    def test_rejects_bad_access_mode(self):
        with pytest.raises(ValueError, match="access_mode"):
            EstimationParams(access_mode="cdma")
