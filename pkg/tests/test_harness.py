import math

import pytest

from arraysync.harness import (
    SWEEP_PRESETS,
    Scenario,
    SweepRecord,
    load_config,
    run_scenario,
    run_trial,
    sweep,
    sweep_csv_text,
    trace_csv_text,
    trajectory_csv_text,
)

FAST = dict(n_nodes=12, connectivity=0.5, trials=3, max_iters=20)


class TestScenario:
    def test_snr_conversion(self):
        assert Scenario(snr_db=0.0).snr_linear == 1.0
        assert Scenario(snr_db=10.0).snr_linear == pytest.approx(10.0)
        assert Scenario(snr_db=-5.0).snr_linear == pytest.approx(10 ** -0.5)

    def test_eta_conversion(self):
        assert Scenario(eta_deg=1.0).eta_rad == pytest.approx(math.radians(1.0))

    def test_rejects_unknown_algorithm(self):
        with pytest.raises(ValueError, match="algorithm"):
            Scenario(algorithm="pll")

    def test_rejects_invalid_module_params(self):
        with pytest.raises(ValueError):
            Scenario(f_s=-1.0)
        with pytest.raises(ValueError):
            Scenario(T=1e-9)  # under one sample per window


class TestConfig:
    def test_roundtrip(self, tmp_path):
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text(
            "# comment line\n"
            "algorithm = kf-dfpc\n"
            "n_nodes = 64\n"
            "connectivity = 0.3   # inline comment\n"
            "snr_db = 5\n"
            "\n"
            "master_seed = 99\n"
        )
        s = load_config(str(cfg))
        assert s.algorithm == "kf-dfpc"
        assert s.n_nodes == 64
        assert s.connectivity == 0.3
        assert s.snr_db == 5.0
        assert s.master_seed == 99

    def test_overrides_win(self, tmp_path):
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text("n_nodes = 64\n")
        s = load_config(str(cfg), overrides={"n_nodes": 32})
        assert s.n_nodes == 32

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text("nodes = 64\n")
        with pytest.raises(ValueError, match="unknown scenario field"):
            load_config(str(cfg))

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "scenario.cfg"
        cfg.write_text("n_nodes 64\n")
        with pytest.raises(ValueError, match="expected"):
            load_config(str(cfg))


class TestRunScenario:
    def test_single_trial_noiseless_complete(self):
        s = Scenario(
            n_nodes=10,
            connectivity=1.0,
            beta1=0.0,
            beta2=0.0,
            phase_noise_A_db=-math.inf,
            snr_db=math.inf,
            trials=1,
            eta_deg=1e-7,
        )
        _, rec = run_scenario(s)
        assert rec.mean_iters == 1.0
        assert rec.mean_sigma_phi_deg == pytest.approx(0.0, abs=1e-8)
        assert rec.trials_converged == 1

    def test_deterministic_repeat(self):
        s = Scenario(**FAST)
        _, a = run_scenario(s)
        _, b = run_scenario(s)
        assert a == b

    def test_trial_stream_is_stable_under_trial_count(self):
        # growing the trial count must not reshuffle earlier trials
        few = run_trial(Scenario(**FAST), 1)[0]
        more = run_trial(Scenario(**{**FAST, "trials": 30}), 1)[0]
        assert few.sigma_phi_final == more.sigma_phi_final

    def test_jobs_do_not_change_results(self):
        s = Scenario(**FAST)
        _, serial = run_scenario(s, jobs=1)
        _, parallel = run_scenario(s, jobs=2)
        assert serial == parallel

    def test_error_annotated_with_trial(self):
        # c=0.3 at N=5 rounds to 3 edges, one short of a spanning tree
        s = Scenario(n_nodes=5, connectivity=0.3, trials=1)
        with pytest.raises(ValueError, match="trial 0"):
            run_scenario(s)

    def test_traces_optional(self):
        traces, _ = run_scenario(Scenario(**FAST), keep_traces=False)
        assert traces == []


class TestSweep:
    def test_one_record_per_value(self):
        s = Scenario(**FAST)
        records = sweep(s, "snr_db", (0.0, 10.0))
        assert [r.param_value for r in records] == [0.0, 10.0]
        assert all(r.param_name == "snr_db" for r in records)

    def test_rejects_unknown_param(self):
        with pytest.raises(ValueError, match="cannot sweep"):
            sweep(Scenario(**FAST), "f_c", (1e9,))

    def test_disconnected_precondition_propagates(self):
        s = Scenario(**{**FAST, "n_nodes": 5})
        with pytest.raises(ValueError, match="spanning tree"):
            sweep(s, "connectivity", (0.2, 0.5))

    def test_presets_cover_fig3_to_fig8(self):
        assert sorted(SWEEP_PRESETS) == ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]
        for scenario, param, values in SWEEP_PRESETS.values():
            assert param in ("n_nodes", "connectivity", "T", "snr_db")
            assert len(values) >= 5


class TestCsvFormats:
    def test_sweep_csv_golden(self):
        rec = SweepRecord(
            param_name="T",
            param_value=1e-4,
            mean_sigma_phi_deg=1.23456789,
            std_sigma_phi_deg=0.111111,
            mean_iters=16.5,
            std_iters=2.25,
            mean_lambda2=0.912345678,
            trials=100,
            trials_converged=99,
        )
        text = sweep_csv_text([rec])
        lines = text.splitlines()
        assert lines[0] == (
            "param_name,param_value,mean_sigma_phi_deg,std_sigma_phi_deg,"
            "mean_iters,std_iters,mean_lambda2,trials,trials_converged"
        )
        assert lines[1] == "T,0.0001,1.23457,0.111111,16.5,2.25,0.912346,100,99"

    def test_trace_csv_shape(self):
        s = Scenario(**FAST)
        traces, _ = run_scenario(s)
        text = trace_csv_text(traces)
        lines = text.splitlines()
        assert lines[0] == "trial,iter,sigma_phi_deg"
        assert len(lines) == 1 + sum(t.iterations for t in traces)
        assert lines[1].startswith("0,1,")

    def test_trajectory_csv_shape(self):
        s = Scenario(**FAST)
        traces, _ = run_scenario(s)
        text = trajectory_csv_text(traces[0])
        lines = text.splitlines()
        assert lines[0] == "iter,node,freq_dev_hz,phase_dev_rad"
        assert len(lines) == 1 + traces[0].iterations * s.n_nodes

    def test_bitwise_identical_on_repeat(self):
        s = Scenario(**FAST)
        a = trace_csv_text(run_scenario(s)[0])
        b = trace_csv_text(run_scenario(s)[0])
        assert a == b

    def test_angles_emitted_in_degrees(self):
        s = Scenario(**FAST)
        traces, rec = run_scenario(s)
        sigma_rad = traces[0].sigma_phi_history[-1]
        row = trace_csv_text(traces).splitlines()[traces[0].iterations]
        assert float(row.split(",")[2]) == pytest.approx(math.degrees(sigma_rad), rel=1e-5)
