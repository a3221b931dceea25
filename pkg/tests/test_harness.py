import os

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from revealib.domain import NoiseMode, dumps_stream, write_stream
from revealib.harness import (
    CI_Z,
    aggregate,
    ExperimentConfig,
    build_config,
    emit,
    load_experiment_config,
    obscuring_config,
    plot_family,
    read_csv,
    run_experiment,
    run_instance,
    steps_frame,
    summarize,
    write_csv,
)
from revealib.harness.cli import main
from revealib.harness import runner
from revealib.harness.runner import build_stream, failed_trace
from revealib.instances import GenConfig, gen_instance_stream
from revealib.losses import LOSS_KINDS, Comparator, LossKind, RegretTrace
from revealib.oco import ScheduleKind, g_bound
from revealib.utils.config_utils import read_config, write_config


def _constant_trace(instance, value, T=3):
    arrays = {kind: np.full(T, float(value)) for kind in LOSS_KINDS}
    return RegretTrace(instance, arrays, dict(arrays), dict(arrays), dict(arrays), dict(arrays), np.zeros(T))


def _small_config(**fields):
    gen = fields.pop("gen", {})
    return build_config({"gen": {"n": 3, "T": 8, "instance_count": 3, "seed": 1, **gen}},
                        quiet=True, timing=False, **fields)


class TestObscuringScenario:
    def test_mirror_descent_regret(self):
        cfg = obscuring_config(T=10)
        assert cfg.comparator is Comparator.TRUTH
        assert cfg.theta0 == (3.0,)

        trace = run_instance(cfg, 0)
        assert np.allclose(trace.thetas.ravel()[:5], [3.0, 2.0, 1.5, 7.0 / 6.0, 11.0 / 12.0])
        assert trace.final_regret(LossKind.SIM) == pytest.approx(3.0 + 2.0 + 1.5 + 7.0 / 6.0)
        assert trace.final_regret(LossKind.PRE) == pytest.approx(4.0)

    def test_prediction_learner_never_moves(self):
        T = 12
        trace = run_instance(obscuring_config(T=T, algorithm="implicit-pre"), 0)
        assert np.all(trace.thetas == 3.0)
        assert np.all(trace.losses[LossKind.PRE] == 1.0)
        assert trace.final_regret(LossKind.PRE) == pytest.approx(T)
        assert trace.avg_regret[LossKind.PRE][-1] == pytest.approx(1.0)

    def test_explicit_fields_win(self):
        cfg = obscuring_config(T=5, comparator="hindsight", theta0=(2.0,))
        assert cfg.comparator is Comparator.HINDSIGHT
        assert cfg.theta0 == (2.0,)
        assert cfg.resolved_schedule()[0] is ScheduleKind.CUSTOM

    def test_entropy_learner_is_rejected(self):
        with pytest.raises(ValidationError):
            obscuring_config(algorithm="md-entropy")


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.gen.n == 50 and cfg.gen.T == 500 and cfg.gen.instance_count == 50
        assert cfg.resolved_schedule() == (ScheduleKind.OPTIMAL, ())

    def test_out_dir_from_environment(self, monkeypatch):
        monkeypatch.setenv("REVEALIB_OUT_DIR", "/tmp/revealib-runs")
        assert ExperimentConfig().out_dir == "/tmp/revealib-runs"

    def test_load_with_overrides(self, tmp_path):
        path = tmp_path / "experiment.yaml"
        etas = tmp_path / "etas.txt"
        etas.write_text("0.5  # first\n0.25\n")
        write_config(path, {"algorithm": "implicit-sim", "gen": {"n": 4, "T": 20}, "schedule": f"file:{etas}"})
        cfg = load_experiment_config(path, jobs=2, gen={"seed": 9})
        assert cfg.gen.n == 4 and cfg.gen.seed == 9 and cfg.jobs == 2
        assert cfg.resolved_schedule() == (ScheduleKind.CUSTOM, (0.5, 0.25))

    @pytest.mark.parametrize("fields", [
        {"schedule": "cosine"},
        {"scenario": "haystack"},
        {"algorithm": "implicit-pre", "gen": {"n": 16}},
        {"algorithm": "implicit-pre", "gen": {"utility": "ces", "domain": "eck"}},
        {"jobs": 0},
        {"algorithm": "md-euclid", "scenario": "obscuring", "stream": "saved.txt"},
    ])
    def test_rejects(self, fields):
        with pytest.raises(ValidationError):
            build_config(**fields)


class TestRunner:
    def test_jobs_do_not_change_results(self):
        sequential = steps_frame(run_experiment(_small_config(algorithm="md-euclid")))
        parallel = steps_frame(run_experiment(_small_config(algorithm="md-euclid", jobs=3)))
        pd.testing.assert_frame_equal(sequential, parallel)
        assert (sequential["step_ms"] == 0.0).all()
        assert sorted(sequential["instance"].unique()) == [0, 1, 2]

    def test_noisy_runs_carry_the_true_action_measurements(self):
        cfg = _small_config(gen={"noise_mode": NoiseMode.SMALL})
        traces = run_experiment(cfg)
        assert all(trace.attrue is not None for trace in traces)
        frame = steps_frame(traces)
        assert "loss_pre_attrue" in frame.columns
        assert frame["avg_regret_pre"].isna().all()
        assert not frame["avg_regret_pre_attrue"].isna().any()

        metrics = set(summarize(frame)["metric"])
        assert "avg_regret_sim" in metrics
        assert "avg_regret_pre" not in metrics

    def test_suboptimal_observations_pass_their_checks(self):
        cfg = _small_config(algorithm="implicit-sim", gen={"noise_mode": NoiseMode.SUBOPTIMAL})
        assert all(trace.ok for trace in run_experiment(cfg))

    def test_failures_stay_per_instance(self, monkeypatch):
        original = runner.run_instance

        def flaky(cfg, index):
            if index == 1:
                raise ArithmeticError("forced")
            return original(cfg, index)

        monkeypatch.setattr(runner, "run_instance", flaky)
        traces = run_experiment(_small_config())
        assert [trace.ok for trace in traces] == [True, False, True]
        assert "forced" in traces[1].diagnostic
        assert set(steps_frame(traces)["instance"]) == {0, 2}

    def test_interior_streams(self):
        cfg = _small_config(gen={"interior": True})
        stream = build_stream(cfg, 0)
        assert stream.T == 8
        assert g_bound(stream.instances) > 0


class TestAggregate:
    def test_identical_traces_have_zero_width(self):
        summary = summarize(steps_frame([_constant_trace(0, 2.0), _constant_trace(1, 2.0)]))
        assert (summary["mean"] == 2.0).all()
        assert (summary["lo"] == summary["hi"]).all()

    def test_two_constants(self):
        summary = summarize(steps_frame([_constant_trace(0, 1.0), _constant_trace(1, 3.0)]))
        row = summary[(summary["metric"] == "loss_sim") & (summary["t"] == 2)].iloc[0]
        assert row["mean"] == 2.0
        # s = √2 over k = 2 instances
        assert row["lo"] == pytest.approx(2.0 - CI_Z)
        assert row["hi"] == pytest.approx(2.0 + CI_Z)
        assert CI_Z == pytest.approx(1.959964, abs=1e-6)

    def test_band_formula(self, rng):
        values = rng.normal(size=5)
        summary = summarize(steps_frame([_constant_trace(i, v, T=1) for i, v in enumerate(values)]))
        row = summary[summary["metric"] == "avg_regret_pre"].iloc[0]
        half = CI_Z * values.std(ddof=1) / np.sqrt(5)
        assert row["mean"] == pytest.approx(values.mean())
        assert row["hi"] - row["lo"] == pytest.approx(2.0 * half)

    def test_single_trace_has_no_band(self):
        summary = summarize(steps_frame([_constant_trace(0, 1.0)]))
        assert summary["lo"].isna().all()

    def test_failed_traces_are_skipped(self):
        frame = steps_frame([failed_trace(0, "boom"), _constant_trace(1, 1.0)])
        assert set(frame["instance"]) == {1}
        assert aggregate([failed_trace(0, "boom")]).empty


class TestEmit:
    def test_csv_round_trip(self, tmp_path):
        frame = steps_frame(run_experiment(_small_config()))
        path = write_csv(frame, tmp_path / "steps.csv")
        pd.testing.assert_frame_equal(read_csv(path), frame, check_dtype=False)
        assert b"\r\n" not in path.read_bytes()

    def test_writes_outputs_and_plots(self, tmp_path):
        cfg = _small_config(plots=True)
        frame = steps_frame(run_experiment(cfg))
        written = emit(frame, summarize(frame), cfg, tmp_path / "out")
        names = {os.path.basename(path) for path in written}
        assert {"steps.csv", "summary.csv", "config.yaml", "losses.svg", "avg_regret.svg", "step_ms.svg"} <= names
        assert "attrue.svg" not in names
        assert read_config(tmp_path / "out" / "config.yaml")["gen"]["n"] == 3

    def test_log_scale_records_its_floor(self, tmp_path):
        summary = pd.DataFrame({
            "t": [1, 2],
            "metric": ["loss_pre", "loss_pre"],
            "mean": [0.0, 0.5],
            "lo": [np.nan, np.nan],
            "hi": [np.nan, np.nan],
        })
        path = plot_family(summary, "losses", tmp_path / "losses.svg", log_scale=True)
        text = path.read_text(encoding="utf-8")
        assert "log-floor=0.05" in text
        assert "clamped at 0.05" in text
        assert plot_family(summary, "attrue", tmp_path / "attrue.svg") is None


class TestStreamReplay:
    def test_saved_streams_replay_to_the_same_steps(self, tmp_path):
        cfg = _small_config(algorithm="md-euclid", save_streams=True)
        frame = steps_frame(run_experiment(cfg))
        written = emit(frame, summarize(frame), cfg, tmp_path / "out")

        stream_dir = tmp_path / "out" / "streams"
        assert sorted(os.listdir(stream_dir)) == ["0.txt", "1.txt", "2.txt"]
        assert str(stream_dir / "0.txt") in written

        replay = _small_config(algorithm="md-euclid", stream=str(stream_dir))
        pd.testing.assert_frame_equal(steps_frame(run_experiment(replay)), frame)

    def test_single_file_serves_every_instance(self, tmp_path):
        path = tmp_path / "one.txt"
        write_stream(path, gen_instance_stream(GenConfig(n=3, T=5, instance_count=1, seed=4)))
        cfg = _small_config(stream=str(path))
        assert build_stream(cfg, 0).T == 5
        assert dumps_stream(build_stream(cfg, 2)) == dumps_stream(build_stream(cfg, 0))

    def test_missing_stream_fails_that_instance(self, tmp_path):
        traces = run_experiment(_small_config(stream=str(tmp_path)))
        assert not any(trace.ok for trace in traces)
        assert "0.txt" in traces[0].diagnostic


def test_timing_only_changes_step_ms():
    timed = steps_frame(run_experiment(build_config({"gen": {"n": 3, "T": 8, "instance_count": 3, "seed": 1}},
                                                    quiet=True)))
    untimed = steps_frame(run_experiment(_small_config()))
    assert (timed["step_ms"] > 0.0).any()
    pd.testing.assert_frame_equal(timed.drop(columns="step_ms"), untimed.drop(columns="step_ms"))


class TestCli:
    def test_random_run(self, tmp_path):
        out = tmp_path / "run"
        code = main(["--n", "3", "--T", "6", "--instances", "2", "--algo", "md-euclid", "--noise", "small",
                     "--out", str(out), "--no-timing", "--quiet"])
        assert code == 0
        frame = read_csv(out / "steps.csv")
        assert len(frame) == 12
        assert (frame["step_ms"] == 0.0).all()

    def test_scenario_run(self, tmp_path):
        out = tmp_path / "obscuring"
        code = main(["--scenario", "obscuring", "--domain", "interval", "--algo", "implicit-pre", "--T", "6",
                     "--out", str(out), "--quiet"])
        assert code == 0
        frame = read_csv(out / "steps.csv")
        assert list(frame["t"]) == [1, 2, 3, 4, 5, 6]
        assert frame["avg_regret_pre"].iloc[-1] == pytest.approx(1.0)

    @pytest.mark.parametrize("argv", [
        ["--n", "0"],
        ["--utility", "ces"],
        ["--domain", "interval"],
        ["--config", "does-not-exist.yaml"],
    ])
    def test_bad_configuration(self, argv, tmp_path):
        assert main(argv + ["--out", str(tmp_path), "--quiet"]) == 2

    def test_config_file_must_be_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        write_config(path, [1, 2, 3])
        assert main(["--config", str(path), "--quiet"]) == 2

    def test_outputs_match_bytewise_without_timing(self, tmp_path):
        for jobs in ("1", "3"):
            code = main(["--n", "3", "--T", "6", "--instances", "3", "--algo", "implicit-sim", "--jobs", jobs,
                         "--out", str(tmp_path / jobs), "--no-timing", "--quiet"])
            assert code == 0
        for name in ("steps.csv", "summary.csv"):
            assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "3" / name).read_bytes()

    def test_stream_replay(self, tmp_path):
        path = tmp_path / "saved.txt"
        write_stream(path, gen_instance_stream(GenConfig(n=3, T=5, instance_count=1, seed=2)))
        out = tmp_path / "replay"
        code = main(["--stream", str(path), "--algo", "md-euclid", "--out", str(out), "--quiet"])
        assert code == 0
        assert list(read_csv(out / "steps.csv")["t"]) == [1, 2, 3, 4, 5]

        assert main(["--stream", str(tmp_path / "missing.txt"), "--out", str(out), "--quiet"]) == 2

    def test_save_streams_then_replay_directory(self, tmp_path):
        first = ["--n", "3", "--T", "4", "--instances", "2", "--algo", "md-euclid", "--no-timing", "--quiet"]
        assert main(first + ["--save-streams", "--out", str(tmp_path / "a")]) == 0
        replay = ["--stream", str(tmp_path / "a" / "streams"), "--algo", "md-euclid", "--no-timing", "--quiet"]
        assert main(replay + ["--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "steps.csv").read_bytes() == (tmp_path / "b" / "steps.csv").read_bytes()


def _mean_running_average(frame, column):
    table = frame.pivot(index="t", columns="instance", values=column)
    return table.cumsum().div(table.index.to_series(), axis=0).mean(axis=1)


@pytest.mark.slow
def test_entropy_mirror_descent_meets_its_bound():
    cfg = build_config({"gen": {"n": 50, "T": 500, "instance_count": 5}}, quiet=True, timing=False)
    for trace in run_experiment(cfg):
        stream = build_stream(cfg, trace.instance)
        G = g_bound(stream.instances)
        assert trace.ok
        assert trace.avg_regret[LossKind.SIM][-1] <= np.sqrt(2.0 * np.log(50) * G ** 2 / 500) + 1e-9


@pytest.mark.slow
def test_entropy_average_regret_decays():
    cfg = build_config({"gen": {"n": 20, "T": 400, "instance_count": 20}}, quiet=True, timing=False, jobs=4)
    curve = steps_frame(run_experiment(cfg)).groupby("t")["avg_regret_sim"].mean()
    # about 0.5 under O(1/√T)
    assert curve[400] <= 0.65 * curve[100]


@pytest.mark.slow
def test_prediction_learner_stalls_on_polytopes():
    final = {}
    for algorithm in ("md-entropy", "implicit-sim", "implicit-pre"):
        cfg = build_config({"gen": {"n": 8, "m": 4, "T": 200, "instance_count": 10, "domain": "cp"}},
                           algorithm=algorithm, quiet=True, timing=False, jobs=4)
        final[algorithm] = steps_frame(run_experiment(cfg)).groupby("instance")["loss_pre"].mean().mean()
    assert final["implicit-pre"] > final["md-entropy"]
    assert final["implicit-pre"] > final["implicit-sim"]


@pytest.mark.slow
def test_true_action_loss_falls_under_small_noise():
    cfg = build_config({"gen": {"n": 20, "T": 400, "instance_count": 5, "noise_mode": NoiseMode.SMALL}},
                       quiet=True, timing=False, jobs=4)
    curve = _mean_running_average(steps_frame(run_experiment(cfg)), "loss_pre_attrue")
    assert curve[400] < curve[50]


@pytest.mark.slow
def test_prediction_regret_falls_on_interior_streams():
    cfg = build_config({"gen": {"n": 5, "T": 100, "instance_count": 3, "interior": True}},
                       algorithm="implicit-pre", quiet=True, timing=False)
    traces = run_experiment(cfg)
    assert all(trace.ok for trace in traces)
    curve = steps_frame(traces).groupby("t")["avg_regret_pre"].mean()
    assert curve[100] < curve[50] < curve[10]


@pytest.mark.slow
def test_prediction_learner_is_the_slowest():
    medians = {}
    for algorithm in ("md-entropy", "implicit-sim", "implicit-pre"):
        cfg = build_config({"gen": {"n": 10, "T": 30, "instance_count": 2}}, algorithm=algorithm, quiet=True)
        medians[algorithm] = steps_frame(run_experiment(cfg))["step_ms"].median()
    assert medians["implicit-pre"] > medians["md-entropy"]
    assert medians["implicit-pre"] > medians["implicit-sim"]
