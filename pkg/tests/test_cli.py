"""CLI tests: every verb drives the real pipeline through main()."""

import json

import pytest

import gaitfeedback.cli as cli
from gaitfeedback.core import save_gaitbin
from gaitfeedback.estimator import init_weights, load_weights_file, save_weights_file
from gaitfeedback.session import load_log
from gaitfeedback.synthgait import GaitProfile, generate


@pytest.fixture(scope="module")
def fast_weights_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("weights") / "fast.agrfw"
    save_weights_file(path, init_weights(42))
    return str(path)


@pytest.fixture(scope="module")
def short_gaitbin(tmp_path_factory):
    path = tmp_path_factory.mktemp("ingest") / "short.gaitbin"
    frames, _ = generate(GaitProfile(seed=11), 10.0)
    save_gaitbin(path, frames)
    return str(path)


@pytest.fixture(scope="module")
def sim_log_path(tmp_path_factory, fast_weights_file):
    path = tmp_path_factory.mktemp("sim") / "sim.sessionl"
    code = cli.main(
        [
            "simulate", "--profile", "responder", "--seed", "3",
            "--weights", fast_weights_file, "--out", str(path),
        ]
    )
    assert code == 0
    return str(path)


class TestParsing:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            cli.main(["--version"])
        assert exit_info.value.code == 0
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_verb_is_required(self):
        with pytest.raises(SystemExit) as exit_info:
            cli.main([])
        assert exit_info.value.code == 2

    def test_simulate_requires_a_profile(self):
        with pytest.raises(SystemExit) as exit_info:
            cli.main(["simulate"])
        assert exit_info.value.code == 2

    def test_unsupported_ingest_suffix_fails_cleanly(self, capsys, fast_weights_file):
        code = cli.main(
            ["replay", "frames.xlsx", "--weights", fast_weights_file]
        )
        assert code == 1
        assert "unsupported ingest" in capsys.readouterr().err

    def test_missing_weights_file_fails_cleanly(self, capsys, short_gaitbin):
        code = cli.main(
            ["replay", short_gaitbin, "--weights", "/nonexistent/w.agrfw"]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err.lower()


class TestTrainAndInspect:
    def test_train_writes_loadable_weights(self, tmp_path, capsys):
        out = tmp_path / "trained.agrfw"
        code = cli.main(
            ["train", "--synthetic", "--epochs", "1", "--out", str(out)]
        )
        assert code == 0
        assert "weights written" in capsys.readouterr().out
        weights = load_weights_file(out)
        assert weights.input_channels == 42

    def test_train_refuses_without_synthetic_flag(self, capsys):
        assert cli.main(["train"]) == 2
        assert "--synthetic" in capsys.readouterr().err

    def test_inspect_reports_architecture_and_digest(self, capsys, fast_weights_file):
        code = cli.main(["weights", "inspect", fast_weights_file])
        assert code == 0
        out = capsys.readouterr().out
        assert "input_channels: 42" in out
        assert "total_parameters: 78529" in out
        assert "sha256: " in out


class TestReplay:
    def test_truncated_ingest_saves_a_partial_log(
        self, tmp_path, capsys, fast_weights_file, short_gaitbin
    ):
        out = tmp_path / "partial.sessionl"
        code = cli.main(
            [
                "replay", short_gaitbin,
                "--weights", fast_weights_file,
                "--out", str(out),
            ]
        )
        assert code == 1
        assert "ingest lost" in capsys.readouterr().err
        log = load_log(out)
        assert log.of_kind("stage")[0]["stage"] == "baseline_control"

    def test_first_run_trains_and_caches_reference_weights(
        self, tmp_path, capsys, monkeypatch, short_gaitbin
    ):
        cache = tmp_path / "cache" / "reference.agrfw"
        monkeypatch.setattr(cli, "DEFAULT_CACHE", cache)
        monkeypatch.setattr(
            cli, "train_reference", lambda w, t, c: (init_weights(42), [0.0])
        )
        code = cli.main(["replay", short_gaitbin])
        assert code == 1  # short ingest still ends the session early
        assert "training the reference estimator once" in capsys.readouterr().err
        assert cache.exists()
        # Second run loads the cache without retraining.
        monkeypatch.setattr(
            cli, "train_reference",
            lambda w, t, c: pytest.fail("must not retrain when cached"),
        )
        assert cli.main(["replay", short_gaitbin]) == 1
        assert "training the reference" not in capsys.readouterr().err


class TestSimulateAnalyze:
    def test_simulate_prints_condition_summary(self, sim_log_path, capsys):
        # The fixture already ran the simulation; re-analyze its log here.
        code = cli.main(["analyze", sim_log_path])
        assert code == 0
        out = capsys.readouterr().out
        for label in ("baseline", "during_feedback", "post_feedback", "retention"):
            assert label in out
        assert "Peak AGRF" in out

    def test_simulated_log_is_complete_and_loadable(self, sim_log_path):
        log = load_log(sim_log_path)
        stages = [r["stage"] for r in log.of_kind("stage")]
        assert stages[0] == "baseline_control"
        assert stages[-1] == "complete"
        assert len(stages) == 14

    def test_analyze_json_is_machine_readable(self, sim_log_path, capsys):
        code = cli.main(["analyze", sim_log_path, "--json"])
        assert code == 0
        records = json.loads(capsys.readouterr().out)
        assert isinstance(records, list) and records

    def test_analyze_rejects_garbage(self, tmp_path, capsys):
        bad = tmp_path / "bad.sessionl"
        bad.write_text("definitely not a log\n")
        assert cli.main(["analyze", str(bad)]) == 1
        assert "error" in capsys.readouterr().err.lower()


class TestServe:
    def test_headless_serve_over_a_file(self, tmp_path, capsys, fast_weights_file, short_gaitbin):
        out = tmp_path / "serve.sessionl"
        code = cli.main(
            [
                "serve",
                "--ingest", short_gaitbin,
                "--weights", fast_weights_file,
                "--out", str(out),
            ]
        )
        captured = capsys.readouterr()
        assert "control/telemetry socket at ws://127.0.0.1:" in captured.out
        assert code == 1  # the 10 s recording cannot finish a 2220 s protocol
        assert load_log(out).of_kind("meta")
