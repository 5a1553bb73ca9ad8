"""Command line interface: artifacts, determinism, exit codes, figures."""

import json

import pytest

from corridorsim.cli import TRIALS_CSV_COLUMNS, main

SMALL_CONFIG = {
    "extent_x": 500.0,
    "gbs_density": 4.0,
    "strategies": ["a3", "cash"],
    "n_trials": 2,
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(SMALL_CONFIG))
    return path


def read_rows(path):
    raw = path.read_bytes().decode()
    assert raw.endswith("\r\n") and "\n" not in raw.replace("\r\n", "")
    header, *rows = raw.strip().split("\r\n")
    return header.split(","), [r.split(",") for r in rows]


def test_run_writes_trials_and_summary(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--config", str(config_path), "--out", str(out)])
    assert rc == 0
    header, rows = read_rows(out / "trials.csv")
    assert header == TRIALS_CSV_COLUMNS
    assert len(rows) == 4  # 2 seeds x 2 strategies
    seeds = {r[0] for r in rows}
    assert seeds == {"0", "1"}
    # frequency column recomputes from the counts
    for r in rows:
        rec = dict(zip(header, r))
        duration = 500.0 / (100.0 / 3.6)
        assert float(rec["handover_frequency"]) == pytest.approx(
            int(rec["handover_count"]) / duration
        )
        assert float(rec["outage_probability"]) == pytest.approx(
            int(rec["outage_steps"]) / int(rec["total_steps"])
        )
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_trials"] == 2
    assert {c["strategy"] for c in summary["cells"]} == {"a3", "cash"}
    printed = capsys.readouterr().out
    assert "trials.csv" in printed and "summary.json" in printed


def test_reruns_are_byte_identical(config_path, tmp_path):
    out1 = tmp_path / "one"
    out2 = tmp_path / "two"
    assert main(["run", "--config", str(config_path), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(config_path), "--out", str(out2)]) == 0
    assert (out1 / "trials.csv").read_bytes() == (out2 / "trials.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_set_overrides_and_sim_seed(config_path, tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv("SIM_SEED", "7")
    rc = main(
        [
            "run",
            "--config",
            str(config_path),
            "--out",
            str(out),
            "--set",
            "n_trials=1",
            "--set",
            "base_seed=99",  # SIM_SEED wins over --set
        ]
    )
    assert rc == 0
    _, rows = read_rows(out / "trials.csv")
    assert {r[0] for r in rows} == {"7"}


def test_bad_sim_seed_is_a_config_error(config_path, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SIM_SEED", "many")
    rc = main(["run", "--config", str(config_path), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "SIM_SEED" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"speeed": 3}))
    rc = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "speeed" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2


def test_runtime_failure_exits_3(config_path, tmp_path, capsys):
    # density is valid per se but exceeds the available rooftops at runtime
    rc = main(
        [
            "run",
            "--config",
            str(config_path),
            "--out",
            str(tmp_path / "o"),
            "--set",
            "gbs_density=99999",
        ]
    )
    assert rc == 3
    assert "rooftops" in capsys.readouterr().err


def test_sweep_writes_aggregates(config_path, tmp_path):
    out = tmp_path / "out"
    rc = main(
        [
            "sweep",
            "--config",
            str(config_path),
            "--axis",
            "density=2,4",
            "--axis",
            "strategy=a3,cash",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    header, rows = read_rows(out / "sweep.csv")
    assert header[0] == "environment"
    assert len(rows) == 4  # 2 densities x 2 strategies
    _, trial_rows = read_rows(out / "trials.csv")
    assert len(trial_rows) == 8


def test_sweep_requires_axis(config_path, tmp_path, capsys):
    rc = main(["sweep", "--config", str(config_path), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "--axis" in capsys.readouterr().err


@pytest.mark.parametrize(
    "axis",
    ["altitude=1,2", "density=low,high", "strategy=a3,warp", "delta="],
)
def test_sweep_rejects_bad_axis(config_path, tmp_path, axis):
    rc = main(
        ["sweep", "--config", str(config_path), "--axis", axis, "--out", str(tmp_path / "o")]
    )
    assert rc == 2


@pytest.fixture()
def sweep_dir(config_path, tmp_path):
    out = tmp_path / "sweepout"
    rc = main(
        [
            "sweep",
            "--config",
            str(config_path),
            "--axis",
            "density=2,4",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    return out


@pytest.mark.parametrize("kind", ["env-bars", "density-lines", "tradeoff", "hsm"])
def test_plot_kinds_render_svg(sweep_dir, tmp_path, kind, capsys):
    out = tmp_path / "figs"
    rc = main(["plot", "--input", str(sweep_dir / "sweep.csv"), "--kind", kind, "--out", str(out)])
    assert rc == 0
    paths = [line for line in capsys.readouterr().out.splitlines() if line.endswith(".svg")]
    assert paths
    for p in paths:
        blob = (out / p.split("/")[-1]).read_bytes()
        assert b"<svg" in blob[:1000]


def test_plot_defaults_next_to_input(sweep_dir, capsys):
    rc = main(["plot", "--input", str(sweep_dir / "sweep.csv"), "--kind", "tradeoff"])
    assert rc == 0
    assert (sweep_dir / "tradeoff.svg").is_file()


def test_plot_aggregates_trial_rows(sweep_dir, tmp_path):
    out = tmp_path / "figs"
    rc = main(
        ["plot", "--input", str(sweep_dir / "trials.csv"), "--kind", "density-lines", "--out", str(out)]
    )
    assert rc == 0
    assert (out / "density_handover_frequency.svg").is_file()
    assert (out / "density_outage_probability.svg").is_file()


def test_plot_missing_column_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("environment,strategy\r\ndense-urban,a3\r\n")
    rc = main(["plot", "--input", str(bad), "--kind", "tradeoff"])
    assert rc == 2
    assert "missing required column" in capsys.readouterr().err


def test_plot_missing_file_exits_3(tmp_path):
    rc = main(["plot", "--input", str(tmp_path / "absent.csv"), "--kind", "tradeoff"])
    assert rc == 3
