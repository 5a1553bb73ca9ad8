"""Figure rendering for campaign and sweep outputs.

All plotters accept either per-trial rows or pre-aggregated sweep rows;
trial rows are aggregated on the fly.  Figures are written as SVG next to
the data they were built from unless another directory is given.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import SchemaError

_GROUP_COLS = ["environment", "alpha", "beta", "gamma", "gbs_density", "strategy", "delta_hsm"]
_TRIAL_COLS = ["handover_frequency", "outage_probability"]
_STAT_COLS = [
    "handover_frequency_mean",
    "handover_frequency_std",
    "outage_probability_mean",
    "outage_probability_std",
]
# preferred legend order; anything else lands behind in name order
_STRATEGY_ORDER = {"a3": 0, "a3t": 1, "soht": 2, "fuzzy": 3, "cash": 4}

_METRICS = (
    ("handover_frequency", "Handover frequency (1/s)"),
    ("outage_probability", "Outage probability"),
)


def load_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected a CSV header")
        return list(reader)


def _require_columns(rows: list[dict[str, str]], columns: list[str], path: str | Path) -> None:
    present = set(rows[0]) if rows else set()
    for col in columns:
        if col not in present:
            raise SchemaError(f"{path}: missing required column {col!r}")


def as_stat_rows(rows: list[dict[str, str]], path: str | Path) -> list[dict]:
    """Normalize either trials or sweep rows to per-cell mean/std records."""
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    if "handover_frequency_mean" in rows[0]:
        _require_columns(rows, _GROUP_COLS + _STAT_COLS, path)
        out = []
        for r in rows:
            rec = {c: r[c] for c in ("environment", "strategy")}
            rec.update({c: float(r[c]) for c in ("gbs_density", "delta_hsm")})
            rec.update({c: float(r[c]) for c in _STAT_COLS})
            out.append(rec)
        return out
    _require_columns(rows, _GROUP_COLS + _TRIAL_COLS, path)
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault(tuple(r[c] for c in _GROUP_COLS), []).append(r)
    out = []
    for key, members in groups.items():
        hf = [float(m["handover_frequency"]) for m in members]
        op = [float(m["outage_probability"]) for m in members]
        n = len(members)
        hf_mean = sum(hf) / n
        op_mean = sum(op) / n
        out.append(
            {
                "environment": key[0],
                "strategy": key[5],
                "gbs_density": float(key[4]),
                "delta_hsm": float(key[6]),
                "handover_frequency_mean": hf_mean,
                "handover_frequency_std": (sum((x - hf_mean) ** 2 for x in hf) / n) ** 0.5,
                "outage_probability_mean": op_mean,
                "outage_probability_std": (sum((x - op_mean) ** 2 for x in op) / n) ** 0.5,
            }
        )
    return out


def _strategies(stats: list[dict]) -> list[str]:
    names = {r["strategy"] for r in stats}
    return sorted(names, key=lambda s: (_STRATEGY_ORDER.get(s, len(_STRATEGY_ORDER)), s))


def _save(fig, out_dir: Path, name: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_env_bars(stats: list[dict], out_dir: Path) -> list[Path]:
    """Grouped bars of each metric per environment, one bar per strategy."""
    envs = list(dict.fromkeys(r["environment"] for r in stats))
    strategies = _strategies(stats)
    width = 0.8 / len(strategies)
    written = []
    for metric, label in _METRICS:
        fig, ax = plt.subplots(figsize=(7, 4))
        for k, strat in enumerate(strategies):
            values, errors = [], []
            for env in envs:
                cell = [r for r in stats if r["environment"] == env and r["strategy"] == strat]
                values.append(cell[0][f"{metric}_mean"] if cell else 0.0)
                errors.append(cell[0][f"{metric}_std"] if cell else 0.0)
            offset = (k - (len(strategies) - 1) / 2) * width
            ax.bar(
                [i + offset for i in range(len(envs))],
                values,
                width,
                yerr=errors,
                capsize=2,
                label=strat,
            )
        ax.set_xticks(range(len(envs)), envs)
        ax.set_ylabel(label)
        ax.set_xlabel("Environment")
        ax.legend()
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"env_bars_{metric}.svg"))
    return written


def plot_density_lines(stats: list[dict], out_dir: Path) -> list[Path]:
    """Each metric against the base-station density, one line per strategy."""
    strategies = _strategies(stats)
    written = []
    for metric, label in _METRICS:
        fig, ax = plt.subplots(figsize=(7, 4))
        for strat in strategies:
            rows = sorted(
                (r for r in stats if r["strategy"] == strat),
                key=lambda r: r["gbs_density"],
            )
            ax.errorbar(
                [r["gbs_density"] for r in rows],
                [r[f"{metric}_mean"] for r in rows],
                yerr=[r[f"{metric}_std"] for r in rows],
                marker="o",
                capsize=2,
                label=strat,
            )
        ax.set_xlabel("GBS density (1/km$^2$)")
        ax.set_ylabel(label)
        ax.legend()
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"density_{metric}.svg"))
    return written


def plot_tradeoff(stats: list[dict], out_dir: Path) -> list[Path]:
    """Outage against handover frequency, one point per cell."""
    strategies = _strategies(stats)
    fig, ax = plt.subplots(figsize=(6, 5))
    for strat in strategies:
        rows = [r for r in stats if r["strategy"] == strat]
        ax.scatter(
            [r["handover_frequency_mean"] for r in rows],
            [r["outage_probability_mean"] for r in rows],
            label=strat,
        )
        for r in rows:
            ax.annotate(
                f"{r['gbs_density']:g}",
                (r["handover_frequency_mean"], r["outage_probability_mean"]),
                textcoords="offset points",
                xytext=(4, 3),
                fontsize=8,
            )
    ax.set_xlabel("Handover frequency (1/s)")
    ax.set_ylabel("Outage probability")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, out_dir, "tradeoff.svg")]


def plot_hsm(stats: list[dict], out_dir: Path) -> list[Path]:
    """Both metrics against the safety margin on twin axes."""
    strategies = _strategies(stats)
    fig, ax_hf = plt.subplots(figsize=(7, 4))
    ax_op = ax_hf.twinx()
    for strat in strategies:
        rows = sorted(
            (r for r in stats if r["strategy"] == strat),
            key=lambda r: r["delta_hsm"],
        )
        xs = [r["delta_hsm"] for r in rows]
        ax_hf.plot(xs, [r["handover_frequency_mean"] for r in rows], "o-", label=f"{strat} HF")
        ax_op.plot(xs, [r["outage_probability_mean"] for r in rows], "s--", label=f"{strat} OP")
    ax_hf.set_xlabel("Safety margin (dB)")
    ax_hf.set_ylabel("Handover frequency (1/s)")
    ax_op.set_ylabel("Outage probability")
    handles1, labels1 = ax_hf.get_legend_handles_labels()
    handles2, labels2 = ax_op.get_legend_handles_labels()
    ax_hf.legend(handles1 + handles2, labels1 + labels2, fontsize=8)
    fig.tight_layout()
    return [_save(fig, out_dir, "hsm_sensitivity.svg")]


PLOTTERS = {
    "env-bars": plot_env_bars,
    "density-lines": plot_density_lines,
    "tradeoff": plot_tradeoff,
    "hsm": plot_hsm,
}


def render(kind: str, input_path: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Load a trials or sweep CSV and render one figure kind from it."""
    input_path = Path(input_path)
    stats = as_stat_rows(load_rows(input_path), input_path)
    target = Path(out_dir) if out_dir is not None else input_path.parent
    return PLOTTERS[kind](stats, target)
