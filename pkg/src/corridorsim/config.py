"""Run configuration: JSON parsing, validation, and derived model objects.

A configuration is a flat JSON object.  Unknown keys are rejected and every
validation failure names the offending field so CLI users get actionable
messages.  Fields left at null inherit environment-specific defaults at the
point of use, which keeps serialized configs round-trippable.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .city import ENVIRONMENT_PRESETS, BuiltUpParams
from .errors import ConfigError
from .strategies import FuzzyConfig, SohtConfig, StrategyConfig, strategy_names

# default NLoS path-loss exponent per environment; custom cities get 3.0
DEFAULT_PL_EXPONENTS: dict[str, float] = {
    "suburban": 2.5,
    "urban": 3.0,
    "dense-urban": 3.5,
    "high-rise": 4.0,
}
_FALLBACK_PL_EXPONENT = 3.0


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one simulation campaign."""

    environment: str = "dense-urban"
    alpha: float | None = None        # built-up ratio; None -> preset
    beta: float | None = None         # buildings per km^2; None -> preset
    gamma: float | None = None        # Rayleigh height scale; None -> preset
    extent_x: float = 4000.0          # corridor length, m
    extent_y: float = 1000.0          # corridor width, m
    h_u: float = 100.0                # flight altitude, m
    v_u: float = 100.0                # cruise speed, km/h
    ttt_ms: float = 100.0             # baseline time-to-trigger
    sampling_ms: float | None = None  # decision cadence; None -> ttt_ms
    hysteresis_delta: float = 3.0     # dB
    safety_margin_delta: float = 5.0  # dB, arming margin of gated triggers
    tau_min: float = -101.5           # dBm, outage threshold
    tx_power: float = 30.0            # dBm
    h_ext: float = 5.0                # antenna mast above the roof, m
    gbs_density: float = 6.0          # base stations per km^2
    pl_exponent: float | None = None  # NLoS exponent; None -> environment default
    strategies: tuple[str, ...] = ("a3", "a3t", "soht", "fuzzy", "cash")
    n_trials: int = 500
    base_seed: int = 0
    soht_psi_ms: float | None = None
    soht_delta_range_db: tuple[float, float] = (0.0, 10.0)
    soht_ttt_range_ms: tuple[float, float] = (10.0, 5120.0)
    fuzzy_speed_centers: tuple[float, float, float] = (20.0, 75.0, 130.0)
    fuzzy_rsrp_centers: tuple[float, float, float] = (-105.0, -85.0, -65.0)
    fuzzy_load_centers: tuple[float, float, float] = (0.1, 0.5, 0.9)
    fuzzy_delta_centers: tuple[float, float, float] = (1.0, 3.0, 5.0)
    fuzzy_ttt_range_ms: tuple[float, float] = (40.0, 480.0)


_TUPLE_FIELDS = {
    "strategies",
    "soht_delta_range_db",
    "soht_ttt_range_ms",
    "fuzzy_speed_centers",
    "fuzzy_rsrp_centers",
    "fuzzy_load_centers",
    "fuzzy_delta_centers",
    "fuzzy_ttt_range_ms",
}
_INT_FIELDS = {"n_trials", "base_seed"}
_OPTIONAL_FLOAT_FIELDS = {"alpha", "beta", "gamma", "sampling_ms", "pl_exponent", "soht_psi_ms"}
_STR_FIELDS = {"environment"}


def _coerce(name: str, value: Any) -> Any:
    try:
        if name in _STR_FIELDS:
            return str(value)
        if name == "strategies":
            return tuple(str(v) for v in value)
        if name in _TUPLE_FIELDS:
            return tuple(float(v) for v in value)
        if name in _INT_FIELDS:
            if isinstance(value, bool) or int(value) != float(value):
                raise ValueError(value)
            return int(value)
        if name in _OPTIONAL_FLOAT_FIELDS and value is None:
            return None
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: cannot interpret {value!r}") from None


def parse_config(source: str | Path | dict, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Build a validated RunConfig from a JSON file path or a plain dict.

    Overrides (for example from CLI --set flags) are applied on top of the
    file contents before validation; string values are parsed as JSON when
    possible so numbers and lists come through typed.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")

    merged = dict(data)
    for key, value in (overrides or {}).items():
        if isinstance(value, str):
            try:
                value = json.loads(value)
            except json.JSONDecodeError:
                pass  # keep as string, e.g. environment names
        merged[key] = value

    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ConfigError(f"unknown config key: {', '.join(unknown)}")

    kwargs = {name: _coerce(name, value) for name, value in merged.items()}
    cfg = RunConfig(**kwargs)
    validate_config(cfg)
    return cfg


def serialize_config(cfg: RunConfig) -> dict[str, Any]:
    """JSON-ready dict; parse_config of the result reproduces cfg exactly."""
    out: dict[str, Any] = {}
    for name, value in dataclasses.asdict(cfg).items():
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{field}: {message}")


def _ordered_triple(value: tuple[float, ...], field: str) -> None:
    _require(len(value) == 3, field, "expected exactly three breakpoints")
    _require(value[0] < value[1] < value[2], field, "breakpoints must be strictly increasing")


def _ordered_pair(value: tuple[float, ...], field: str) -> None:
    _require(len(value) == 2, field, "expected a (low, high) pair")
    _require(value[0] < value[1], field, "low bound must be below high bound")


def validate_config(cfg: RunConfig) -> None:
    env_names = sorted(ENVIRONMENT_PRESETS) + ["custom"]
    _require(
        cfg.environment in ENVIRONMENT_PRESETS or cfg.environment == "custom",
        "environment",
        f"must be one of {', '.join(env_names)}",
    )
    if cfg.environment == "custom":
        _require(
            cfg.alpha is not None and cfg.beta is not None and cfg.gamma is not None,
            "environment",
            "custom requires explicit alpha, beta and gamma",
        )
    if cfg.alpha is not None:
        _require(0.0 < cfg.alpha < 1.0, "alpha", "must lie in (0, 1)")
    if cfg.beta is not None:
        _require(cfg.beta > 0.0, "beta", "must be positive")
    if cfg.gamma is not None:
        _require(cfg.gamma > 0.0, "gamma", "must be positive")
    _require(cfg.extent_x > 0.0, "extent_x", "must be positive")
    _require(cfg.extent_y > 0.0, "extent_y", "must be positive")
    _require(cfg.h_u > 0.0, "h_u", "must be positive")
    _require(cfg.v_u > 0.0, "v_u", "must be positive")
    _require(cfg.ttt_ms > 0.0, "ttt_ms", "must be positive")
    if cfg.sampling_ms is not None:
        _require(cfg.sampling_ms > 0.0, "sampling_ms", "must be positive")
    _require(cfg.hysteresis_delta >= 0.0, "hysteresis_delta", "must be non-negative")
    _require(cfg.safety_margin_delta >= 0.0, "safety_margin_delta", "must be non-negative")
    _require(math.isfinite(cfg.tau_min), "tau_min", "must be finite")
    _require(math.isfinite(cfg.tx_power), "tx_power", "must be finite")
    _require(cfg.h_ext >= 0.0, "h_ext", "must be non-negative")
    _require(cfg.gbs_density >= 0.0, "gbs_density", "must be non-negative")
    if cfg.pl_exponent is not None:
        _require(2.0 <= cfg.pl_exponent <= 4.5, "pl_exponent", "must lie in [2.0, 4.5]")
    _require(len(cfg.strategies) > 0, "strategies", "must not be empty")
    known = set(strategy_names())
    for name in cfg.strategies:
        _require(name in known, "strategies", f"unknown strategy {name!r}")
    _require(
        len(set(cfg.strategies)) == len(cfg.strategies),
        "strategies",
        "must not repeat entries",
    )
    _require(cfg.n_trials >= 1, "n_trials", "must be at least 1")
    _require(cfg.base_seed >= 0, "base_seed", "must be non-negative")
    if cfg.soht_psi_ms is not None:
        _require(cfg.soht_psi_ms > 0.0, "soht_psi_ms", "must be positive")
    _ordered_pair(cfg.soht_delta_range_db, "soht_delta_range_db")
    _ordered_pair(cfg.soht_ttt_range_ms, "soht_ttt_range_ms")
    _ordered_triple(cfg.fuzzy_speed_centers, "fuzzy_speed_centers")
    _ordered_triple(cfg.fuzzy_rsrp_centers, "fuzzy_rsrp_centers")
    _ordered_triple(cfg.fuzzy_load_centers, "fuzzy_load_centers")
    _ordered_triple(cfg.fuzzy_delta_centers, "fuzzy_delta_centers")
    _ordered_pair(cfg.fuzzy_ttt_range_ms, "fuzzy_ttt_range_ms")


def built_up_params(cfg: RunConfig) -> BuiltUpParams:
    """Resolve (alpha, beta, gamma) from explicit fields or the preset."""
    preset = ENVIRONMENT_PRESETS.get(cfg.environment)
    if preset is None and (cfg.alpha is None or cfg.beta is None or cfg.gamma is None):
        raise ConfigError("environment: custom requires explicit alpha, beta and gamma")
    alpha = cfg.alpha if cfg.alpha is not None else preset[0]
    beta = cfg.beta if cfg.beta is not None else preset[1]
    gamma = cfg.gamma if cfg.gamma is not None else preset[2]
    return BuiltUpParams(alpha, beta, gamma)


def effective_pl_exponent(cfg: RunConfig) -> float:
    if cfg.pl_exponent is not None:
        return cfg.pl_exponent
    return DEFAULT_PL_EXPONENTS.get(cfg.environment, _FALLBACK_PL_EXPONENT)


def with_environment(cfg: RunConfig, environment: str) -> RunConfig:
    """Retarget a config at another preset, dropping per-city overrides."""
    out = dataclasses.replace(cfg, environment=environment, alpha=None, beta=None, gamma=None)
    validate_config(out)
    return out


def strategy_config(cfg: RunConfig) -> StrategyConfig:
    """Project the run-level knobs onto the strategy parameter block."""
    return StrategyConfig(
        hysteresis_delta=cfg.hysteresis_delta,
        ttt_ms=cfg.ttt_ms,
        tau_min=cfg.tau_min,
        safety_margin_delta=cfg.safety_margin_delta,
        soht=SohtConfig(
            psi_ms=cfg.soht_psi_ms,
            delta_range_db=cfg.soht_delta_range_db,
            ttt_range_ms=cfg.soht_ttt_range_ms,
        ),
        fuzzy=FuzzyConfig(
            speed_centers=cfg.fuzzy_speed_centers,
            rsrp_centers=cfg.fuzzy_rsrp_centers,
            load_centers=cfg.fuzzy_load_centers,
            delta_centers=cfg.fuzzy_delta_centers,
            ttt_range_ms=cfg.fuzzy_ttt_range_ms,
        ),
    )
