"""Monte Carlo engine: per-seed trials, campaigns, and parameter sweeps.

One seed fully determines a trial: the city realization, the rooftop base
stations, and the per-cell load draws each come from their own substream,
so every strategy variant evaluated for that seed sees the exact same
world.  Campaigns map trials over seeds base_seed .. base_seed + n - 1 and
aggregate per-cell statistics; results are independent of worker count and
scheduling because each trial is self-contained.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelParams, LinkSample, link_matrix
from .city import generate_city, place_gbs
from .config import (
    RunConfig,
    built_up_params,
    effective_pl_exponent,
    strategy_config,
    with_environment,
)
from .mobility import build_flight_plan
from .rng import LOAD_STREAM, substream
from .strategies import STRATEGY_STEPS, HandoverState, StepContext

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one strategy variant on one seeded trial."""

    seed: int
    environment: str
    alpha: float
    beta: float
    gamma: float
    gbs_density: float
    strategy: str
    delta_hsm: float
    handover_count: int
    outage_steps: int
    total_steps: int
    flight_duration_s: float
    handover_frequency: float
    outage_probability: float
    serving_trace: tuple[int | None, ...] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CampaignStats:
    """Mean and population std of the two metrics over one cell."""

    environment: str
    alpha: float
    beta: float
    gamma: float
    gbs_density: float
    strategy: str
    delta_hsm: float
    n_trials: int
    handover_frequency_mean: float
    handover_frequency_std: float
    outage_probability_mean: float
    outage_probability_std: float


def evaluate_variants(
    cfg: RunConfig,
    seed: int,
    variants: Sequence[tuple[str, float]],
    collect_trace: bool = False,
) -> list[TrialResult]:
    """Run several (strategy, safety margin) variants on one shared world.

    The city, base stations, loads, and the full per-waypoint link matrix
    are realized once, so results across variants are exactly paired and a
    variant list is guaranteed deterministic-equivalent to separate runs
    with the same seed.
    """
    params = built_up_params(cfg)
    city = generate_city(params, cfg.extent_x, cfg.extent_y, seed)
    gbs = place_gbs(city, cfg.gbs_density, cfg.h_ext, cfg.tx_power, seed)
    plan = build_flight_plan(
        cfg.extent_x, cfg.extent_y, cfg.h_u, cfg.v_u, cfg.ttt_ms, cfg.sampling_ms
    )
    steps = plan.n_waypoints
    duration = plan.duration_s

    def result(strategy: str, delta: float, state: HandoverState, trace) -> TrialResult:
        return TrialResult(
            seed=seed,
            environment=cfg.environment,
            alpha=params.alpha,
            beta=params.beta,
            gamma=params.gamma,
            gbs_density=cfg.gbs_density,
            strategy=strategy,
            delta_hsm=delta,
            handover_count=state.handover_count,
            outage_steps=state.outage_steps,
            total_steps=steps,
            flight_duration_s=duration,
            handover_frequency=state.handover_count / duration,
            outage_probability=state.outage_steps / steps,
            serving_trace=None if trace is None else tuple(trace),
        )

    if not gbs:
        # nothing to attach to: the whole flight is an outage
        empty = HandoverState(outage_steps=steps)
        trace = [None] * steps if collect_trace else None
        return [result(s, d, empty, trace) for s, d in variants]

    chan = ChannelParams(n_nlos=effective_pl_exponent(cfg), tx_power=cfg.tx_power)
    dist, los, pl, power = link_matrix(plan.waypoints, gbs, city, chan)
    loads = substream(seed, LOAD_STREAM).uniform(size=len(gbs))
    positions = np.array([site.position for site in gbs])

    links_seq: list[list[LinkSample]] = [
        [
            LinkSample(j, float(dist[t, j]), bool(los[t, j]), float(pl[t, j]), float(power[t, j]))
            for j in range(len(gbs))
        ]
        for t in range(steps)
    ]
    contexts = [
        StepContext(
            uav_pos=plan.waypoints[t],
            v_u=cfg.v_u,
            pl_exponent=chan.n_nlos,
            corridor_y=plan.corridor_y,
            step_duration_ms=plan.step_duration_ms,
            gbs_positions=positions,
            gbs_loads=loads,
        )
        for t in range(steps)
    ]

    base = strategy_config(cfg)
    out: list[TrialResult] = []
    for strategy, delta in variants:
        step = STRATEGY_STEPS[strategy]
        scfg = dataclasses.replace(base, safety_margin_delta=delta)
        state = HandoverState()
        trace = [] if collect_trace else None
        for t in range(steps):
            step(state, links_seq[t], contexts[t], scfg)
            if trace is not None:
                trace.append(state.serving_gbs)
        out.append(result(strategy, delta, state, trace))
    return out


def run_trial(cfg: RunConfig, seed: int, collect_trace: bool = False) -> list[TrialResult]:
    """Evaluate every configured strategy on the world drawn from one seed."""
    variants = [(name, cfg.safety_margin_delta) for name in cfg.strategies]
    return evaluate_variants(cfg, seed, variants, collect_trace)


def _trial_job(args: tuple[RunConfig, int, Sequence[tuple[str, float]]]) -> list[TrialResult]:
    cfg, seed, variants = args
    return evaluate_variants(cfg, seed, variants)


def _map_jobs(
    items: list[tuple[RunConfig, int, Sequence[tuple[str, float]]]],
    jobs: int,
) -> list[TrialResult]:
    if jobs <= 1:
        batches: Iterable[list[TrialResult]] = (_trial_job(item) for item in items)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        with pool:
            chunk = max(1, len(items) // (jobs * 4))
            batches = list(pool.map(_trial_job, items, chunksize=chunk))
    return [r for batch in batches for r in batch]


def run_campaign(cfg: RunConfig, n_trials: int | None = None, jobs: int = 1) -> list[TrialResult]:
    """Run the configured strategies over consecutive seeds.

    Output order is (seed, strategy) regardless of the worker count.
    """
    n = cfg.n_trials if n_trials is None else n_trials
    variants = [(name, cfg.safety_margin_delta) for name in cfg.strategies]
    items = [(cfg, seed, variants) for seed in range(cfg.base_seed, cfg.base_seed + n)]
    log.info("campaign: %d trials x %d strategies, %d job(s)", n, len(variants), jobs)
    return _map_jobs(items, jobs)


def aggregate_stats(trials: Sequence[TrialResult]) -> list[CampaignStats]:
    """Per-cell metric statistics, cells in first-appearance order.

    A cell is one (environment, density, strategy, safety margin)
    combination; the std is the population std (ddof 0).
    """
    groups: dict[tuple, list[TrialResult]] = {}
    for t in trials:
        key = (t.environment, t.alpha, t.beta, t.gamma, t.gbs_density, t.strategy, t.delta_hsm)
        groups.setdefault(key, []).append(t)
    stats = []
    for key, members in groups.items():
        hf = np.array([m.handover_frequency for m in members])
        op = np.array([m.outage_probability for m in members])
        stats.append(
            CampaignStats(
                environment=key[0],
                alpha=key[1],
                beta=key[2],
                gamma=key[3],
                gbs_density=key[4],
                strategy=key[5],
                delta_hsm=key[6],
                n_trials=len(members),
                handover_frequency_mean=float(hf.mean()),
                handover_frequency_std=float(hf.std()),
                outage_probability_mean=float(op.mean()),
                outage_probability_std=float(op.std()),
            )
        )
    return stats


SWEEP_AXES = ("environment", "density", "delta", "strategy")


def sweep(
    cfg: RunConfig,
    axes: dict[str, Sequence],
    jobs: int = 1,
) -> tuple[list[TrialResult], list[CampaignStats]]:
    """Cross the given axes against the base config and run every cell.

    Axes not swept stay at their configured values.  Within one
    (environment, density) cell all strategy and margin variants share the
    same seeded worlds, so comparisons across variants are paired.
    """
    unknown = sorted(set(axes) - set(SWEEP_AXES))
    if unknown:
        raise ValueError(f"unknown sweep axis: {', '.join(unknown)}")
    environments = list(axes.get("environment", [cfg.environment]))
    densities = [float(d) for d in axes.get("density", [cfg.gbs_density])]
    deltas = [float(d) for d in axes.get("delta", [cfg.safety_margin_delta])]
    strategies = list(axes.get("strategy", cfg.strategies))
    variants = [(s, d) for s in strategies for d in deltas]

    items = []
    for env in environments:
        cfg_env = cfg if env == cfg.environment else with_environment(cfg, env)
        for density in densities:
            cell = dataclasses.replace(cfg_env, gbs_density=density)
            for seed in range(cfg.base_seed, cfg.base_seed + cfg.n_trials):
                items.append((cell, seed, variants))
    log.info(
        "sweep: %d cells x %d seeds x %d variants, %d job(s)",
        len(environments) * len(densities), cfg.n_trials, len(variants), jobs,
    )
    trials = _map_jobs(items, jobs)
    return trials, aggregate_stats(trials)
