"""Handover decision strategies.

Five protocols share one step interface: the classic hysteresis event (a3),
the same event gated by a serving-power threshold (a3t), a self-optimizing
variant that rescales its hysteresis and time-to-trigger from the serving
link geometry (soht), a fuzzy controller that infers both from speed, signal
and cell load (fuzzy), and a corridor-aware scheme that only considers
cells ahead of the UAV and favors ones close to the flight axis (cash).

Every strategy is called once per waypoint with the full set of link
samples and mutates its HandoverState in place.  On the first waypoint the
UAV simply attaches to the strongest cell.  After the decision, a step is
counted as an outage when the serving RSRP is below the outage threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import LinkSample

Vec3 = Sequence[float]


@dataclass(frozen=True)
class SohtConfig:
    """Clamps and constants of the self-optimizing trigger."""

    psi_ms: float | None = None  # averaging window; None follows the step duration
    delta_range_db: tuple[float, float] = (0.0, 10.0)
    ttt_range_ms: tuple[float, float] = (10.0, 5120.0)
    sin_floor: float = 1e-3  # keeps head-on geometry away from the 1/sin pole


@dataclass(frozen=True)
class FuzzyConfig:
    """Membership breakpoints of the fuzzy controller.

    Each input has three triangular terms whose outer terms saturate at the
    universe edges; the tuple gives the three term centers.
    """

    speed_range: tuple[float, float] = (0.0, 150.0)      # km/h
    speed_centers: tuple[float, float, float] = (20.0, 75.0, 130.0)
    rsrp_range: tuple[float, float] = (-110.0, -60.0)    # dBm
    rsrp_centers: tuple[float, float, float] = (-105.0, -85.0, -65.0)
    load_range: tuple[float, float] = (0.0, 1.0)
    load_centers: tuple[float, float, float] = (0.1, 0.5, 0.9)
    delta_range: tuple[float, float] = (0.0, 6.0)        # dB
    delta_centers: tuple[float, float, float] = (1.0, 3.0, 5.0)
    ttt_range_ms: tuple[float, float] = (40.0, 480.0)
    resolution: int = 601


@dataclass(frozen=True)
class StrategyConfig:
    """Per-run decision parameters shared by all strategies."""

    hysteresis_delta: float = 3.0      # dB
    ttt_ms: float = 100.0
    tau_min: float = -101.5            # dBm, outage threshold
    safety_margin_delta: float = 5.0   # dB above tau_min where gated triggers arm
    soht: SohtConfig = SohtConfig()
    fuzzy: FuzzyConfig = FuzzyConfig()


@dataclass(frozen=True)
class StepContext:
    """Read-only trial state visible to a decision step."""

    uav_pos: np.ndarray
    v_u: float                   # km/h
    pl_exponent: float
    corridor_y: float
    step_duration_ms: float
    gbs_positions: np.ndarray    # (g, 3), row index == gbs id
    gbs_loads: np.ndarray | None = None


@dataclass
class HandoverState:
    """Mutable per-flight strategy state and outcome counters."""

    serving_gbs: int | None = None
    counters: dict[int, int] = field(default_factory=dict)
    last_candidate: int | None = None
    handover_count: int = 0
    outage_steps: int = 0


def _serving_link(state: HandoverState, links: Sequence[LinkSample]) -> LinkSample:
    for link in links:
        if link.gbs_id == state.serving_gbs:
            return link
    raise LookupError(f"serving gbs {state.serving_gbs} has no link sample")


def _attach_strongest(state: HandoverState, links: Sequence[LinkSample]) -> None:
    # initial attach, not counted as a handover; ties go to the lowest id
    state.serving_gbs = max(links, key=lambda l: l.rsrp).gbs_id


def _count_outage(state: HandoverState, links: Sequence[LinkSample], tau_min: float) -> None:
    if _serving_link(state, links).rsrp < tau_min:
        state.outage_steps += 1


def _ttt_steps(ttt_ms: float, step_ms: float) -> int:
    """TTT expressed in whole decision steps, at least one."""
    return max(1, int(round(ttt_ms / step_ms)))


def _a3_core(
    state: HandoverState,
    links: Sequence[LinkSample],
    delta: float,
    steps_needed: int,
    gate: Callable[[LinkSample], bool] | None = None,
) -> None:
    """Per-neighbor TTT counting for hysteresis-event strategies.

    A neighbor's counter advances on every step where it beats the serving
    RSRP by delta (and the optional gate on the serving link holds) and
    resets otherwise.  When one or more counters reach the TTT the strongest
    such neighbor becomes serving and all counters reset.
    """
    serving = _serving_link(state, links)
    armed = gate is None or gate(serving)
    ripe: list[LinkSample] = []
    for link in links:
        if link.gbs_id == serving.gbs_id:
            continue
        if armed and link.rsrp > serving.rsrp + delta:
            count = state.counters.get(link.gbs_id, 0) + 1
            state.counters[link.gbs_id] = count
            if count >= steps_needed:
                ripe.append(link)
        else:
            state.counters[link.gbs_id] = 0
    if ripe:
        target = max(ripe, key=lambda l: (l.rsrp, -l.gbs_id))
        state.serving_gbs = target.gbs_id
        state.handover_count += 1
        state.counters.clear()


def a3_step(
    state: HandoverState,
    links: Sequence[LinkSample],
    ctx: StepContext,
    cfg: StrategyConfig,
) -> None:
    """Classic hysteresis event: neighbor beats serving by a fixed margin."""
    if state.serving_gbs is None:
        _attach_strongest(state, links)
    else:
        _a3_core(
            state,
            links,
            cfg.hysteresis_delta,
            _ttt_steps(cfg.ttt_ms, ctx.step_duration_ms),
        )
    _count_outage(state, links, cfg.tau_min)


def a3t_step(
    state: HandoverState,
    links: Sequence[LinkSample],
    ctx: StepContext,
    cfg: StrategyConfig,
) -> None:
    """Hysteresis event armed only while the serving link is near the floor.

    With an infinite safety margin the gate is always open and the strategy
    degenerates to a3_step exactly.
    """
    if state.serving_gbs is None:
        _attach_strongest(state, links)
    else:
        ceiling = cfg.tau_min + cfg.safety_margin_delta
        _a3_core(
            state,
            links,
            cfg.hysteresis_delta,
            _ttt_steps(cfg.ttt_ms, ctx.step_duration_ms),
            gate=lambda serving: serving.rsrp <= ceiling,
        )
    _count_outage(state, links, cfg.tau_min)


def soht_params(
    v_u: float,
    psi_ms: float,
    phi: float,
    d: float,
    n: float,
    delta_range_db: tuple[float, float] = (0.0, 10.0),
    ttt_range_ms: tuple[float, float] = (10.0, 5120.0),
    sin_floor: float = 1e-3,
) -> tuple[float, float]:
    """Geometry-adapted hysteresis (dB) and time-to-trigger (ms).

    Both derive from the expected RSRP slope over the window psi: the
    hysteresis is the reciprocal of the path-loss change accumulated while
    moving across the bearing angle phi to the serving cell, and the TTT is
    the time for that change to overcome one distance unit.  Far or head-on
    cells give a flat slope, so the raw values explode and the clamps do
    most of the work; the sin floor keeps phi == 0 finite.
    """
    v = v_u / 3.6
    psi = psi_ms / 1000.0
    s = max(abs(math.sin(phi)), sin_floor)
    dist = max(d, 1.0)
    growth = 2.0 * v * psi * s / dist + 1.0
    slope = 10.0 * n * math.log10(growth)
    delta = delta_range_db[1] if slope <= 0.0 else 1.0 / slope
    delta = min(max(delta, delta_range_db[0]), delta_range_db[1])
    ttt_ms = 1000.0 / v * (math.sqrt(2.0 * v * psi * s + dist) / dist - 1.0)
    ttt_ms = min(max(ttt_ms, ttt_range_ms[0]), ttt_range_ms[1])
    return delta, ttt_ms


def soht_step(
    state: HandoverState,
    links: Sequence[LinkSample],
    ctx: StepContext,
    cfg: StrategyConfig,
) -> None:
    """Hysteresis event with per-step self-optimized margin and TTT."""
    if state.serving_gbs is None:
        _attach_strongest(state, links)
    else:
        serving = _serving_link(state, links)
        gpos = ctx.gbs_positions[serving.gbs_id]
        # bearing between the +x velocity and the line of sight to the cell
        cos_phi = (gpos[0] - ctx.uav_pos[0]) / max(serving.distance, 1e-9)
        phi = math.acos(min(1.0, max(-1.0, cos_phi)))
        psi_ms = cfg.soht.psi_ms if cfg.soht.psi_ms is not None else ctx.step_duration_ms
        delta, ttt_ms = soht_params(
            ctx.v_u,
            psi_ms,
            phi,
            serving.distance,
            ctx.pl_exponent,
            delta_range_db=cfg.soht.delta_range_db,
            ttt_range_ms=cfg.soht.ttt_range_ms,
            sin_floor=cfg.soht.sin_floor,
        )
        _a3_core(state, links, delta, _ttt_steps(ttt_ms, ctx.step_duration_ms))
    _count_outage(state, links, cfg.tau_min)


def _term_grades(x: float, centers: tuple[float, float, float]) -> tuple[float, float, float]:
    """Memberships of the low/mid/high terms; outer terms shoulder outward."""
    c0, c1, c2 = centers
    return (
        float(np.interp(x, [c0, c1], [1.0, 0.0])),
        float(np.interp(x, [c0, c1, c2], [0.0, 1.0, 0.0])),
        float(np.interp(x, [c1, c2], [0.0, 1.0])),
    )


# base output index by speed index + rsrp index; load then shifts it
_BASE_RULE = {0: 0, 1: 0, 2: 1, 3: 2, 4: 2}
_LOAD_SHIFT = (1, 0, -1)


def fuzzy_hysteresis(v_u: float, rsrp_serving: float, load: float, fc: FuzzyConfig) -> float:
    """Infer the hysteresis margin by min-max inference and centroid defuzz.

    The margin grows with serving strength and speed and shrinks with the
    load on the serving cell.
    """
    speed_g = _term_grades(v_u, fc.speed_centers)
    rsrp_g = _term_grades(rsrp_serving, fc.rsrp_centers)
    load_g = _term_grades(load, fc.load_centers)
    strengths = [0.0, 0.0, 0.0]
    for si, sv in enumerate(speed_g):
        if sv == 0.0:
            continue
        for ri, rv in enumerate(rsrp_g):
            if rv == 0.0:
                continue
            for li, lv in enumerate(load_g):
                if lv == 0.0:
                    continue
                out = _BASE_RULE[si + ri] + _LOAD_SHIFT[li]
                out = min(2, max(0, out))
                strengths[out] = max(strengths[out], min(sv, rv, lv))

    grid = np.linspace(fc.delta_range[0], fc.delta_range[1], fc.resolution)
    c0, c1, c2 = fc.delta_centers
    curves = (
        np.interp(grid, [c0, c1], [1.0, 0.0]),
        np.interp(grid, [c0, c1, c2], [0.0, 1.0, 0.0]),
        np.interp(grid, [c1, c2], [0.0, 1.0]),
    )
    agg = np.zeros_like(grid)
    for strength, curve in zip(strengths, curves):
        if strength > 0.0:
            np.maximum(agg, np.minimum(strength, curve), out=agg)
    total = agg.sum()
    if total == 0.0:
        return (fc.delta_range[0] + fc.delta_range[1]) / 2.0
    return float((grid * agg).sum() / total)


def _lerp_clamped(x: float, x0: float, x1: float, y0: float, y1: float) -> float:
    t = (x - x0) / (x1 - x0)
    t = min(1.0, max(0.0, t))
    return y0 + t * (y1 - y0)


def fuzzy_ttt_ms(v_u: float, rsrp_serving: float, load: float, fc: FuzzyConfig) -> float:
    """Blend per-factor TTT recommendations, weighted by urgency.

    Weak signal, busy cell, and high speed each push toward the short end of
    the TTT range; their membership grades weight the blend, falling back to
    an even split when none of them is active.
    """
    lo, hi = fc.ttt_range_ms
    f_rsrp = _lerp_clamped(rsrp_serving, fc.rsrp_range[0], fc.rsrp_range[1], lo, hi)
    f_load = _lerp_clamped(load, fc.load_range[0], fc.load_range[1], hi, lo)
    f_speed = _lerp_clamped(v_u, fc.speed_range[0], fc.speed_range[1], hi, lo)
    weights = np.array(
        [
            _term_grades(rsrp_serving, fc.rsrp_centers)[0],  # weak signal
            _term_grades(load, fc.load_centers)[2],          # busy cell
            _term_grades(v_u, fc.speed_centers)[2],          # fast UAV
        ]
    )
    total = weights.sum()
    weights = weights / total if total > 0.0 else np.full(3, 1.0 / 3.0)
    return float(weights @ np.array([f_rsrp, f_load, f_speed]))


def fuzzy_step(
    state: HandoverState,
    links: Sequence[LinkSample],
    ctx: StepContext,
    cfg: StrategyConfig,
) -> None:
    """Hysteresis event with margin and TTT inferred by the fuzzy controller."""
    if state.serving_gbs is None:
        _attach_strongest(state, links)
    else:
        serving = _serving_link(state, links)
        load = 0.5 if ctx.gbs_loads is None else float(ctx.gbs_loads[serving.gbs_id])
        delta = fuzzy_hysteresis(ctx.v_u, serving.rsrp, load, cfg.fuzzy)
        ttt_ms = fuzzy_ttt_ms(ctx.v_u, serving.rsrp, load, cfg.fuzzy)
        _a3_core(state, links, delta, _ttt_steps(ttt_ms, ctx.step_duration_ms))
    _count_outage(state, links, cfg.tau_min)


def cash_score(gbs_pos: Vec3, uav_x: float, corridor_y: float) -> float:
    """Forward progress per unit of lateral offset from the corridor axis."""
    return (gbs_pos[0] - uav_x) / (1.0 + abs(gbs_pos[1] - corridor_y))


def cash_step(
    state: HandoverState,
    links: Sequence[LinkSample],
    ctx: StepContext,
    cfg: StrategyConfig,
) -> None:
    """Corridor-aware handover: switch late, and only to viable cells ahead.

    Candidates are cells above the outage threshold that still lie ahead of
    the UAV.  A single TTT counter tracks the best-scoring candidate and
    restarts whenever that candidate changes; the switch fires only once the
    serving link has dropped near the outage floor and the candidate clears
    the hysteresis margin for the whole TTT.
    """
    if state.serving_gbs is None:
        _attach_strongest(state, links)
        _count_outage(state, links, cfg.tau_min)
        return
    serving = _serving_link(state, links)
    uav_x = float(ctx.uav_pos[0])
    candidates = [
        link
        for link in links
        if link.rsrp >= cfg.tau_min and ctx.gbs_positions[link.gbs_id][0] > uav_x
    ]
    if not candidates:
        state.counters.clear()
        state.last_candidate = None
    else:
        best = max(
            candidates,
            key=lambda l: cash_score(ctx.gbs_positions[l.gbs_id], uav_x, ctx.corridor_y),
        )
        assert best.rsrp >= cfg.tau_min
        assert ctx.gbs_positions[best.gbs_id][0] > uav_x
        triggered = (
            best.rsrp > serving.rsrp + cfg.hysteresis_delta
            and serving.rsrp <= cfg.tau_min + cfg.safety_margin_delta
        )
        if triggered:
            if state.last_candidate != best.gbs_id:
                state.counters.clear()
            state.last_candidate = best.gbs_id
            count = state.counters.get(best.gbs_id, 0) + 1
            state.counters[best.gbs_id] = count
            if count >= _ttt_steps(cfg.ttt_ms, ctx.step_duration_ms):
                state.serving_gbs = best.gbs_id
                state.handover_count += 1
                state.counters.clear()
                state.last_candidate = None
        else:
            state.counters.clear()
            state.last_candidate = None
    _count_outage(state, links, cfg.tau_min)


STRATEGY_STEPS: dict[str, Callable[[HandoverState, Sequence[LinkSample], StepContext, StrategyConfig], None]] = {
    "a3": a3_step,
    "a3t": a3t_step,
    "soht": soht_step,
    "fuzzy": fuzzy_step,
    "cash": cash_step,
}


def strategy_names() -> tuple[str, ...]:
    return tuple(STRATEGY_STEPS)
