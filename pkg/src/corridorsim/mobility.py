"""Corridor flight plan and waypoint discretization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError


def waypoint_spacing(v_u: float, step_ms: float) -> float:
    """Distance in meters covered at v_u km/h during one step of step_ms."""
    if v_u <= 0.0:
        raise InvalidParamsError(f"speed must be positive, got {v_u}")
    if step_ms <= 0.0:
        raise InvalidParamsError(f"step duration must be positive, got {step_ms}")
    return (v_u / 3.6) * (step_ms / 1000.0)


@dataclass(frozen=True)
class FlightPlan:
    """Straight constant-altitude corridor crossing, sampled per decision step."""

    start: tuple[float, float, float]
    end: tuple[float, float, float]
    altitude: float
    speed: float          # km/h
    corridor_y: float
    ttt_ms: float
    step_duration_ms: float
    spacing: float        # meters between consecutive waypoints
    waypoints: np.ndarray  # (n, 3)

    @property
    def n_waypoints(self) -> int:
        return int(self.waypoints.shape[0])

    @property
    def duration_s(self) -> float:
        """Time to traverse the full corridor at the cruise speed."""
        length = self.end[0] - self.start[0]
        return length / (self.speed / 3.6)


def build_flight_plan(
    extent_x: float,
    extent_y: float,
    h_u: float,
    v_u: float,
    ttt_ms: float,
    sampling_ms: float | None = None,
) -> FlightPlan:
    """Discretize the corridor into one waypoint per decision step.

    The UAV flies the centerline y = extent_y / 2 at altitude h_u from x = 0
    to x = extent_x.  The decision cadence defaults to the time-to-trigger,
    so TTT counters advance by exactly one per waypoint; sampling_ms
    decouples the cadence when a finer grid is wanted.  Waypoint k sits at
    x = k * spacing with k = 0 .. ceil(extent_x / spacing) - 1.
    """
    if extent_x <= 0.0 or extent_y <= 0.0:
        raise InvalidParamsError("extents must be positive")
    if h_u <= 0.0:
        raise InvalidParamsError(f"altitude must be positive, got {h_u}")
    step_ms = ttt_ms if sampling_ms is None else sampling_ms
    spacing = waypoint_spacing(v_u, step_ms)
    # epsilon guards the ceil against x.000..001 artifacts of the division
    count = int(math.ceil(extent_x / spacing - 1e-9))
    xs = np.arange(count) * spacing
    waypoints = np.column_stack(
        [xs, np.full(count, extent_y / 2.0), np.full(count, h_u)]
    )
    return FlightPlan(
        start=(0.0, extent_y / 2.0, h_u),
        end=(extent_x, extent_y / 2.0, h_u),
        altitude=h_u,
        speed=v_u,
        corridor_y=extent_y / 2.0,
        ttt_ms=ttt_ms,
        step_duration_ms=step_ms,
        spacing=spacing,
        waypoints=waypoints,
    )
