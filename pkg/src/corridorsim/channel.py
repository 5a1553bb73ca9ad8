"""mmWave air-to-ground channel: blockage geometry and path loss.

Line of sight is purely geometric: a link is blocked when the open segment
between the antennas passes through the interior of any building box.
Grazing contact with faces, edges, or rooftops still counts as
line of sight.  Path loss is the deterministic 28 GHz urban model with a
log-distance NLoS branch; no small-scale fading is applied, so a link's
RSRP is a pure function of geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .city import CityLayout, GbsSite
from .errors import InvalidParamsError

# free-space intercepts at 28 GHz, dB
_LOS_INTERCEPT = 61.4
_NLOS_INTERCEPT = 72.0
_MIN_DISTANCE = 1.0  # meters; clamps the log-distance term


@dataclass(frozen=True)
class ChannelParams:
    """Propagation constants for one run."""

    n_nlos: float = 3.0   # NLoS path-loss exponent
    tx_power: float = 30.0  # dBm
    g_tx: float = 0.0     # dBi
    g_rx: float = 0.0     # dBi

    def __post_init__(self) -> None:
        if not 2.0 <= self.n_nlos <= 4.5:
            raise InvalidParamsError(
                f"NLoS exponent must lie in [2.0, 4.5], got {self.n_nlos}"
            )


class LinkSample(NamedTuple):
    """Channel state of one UAV-GBS link at one waypoint."""

    gbs_id: int
    distance: float
    los: bool
    path_loss: float
    rsrp: float


def _segment_blocked(
    origin: np.ndarray,
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
) -> np.ndarray:
    """Slab test of one segment against (k, 3) boxes; True where blocked.

    Solves for the parametric window [t_enter, t_exit] of the infinite line
    inside each box and requires a non-degenerate overlap with the open
    interval (0, 1).  Strict inequalities keep boundary contact out, which
    makes rooftop-mounted antennas visible past their own roof plane.
    """
    d = target - origin
    t_enter = np.full(lo.shape[0], -np.inf)
    t_exit = np.full(lo.shape[0], np.inf)
    for ax in range(3):
        if d[ax] == 0.0:
            # parallel to the slab: inside it or never
            inside = (origin[ax] > lo[:, ax]) & (origin[ax] < hi[:, ax])
            t_enter = np.where(inside, t_enter, np.inf)
            t_exit = np.where(inside, t_exit, -np.inf)
        else:
            t0 = (lo[:, ax] - origin[ax]) / d[ax]
            t1 = (hi[:, ax] - origin[ax]) / d[ax]
            t_enter = np.maximum(t_enter, np.minimum(t0, t1))
            t_exit = np.minimum(t_exit, np.maximum(t0, t1))
    return (t_enter < t_exit) & (t_exit > 0.0) & (t_enter < 1.0)


def los_mask(
    waypoints: np.ndarray,
    gbs_pos: Sequence[float],
    city: CityLayout,
    exclude_building: int | None = None,
) -> np.ndarray:
    """Line-of-sight flags for every waypoint toward one GBS.

    Vectorizes the slab test over (waypoints x buildings) after pruning
    buildings that cannot intersect any of the segments: those outside the
    y band swept by the links and those below both endpoints.
    """
    wps = np.asarray(waypoints, dtype=float)
    if wps.ndim == 1:
        wps = wps[None, :]
    g = np.asarray(gbs_pos, dtype=float)
    lo, hi = city.box_arrays()
    keep = np.ones(lo.shape[0], dtype=bool)
    if exclude_building is not None:
        keep[exclude_building] = False
    # prune: a box strictly below both endpoints can never block, and the
    # corridor keeps y fixed so the swept y band is known up front
    min_z = min(float(wps[:, 2].min()), g[2])
    keep &= hi[:, 2] > min_z
    y_lo = min(float(wps[:, 1].min()), g[1])
    y_hi = max(float(wps[:, 1].max()), g[1])
    keep &= (hi[:, 1] > y_lo) & (lo[:, 1] < y_hi)
    lo = lo[keep]
    hi = hi[keep]
    if lo.shape[0] == 0:
        return np.ones(wps.shape[0], dtype=bool)

    d = g[None, :] - wps  # (t, 3)
    t_enter = np.full((wps.shape[0], lo.shape[0]), -np.inf)
    t_exit = np.full((wps.shape[0], lo.shape[0]), np.inf)
    for ax in range(3):
        dax = d[:, ax:ax + 1]  # (t, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (lo[None, :, ax] - wps[:, ax:ax + 1]) / dax
            t1 = (hi[None, :, ax] - wps[:, ax:ax + 1]) / dax
            near = np.minimum(t0, t1)
            far = np.maximum(t0, t1)
        parallel = dax[:, 0] == 0.0
        if np.any(parallel):
            inside = (wps[:, ax:ax + 1] > lo[None, :, ax]) & (
                wps[:, ax:ax + 1] < hi[None, :, ax]
            )
            rows = parallel[:, None]
            near = np.where(rows, np.where(inside, -np.inf, np.inf), near)
            far = np.where(rows, np.where(inside, np.inf, -np.inf), far)
        t_enter = np.maximum(t_enter, near)
        t_exit = np.minimum(t_exit, far)
    blocked = (t_enter < t_exit) & (t_exit > 0.0) & (t_enter < 1.0)
    return ~blocked.any(axis=1)


def is_los(
    gbs_pos: Sequence[float],
    uav_pos: Sequence[float],
    city: CityLayout,
    exclude_building: int | None = None,
) -> bool:
    """True when the open segment between the two antennas is unobstructed."""
    mask = los_mask(np.asarray(uav_pos, dtype=float), gbs_pos, city, exclude_building)
    return bool(mask[0])


def path_loss(distance: float, los: bool, params: ChannelParams) -> float:
    """28 GHz path loss in dB at a 3D distance in meters."""
    d = max(float(distance), _MIN_DISTANCE)
    if los:
        return _LOS_INTERCEPT + 20.0 * np.log10(d)
    return _NLOS_INTERCEPT + 10.0 * params.n_nlos * np.log10(d)


def rsrp(pl: float, params: ChannelParams) -> float:
    """Received power in dBm for a given path loss."""
    return params.tx_power + params.g_tx + params.g_rx - pl


def sample_links(
    uav_pos: Sequence[float],
    gbs_list: Sequence[GbsSite],
    city: CityLayout,
    params: ChannelParams,
) -> list[LinkSample]:
    """Evaluate every UAV-GBS link at one position, ordered as gbs_list."""
    u = np.asarray(uav_pos, dtype=float)
    out = []
    for site in gbs_list:
        g = np.asarray(site.position)
        dist = float(np.linalg.norm(g - u))
        visible = is_los(site.position, u, city, exclude_building=site.host_building)
        pl = path_loss(dist, visible, params)
        out.append(LinkSample(site.id, dist, visible, pl, rsrp(pl, params)))
    return out


def link_matrix(
    waypoints: np.ndarray,
    gbs_list: Sequence[GbsSite],
    city: CityLayout,
    params: ChannelParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Precompute (distance, los, path_loss, rsrp) arrays of shape (t, g).

    This is the hot path of a trial; the per-GBS los_mask call amortizes the
    building pruning over all waypoints at once.
    """
    wps = np.asarray(waypoints, dtype=float)
    t, g = wps.shape[0], len(gbs_list)
    dist = np.empty((t, g))
    los = np.empty((t, g), dtype=bool)
    for j, site in enumerate(gbs_list):
        pos = np.asarray(site.position)
        dist[:, j] = np.linalg.norm(wps - pos[None, :], axis=1)
        los[:, j] = los_mask(wps, site.position, city, exclude_building=site.host_building)
    d = np.maximum(dist, _MIN_DISTANCE)
    pl = np.where(
        los,
        _LOS_INTERCEPT + 20.0 * np.log10(d),
        _NLOS_INTERCEPT + 10.0 * params.n_nlos * np.log10(d),
    )
    power = params.tx_power + params.g_tx + params.g_rx - pl
    return dist, los, pl, power
