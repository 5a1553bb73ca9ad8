"""Synthetic Manhattan-grid city model.

A city is a regular grid of square-footprint buildings derived from the
ITU-R built-up parameters (alpha, beta, gamma): alpha is the built-up area
ratio, beta the building density per km^2, and gamma the scale of the
Rayleigh height distribution.  Building side and street width follow from
alpha and beta; only heights are random.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientRooftopsError, InvalidParamsError
from .rng import CITY_STREAM, GBS_STREAM, substream

log = logging.getLogger(__name__)

# named environment presets: (alpha, beta, gamma)
ENVIRONMENT_PRESETS: dict[str, tuple[float, float, float]] = {
    "suburban": (0.1, 750.0, 8.0),
    "urban": (0.3, 500.0, 15.0),
    "dense-urban": (0.5, 300.0, 20.0),
    "high-rise": (0.5, 300.0, 50.0),
}


@dataclass(frozen=True)
class BuiltUpParams:
    """ITU-R built-up descriptors of a city environment."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParamsError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.beta <= 0.0:
            raise InvalidParamsError(f"beta must be positive, got {self.beta}")
        if self.gamma <= 0.0:
            raise InvalidParamsError(f"gamma must be positive, got {self.gamma}")


def building_dimensions(params: BuiltUpParams) -> tuple[float, float]:
    """Side length W and street width S in meters implied by (alpha, beta).

    W = 1000 * sqrt(alpha / beta) and S = 1000 / sqrt(beta) - W, so that a
    W + S pitch tiles one km^2 with beta buildings covering an alpha
    fraction of the ground.
    """
    side = 1000.0 * math.sqrt(params.alpha / params.beta)
    street = 1000.0 / math.sqrt(params.beta) - side
    return side, street


@dataclass(frozen=True)
class Building:
    """Axis-aligned square-footprint building."""

    x_min: float
    y_min: float
    width: float
    height: float

    @property
    def x_max(self) -> float:
        return self.x_min + self.width

    @property
    def y_max(self) -> float:
        return self.y_min + self.width

    def center(self) -> tuple[float, float]:
        return self.x_min + self.width / 2.0, self.y_min + self.width / 2.0


@dataclass
class CityLayout:
    """One realization of the building grid over a rectangular extent."""

    extent_x: float
    extent_y: float
    buildings: list[Building]
    params: BuiltUpParams
    seed: int
    _boxes: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    def box_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Buildings as (n, 3) min/max corner arrays, cached after first use."""
        if self._boxes is None:
            n = len(self.buildings)
            lo = np.empty((n, 3))
            hi = np.empty((n, 3))
            for i, b in enumerate(self.buildings):
                lo[i] = (b.x_min, b.y_min, 0.0)
                hi[i] = (b.x_max, b.y_max, b.height)
            self._boxes = (lo, hi)
        return self._boxes

    def to_dict(self) -> dict:
        """JSON-friendly form, used to archive a realization for debugging."""
        return {
            "extent_x": self.extent_x,
            "extent_y": self.extent_y,
            "seed": self.seed,
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "gamma": self.params.gamma,
            },
            "buildings": [
                {
                    "x_min": b.x_min,
                    "y_min": b.y_min,
                    "width": b.width,
                    "height": b.height,
                }
                for b in self.buildings
            ],
        }


def generate_city(
    params: BuiltUpParams,
    extent_x: float = 4000.0,
    extent_y: float = 1000.0,
    seed: int = 0,
) -> CityLayout:
    """Generate the building grid for one trial.

    Buildings sit on a regular lattice with pitch W + S, offset by half a
    street so the extent is framed by streets.  Heights are independent
    Rayleigh(gamma) draws from the city substream of ``seed``; everything
    else is deterministic given the parameters.
    """
    if extent_x <= 0.0 or extent_y <= 0.0:
        raise InvalidParamsError("extents must be positive")
    side, street = building_dimensions(params)
    pitch = side + street
    nx = int(math.floor(extent_x / pitch))
    ny = int(math.floor(extent_y / pitch))
    heights = substream(seed, CITY_STREAM).rayleigh(params.gamma, size=nx * ny)

    buildings = []
    k = 0
    for ix in range(nx):
        for iy in range(ny):
            buildings.append(
                Building(
                    x_min=street / 2.0 + ix * pitch,
                    y_min=street / 2.0 + iy * pitch,
                    width=side,
                    height=float(heights[k]),
                )
            )
            k += 1

    nominal = params.beta * (extent_x / 1000.0) * (extent_y / 1000.0)
    log.debug(
        "city seed=%d: %d buildings on a %dx%d grid (nominal %.0f)",
        seed, len(buildings), nx, ny, nominal,
    )
    return CityLayout(extent_x, extent_y, buildings, params, seed)


@dataclass(frozen=True)
class GbsSite:
    """A rooftop-mounted ground base station."""

    id: int
    position: tuple[float, float, float]
    tx_power: float
    host_building: int


def place_gbs(
    city: CityLayout,
    density: float,
    h_ext: float = 5.0,
    tx_power: float = 30.0,
    seed: int = 0,
) -> list[GbsSite]:
    """Sample rooftop base stations uniformly without replacement.

    The count is round(density * area_km2).  Antennas sit h_ext meters above
    the host roof at the footprint center.  Placement uses its own substream
    of ``seed``, so changing the density never perturbs the city realization.
    """
    if density < 0.0:
        raise InvalidParamsError(f"density must be non-negative, got {density}")
    if h_ext < 0.0:
        raise InvalidParamsError(f"h_ext must be non-negative, got {h_ext}")
    area_km2 = (city.extent_x / 1000.0) * (city.extent_y / 1000.0)
    count = int(round(density * area_km2))
    if count == 0:
        return []
    if count > len(city.buildings):
        raise InsufficientRooftopsError(
            f"need {count} rooftops but the city has {len(city.buildings)} buildings"
        )
    picks = substream(seed, GBS_STREAM).choice(
        len(city.buildings), size=count, replace=False
    )
    sites = []
    for i, bi in enumerate(picks):
        b = city.buildings[int(bi)]
        cx, cy = b.center()
        sites.append(
            GbsSite(
                id=i,
                position=(cx, cy, b.height + h_ext),
                tx_power=tx_power,
                host_building=int(bi),
            )
        )
    return sites
