"""City synthesis: grid geometry, height statistics, and rooftop placement."""

import json
import math

import numpy as np
import pytest

from corridorsim import (
    ENVIRONMENT_PRESETS,
    BuiltUpParams,
    InsufficientRooftopsError,
    InvalidParamsError,
    building_dimensions,
    generate_city,
    place_gbs,
)

DENSE_URBAN = BuiltUpParams(0.5, 300.0, 20.0)
SUBURBAN = BuiltUpParams(0.1, 750.0, 8.0)
URBAN = BuiltUpParams(0.3, 500.0, 15.0)


def test_environment_presets():
    assert ENVIRONMENT_PRESETS == {
        "suburban": (0.1, 750.0, 8.0),
        "urban": (0.3, 500.0, 15.0),
        "dense-urban": (0.5, 300.0, 20.0),
        "high-rise": (0.5, 300.0, 50.0),
    }


def test_building_dimensions_dense_urban():
    side, street = building_dimensions(DENSE_URBAN)
    assert side == pytest.approx(40.824829046386306, abs=1e-9)
    assert street == pytest.approx(16.910197872576262, abs=1e-9)


def test_building_dimensions_suburban():
    side, street = building_dimensions(SUBURBAN)
    assert side == pytest.approx(11.547005383792516, abs=1e-9)
    assert street == pytest.approx(24.967831783218557, abs=1e-9)


@pytest.mark.parametrize("params", [DENSE_URBAN, SUBURBAN, URBAN])
def test_dimensions_tile_one_square_km(params):
    # beta cells of pitch W+S cover 1 km^2, of which alpha is footprint
    side, street = building_dimensions(params)
    assert params.beta * (side + street) ** 2 == pytest.approx(1e6, rel=1e-12)
    assert params.beta * side**2 == pytest.approx(params.alpha * 1e6, rel=1e-12)


@pytest.mark.parametrize(
    "params,nx,ny",
    [(DENSE_URBAN, 69, 17), (SUBURBAN, 109, 27), (URBAN, 89, 22)],
)
def test_grid_counts(params, nx, ny):
    city = generate_city(params, 4000.0, 1000.0, seed=0)
    assert len(city.buildings) == nx * ny


def test_city_layout_geometry():
    city = generate_city(DENSE_URBAN, 4000.0, 1000.0, seed=1)
    side, street = building_dimensions(DENSE_URBAN)
    pitch = side + street
    xs = sorted({b.x_min for b in city.buildings})
    ys = sorted({b.y_min for b in city.buildings})
    assert xs[0] == pytest.approx(street / 2.0)
    assert ys[0] == pytest.approx(street / 2.0)
    assert xs[1] - xs[0] == pytest.approx(pitch)
    for b in city.buildings:
        assert b.width == pytest.approx(side)
        assert b.height > 0.0
        assert b.x_max <= city.extent_x + 1e-9
        assert b.y_max <= city.extent_y + 1e-9


def test_city_determinism():
    a = generate_city(DENSE_URBAN, seed=42)
    b = generate_city(DENSE_URBAN, seed=42)
    assert a.buildings == b.buildings
    c = generate_city(DENSE_URBAN, seed=43)
    assert [x.height for x in c.buildings] != [x.height for x in a.buildings]
    # footprints are deterministic regardless of the seed
    assert [(x.x_min, x.y_min) for x in c.buildings] == [
        (x.x_min, x.y_min) for x in a.buildings
    ]


def test_height_distribution_mean():
    heights = []
    for seed in range(90):
        heights.extend(b.height for b in generate_city(DENSE_URBAN, seed=seed).buildings)
    expected = 20.0 * math.sqrt(math.pi / 2.0)
    assert len(heights) > 1e5
    assert np.mean(heights) == pytest.approx(expected, rel=0.02)


@pytest.mark.parametrize(
    "alpha,beta,gamma",
    [(0.0, 300.0, 20.0), (1.0, 300.0, 20.0), (0.5, 0.0, 20.0), (0.5, 300.0, -1.0)],
)
def test_invalid_built_up_params(alpha, beta, gamma):
    with pytest.raises(InvalidParamsError):
        BuiltUpParams(alpha, beta, gamma)


def test_generate_city_rejects_bad_extent():
    with pytest.raises(InvalidParamsError):
        generate_city(DENSE_URBAN, extent_x=0.0)


def test_place_gbs_count_and_geometry():
    city = generate_city(DENSE_URBAN, seed=3)
    sites = place_gbs(city, density=6.0, h_ext=5.0, tx_power=30.0, seed=3)
    assert len(sites) == 24  # round(6 * 4 km^2)
    assert [s.id for s in sites] == list(range(24))
    assert len({s.host_building for s in sites}) == 24
    for s in sites:
        host = city.buildings[s.host_building]
        cx, cy = host.center()
        assert s.position[0] == pytest.approx(cx)
        assert s.position[1] == pytest.approx(cy)
        assert s.position[2] == pytest.approx(host.height + 5.0)
        assert s.tx_power == 30.0


def test_place_gbs_rounds_the_count():
    city = generate_city(DENSE_URBAN, seed=0)
    assert len(place_gbs(city, density=1.1, seed=0)) == 4  # round(4.4)
    assert len(place_gbs(city, density=2.2, seed=0)) == 9  # round(8.8)


def test_place_gbs_zero_density():
    city = generate_city(DENSE_URBAN, seed=0)
    assert place_gbs(city, density=0.0, seed=0) == []


def test_place_gbs_insufficient_rooftops():
    city = generate_city(DENSE_URBAN, seed=0)
    with pytest.raises(InsufficientRooftopsError):
        place_gbs(city, density=1000.0, seed=0)


def test_place_gbs_deterministic_substream():
    city = generate_city(DENSE_URBAN, seed=9)
    a = place_gbs(city, density=6.0, seed=9)
    b = place_gbs(city, density=6.0, seed=9)
    assert a == b
    # the mast height is not part of the random draw
    c = place_gbs(city, density=6.0, h_ext=10.0, seed=9)
    assert [s.host_building for s in c] == [s.host_building for s in a]
    assert all(s.position[2] == pytest.approx(t.position[2] + 5.0) for s, t in zip(c, a))


def test_place_gbs_rejects_negative_density():
    city = generate_city(DENSE_URBAN, seed=0)
    with pytest.raises(InvalidParamsError):
        place_gbs(city, density=-1.0, seed=0)


def test_city_to_dict_is_json_ready():
    city = generate_city(SUBURBAN, 500.0, 500.0, seed=7)
    blob = json.dumps(city.to_dict())
    data = json.loads(blob)
    assert data["extent_x"] == 500.0
    assert data["seed"] == 7
    assert data["params"] == {"alpha": 0.1, "beta": 750.0, "gamma": 8.0}
    assert len(data["buildings"]) == len(city.buildings)
    assert set(data["buildings"][0]) == {"x_min", "y_min", "width", "height"}
