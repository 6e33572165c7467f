"""Bundled synthetic 5-zone office building and its weather year.

Layout: a central hall (Z5) opens onto offices Z1, Z3 and Z4; Z2 sits behind
Z4 and shares a massive interior wall with it.  The Z4-Z5 opening has a
per-area resistance of 0.1 m2K/W; the Z1-Z5 and Z3-Z5 openings use the same
value scaled by the volume ratios V1/V4 and V5/V4.
"""
from __future__ import annotations

import numpy as np

from .thermal import BuildingDescription, Opening, SolarGain, Wall, Zone
from .weather import DisturbanceSeries, synthetic_year

RHO_CP_AIR = 1.2 * 1005.0  # J/(m3 K)
FURNITURE = 4.0  # effective air-node capacity multiplier
OPENING_R = 0.1  # m2K/W

# id, volume m3, facade m2, window m2, facade orientation, actuator W
_ZONES = [
    (1, 180.0, 30.0, 10.0, "south", 8000.0),
    (2, 120.0, 24.0, 6.0, "north", 6000.0),
    (3, 150.0, 27.0, 8.0, "east", 8000.0),
    (4, 150.0, 27.0, 8.0, "west", 8000.0),
    (5, 300.0, 100.0, 0.0, "roof", 12000.0),
]
OPENING_AREA = {(1, 5): 3.0, (3, 5): 3.0, (4, 5): 4.0}
GAIN_W_PER_M3 = 5.0


def _exterior_wall(name, zone, area, surface, u_value=0.5, heat_capacity=3.0e5):
    rt = 1.0 / (u_value * area)
    c = heat_capacity * area
    return Wall(name, zone, None, 0.2 * rt, 0.6 * rt, 0.2 * rt, 0.5 * c, 0.5 * c,
                solar_surface=surface, solar_area=0.05 * area)


def reference_building() -> BuildingDescription:
    zones, walls, solar = [], [], []
    vol = {zid: v for zid, v, *_ in _ZONES}
    for zid, v, facade, window, surface, umax in _ZONES:
        infiltration = 0.34 * 0.5 * v + 1.4 * window  # W/K: 0.5 ach + glazing
        zones.append(Zone(zid, RHO_CP_AIR * v * FURNITURE, v, -umax, umax, 1.0 / infiltration))
        walls.append(_exterior_wall(f"ext{zid}", zid, facade, surface))
        if window:
            solar.append(SolarGain(zid, surface, 0.5 * window))
    # lightweight insulated partition: the weakly coupled pair
    rt = 1.0 / (0.25 * 10.0)
    walls.append(Wall("int24", 2, 4, 0.25 * rt, 0.5 * rt, 0.25 * rt, 1.0e5, 1.0e5))
    scale = {(1, 5): vol[1] / vol[4], (3, 5): vol[5] / vol[4], (4, 5): 1.0}
    openings = [Opening(a, b, OPENING_R, OPENING_AREA[(a, b)], scale[(a, b)]) for a, b in OPENING_AREA]
    return BuildingDescription(tuple(zones), tuple(walls), tuple(openings), tuple(solar))


def reference_gain_peaks() -> dict[int, float]:
    return {zid: GAIN_W_PER_M3 * v for zid, v, *_ in _ZONES}


def reference_weather(seed: int = 2023) -> DisturbanceSeries:
    b = reference_building()
    return synthetic_year(b.surfaces, reference_gain_peaks(), year=2023, seed=seed)


# A mid-January Wednesday: heating-dominated, occupied 8:00-18:00.
REFERENCE_DAY = np.datetime64("2023-01-18T00:00", "m")
