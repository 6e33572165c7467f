"""Disturbance series on a 15-minute grid, CSV I/O and a synthetic weather year."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DisturbanceError
from .thermal import BuildingDescription

STEP = np.timedelta64(15, "m")


@dataclass(frozen=True, eq=False)
class DisturbanceSeries:
    timestamps: np.ndarray  # datetime64[m]
    ambient: np.ndarray  # degC
    solar: dict[str, np.ndarray]  # W/m2 per surface
    gains: dict[int, np.ndarray]  # W per zone

    def __post_init__(self):
        n = len(self.timestamps)
        if len(self.ambient) != n:
            raise DisturbanceError("ambient length differs from timestamps")
        for name, arr in list(self.solar.items()) + list(self.gains.items()):
            if len(arr) != n:
                raise DisturbanceError(f"series {name} length differs from timestamps")
        if n > 1 and np.any(np.diff(self.timestamps) != STEP):
            raise DisturbanceError("timestamps must be uniformly spaced at 15 minutes")
        for name, arr in self.solar.items():
            if np.any(arr < 0):
                raise DisturbanceError(f"solar_Wm2_{name} has negative values")
        for zid, arr in self.gains.items():
            if np.any(arr < 0):
                raise DisturbanceError(f"gain_W_{zid} has negative values")

    def __len__(self):
        return len(self.timestamps)

    def matrix(self, building: BuildingDescription) -> np.ndarray:
        """Columns ordered as ``building.disturbance_labels``."""
        cols = [self.ambient]
        for s in building.surfaces:
            if s not in self.solar:
                raise DisturbanceError(f"missing disturbance column solar_Wm2_{s}")
            cols.append(self.solar[s])
        for z in building.zone_ids:
            if z not in self.gains:
                raise DisturbanceError(f"missing disturbance column gain_W_{z}")
            cols.append(self.gains[z])
        return np.column_stack(cols).astype(float)

    def window(self, start: int, stop: int) -> "DisturbanceSeries":
        return DisturbanceSeries(
            self.timestamps[start:stop],
            self.ambient[start:stop],
            {k: v[start:stop] for k, v in self.solar.items()},
            {k: v[start:stop] for k, v in self.gains.items()},
        )

    def index_of(self, when) -> int:
        t = np.datetime64(when, "m")
        idx = int((t - self.timestamps[0]) // STEP)
        if not 0 <= idx < len(self) or self.timestamps[idx] != t:
            raise DisturbanceError(f"timestamp {when} not on the series grid")
        return idx


def write_csv(series: DisturbanceSeries, path, comment: str | None = None) -> None:
    """Write the series; ``comment`` becomes a leading ``#`` line."""
    surfaces = sorted(series.solar)
    zones = sorted(series.gains)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        out = csv.writer(fh)
        out.writerow(
            ["timestamp", "ambient_C"]
            + [f"solar_Wm2_{s}" for s in surfaces]
            + [f"gain_W_{z}" for z in zones]
        )
        for k, t in enumerate(series.timestamps):
            out.writerow(
                [str(t.astype("datetime64[m]"))]
                + [repr(float(series.ambient[k]))]
                + [repr(float(series.solar[s][k])) for s in surfaces]
                + [repr(float(series.gains[z][k])) for z in zones]
            )


def read_csv(path) -> DisturbanceSeries:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        try:
            header = next(reader)
        except StopIteration:
            raise DisturbanceError(f"{path}: empty file") from None
        for required in ("timestamp", "ambient_C"):
            if required not in header:
                raise DisturbanceError(f"{path}: missing disturbance column {required}")
        rows = list(reader)
    data = {h: [] for h in header}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DisturbanceError(f"{path}:{lineno}: expected {len(header)} fields")
        for h, v in zip(header, row):
            data[h].append(v)
    try:
        stamps = np.array(data["timestamp"], dtype="datetime64[m]")
        numeric = {h: np.array(v, dtype=float) for h, v in data.items() if h != "timestamp"}
    except ValueError as exc:
        raise DisturbanceError(f"{path}: {exc}") from exc
    solar = {h[len("solar_Wm2_"):]: v for h, v in numeric.items() if h.startswith("solar_Wm2_")}
    gains = {int(h[len("gain_W_"):]): v for h, v in numeric.items() if h.startswith("gain_W_")}
    return DisturbanceSeries(stamps, numeric["ambient_C"], solar, gains)


def office_occupancy(timestamps: np.ndarray, start_hour: int = 8, end_hour: int = 18) -> np.ndarray:
    """Weekdays, ``start_hour`` <= hour < ``end_hour``."""
    ts = timestamps.astype("datetime64[m]")
    minutes = (ts - ts.astype("datetime64[D]")).astype(int)
    hour = minutes / 60.0
    weekday = (ts.astype("datetime64[D]").astype(int) + 3) % 7  # 0 = Monday
    return (weekday < 5) & (hour >= start_hour) & (hour < end_hour)


# Surface azimuths (deg from south, east negative) for the synthetic sky model.
_AZIMUTH = {"south": 0.0, "east": -90.0, "west": 90.0, "north": 180.0}


def synthetic_year(
    surfaces,
    gain_peaks: dict[int, float],
    year: int = 2023,
    seed: int = 0,
    latitude: float = 51.5,
) -> DisturbanceSeries:
    """Deterministic representative year for a temperate mid-latitude site.

    Ambient temperature is a seasonal plus diurnal cycle with AR(1) weather
    noise; solar irradiance follows a clear-sky geometry scaled by a daily
    cloudiness factor; internal gains follow the office occupancy pattern.
    """
    rng = np.random.default_rng(seed)
    start = np.datetime64(f"{year}-01-01T00:00", "m")
    stop = np.datetime64(f"{year + 1}-01-01T00:00", "m")
    ts = np.arange(start, stop, STEP)
    n = len(ts)
    t_hours = np.arange(n) * 0.25
    doy = t_hours / 24.0
    hour = t_hours % 24.0

    noise = np.empty(n)
    eps = rng.normal(0.0, 0.08, n)
    acc = 0.0
    for k in range(n):
        acc = 0.995 * acc + eps[k]
        noise[k] = acc
    ambient = 10.5 - 8.0 * np.cos(2 * np.pi * (doy - 20) / 365) + 4.0 * np.cos(2 * np.pi * (hour - 15) / 24) + noise

    decl = np.radians(23.45) * np.sin(2 * np.pi * (284 + doy) / 365)
    lat = np.radians(latitude)
    ha = np.radians(15.0 * (hour - 12.0))
    sin_el = np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(ha)
    el = np.arcsin(np.clip(sin_el, -1, 1))
    az = np.arctan2(np.sin(ha), np.cos(ha) * np.sin(lat) - np.tan(decl) * np.cos(lat))
    dni = np.where(sin_el > 0, 900.0 * np.exp(-0.14 / np.maximum(sin_el, 1e-3)), 0.0)
    days = int(np.ceil(n / 96))
    cloud = np.repeat(rng.uniform(0.2, 1.0, days), 96)[:n]
    solar = {}
    for s in surfaces:
        surf_az = np.radians(_AZIMUTH.get(s, 0.0))
        cos_inc = np.cos(el) * np.cos(az - surf_az)
        beam = dni * np.clip(cos_inc, 0, None)
        diffuse = np.where(sin_el > 0, 60.0 * sin_el, 0.0)
        solar[s] = np.clip(cloud * beam + diffuse, 0, None)

    occ = office_occupancy(ts)
    gains = {z: np.where(occ, peak, 0.0) for z, peak in gain_peaks.items()}
    return DisturbanceSeries(ts, ambient, solar, gains)
