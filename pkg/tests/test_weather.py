import numpy as np
import pytest

from zonepart.errors import DisturbanceError
from zonepart.weather import DisturbanceSeries, office_occupancy, read_csv, synthetic_year, write_csv


def small(n=8):
    t = np.datetime64("2023-03-01T00:00", "m") + np.arange(n) * np.timedelta64(15, "m")
    return DisturbanceSeries(t, np.linspace(0, 7, n), {"south": np.full(n, 100.0)}, {1: np.zeros(n), 2: np.ones(n)})


def test_csv_round_trip(tmp_path):
    s = small()
    write_csv(s, tmp_path / "w.csv", comment="seed 5")
    text = (tmp_path / "w.csv").read_text().splitlines()
    assert text[0] == "# seed 5"
    assert text[1] == "timestamp,ambient_C,solar_Wm2_south,gain_W_1,gain_W_2"
    back = read_csv(tmp_path / "w.csv")
    assert np.array_equal(back.timestamps, s.timestamps) and np.array_equal(back.ambient, s.ambient)
    assert np.array_equal(back.gains[2], s.gains[2])


def test_missing_column_is_named(building, tmp_path):
    s = small()
    with pytest.raises(DisturbanceError, match="solar_Wm2_"):
        s.matrix(building)


def test_gap_rejected():
    s = small()
    t = s.timestamps.copy()
    t[3:] += np.timedelta64(15, "m")
    with pytest.raises(DisturbanceError):
        DisturbanceSeries(t, s.ambient, s.solar, s.gains)


def test_negative_values_rejected():
    s = small()
    with pytest.raises(DisturbanceError):
        DisturbanceSeries(s.timestamps, s.ambient, {"south": -s.solar["south"]}, s.gains)


def test_occupancy_weekdays():
    t = np.datetime64("2023-01-14T00:00", "m") + np.arange(96 * 3) * np.timedelta64(15, "m")  # Sat..Mon
    occ = office_occupancy(t)
    assert not occ[: 2 * 96].any()
    assert occ[2 * 96 + 32] and not occ[2 * 96 + 31] and not occ[2 * 96 + 72]


def test_synthetic_year(weather, building):
    assert len(weather) == 365 * 96
    W = weather.matrix(building)
    assert W.shape == (365 * 96, len(building.disturbance_labels))
    amb = weather.ambient
    jan, jul = amb[: 31 * 96].mean(), amb[181 * 96: 212 * 96].mean()
    assert jul > jan + 10
    assert all(np.all(v >= 0) for v in weather.solar.values())


def test_synthetic_year_deterministic():
    a = synthetic_year(("south",), {1: 100.0}, seed=3)
    b = synthetic_year(("south",), {1: 100.0}, seed=3)
    assert np.array_equal(a.ambient, b.ambient) and np.array_equal(a.solar["south"], b.solar["south"])


def test_index_of(weather):
    assert weather.index_of("2023-01-01T01:00") == 4
    with pytest.raises(DisturbanceError):
        weather.index_of("2023-01-01T01:07")
