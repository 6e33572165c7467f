import json

import numpy as np
import pytest

from zonepart.errors import ParameterError
from zonepart.interaction import ComfortSchedule
from zonepart.metrics import CASE1_WEIGHTS
from zonepart.mpc import (
    ACTUATOR_STUCK, SENSOR_GAIN, UNCONTROLLED, FaultScenario, MpcConfig, SingleFault, aggregate, build_cluster_models,
    evaluate, run_mpc,
)
from zonepart.metrics import Triple
from zonepart.partition import Partition
from zonepart.thermal import build_model

CENTRAL = Partition.from_clusters([[1, 2, 3, 4, 5]])
BEST = Partition.from_clusters([[1, 3, 4, 5], [2]])
SINGLES = Partition.from_clusters([[z] for z in range(1, 6)])


@pytest.fixture(scope="module")
def central_run(building, day):
    w, sch = day
    return run_mpc(building, "centralized", w, sch)


def test_single_cluster_is_centralized(building, day, central_run):
    w, sch = day
    d = run_mpc(building, CENTRAL, w, sch)
    assert np.array_equal(d.u, central_run.u) and np.array_equal(d.temperatures, central_run.temperatures)
    assert d.triple == central_run.triple


def test_centralized_keeps_band(central_run, day):
    _, sch = day
    assert central_run.triple.yv_ave == 0.0 and central_run.triple.yv_max == 0.0
    assert central_run.triple.u_tot > 0
    t = central_run.temperatures[1:97][sch.occupied[1:97]]
    assert np.all(t >= 22 - 1e-6) and np.all(t <= 24 + 1e-6)


def test_inputs_within_bounds(central_run, building):
    umax = np.array([z.u_max for z in building.zones])
    assert np.all(np.abs(central_run.u) <= umax + 1e-6)


def test_inactive_band_means_no_energy(building, day):
    w, _ = day
    wide = ComfortSchedule.constant(len(w), -100.0, 100.0)
    r = run_mpc(building, BEST, w, wide)
    assert r.triple == Triple(0.0, 0.0, 0.0)
    assert np.all(r.u == 0)


def test_uncontrolled_zone_raises_violation(building, day):
    w, sch = day
    for p in (BEST, SINGLES):
        nominal = run_mpc(building, p, w, sch).triple
        faulty = run_mpc(building, p, w, sch, SingleFault(UNCONTROLLED, 5)).triple
        assert faulty.yv_ave > nominal.yv_ave


def test_actuator_stuck_applies_zero(building, day):
    w, sch = day
    r = run_mpc(building, SINGLES, w, sch, SingleFault(ACTUATOR_STUCK, 3))
    assert np.all(r.u[:, 2] == 0)


def test_sensor_fault_degrades_centralized(building, day, central_run):
    w, sch = day
    r = run_mpc(building, "centralized", w, sch, SingleFault(SENSOR_GAIN, 1, 1.1))
    assert r.triple.yv_ave > central_run.triple.yv_ave


def test_argument_errors(building, day):
    w, sch = day
    with pytest.raises(ParameterError, match="cover"):
        run_mpc(building, CENTRAL, w[:100], sch.window(0, 100))
    with pytest.raises(ParameterError):
        run_mpc(building, "ring", w, sch)
    with pytest.raises(ParameterError):
        run_mpc(building, CENTRAL, w, sch, SingleFault(SENSOR_GAIN, 9, 1.1))
    with pytest.raises(ParameterError):
        FaultScenario("melted")
    with pytest.raises(ParameterError):
        FaultScenario(SENSOR_GAIN, (1,), gains=(0.8,))
    with pytest.raises(ParameterError):
        MpcConfig(horizon=0)


def test_scenario_expansion():
    sc = FaultScenario(SENSOR_GAIN, (1, 2))
    assert len(sc.single_faults()) == 4
    assert FaultScenario().single_faults() == [SingleFault()]
    assert aggregate([Triple(1, 2, 3), Triple(3, 2, 1)]) == Triple(2, 2, 2)
    assert aggregate([Triple(1, 2, 3), Triple(3, 2, 1)], "max") == Triple(3, 2, 3)


def test_cluster_models(building):
    models = build_cluster_models(building, BEST)
    assert [m.output_zones for m in models] == [(1, 3, 4, 5), (2,)]
    assert all(m.disturbance_labels[-1] == "boundary_C" for m in models)
    full = build_model(building)
    one = build_cluster_models(building, CENTRAL)[0]
    assert np.array_equal(one.A, full.A)
    with pytest.raises(ParameterError):
        build_cluster_models(building, Partition.from_clusters([[1, 2]]))


def test_evaluate_report(building, day, tmp_path):
    w, sch = day
    steps = 40
    rep = evaluate(building, [BEST, SINGLES], w[: steps + 24], sch.window(0, steps + 24),
                   FaultScenario(SENSOR_GAIN, (2,)), CASE1_WEIGHTS,
                   extra={"uncontrolled_5": FaultScenario(UNCONTROLLED, (5,))}, steps=steps)
    assert [r.label for r in rep.rows] == [str(CENTRAL), str(BEST), str(SINGLES)]
    assert rep.rows[0].odm == 0.0
    assert all(r.wpm <= 100 for r in rep.rows)
    rep.save_json(tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["ranking"][0] in {r.label for r in rep.rows}
    csv = rep.to_csv().splitlines()
    assert csv[0].startswith("n,partition,u_tot_kWh") and "uncontrolled_5_yv_ave_C" in csv[0]
    assert len(csv) == 4
