import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from zonepart.errors import ParameterError
from zonepart.metrics import (
    CASE1_WEIGHTS, CASE2_WEIGHTS, ArchitectureResult, MetricWeights, Triple, calibration_holds, fpm, odm,
    performance_index, rank_partitions, read_raw_table, score, wpm,
)

DATA = Path(__file__).parent / "data"


def test_pi_examples():
    assert performance_index(0, 0, 0) == 1.0
    assert performance_index(58.9649, 0, 0, CASE1_WEIGHTS) == pytest.approx(math.exp(-0.589649), rel=1e-15)
    # the quoted value 0.55455 is a loose rounding of exp(-0.589649) = 0.554522
    assert performance_index(58.9649, 0, 0, CASE1_WEIGHTS) == pytest.approx(0.55455, abs=5e-5)
    assert performance_index(58.7341, 0.1608, 2.0582, CASE1_WEIGHTS) == pytest.approx(0.23832, abs=5e-5)


def test_pi_rejects_negative():
    with pytest.raises(ParameterError):
        performance_index(-1, 0, 0)


def test_weights_validation():
    with pytest.raises(ParameterError):
        MetricWeights(u_nr=0)
    with pytest.raises(ParameterError):
        MetricWeights(alpha=1.5)


@given(st.floats(0, 1e3), st.floats(0, 5), st.floats(0, 10), st.floats(1e-3, 10))
def test_pi_strictly_decreasing(u, a, m, d):
    w = MetricWeights()
    base = performance_index(u, a, m, w)
    if base > 1e-300:
        assert performance_index(u + d, a, m, w) < base
        assert performance_index(u, a + d, m, w) < base
        assert performance_index(u, a, m + d, w) < base


def test_odm_fpm_wpm_examples():
    p1 = performance_index(58.9649, 0, 0)
    assert odm(p1, p1) == 0.0
    assert fpm(p1, p1) == 0.0
    assert fpm(p1, performance_index(58.7341, 0.1608, 2.0582)) == pytest.approx(57.026, abs=5e-3)
    assert wpm(0.0, 57.026, 0.5) == pytest.approx(71.487)
    assert wpm(12.0, 80.0, 1.0) == 88.0
    q1 = performance_index(795.5808, 0, 0, CASE2_WEIGHTS)
    f = fpm(q1, performance_index(823.3647, 0.1104, 3.1123, CASE2_WEIGHTS))
    assert f == pytest.approx(50.6112, abs=5e-3)
    assert wpm(0.0, f, 0.5) == pytest.approx(74.6944, abs=5e-3)


def test_odm_row_2a():
    p1 = performance_index(58.9649, 0, 0)
    assert odm(p1, performance_index(58.1501, 0.0084, 0.0525)) == pytest.approx(1.762, abs=5e-3)


@given(st.floats(1e-6, 1), st.floats(1e-6, 1))
def test_bounds(pi_ref, pi_other):
    assert odm(pi_ref, pi_other) < 100 and fpm(pi_ref, pi_other) < 100


def _row(label, n, wpm_value):
    r = ArchitectureResult(label, n, Triple(0, 0, 0), Triple(0, 0, 0))
    r.wpm = wpm_value
    return r


def test_ranking_ties_prefer_fewer_clusters():
    rows = [_row("b", 3, 70.0), _row("a", 2, 70.0), _row("c", 1, 60.0)]
    assert [r.label for r in rank_partitions(rows)] == ["a", "b", "c"]
    assert rank_partitions([rows[2]]) == [rows[2]]


def test_table1_ranking():
    rows, _ = read_raw_table(DATA / "table1.csv")
    score(rows, CASE1_WEIGHTS)
    assert rank_partitions(rows)[0].label == "{1,3,4,5},{2}"
    assert rows[0].odm == 0.0


def test_table2_ranking():
    rows, _ = read_raw_table(DATA / "table2.csv")
    score(rows, CASE2_WEIGHTS)
    order = [r.label for r in rank_partitions(rows)]
    assert order.index("1*") < order.index("11*")


def test_calibration_on_published_tables():
    for name, w in (("table1.csv", CASE1_WEIGHTS), ("table2.csv", CASE2_WEIGHTS)):
        rows, _ = read_raw_table(DATA / name)
        assert calibration_holds(rows, w)


def test_table1_extra_scenario_columns():
    rows, printed = read_raw_table(DATA / "table1.csv")
    assert len(rows) == 16 and len(printed) == 16
    assert rows[0].scenarios["uncontrolled_5"] == Triple(49.0952, 0.0, 0.0)


def test_table_missing_columns(tmp_path):
    (tmp_path / "t.csv").write_text("n,partition,u_tot_kWh\n1,a,3\n")
    with pytest.raises(ParameterError, match="missing columns"):
        read_raw_table(tmp_path / "t.csv")


def test_score_needs_reference():
    with pytest.raises(ParameterError):
        score([_row("a", 2, 0.0)], CASE1_WEIGHTS)


def test_rounding_reachability_table1():
    """Printed metrics lie within what the 4-decimal raw columns allow.

    Each raw value is perturbed by up to half a unit in its last printed
    digit; the published metric must fall inside the attainable range.
    """
    rows, printed = read_raw_table(DATA / "table1.csv")
    h = 0.5e-4
    w = CASE1_WEIGHTS

    def pi_range(t: Triple):
        hi = performance_index(max(t.u_tot - h, 0), max(t.yv_ave - h, 0), max(t.yv_max - h, 0), w)
        lo = performance_index(t.u_tot + h, t.yv_ave + h, t.yv_max + h, w)
        return lo, hi

    ref_lo, ref_hi = pi_range(rows[0].nofault)
    for r in rows:
        p_odm, p_fpm, _ = printed[r.label]
        for triple, value in ((r.nofault, p_odm), (r.fault, p_fpm)):
            lo, hi = pi_range(triple)
            if r is rows[0] and triple is r.nofault:
                continue
            lowest = min(100 * (a - b) / a for a in (ref_lo, ref_hi) for b in (lo, hi))
            highest = max(100 * (a - b) / a for a in (ref_lo, ref_hi) for b in (lo, hi))
            assert lowest - 5e-4 <= value <= highest + 5e-4, (r.label, value, lowest, highest)
