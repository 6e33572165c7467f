import json

import pytest

from zonepart import cli
from zonepart.interaction import InteractionGraph, InteractionInterval
from zonepart.partition import Partition

from conftest import CASE1_INTERVALS, CASE1_MIDPOINTS


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("model")
    assert cli.main(["model", "--out", str(d), "--seed", "2023"]) == 0
    return d


@pytest.fixture
def mid_graph_file(tmp_path):
    p = tmp_path / "mid.json"
    InteractionGraph.from_weights((1, 2, 3, 4, 5), CASE1_MIDPOINTS).save(p)
    return p


def test_model_files(files):
    assert (files / "building.json").is_file()
    head = (files / "weather.csv").read_text().splitlines()[:2]
    assert head[0] == "# seed 2023" and head[1].startswith("timestamp,ambient_C,solar_Wm2_")


def test_quantify_deterministic(files, tmp_path, capsys):
    args = ["quantify", "--building", str(files / "building.json"), "--weather", str(files / "weather.csv"), "--seed", "4"]
    assert cli.main(args + ["--out", str(tmp_path / "a.json")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b.json")]) == 0
    a, b = (tmp_path / "a.json").read_bytes(), (tmp_path / "b.json").read_bytes()
    assert a == b
    g = InteractionGraph.load(tmp_path / "a.json")
    assert g.edges == [(1, 5), (2, 4), (3, 5), (4, 5)] and g.meta["seed"] == 4


def test_quantify_missing_column(files, tmp_path, capsys):
    lines = (files / "weather.csv").read_text().splitlines()
    header = lines[1].split(",")
    drop = header.index("gain_W_3")
    cut = [",".join(v for k, v in enumerate(l.split(",")) if k != drop) for l in lines[1:200]]
    (tmp_path / "w.csv").write_text("\n".join(cut) + "\n")
    rc = cli.main(["quantify", "--building", str(files / "building.json"), "--weather", str(tmp_path / "w.csv")])
    assert rc == cli.EXIT_CONFIG
    assert "gain_W_3" in capsys.readouterr().err


def test_partition_all_n(mid_graph_file, tmp_path):
    out = tmp_path / "parts"
    assert cli.main(["partition", "--graph", str(mid_graph_file), "--all-n", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.glob("partition_n*.txt")) == [f"partition_n{n}.txt" for n in range(1, 6)]
    assert Partition.load(out / "partition_n2.txt") == Partition.from_clusters([[2], [1, 3, 4, 5]])
    text = (out / "partition_n2.txt").read_text()
    assert text.startswith("# zonepart") and "seed" in text.splitlines()[0]
    summary = json.loads((out / "partition_summary.json").read_text())
    assert summary["results"][0]["objective"] == 0.0


def test_partition_robust_zero_width_matches_stochastic(mid_graph_file, tmp_path):
    for mode in ("stochastic", "robust"):
        assert cli.main(["partition", "--graph", str(mid_graph_file), "--n", "3", "--mode", mode,
                         "--out", str(tmp_path / mode)]) == 0
    objs = [json.loads((tmp_path / m / "partition_summary.json").read_text())["results"][0]["objective"]
            for m in ("stochastic", "robust")]
    assert objs[0] == pytest.approx(objs[1], abs=1e-12)
    assert (tmp_path / "stochastic" / "partition_n3.txt").read_text().splitlines()[2:] == \
        (tmp_path / "robust" / "partition_n3.txt").read_text().splitlines()[2:]


def test_partition_config_errors(mid_graph_file, tmp_path):
    assert cli.main(["partition", "--graph", str(mid_graph_file), "--n", "9"]) == cli.EXIT_CONFIG
    assert cli.main(["partition", "--graph", str(mid_graph_file)]) == cli.EXIT_CONFIG
    assert cli.main(["partition", "--graph", str(tmp_path / "none.json"), "--n", "2"]) == cli.EXIT_CONFIG
    g = InteractionGraph((1, 2, 3, 4, 5), {e: InteractionInterval(*v) for e, v in CASE1_INTERVALS.items()})
    g.save(tmp_path / "nodist.json")
    assert cli.main(["partition", "--graph", str(tmp_path / "nodist.json"), "--n", "2"]) == cli.EXIT_CONFIG
    assert cli.main(["partition", "--graph", str(tmp_path / "nodist.json"), "--n", "2", "--mode", "robust",
                     "--out", str(tmp_path / "r")]) == 0


def test_partition_node_limit(tmp_path):
    import numpy as np

    from conftest import random_interval_graph

    rng = np.random.default_rng(2)
    g = random_interval_graph(rng)
    while len(g.vertices) < 6:
        g = random_interval_graph(rng)
    g.save(tmp_path / "g.json")
    rc = cli.main(["partition", "--graph", str(tmp_path / "g.json"), "--n", "3", "--node-limit", "1",
                   "--out", str(tmp_path / "o")])
    assert rc == cli.EXIT_LIMIT


def test_infeasible_exit_code(monkeypatch):
    from zonepart.errors import ModelInfeasibleError

    def boom(args):
        raise ModelInfeasibleError("no room")

    monkeypatch.setattr(cli, "cmd_report", boom)
    assert cli.main(["report", "x.json"]) == cli.EXIT_INFEASIBLE


def test_replay_metrics(tmp_path, capsys):
    from pathlib import Path

    table = Path(__file__).parent / "data" / "table2.csv"
    assert cli.main(["replay-metrics", str(table), "--weights", "case2", "--out", str(tmp_path / "m.csv")]) == 0
    out = capsys.readouterr().out
    assert "max deviation" in out
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0].startswith("# zonepart") and len(lines) == 22


def test_weights_file(tmp_path):
    from pathlib import Path

    (tmp_path / "w.json").write_text(json.dumps({"u_nr": 100.0, "ave_nr": 1.0, "max_nr": 3.0}))
    table = Path(__file__).parent / "data" / "table1.csv"
    assert cli.main(["replay-metrics", str(table), "--weights", str(tmp_path / "w.json"), "--alpha", "1"]) == 0
    (tmp_path / "bad.json").write_text(json.dumps({"nonsense": 1}))
    assert cli.main(["replay-metrics", str(table), "--weights", str(tmp_path / "bad.json")]) == cli.EXIT_CONFIG


def test_evaluate_and_report(files, tmp_path, capsys):
    Partition.from_clusters([[1, 2, 3, 4, 5]]).save(tmp_path / "p1.txt")
    rc = cli.main(["evaluate", str(tmp_path / "p1.txt"), "--building", str(files / "building.json"),
                   "--weather", str(files / "weather.csv"), "--fault", "actuator", "--single-thread",
                   "--out", str(tmp_path / "ev")])
    assert rc == 0
    data = json.loads((tmp_path / "ev" / "report.json").read_text())
    assert len(data["rows"]) == 1 and data["rows"][0]["ODM_pct"] == 0.0
    assert data["meta"]["seed"] == cli.DEFAULT_SEED
    assert cli.main(["report", str(tmp_path / "ev" / "report.json")]) == 0
    assert "{1,2,3,4,5}" in capsys.readouterr().out


def test_evaluate_bad_day(files, tmp_path):
    rc = cli.main(["evaluate", "--building", str(files / "building.json"), "--weather", str(files / "weather.csv"),
                   "--day", "2023-12-31T12:00", "--out", str(tmp_path)])
    assert rc == cli.EXIT_CONFIG
