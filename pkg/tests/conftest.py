import numpy as np
import pytest
from hypothesis import settings

from zonepart.interaction import ComfortSchedule, InteractionGraph, InteractionInterval, build_graph, generate_excitation
from zonepart.reference import REFERENCE_DAY, reference_building, reference_weather

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# Published interaction intervals of the five-zone case study, degC.
CASE1_INTERVALS = {(1, 5): (0.0134, 2.026), (2, 4): (0.0013, 0.136), (3, 5): (0.0148, 2.36), (4, 5): (0.0171, 1.79)}
CASE1_MIDPOINTS = {(1, 5): 1.0197, (2, 4): 0.0687, (3, 5): 1.1874, (4, 5): 0.9036}


@pytest.fixture(scope="session")
def case1_graph():
    return InteractionGraph((1, 2, 3, 4, 5), {e: InteractionInterval(*iv) for e, iv in CASE1_INTERVALS.items()})


@pytest.fixture(scope="session")
def case1_mid_graph():
    return InteractionGraph.from_weights((1, 2, 3, 4, 5), CASE1_MIDPOINTS)


@pytest.fixture(scope="session")
def building():
    return reference_building()


@pytest.fixture(scope="session")
def weather():
    return reference_weather()


@pytest.fixture(scope="session")
def year_schedule(weather):
    return ComfortSchedule.office(weather.timestamps)


@pytest.fixture(scope="session")
def excitation(building, weather, year_schedule):
    return generate_excitation(building, weather, year_schedule, seed=7)


@pytest.fixture(scope="session")
def reference_graph(building, excitation):
    return build_graph(building, excitation)


@pytest.fixture(scope="session")
def day(building, weather):
    """Disturbances and office schedule for the evaluated day plus a 6 h preview."""
    i = weather.index_of(REFERENCE_DAY)
    w = weather.window(i, i + 96 + 24)
    return w.matrix(building), ComfortSchedule.office(w.timestamps)


def random_interval_graph(rng, max_zones=7, extra_edge_p=0.3):
    """Random connected graph (random tree plus extra edges) with interval
    weights and an empirical distribution inside every interval."""
    import networkx as nx

    from zonepart.interaction import estimate_distribution

    nz = int(rng.integers(2, max_zones + 1))
    g = nx.random_labeled_tree(nz, seed=int(rng.integers(1 << 30)))
    for i in range(nz):
        for j in range(i + 1, nz):
            if not g.has_edge(i, j) and rng.random() < extra_edge_p:
                g.add_edge(i, j)
    intervals, dists = {}, {}
    for i, j in g.edges:
        lo, hi = np.sort(rng.uniform(0, 3, 2))
        intervals[(i + 1, j + 1)] = InteractionInterval(float(lo), float(hi))
        samples = rng.uniform(lo, hi, 200)
        samples[[0, 1]] = lo, hi
        dists[(i + 1, j + 1)] = estimate_distribution(samples, int(rng.integers(1, 11)))
    return InteractionGraph(tuple(range(1, nz + 1)), intervals, dists)


# One summary line per acceptance criterion, filled by test_acceptance.py.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
