"""Closed-loop excitation and interval-valued thermal interaction weights."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .errors import ParameterError, TopologyError
from .thermal import BuildingDescription, StateSpaceModel, build_model, decouple_zone, simulate
from .weather import DisturbanceSeries, office_occupancy

log = logging.getLogger(__name__)

DEFAULT_ND = 10
DWELL_STEPS = 8  # 2 h per random set-point level
PREHEAT_STEPS = 8  # controller switches on 2 h before occupancy
INITIAL_TEMP = 20.0


@dataclass(frozen=True, eq=False)
class ComfortSchedule:
    """Per-step comfort band; bounds are NaN where absent (unoccupied)."""

    lower: np.ndarray
    upper: np.ndarray
    occupied: np.ndarray

    def __post_init__(self):
        if not (len(self.lower) == len(self.upper) == len(self.occupied)):
            raise ParameterError("comfort schedule arrays differ in length")
        occ = self.occupied.astype(bool)
        if np.any(~(self.lower[occ] < self.upper[occ])):
            raise ParameterError("comfort band must satisfy lower < upper when occupied")

    def __len__(self):
        return len(self.lower)

    @classmethod
    def office(cls, timestamps, low: float = 22.0, high: float = 24.0, start_hour=8, end_hour=18):
        occ = office_occupancy(timestamps, start_hour, end_hour)
        return cls(np.where(occ, low, np.nan), np.where(occ, high, np.nan), occ)

    @classmethod
    def constant(cls, steps: int, low: float, high: float):
        return cls(np.full(steps, low, float), np.full(steps, high, float), np.ones(steps, bool))

    def window(self, start: int, stop: int) -> "ComfortSchedule":
        return ComfortSchedule(self.lower[start:stop], self.upper[start:stop], self.occupied[start:stop])


def widen_comfort(schedule: ComfortSchedule, margin: float = 1.0) -> ComfortSchedule:
    return ComfortSchedule(schedule.lower - margin, schedule.upper + margin, schedule.occupied.copy())


@dataclass(frozen=True, eq=False)
class ExcitationInput:
    u: np.ndarray  # (K, N_z) W
    w: np.ndarray  # (K, d)
    seed: int
    setpoints: np.ndarray  # (K, N_z), NaN where the controller is off
    temperatures: np.ndarray  # closed-loop zone temperatures, (K+1, N_z)
    warnings: tuple[str, ...] = ()


def _first_order_fit(model: StateSpaceModel, j: int) -> tuple[float, float]:
    """Gain (K/W) and time constant (s) of zone j's own step response,
    fitted to its first two samples (the fast air-node mode)."""
    m = model.Bu.shape[1]
    u = np.zeros(m)
    u[j] = 1.0
    tr = simulate(model, np.tile(u, (2, 1)), np.zeros((2, model.Bw.shape[1])), np.zeros(model.n_states))
    y1, y2 = tr.outputs[1, j], tr.outputs[2, j]
    a = min(max(y2 / y1 - 1.0, 1e-6), 1 - 1e-6)
    return float(y1 / (1.0 - a)), float(-model.dt / np.log(a))


def pi_gains(model: StateSpaceModel) -> list[tuple[float, float]]:
    """Per-zone (Kp, Ti) by lambda tuning of the first-order fit.

    Closed-loop time constant is half a sampling period, with another half
    period of dead time for the hold; Ti is three fitted time constants.
    """
    lam = 0.5 * model.dt
    gains = []
    for j in range(len(model.input_zones)):
        k, tau = _first_order_fit(model, j)
        gains.append((tau / (k * (lam + 0.5 * model.dt)), 3.0 * tau))
    return gains


def _active_band(schedule: ComfortSchedule, preheat: int):
    """Band to track at each step, back-filled ``preheat`` steps before occupancy."""
    occ = schedule.occupied.astype(bool)
    lo = np.where(occ, schedule.lower, np.nan)
    hi = np.where(occ, schedule.upper, np.nan)
    active = occ.copy()
    n = len(occ)
    for k in np.nonzero(occ[1:] & ~occ[:-1])[0] + 1:
        for s in range(max(0, k - preheat), k):
            if not occ[s]:
                active[s] = True
                lo[s], hi[s] = lo[k], hi[k]
    if n and occ[0]:
        active[0] = True
    return active, lo, hi


def generate_excitation(
    building: BuildingDescription,
    w,
    schedule: ComfortSchedule,
    seed: int,
    model: StateSpaceModel | None = None,
    dwell_steps: int = DWELL_STEPS,
    preheat_steps: int = PREHEAT_STEPS,
) -> ExcitationInput:
    """Random set-points inside the widened band, tracked by per-zone PI loops."""
    model = model or build_model(building)
    W = w.matrix(building) if isinstance(w, DisturbanceSeries) else np.asarray(w, float)
    K = W.shape[0]
    if len(schedule) != K:
        raise ParameterError(f"schedule has {len(schedule)} steps, disturbances {K}")
    wide = widen_comfort(schedule)
    active, lo, hi = _active_band(wide, preheat_steps)
    nz = len(building.zones)
    rng = np.random.default_rng(seed)
    blocks = -(-K // dwell_steps)
    frac = np.repeat(rng.uniform(0.0, 1.0, (blocks, nz)), dwell_steps, axis=0)[:K]
    sp = lo[:, None] + frac * (hi - lo)[:, None]
    sp[~active] = np.nan

    umin = np.array([z.u_min for z in building.zones])
    umax = np.array([z.u_max for z in building.zones])
    warnings = []
    if np.all(umin == 0) and np.all(umax == 0):
        warnings.append("all actuators have zero capacity; excitation input is identically zero")

    gains = pi_gains(model)
    kp = np.array([g[0] for g in gains])
    ki = np.array([model.dt / g[1] for g in gains]) * kp
    integ = np.zeros(nz)
    forcing_w = W @ model.Bw.T
    U = np.zeros((K, nz))
    X = np.empty((K + 1, model.n_states))
    X[0] = INITIAL_TEMP
    x = X[0].copy()
    A, Bu, C = model.A, model.Bu, model.C
    for k in range(K):
        t = C @ x
        if active[k]:
            e = sp[k] - t
            # proportional action on the measurement only (no set-point kick)
            raw = -kp * t + integ
            uk = np.clip(raw, umin, umax)
            # conditional integration: freeze the integrator while saturated
            # in the direction of the error
            free = (raw == uk) | (np.sign(e) != np.sign(raw - uk))
            integ = integ + np.where(free, ki * e, 0.0)
            U[k] = uk
        x = A @ x + Bu @ U[k] + forcing_w[k]
        X[k + 1] = x
    T = X @ C.T

    occ = schedule.occupied.astype(bool)
    if occ.any():
        inside = (T[1:][occ] >= wide.lower[occ, None] - 1e-9) & (T[1:][occ] <= wide.upper[occ, None] + 1e-9)
        share = inside.mean()
        if share < 0.95:
            warnings.append(f"tracking kept only {share:.1%} of occupied zone-steps inside the widened band")
    for msg in warnings:
        log.warning(msg)
    return ExcitationInput(U, W, seed, sp, T, tuple(warnings))


@dataclass(frozen=True)
class InteractionInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if self.upper < self.lower:
            raise ParameterError(f"degenerate interval [{self.lower}, {self.upper}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def margin(self) -> float:
        return self.upper - self.mid


@dataclass(frozen=True, eq=False)
class InteractionDistribution:
    midpoints: np.ndarray
    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(self.probabilities, self.midpoints))

    @classmethod
    def point_mass(cls, value: float) -> "InteractionDistribution":
        return cls(np.array([float(value)]), np.array([1.0]))


def estimate_distribution(samples, n_d: int = DEFAULT_ND) -> InteractionDistribution:
    """Equal-width histogram over [min, max]; bin means with bin frequencies."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ParameterError("no samples")
    if n_d < 1:
        raise ParameterError("n_d must be >= 1")
    lo, hi = x.min(), x.max()
    width = (hi - lo) / n_d
    edges = lo + width * np.arange(n_d + 1)
    if width > 0:
        idx = np.minimum(((x - lo) / width).astype(int), n_d - 1)
    else:
        idx = np.zeros(x.size, int)
    counts = np.bincount(idx, minlength=n_d)
    sums = np.bincount(idx, weights=x, minlength=n_d)
    centers = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(invalid="ignore", divide="ignore"):
        mids = np.where(counts > 0, sums / np.maximum(counts, 1), centers)
    # bin means can drift outside [lo, hi] by rounding only
    mids = np.clip(mids, lo, hi)
    return InteractionDistribution(mids, counts / x.size)


def _directed_deviation(full_trace, dec_trace, zone: int) -> np.ndarray:
    return np.abs(full_trace.zone(zone)[1:] - dec_trace.zone(zone)[1:])


class _Quantifier:
    """Caches the coupled and single-zone-decoupled replays of one excitation."""

    def __init__(self, building: BuildingDescription, excitation: ExcitationInput):
        self.building = building
        self.excitation = excitation
        self.model = build_model(building)
        self.full = self._replay(self.model)
        self._decoupled = {}

    def _replay(self, model):
        x0 = np.full(model.n_states, INITIAL_TEMP)
        return simulate(model, self.excitation.u, self.excitation.w, x0)

    def without(self, j: int):
        if j not in self._decoupled:
            self._decoupled[j] = self._replay(decouple_zone(self.building, j))
        return self._decoupled[j]

    def interval(self, i: int, j: int):
        d_ij = _directed_deviation(self.full, self.without(j), i)
        d_ji = _directed_deviation(self.full, self.without(i), j)
        lower = 0.5 * (d_ij.min() + d_ji.min())
        upper = 0.5 * (d_ij.max() + d_ji.max())
        return InteractionInterval(float(lower), float(upper)), 0.5 * (d_ij + d_ji)


def interaction_interval(building: BuildingDescription, excitation: ExcitationInput, i: int, j: int, *, check_adjacent=True):
    """Directionally averaged interval of |T_i - T_i^(no j)| over the excitation.

    Returns the interval and the per-step averaged deviation series.
    """
    if check_adjacent and tuple(sorted((i, j))) not in building.adjacent_pairs():
        raise TopologyError(f"zones {i} and {j} share no wall or opening")
    if i == j:
        raise TopologyError("an interaction needs two distinct zones")
    return _Quantifier(building, excitation).interval(i, j)


@dataclass
class InteractionGraph:
    vertices: tuple[int, ...]
    intervals: dict[tuple[int, int], InteractionInterval]
    distributions: dict[tuple[int, int], InteractionDistribution] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = tuple(sorted(self.vertices))
        self.intervals = {tuple(sorted(e)): v for e, v in self.intervals.items()}
        self.distributions = {tuple(sorted(e)): v for e, v in self.distributions.items()}
        for i, j in self.intervals:
            if i == j:
                raise TopologyError(f"self-loop at zone {i}")
            if i not in self.vertices or j not in self.vertices:
                raise TopologyError(f"edge ({i},{j}) references an unknown vertex")
        for e in self.distributions:
            if e not in self.intervals:
                raise TopologyError(f"distribution for non-edge {e}")

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.intervals)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or nx.is_connected(self.to_networkx())

    def weights(self, kind: str = "stochastic") -> dict[tuple[int, int], float]:
        """Scalar edge weights: stochastic mean, interval min/mid/max."""
        if kind == "stochastic":
            missing = [e for e in self.edges if e not in self.distributions]
            if missing:
                raise ParameterError(f"no distribution for edges {missing}")
            return {e: self.distributions[e].mean for e in self.edges}
        attr = {"min": "lower", "max": "upper", "mid": "mid"}[kind]
        return {e: float(getattr(self.intervals[e], attr)) for e in self.edges}

    @classmethod
    def from_weights(cls, vertices, weights: dict) -> "InteractionGraph":
        """Point intervals with point-mass distributions at the given weights."""
        return cls(
            tuple(vertices),
            {e: InteractionInterval(w, w) for e, w in weights.items()},
            {e: InteractionDistribution.point_mass(w) for e, w in weights.items()},
        )

    def to_dict(self) -> dict:
        edges = []
        for e in self.edges:
            iv = self.intervals[e]
            item = {"zones": list(e), "lower": iv.lower, "upper": iv.upper}
            if e in self.distributions:
                d = self.distributions[e]
                item["distribution"] = [[float(m), float(p)] for m, p in zip(d.midpoints, d.probabilities)]
            edges.append(item)
        return {"meta": self.meta, "vertices": list(self.vertices), "edges": edges}

    @classmethod
    def from_dict(cls, data: dict) -> "InteractionGraph":
        intervals, dists = {}, {}
        for item in data["edges"]:
            e = tuple(sorted(item["zones"]))
            intervals[e] = InteractionInterval(float(item["lower"]), float(item["upper"]))
            if "distribution" in item:
                arr = np.asarray(item["distribution"], float).reshape(-1, 2)
                dists[e] = InteractionDistribution(arr[:, 0], arr[:, 1])
        return cls(tuple(data["vertices"]), intervals, dists, dict(data.get("meta", {})))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "InteractionGraph":
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_graph(building: BuildingDescription, excitation: ExcitationInput, n_d: int = DEFAULT_ND) -> InteractionGraph:
    q = _Quantifier(building, excitation)
    intervals, dists = {}, {}
    for i, j in building.adjacent_pairs():
        interval, samples = q.interval(i, j)
        intervals[(i, j)] = interval
        dists[(i, j)] = estimate_distribution(samples, n_d)
    graph = InteractionGraph(building.zone_ids, intervals, dists, {"seed": excitation.seed, "n_d": n_d})
    if not graph.is_connected():
        raise TopologyError("interaction graph is disconnected")
    return graph
