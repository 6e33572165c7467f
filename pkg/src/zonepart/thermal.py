"""RC-network thermal models of multi-zone buildings.

Nodes are zone air volumes and the two capacitive layers of every 3R2C wall.
Fixed-temperature sources are the ambient air and, for cluster models, a
boundary node standing in for zones outside the cluster.

Disturbance vector layout (columns of ``Bw``)::

    [ambient_C, solar_Wm2_<surface>..., gain_W_<zone>...]  (+ boundary_C)
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.linalg import expm

from .errors import ParameterError, ShapeError, TopologyError, UnknownZoneError

DT = 900.0
AMBIENT = "ambient"


@dataclass(frozen=True)
class Zone:
    id: int
    capacitance: float  # J/K
    volume: float  # m3
    u_min: float  # W, negative means cooling
    u_max: float  # W
    infiltration_r: float | None = None  # K/W, 1R link to ambient


@dataclass(frozen=True)
class Wall:
    """3R2C wall: zone_a -R1- C1 -R2- C2 -R3- zone_b (or ambient)."""

    name: str
    zone_a: int
    zone_b: int | None
    r1: float
    r2: float
    r3: float
    c1: float
    c2: float
    solar_surface: str | None = None
    solar_area: float = 0.0  # m2 absorbing area at the C2 node


@dataclass(frozen=True)
class Opening:
    """Pure resistor between two zones.

    ``resistance`` is per unit area (m2K/W); ``scale`` multiplies it before
    dividing by the opening area.
    """

    zone_a: int
    zone_b: int
    resistance: float
    area: float
    scale: float = 1.0

    @property
    def r_kw(self) -> float:
        return self.resistance * self.scale / self.area


@dataclass(frozen=True)
class SolarGain:
    """Solar radiation on ``surface`` entering ``zone`` air through ``area`` m2."""

    zone: int
    surface: str
    area: float


@dataclass(frozen=True)
class BuildingDescription:
    zones: tuple[Zone, ...]
    walls: tuple[Wall, ...] = ()
    openings: tuple[Opening, ...] = ()
    solar: tuple[SolarGain, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zones", tuple(sorted(self.zones, key=lambda z: z.id)))
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "openings", tuple(self.openings))
        object.__setattr__(self, "solar", tuple(self.solar))

    @property
    def zone_ids(self) -> tuple[int, ...]:
        return tuple(z.id for z in self.zones)

    def zone(self, zid: int) -> Zone:
        for z in self.zones:
            if z.id == zid:
                return z
        raise UnknownZoneError(f"unknown zone id {zid}")

    @property
    def surfaces(self) -> tuple[str, ...]:
        names = {s.surface for s in self.solar}
        names |= {w.solar_surface for w in self.walls if w.solar_surface}
        return tuple(sorted(names))

    @property
    def disturbance_labels(self) -> tuple[str, ...]:
        return (
            ("ambient_C",)
            + tuple(f"solar_Wm2_{s}" for s in self.surfaces)
            + tuple(f"gain_W_{z}" for z in self.zone_ids)
        )

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        """Zone pairs sharing a wall or an opening, sorted."""
        pairs = {tuple(sorted((w.zone_a, w.zone_b))) for w in self.walls if w.zone_b is not None}
        pairs |= {tuple(sorted((o.zone_a, o.zone_b))) for o in self.openings}
        return sorted(pairs)

    def validate(self) -> None:
        ids = self.zone_ids
        if len(set(ids)) != len(ids):
            raise ParameterError("duplicate zone ids")
        for z in self.zones:
            if z.capacitance <= 0:
                raise ParameterError(f"zone {z.id}: capacitance must be positive")
            if z.volume <= 0:
                raise ParameterError(f"zone {z.id}: volume must be positive")
            if z.infiltration_r is not None and z.infiltration_r <= 0:
                raise ParameterError(f"zone {z.id}: infiltration_r must be positive")
            if z.u_min > z.u_max:
                raise ParameterError(f"zone {z.id}: u_min > u_max")
        names = [w.name for w in self.walls]
        if len(set(names)) != len(names):
            raise ParameterError("duplicate wall names")
        for w in self.walls:
            for attr in ("r1", "r2", "r3", "c1", "c2"):
                if getattr(w, attr) <= 0:
                    raise ParameterError(f"wall {w.name}: {attr} must be positive")
            for zid in (w.zone_a, w.zone_b):
                if zid is not None and zid not in ids:
                    raise UnknownZoneError(f"wall {w.name}: unknown zone {zid}")
            if w.zone_a == w.zone_b:
                raise TopologyError(f"wall {w.name} connects zone {w.zone_a} to itself")
        for o in self.openings:
            label = f"opening {o.zone_a}-{o.zone_b}"
            if o.resistance <= 0 or o.area <= 0 or o.scale <= 0:
                raise ParameterError(f"{label}: resistance, area and scale must be positive")
            if o.zone_a not in ids or o.zone_b not in ids:
                raise TopologyError(f"{label}: openings must join two interior zones")
            if o.zone_a == o.zone_b:
                raise TopologyError(f"{label}: openings must join two distinct zones")
        for s in self.solar:
            if s.zone not in ids:
                raise UnknownZoneError(f"solar gain: unknown zone {s.zone}")
            if s.area < 0:
                raise ParameterError(f"solar gain on zone {s.zone}: negative area")

        g = nx.Graph()
        g.add_nodes_from(ids)
        for w in self.walls:
            g.add_edge(w.zone_a, AMBIENT if w.zone_b is None else w.zone_b)
        for o in self.openings:
            g.add_edge(o.zone_a, o.zone_b)
        for z in self.zones:
            if z.infiltration_r is not None:
                g.add_edge(z.id, AMBIENT)
        if not nx.is_connected(g):
            raise TopologyError("thermal network is disconnected")


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """x(k+1) = A x(k) + Bu u(k) + Bw w(k),  T(k) = C x(k)."""

    A: np.ndarray
    Bu: np.ndarray
    Bw: np.ndarray
    C: np.ndarray
    state_labels: tuple[tuple, ...]
    input_zones: tuple[int, ...]
    output_zones: tuple[int, ...]
    disturbance_labels: tuple[str, ...]
    Ac: np.ndarray
    Bc: np.ndarray  # continuous [Bu | Bw]
    dt: float = DT

    def __post_init__(self):
        for name in ("A", "Bu", "Bw", "C", "Ac", "Bc"):
            getattr(self, name).setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    def state_index(self, label: tuple) -> int:
        return self.state_labels.index(label)

    def output_index(self, zid: int) -> int:
        try:
            return self.output_zones.index(zid)
        except ValueError:
            raise UnknownZoneError(f"zone {zid} not in model outputs") from None


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """States and outputs hold K+1 samples (x0 first); inputs hold K."""

    states: np.ndarray
    outputs: np.ndarray
    inputs: np.ndarray
    output_zones: tuple[int, ...]

    def zone(self, zid: int) -> np.ndarray:
        return self.outputs[:, self.output_zones.index(zid)]


def zoh(Ac: np.ndarray, Bc: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact discretization for piecewise-constant inputs.

    Thermally separate parts of the network are discretized one at a time
    over the inputs that reach them, so a subsystem gets bit-identical
    matrices whether or not unrelated nodes or inputs are modelled with it.
    """
    n, m = Bc.shape
    Ad, Bd = np.zeros((n, n)), np.zeros((n, m))
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(zip(*np.nonzero(Ac)))
    for comp in nx.connected_components(g):
        idx = np.array(sorted(comp))
        cols = np.nonzero(np.any(Bc[idx] != 0, axis=0))[0]  # inputs reaching this part
        k, mc = len(idx), len(cols)
        M = np.zeros((k + mc, k + mc))
        M[:k, :k] = Ac[np.ix_(idx, idx)]
        M[:k, k:] = Bc[np.ix_(idx, cols)]
        E = expm(M * dt)
        Ad[np.ix_(idx, idx)] = E[:k, :k]
        Bd[np.ix_(idx, cols)] = E[:k, k:]
    return Ad, Bd


def _assemble(
    building: BuildingDescription,
    kept: Sequence[int],
    input_zones: Sequence[int],
    boundary: bool,
    dt: float,
) -> StateSpaceModel:
    """Assemble the RC network over ``kept`` zones.

    A branch reaching a removed zone is dropped whole (``boundary=False``,
    adiabatic interface) or tied to a fixed boundary temperature that becomes
    the last disturbance column (``boundary=True``).
    """
    kept = sorted(kept)
    kept_set = set(kept)
    dist = list(building.disturbance_labels)
    surf_col = {s: 1 + i for i, s in enumerate(building.surfaces)}
    gain_col = {z: 1 + len(surf_col) + i for i, z in enumerate(building.zone_ids)}
    if boundary:
        dist.append("boundary_C")
    BND = len(dist) - 1 if boundary else None

    labels: list[tuple] = [("zone", z) for z in kept]
    caps: list[float] = [building.zone(z).capacitance for z in kept]
    # conductances: node-node and node-source (source given as disturbance column)
    links: list[tuple[int, int, float]] = []
    sources: list[tuple[int, int, float]] = []
    injections: list[tuple[int, int, float]] = []  # (node, column, coefficient)

    def endpoint(zid):
        """Node index, ('src', col) or None for a dropped end."""
        if zid is None:
            return ("src", 0)
        if zid in kept_set:
            return kept.index(zid)
        return ("src", BND) if boundary else None

    def connect(a, b, g):
        if isinstance(a, tuple) and isinstance(b, tuple):
            return
        if isinstance(a, tuple):
            a, b = b, a
        if isinstance(b, tuple):
            sources.append((a, b[1], g))
        else:
            links.append((a, b, g))

    for w in building.walls:
        ea, eb = endpoint(w.zone_a), endpoint(w.zone_b)
        if ea is None or eb is None:
            continue
        if isinstance(ea, tuple) and isinstance(eb, tuple):
            continue
        n1 = len(labels)
        labels += [("wall", w.name, 1), ("wall", w.name, 2)]
        caps += [w.c1, w.c2]
        connect(ea, n1, 1.0 / w.r1)
        links.append((n1, n1 + 1, 1.0 / w.r2))
        connect(n1 + 1, eb, 1.0 / w.r3)
        if w.solar_surface and w.solar_area > 0:
            injections.append((n1 + 1, surf_col[w.solar_surface], w.solar_area))

    for o in building.openings:
        ea, eb = endpoint(o.zone_a), endpoint(o.zone_b)
        if ea is None or eb is None:
            continue
        connect(ea, eb, 1.0 / o.r_kw)

    for i, z in enumerate(kept):
        zone = building.zone(z)
        if zone.infiltration_r is not None:
            sources.append((i, 0, 1.0 / zone.infiltration_r))
        injections.append((i, gain_col[z], 1.0))
    for s in building.solar:
        if s.zone in kept_set and s.area > 0:
            injections.append((kept.index(s.zone), surf_col[s.surface], s.area))

    n = len(labels)
    G = np.zeros((n, n))
    for a, b, g in links:
        G[a, a] -= g
        G[b, b] -= g
        G[a, b] += g
        G[b, a] += g
    Bw_c = np.zeros((n, len(dist)))
    for a, col, g in sources:
        G[a, a] -= g
        Bw_c[a, col] += g
    for a, col, coef in injections:
        Bw_c[a, col] += coef
    Bu_c = np.zeros((n, len(input_zones)))
    for j, z in enumerate(input_zones):
        if z in kept_set:
            Bu_c[kept.index(z), j] = 1.0
    cinv = 1.0 / np.asarray(caps)
    Ac = G * cinv[:, None]
    Bc = np.hstack([Bu_c, Bw_c]) * cinv[:, None]
    Ad, Bd = zoh(Ac, Bc, dt)
    m = len(input_zones)
    C = np.zeros((len(kept), n))
    C[np.arange(len(kept)), np.arange(len(kept))] = 1.0
    return StateSpaceModel(
        A=Ad,
        Bu=Bd[:, :m],
        Bw=Bd[:, m:],
        C=C,
        state_labels=tuple(labels),
        input_zones=tuple(input_zones),
        output_zones=tuple(kept),
        disturbance_labels=tuple(dist),
        Ac=Ac,
        Bc=Bc,
        dt=dt,
    )


def build_model(building: BuildingDescription, dt: float = DT) -> StateSpaceModel:
    building.validate()
    return _assemble(building, building.zone_ids, building.zone_ids, False, dt)


def decouple_zone(building: BuildingDescription, j: int, dt: float = DT) -> StateSpaceModel:
    """Model of ``building`` with zone ``j`` and every branch touching it removed.

    Inputs and disturbances keep the full-building layout (zone j's columns
    are zero) so the coupled excitation can be replayed unchanged.
    """
    building.validate()
    building.zone(j)
    kept = [z for z in building.zone_ids if z != j]
    return _assemble(building, kept, building.zone_ids, False, dt)


def cluster_model(building: BuildingDescription, zones: Iterable[int], dt: float = DT) -> StateSpaceModel:
    """Reduced model of a zone cluster; severed branches see a boundary temperature."""
    building.validate()
    zones = sorted(zones)
    for z in zones:
        building.zone(z)
    return _assemble(building, zones, zones, True, dt)


def simulate(model: StateSpaceModel, u, w, x0) -> SimulationTrace:
    u = np.atleast_2d(np.asarray(u, dtype=float))
    w = np.atleast_2d(np.asarray(w, dtype=float))
    if u.size == 0:
        u = u.reshape(0, model.Bu.shape[1])
    if w.size == 0:
        w = w.reshape(0, model.Bw.shape[1])
    x0 = np.asarray(x0, dtype=float)
    if u.shape[1] != model.Bu.shape[1]:
        raise ShapeError(f"u has {u.shape[1]} columns, model expects {model.Bu.shape[1]}")
    if w.shape[1] != model.Bw.shape[1]:
        raise ShapeError(f"w has {w.shape[1]} columns, model expects {model.Bw.shape[1]}")
    if u.shape[0] != w.shape[0]:
        raise ShapeError(f"u has {u.shape[0]} steps, w has {w.shape[0]}")
    if x0.shape != (model.n_states,):
        raise ShapeError(f"x0 has shape {x0.shape}, expected ({model.n_states},)")
    K = u.shape[0]
    # einsum keeps each entry's summation order independent of the matrix
    # shapes, unlike BLAS kernels
    forcing = np.einsum("km,nm->kn", u, model.Bu) + np.einsum("km,nm->kn", w, model.Bw)
    X = np.empty((K + 1, model.n_states))
    X[0] = x0
    A = model.A
    x = x0
    for k in range(K):
        x = A @ x + forcing[k]
        X[k + 1] = x
    return SimulationTrace(states=X, outputs=X @ model.C.T, inputs=u, output_zones=model.output_zones)


def steady_state(model: StateSpaceModel, u, w) -> np.ndarray:
    """Continuous-time equilibrium state for constant inputs."""
    b = model.Bc @ np.concatenate([np.asarray(u, float), np.asarray(w, float)])
    return np.linalg.solve(model.Ac, -b)


# -- file I/O -----------------------------------------------------------------


def building_to_dict(building: BuildingDescription) -> dict:
    return {
        "zones": [asdict(z) for z in building.zones],
        "walls": [asdict(w) for w in building.walls],
        "openings": [asdict(o) for o in building.openings],
        "gains": {"solar": [asdict(s) for s in building.solar]},
    }


def building_from_dict(data: dict) -> BuildingDescription:
    try:
        return BuildingDescription(
            zones=tuple(Zone(**z) for z in data["zones"]),
            walls=tuple(Wall(**w) for w in data.get("walls", [])),
            openings=tuple(Opening(**o) for o in data.get("openings", [])),
            solar=tuple(SolarGain(**s) for s in data.get("gains", {}).get("solar", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed building description: {exc}") from exc


def save_building(building: BuildingDescription, path) -> None:
    Path(path).write_text(json.dumps(building_to_dict(building), indent=2) + "\n")


def load_building(path) -> BuildingDescription:
    building = building_from_dict(json.loads(Path(path).read_text()))
    building.validate()
    return building
