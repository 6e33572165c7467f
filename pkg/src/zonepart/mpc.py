"""Receding-horizon post-assessment of centralized and decentralized MPC.

Each controller plans on its own cluster model with a linear program: input
energy plus heavily weighted soft comfort violations over the horizon.  The
plant is always the full coupled model.  Controllers re-initialize their
zone-air states from measurements every step and propagate wall states
open-loop with their own model.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import ParameterError
from .interaction import ComfortSchedule
from .metrics import ArchitectureResult, MetricWeights, Triple, rank_partitions, score
from .partition import Partition
from .thermal import BuildingDescription, StateSpaceModel, build_model, cluster_model
from .weather import DisturbanceSeries

STEPS_PER_DAY = 96
J_PER_KWH = 3.6e6
VIOLATION_TOL = 1e-6  # degC

NONE, SENSOR_GAIN, ACTUATOR_STUCK, UNCONTROLLED = "none", "sensor_gain", "actuator_stuck_zero", "uncontrolled_zone"


@dataclass(frozen=True)
class MpcConfig:
    horizon: int = 24
    input_weight: float = 1.0
    violation_factor: float = 1e6  # violation weight relative to the input weight
    boundary_temp: float = 23.0
    initial_temp: float = 20.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ParameterError("horizon must be >= 1")
        if self.violation_factor <= 0 or self.input_weight <= 0:
            raise ParameterError("weights must be positive")


@dataclass(frozen=True)
class FaultScenario:
    """A fault applied to each target zone in turn; runs are then aggregated."""

    kind: str = NONE
    targets: tuple[int, ...] = ()
    gains: tuple[float, ...] = (0.9, 1.1)
    aggregate: str = "mean"

    def __post_init__(self):
        if self.kind not in (NONE, SENSOR_GAIN, ACTUATOR_STUCK, UNCONTROLLED):
            raise ParameterError(f"unknown fault kind {self.kind!r}")
        if self.kind == SENSOR_GAIN and any(g not in (0.9, 1.1) for g in self.gains):
            raise ParameterError("sensor gain errors are limited to 0.9 and 1.1")
        if self.aggregate not in ("mean", "max"):
            raise ParameterError(f"unknown aggregation {self.aggregate!r}")

    def single_faults(self) -> list["SingleFault"]:
        if self.kind == NONE:
            return [SingleFault()]
        if self.kind == SENSOR_GAIN:
            return [SingleFault(self.kind, z, g) for z in self.targets for g in self.gains]
        return [SingleFault(self.kind, z) for z in self.targets]


@dataclass(frozen=True)
class SingleFault:
    kind: str = NONE
    zone: int | None = None
    gain: float = 1.0


@dataclass
class RunResult:
    triple: Triple
    u: np.ndarray  # applied, (K, N_z)
    temperatures: np.ndarray  # plant zone temperatures, (K+1, N_z)


class _Controller:
    """Condensed LP-MPC over one cluster model."""

    def __init__(self, building: BuildingDescription, model: StateSpaceModel, full_labels, config: MpcConfig):
        self.model = model
        self.config = config
        self.zones = model.output_zones
        self.state_idx = np.array([full_labels.index(lbl) for lbl in model.state_labels])
        H, nz, m, d = config.horizon, len(self.zones), model.Bu.shape[1], model.Bw.shape[1]
        A, Bu, Bw, C = model.A, model.Bu, model.Bw, model.C
        powers = [np.eye(model.n_states)]
        for _ in range(H):
            powers.append(A @ powers[-1])
        self.F = np.vstack([C @ powers[h + 1] for h in range(H)])  # (H*nz, n)
        self.Gu = np.zeros((H * nz, H * m))
        self.Gw = np.zeros((H * nz, H * d))
        for h in range(H):
            for i in range(h + 1):
                CA = C @ powers[h - i]
                self.Gu[h * nz:(h + 1) * nz, i * m:(i + 1) * m] = CA @ Bu
                self.Gw[h * nz:(h + 1) * nz, i * d:(i + 1) * d] = CA @ Bw
        self.umin = np.array([building.zone(z).u_min for z in model.input_zones])
        self.umax = np.array([building.zone(z).u_max for z in model.input_zones])
        if np.any(self.umin > 0) or np.any(self.umax < 0):
            raise ParameterError("MPC expects input bounds that straddle zero")
        self.H, self.nz, self.m, self.d = H, nz, m, d

    def plan(self, x_hat, w_preview, lower, upper, occupied, disabled: set) -> np.ndarray:
        """First move of the optimal plan.

        ``lower``/``upper``/``occupied`` cover the predicted outputs at steps
        k+1 .. k+H as (H, nz) arrays.
        """
        H, m = self.H, self.m
        free = self.F @ x_hat + self.Gw @ w_preview.ravel()
        keep = occupied.copy()
        for j, z in enumerate(self.zones):
            if z in disabled:
                keep[:, j] = False
        rows = np.nonzero(keep.ravel())[0]
        ns = len(rows)
        nu = H * m
        # variables: [u_plus (nu), u_minus (nu), slack (ns)]
        cost = np.concatenate([
            np.full(2 * nu, self.config.input_weight),
            np.full(ns, self.config.input_weight * self.config.violation_factor),
        ])
        ub_plus = np.tile(self.umax, H)
        ub_minus = np.tile(-self.umin, H)
        for j, z in enumerate(self.model.input_zones):
            if z in disabled:
                ub_plus[j::m] = 0.0
                ub_minus[j::m] = 0.0
        bounds = np.column_stack([
            np.zeros(2 * nu + ns),
            np.concatenate([ub_plus, ub_minus, np.full(ns, np.inf)]),
        ])
        if ns == 0:
            return np.zeros(m)
        G = self.Gu[rows]
        eye = np.eye(ns)
        A_ub = np.block([[-G, G, -eye], [G, -G, -eye]])
        b_ub = np.concatenate([
            free[rows] - lower.ravel()[rows],
            upper.ravel()[rows] - free[rows],
        ])
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status != 0:
            raise RuntimeError(f"MPC linear program failed: {res.message}")
        return res.x[:m] - res.x[nu:nu + m]


def build_cluster_models(building: BuildingDescription, partition: Partition) -> list[StateSpaceModel]:
    """One reduced model per cluster, out-of-cluster neighbours held at a boundary node."""
    if sorted(partition.zones) != sorted(building.zone_ids):
        raise ParameterError("partition does not cover the building's zones")
    return [cluster_model(building, members) for members in partition.clusters]


def _as_matrix(w, building) -> np.ndarray:
    return w.matrix(building) if isinstance(w, DisturbanceSeries) else np.asarray(w, float)


def run_mpc(
    building: BuildingDescription,
    architecture: Partition | str,
    w,
    schedule: ComfortSchedule,
    fault: SingleFault = SingleFault(),
    config: MpcConfig = MpcConfig(),
    steps: int = STEPS_PER_DAY,
    x0: np.ndarray | None = None,
    plant: StateSpaceModel | None = None,
) -> RunResult:
    """Closed-loop run over ``steps`` samples.

    ``w`` and ``schedule`` must cover ``steps + horizon`` samples; the extra
    tail is the disturbance preview near the end of the day.
    """
    if isinstance(architecture, str):
        if architecture != "centralized":
            raise ParameterError(f"unknown architecture {architecture!r}")
        architecture = Partition.from_clusters([building.zone_ids])
    W = _as_matrix(w, building)
    H = config.horizon
    need = steps + H
    if W.shape[0] < need or len(schedule) < need:
        raise ParameterError(f"disturbances and schedule must cover {need} steps (day + horizon)")
    if fault.kind != NONE and fault.zone not in building.zone_ids:
        raise ParameterError(f"fault targets unknown zone {fault.zone}")
    plant = plant or build_model(building)
    labels = list(plant.state_labels)
    zone_pos = {z: k for k, z in enumerate(building.zone_ids)}
    ctrls = [_Controller(building, m, labels, config) for m in build_cluster_models(building, architecture)]

    x = np.full(plant.n_states, config.initial_temp) if x0 is None else np.asarray(x0, float).copy()
    x_hat = [x[c.state_idx].copy() for c in ctrls]
    lower = np.where(schedule.occupied, schedule.lower, -np.inf)
    upper = np.where(schedule.occupied, schedule.upper, np.inf)
    occ = schedule.occupied.astype(bool)
    disabled = {fault.zone} if fault.kind == UNCONTROLLED else set()

    U = np.zeros((steps, len(building.zones)))
    T = np.empty((steps + 1, len(building.zones)))
    T[0] = plant.C @ x
    for k in range(steps):
        measured = plant.C @ x
        if fault.kind == SENSOR_GAIN:
            measured = measured.copy()
            measured[zone_pos[fault.zone]] *= fault.gain
        commanded = np.zeros(len(building.zones))
        per_ctrl = []
        for c, xh in zip(ctrls, x_hat):
            cz = [zone_pos[z] for z in c.zones]
            xh[: len(cz)] = measured[cz]
            w_prev = np.hstack([W[k:k + H], np.full((H, 1), config.boundary_temp)])
            idx = slice(k + 1, k + 1 + H)
            u_c = c.plan(xh, w_prev, lower[idx][:, None].repeat(len(cz), 1), upper[idx][:, None].repeat(len(cz), 1),
                         occ[idx][:, None].repeat(len(cz), 1), disabled)
            commanded[[zone_pos[z] for z in c.model.input_zones]] = u_c
            per_ctrl.append((u_c, w_prev[0]))
        applied = commanded.copy()
        if fault.kind in (ACTUATOR_STUCK, UNCONTROLLED):
            applied[zone_pos[fault.zone]] = 0.0
        x = plant.A @ x + plant.Bu @ applied + plant.Bw @ W[k]
        for i, (c, (u_c, w_now)) in enumerate(zip(ctrls, per_ctrl)):
            x_hat[i] = c.model.A @ x_hat[i] + c.model.Bu @ u_c + c.model.Bw @ w_now
        U[k] = applied
        T[k + 1] = plant.C @ x

    # an uncontrolled zone is left out of the comfort statistics
    evaluated = [zone_pos[z] for z in building.zone_ids if z not in disabled]
    viol = np.maximum(lower[1:steps + 1, None] - T[1:], T[1:] - upper[1:steps + 1, None])
    # LP round-off leaves violations of order 1e-11 where the band is met
    viol = np.where(viol > VIOLATION_TOL, viol, 0.0)[occ[1:steps + 1]][:, evaluated]
    u_tot = float(np.abs(U).sum() * plant.dt / J_PER_KWH)
    if viol.size:
        triple = Triple(u_tot, float(viol.mean()), float(viol.max()))
    else:
        triple = Triple(u_tot, 0.0, 0.0)
    return RunResult(triple, U, T)


def aggregate(triples: Sequence[Triple], how: str = "mean") -> Triple:
    arr = np.array([[t.u_tot, t.yv_ave, t.yv_max] for t in triples])
    v = arr.mean(axis=0) if how == "mean" else arr.max(axis=0)
    return Triple(*map(float, v))


def run_scenario(building, architecture, w, schedule, scenario: FaultScenario, config: MpcConfig = MpcConfig(), **kw) -> Triple:
    triples = [run_mpc(building, architecture, w, schedule, f, config, **kw).triple for f in scenario.single_faults()]
    return aggregate(triples, scenario.aggregate)


@dataclass
class EvaluationReport:
    rows: list[ArchitectureResult]
    weights: MetricWeights
    meta: dict = field(default_factory=dict)

    def ranked(self) -> list[ArchitectureResult]:
        return rank_partitions(self.rows)

    def to_dict(self) -> dict:
        rows = []
        for r in self.rows:
            item = {
                "label": r.label,
                "n": r.n,
                "nofault": asdict(r.nofault),
                "fault": asdict(r.fault),
                "PI_nofault": r.pi_nofault,
                "PI_fault": r.pi_fault,
                "ODM_pct": r.odm,
                "FPM_pct": r.fpm,
                "WPM_pct": r.wpm,
            }
            if r.scenarios:
                item["scenarios"] = {k: asdict(v) for k, v in r.scenarios.items()}
            rows.append(item)
        return {"meta": self.meta, "weights": asdict(self.weights), "rows": rows,
                "ranking": [r.label for r in self.ranked()]}

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def to_csv(self) -> str:
        names = sorted({k for r in self.rows for k in (r.scenarios or {})})
        head = ["n", "partition", "u_tot_kWh", "yv_ave_C", "yv_max_C"]
        for s in names:
            head += [f"{s}_u_tot_kWh", f"{s}_yv_ave_C", f"{s}_yv_max_C"]
        head += ["fault_u_tot_kWh", "fault_yv_ave_C", "fault_yv_max_C", "ODM_pct", "FPM_pct", "WPM_pct"]
        lines = [",".join(head)]
        for r in self.rows:
            vals = [str(r.n), f'"{r.label}"', *(repr(v) for v in asdict(r.nofault).values())]
            for s in names:
                t = (r.scenarios or {}).get(s)
                vals += [repr(v) for v in asdict(t).values()] if t else ["", "", ""]
            vals += [repr(v) for v in asdict(r.fault).values()]
            vals += [repr(r.odm), repr(r.fpm), repr(r.wpm)]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


def evaluate(
    building: BuildingDescription,
    partitions: Sequence[Partition],
    w,
    schedule: ComfortSchedule,
    fault: FaultScenario,
    weights: MetricWeights,
    config: MpcConfig = MpcConfig(),
    extra: dict[str, FaultScenario] | None = None,
    steps: int = STEPS_PER_DAY,
    workers: int = 1,
) -> EvaluationReport:
    """Score every partition against fault-free C-MPC.

    The no-fault and ``fault`` scenarios feed the metrics; ``extra`` scenarios
    (e.g. an uncontrolled zone) are reported alongside.
    """
    extra = extra or {}
    central = Partition.from_clusters([building.zone_ids])
    archs = list(partitions)
    if central not in archs:
        archs.insert(0, central)
    W = _as_matrix(w, building)
    plant = build_model(building)
    jobs = []
    for p in archs:
        jobs.append((p, "nofault", FaultScenario()))
        jobs.append((p, "fault", fault))
        for name, sc in extra.items():
            jobs.append((p, name, sc))

    def one(job):
        p, _, sc = job
        return run_scenario(building, p, W, schedule, sc, config, steps=steps, plant=plant)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            outs = list(pool.map(one, jobs))
    else:
        outs = [one(j) for j in jobs]
    table: dict[Partition, dict[str, Triple]] = {}
    for (p, name, _), t in zip(jobs, outs):
        table.setdefault(p, {})[name] = t
    rows = []
    for p in archs:
        res = table[p]
        rows.append(ArchitectureResult(
            label=str(p), n=p.n, nofault=res["nofault"], fault=res["fault"],
            scenarios={k: res[k] for k in extra},
        ))
    score(rows, weights, reference=rows[0])
    return EvaluationReport(rows, weights, {"horizon": config.horizon, "steps": steps})
