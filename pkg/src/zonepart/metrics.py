"""Performance index and the deterioration / fault-propagation / weighted metrics.

ODM, FPM and WPM are returned in percent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParameterError


@dataclass(frozen=True)
class MetricWeights:
    k_u: float = 1.0
    k_ave: float = 1.0
    k_max: float = 1.0
    u_nr: float = 100.0  # kWh
    ave_nr: float = 1.0  # degC
    max_nr: float = 3.0  # degC
    alpha: float = 0.5

    def __post_init__(self):
        if min(self.u_nr, self.ave_nr, self.max_nr) <= 0:
            raise ParameterError("normalizers must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError("alpha must lie in [0, 1]")


# Weights used for the two published case studies.
CASE1_WEIGHTS = MetricWeights(u_nr=100.0, ave_nr=1.0, max_nr=3.0, alpha=0.5)
CASE2_WEIGHTS = MetricWeights(u_nr=1000.0, ave_nr=2.0, max_nr=5.0, alpha=0.5)


def performance_index(u_tot: float, yv_ave: float, yv_max: float, weights: MetricWeights = CASE1_WEIGHTS) -> float:
    if min(u_tot, yv_ave, yv_max) < 0:
        raise ParameterError("energy and violations must be non-negative")
    return math.exp(
        -weights.k_u * u_tot / weights.u_nr
        - weights.k_ave * yv_ave / weights.ave_nr
        - weights.k_max * yv_max / weights.max_nr
    )


def odm(pi_centralized_nofault: float, pi_partition_nofault: float) -> float:
    """Optimality deterioration, percent."""
    return 100.0 * (pi_centralized_nofault - pi_partition_nofault) / pi_centralized_nofault


def fpm(pi_centralized_nofault: float, pi_partition_fault: float) -> float:
    """Fault propagation, percent."""
    return 100.0 * (pi_centralized_nofault - pi_partition_fault) / pi_centralized_nofault


def wpm(odm_pct: float, fpm_pct: float, alpha: float) -> float:
    """Weighted performance, percent; inputs in percent."""
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError("alpha must lie in [0, 1]")
    return alpha * (100.0 - odm_pct) + (1.0 - alpha) * (100.0 - fpm_pct)


@dataclass(frozen=True)
class Triple:
    u_tot: float
    yv_ave: float
    yv_max: float

    def pi(self, weights: MetricWeights) -> float:
        return performance_index(self.u_tot, self.yv_ave, self.yv_max, weights)


@dataclass
class ArchitectureResult:
    """Raw triples of one architecture; ``scenarios`` maps scenario name to triple."""

    label: str
    n: int
    nofault: Triple
    fault: Triple
    scenarios: dict[str, Triple] | None = None
    pi_nofault: float = float("nan")
    pi_fault: float = float("nan")
    odm: float = float("nan")
    fpm: float = float("nan")
    wpm: float = float("nan")


def score(results: Sequence[ArchitectureResult], weights: MetricWeights, reference: ArchitectureResult | None = None) -> list[ArchitectureResult]:
    """Fill PI and metric fields; the reference (default: first n=1 row) is fault-free C-MPC."""
    if reference is None:
        central = [r for r in results if r.n == 1]
        if not central:
            raise ParameterError("no single-cluster architecture to serve as reference")
        reference = central[0]
    pi_ref = reference.nofault.pi(weights)
    for r in results:
        r.pi_nofault = r.nofault.pi(weights)
        r.pi_fault = r.fault.pi(weights)
        r.odm = odm(pi_ref, r.pi_nofault)
        r.fpm = fpm(pi_ref, r.pi_fault)
        r.wpm = wpm(r.odm, r.fpm, weights.alpha)
    return list(results)


def rank_partitions(results: Iterable[ArchitectureResult]) -> list[ArchitectureResult]:
    """Highest WPM first; ties go to fewer clusters."""
    return sorted(results, key=lambda r: (-r.wpm, r.n))


def calibration_holds(results: Sequence[ArchitectureResult], weights: MetricWeights) -> bool:
    """Fault-free single-cluster PI is at least every other PI in the table."""
    central = [r for r in results if r.n == 1]
    if not central:
        return False
    ref = central[0].nofault.pi(weights)
    others = []
    for r in results:
        if r is not central[0]:
            others.append(r.nofault.pi(weights))
        others.append(r.fault.pi(weights))
    return all(ref >= p for p in others)


_TRIPLE_COLS = ("u_tot_kWh", "yv_ave_C", "yv_max_C")


def read_raw_table(path) -> tuple[list[ArchitectureResult], dict[str, tuple[float, float, float]]]:
    """Raw triples from a delimited table (the layout written by reports).

    Required columns: ``n, partition`` plus the no-fault triple and the
    ``fault_`` triple; any other ``<name>_u_tot_kWh`` group becomes a named
    scenario.  Printed ``ODM_pct, FPM_pct, WPM_pct`` columns, if present, are
    returned keyed by partition label for comparison.
    """
    import csv

    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        header = reader.fieldnames or []
        need = ["n", "partition", *_TRIPLE_COLS, *(f"fault_{c}" for c in _TRIPLE_COLS)]
        missing = [c for c in need if c not in header]
        if missing:
            raise ParameterError(f"{path}: missing columns {missing}")
        extra = sorted({h[: -len("_u_tot_kWh")] for h in header if h.endswith("_u_tot_kWh")} - {"", "fault"})
        rows, printed = [], {}
        for lineno, rec in enumerate(reader, start=2):
            try:
                triple = lambda prefix: Triple(*(float(rec[prefix + c]) for c in _TRIPLE_COLS))
                r = ArchitectureResult(
                    label=rec["partition"], n=int(rec["n"]), nofault=triple(""), fault=triple("fault_"),
                    scenarios={s: triple(f"{s}_") for s in extra} or None,
                )
                if all(rec.get(k) not in (None, "") for k in ("ODM_pct", "FPM_pct", "WPM_pct")):
                    printed[r.label] = (float(rec["ODM_pct"]), float(rec["FPM_pct"]), float(rec["WPM_pct"]))
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"{path}:{lineno}: {exc}") from None
            rows.append(r)
    if not rows:
        raise ParameterError(f"{path}: no rows")
    return rows, printed
