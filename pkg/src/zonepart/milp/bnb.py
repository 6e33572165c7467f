"""Best-first branch-and-bound over the zone-assignment variables.

Branching picks the least-decided zone and creates one child per cluster it
may join, fixing that zone's row of p.  Clusters that no fixed zone uses yet
are interchangeable, so only the first of them gets a child (disabled when
the problem carries explicit symmetry-breaking rows, which fix label order).
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..errors import ParameterError
from ..partition import Partition, split_disconnected
from . import simplex
from .problem import BINARY, MilpProblem

OPTIMAL, INFEASIBLE, NODE_LIMIT = "optimal", "infeasible", "node_limit"
INT_TOL = 1e-6


@dataclass
class MilpSolution:
    status: str
    objective: float
    x: np.ndarray | None
    nodes: int = 0
    gap: float = 0.0
    lp_iterations: int = 0
    # max |s - round(s)|, |r - round(r)| over LP solutions with integral p
    leaf_integrality: list[float] = field(default_factory=list)
    backend: str = "builtin"


class Backend(Protocol):
    name: str

    def solve(self, problem: MilpProblem) -> MilpSolution: ...


@dataclass
class _Node:
    lb: np.ndarray
    ub: np.ndarray
    used: frozenset
    depth: int


def _integrality_gap(v: np.ndarray) -> float:
    return float(np.max(np.abs(v - np.round(v)), initial=0.0))


class BranchAndBound:
    name = "builtin"

    def __init__(self, node_limit: int = 200_000, exploit_symmetry: bool = True):
        self.node_limit = node_limit
        self.exploit_symmetry = exploit_symmetry

    def solve(self, problem: MilpProblem) -> MilpSolution:
        if not np.all(problem.kinds[problem.p_slice] == BINARY) or np.any(problem.kinds[problem.p_slice.stop:] == BINARY):
            raise ParameterError("branch-and-bound expects binaries exactly on the p block")
        n, nz = problem.n, problem.n_zones
        orbital = self.exploit_symmetry and not problem.symmetry_breaking
        counter = itertools.count()
        root = _Node(problem.lb.copy(), problem.ub.copy(), frozenset(), 0)
        heap = [(-np.inf, 0, next(counter), root)]
        best_x, best_obj = None, np.inf
        nodes = iters = 0
        leaf_checks: list[float] = []

        while heap:
            bound, _, _, node = heapq.heappop(heap)
            if bound >= best_obj - 1e-9:
                continue
            if nodes >= self.node_limit:
                heapq.heappush(heap, (bound, 0, next(counter), node))
                break
            nodes += 1
            res = simplex.solve_lp(problem.c, problem.A, problem.b, node.lb, node.ub)
            iters += res.iterations
            if res.status != simplex.OPTIMAL:
                continue
            obj = res.objective + problem.constant
            if obj >= best_obj - 1e-9:
                continue
            p = res.x[problem.p_slice].reshape(nz, n)
            frac = np.abs(p - np.round(p))
            if frac.max() <= INT_TOL:
                rest = res.x[problem.s_slice.start : problem.r_slice.stop]
                leaf_checks.append(_integrality_gap(rest))
                best_x, best_obj = res.x, obj
                continue
            undecided = np.nonzero(frac.max(axis=1) > INT_TOL)[0]
            zone = int(undecided[np.argmin(p[undecided].max(axis=1))])
            allowed = sorted(node.used)
            spare = [c for c in range(n) if c not in node.used]
            allowed += spare[:1] if orbital else spare
            for c in allowed:
                lb, ub = node.lb.copy(), node.ub.copy()
                row = slice(zone * n, zone * n + n)
                lb[row] = 0.0
                ub[row] = 0.0
                lb[zone * n + c] = ub[zone * n + c] = 1.0
                child = _Node(lb, ub, node.used | {c}, node.depth + 1)
                heapq.heappush(heap, (obj, -child.depth, next(counter), child))

        if best_x is None:
            status = NODE_LIMIT if heap else INFEASIBLE
            return MilpSolution(status, np.nan, None, nodes, np.inf, iters, leaf_checks)
        open_bounds = [b for b, *_ in heap if b < best_obj - 1e-9]
        if open_bounds:
            gap = best_obj - min(max(b, -1e300) for b in open_bounds)
            return MilpSolution(NODE_LIMIT, best_obj, best_x, nodes, float(gap), iters, leaf_checks)
        return MilpSolution(OPTIMAL, best_obj, best_x, nodes, 0.0, iters, leaf_checks)


class ScipyBackend:
    """HiGHS through scipy.optimize.milp, for cross-checking the built-in solver."""

    name = "highs"

    def solve(self, problem: MilpProblem) -> MilpSolution:
        from scipy.optimize import Bounds, LinearConstraint, milp

        res = milp(
            problem.c,
            constraints=LinearConstraint(problem.A, -np.inf, problem.b),
            integrality=problem.kinds,
            bounds=Bounds(problem.lb, problem.ub),
        )
        if res.status == 0:
            return MilpSolution(OPTIMAL, float(res.fun) + problem.constant, res.x, backend=self.name)
        if res.status == 2:
            return MilpSolution(INFEASIBLE, np.nan, None, backend=self.name)
        return MilpSolution(NODE_LIMIT, np.nan, res.x, gap=np.inf, backend=self.name)


def solve(problem: MilpProblem, backend: Backend | None = None) -> MilpSolution:
    return (backend or BranchAndBound()).solve(problem)


def extract_partition(solution: MilpSolution, problem: MilpProblem, graph=None) -> tuple[Partition, Partition]:
    """Raw partition read from p, and its connected-cluster normalization."""
    if solution.x is None:
        raise ParameterError(f"solution has no values (status {solution.status})")
    p = solution.x[problem.p_slice].reshape(problem.n_zones, problem.n)
    if np.max(np.abs(p - np.round(p))) > INT_TOL:
        raise RuntimeError("assignment variables are not integral")
    labels = np.argmax(p, axis=1)
    raw = Partition(tuple((v, int(c) + 1) for v, c in zip(problem.vertices, labels)))
    if graph is None:
        from ..partition import SimpleGraph

        graph = SimpleGraph(problem.vertices, problem.edges)
    return raw, split_disconnected(raw, graph)
