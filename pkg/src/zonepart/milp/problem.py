"""Cluster-formation MILP: assignment p, edge-in-cluster s, edge-covered r.

Variable order is ``[p (zone-major), s (edge-major), r]`` followed by the
epigraph variable ``z`` in robust problems.  All rows are ``A x <= b``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from ..errors import ParameterError
from ..interaction import InteractionDistribution, InteractionGraph, InteractionInterval

log = logging.getLogger(__name__)

CONTINUOUS, BINARY = 0, 1


@dataclass(frozen=True)
class SizeLimits:
    min_size: int
    max_size: int
    max_difference: int


@dataclass(frozen=True, eq=False)
class MilpProblem:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    kinds: np.ndarray
    names: tuple[str, ...]
    row_tags: tuple[str, ...]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    n: int
    constant: float = 0.0
    symmetry_breaking: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def n_zones(self) -> int:
        return len(self.vertices)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def p_index(self, zone_pos: int, c: int) -> int:
        return zone_pos * self.n + c

    def s_index(self, edge_pos: int, c: int) -> int:
        return self.n_zones * self.n + edge_pos * self.n + c

    def r_index(self, edge_pos: int) -> int:
        return self.n_zones * self.n + len(self.edges) * self.n + edge_pos

    @property
    def p_slice(self) -> slice:
        return slice(0, self.n_zones * self.n)

    @property
    def s_slice(self) -> slice:
        k = self.n_zones * self.n
        return slice(k, k + len(self.edges) * self.n)

    @property
    def r_slice(self) -> slice:
        k = self.n_zones * self.n + len(self.edges) * self.n
        return slice(k, k + len(self.edges))

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x + self.constant)

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of ``x``."""
        rows = np.max(self.A @ x - self.b, initial=0.0)
        bounds = max(np.max(self.lb - x, initial=0.0), np.max(x - self.ub, initial=0.0))
        return float(max(rows, bounds))

    def with_objective(self, c: np.ndarray, constant: float) -> "MilpProblem":
        return replace(self, c=np.asarray(c, float), constant=float(constant))


@dataclass(frozen=True, eq=False)
class RobustProblem(MilpProblem):
    base: MilpProblem | None = None
    mu_bar: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mu_margin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def z_index(self) -> int:
        return self.A.shape[1] - 1


def compact_row_count(n_zones: int, n_edges: int, n: int) -> int:
    """Row count 2(N_z + n^2) + |E|(3n + 5) quoted for the compact form."""
    return 2 * (n_zones + n * n) + n_edges * (3 * n + 5)


def expected_shape(n_zones: int, n_edges: int, n: int, size_limits: bool = False, symmetry_breaking: bool = False):
    """Row and column counts emitted by :func:`build_base`.

    Equalities are split into two rows, variable bounds stay bounds, and the
    absolute-value size rows are written for every ordered pair of clusters.
    """
    rows = 2 * n_zones + n + n_edges + 3 * n_edges * n + 2 * n_edges
    if size_limits:
        rows += 2 * n + 2 * n * (n - 1)
    if symmetry_breaking:
        rows += (n - 1) * n_zones
    return rows, n_zones * n + n_edges * (n + 1)


def build_base(graph, n: int, size_limits: SizeLimits | None = None, symmetry_breaking: bool = False) -> MilpProblem:
    """Cluster-formation constraints with an all-zero objective."""
    verts = tuple(sorted(graph.vertices))
    edges = tuple(graph.edges)
    nz, ne = len(verts), len(edges)
    if not 1 <= n <= nz:
        raise ParameterError(f"n must lie in [1, {nz}], got {n}")
    warn = []
    if size_limits is not None:
        if size_limits.min_size * n > nz or size_limits.max_size * n < nz:
            warn.append(f"size limits {size_limits} cannot cover {nz} zones with {n} clusters")
        if size_limits.min_size > size_limits.max_size:
            warn.append("min cluster size exceeds max cluster size")
    for msg in warn:
        log.warning("model infeasible: %s", msg)

    pos = {v: k for k, v in enumerate(verts)}
    nvar = nz * n + ne * (n + 1)
    P = lambda i, c: i * n + c  # noqa: E731
    S = lambda e, c: nz * n + e * n + c  # noqa: E731
    R = lambda e: nz * n + ne * n + e  # noqa: E731

    rows: list[dict[int, float]] = []
    rhs: list[float] = []
    tags: list[str] = []

    def add(coefs: dict, bound: float, tag: str):
        rows.append(coefs)
        rhs.append(bound)
        tags.append(tag)

    for i in range(nz):  # each zone in exactly one cluster
        add({P(i, c): 1.0 for c in range(n)}, 1.0, "3a")
        add({P(i, c): -1.0 for c in range(n)}, -1.0, "3a")
    for c in range(n):  # no empty cluster
        add({P(i, c): -1.0 for i in range(nz)}, -1.0, "3b")
    for e in range(ne):  # edge in at most one cluster
        add({S(e, c): 1.0 for c in range(n)}, 1.0, "3c")
    for e, (a, b) in enumerate(edges):
        ia, ib = pos[a], pos[b]
        for c in range(n):
            add({S(e, c): 1.0, P(ia, c): -1.0}, 0.0, "3d")
            add({S(e, c): 1.0, P(ib, c): -1.0}, 0.0, "3e")
            add({P(ia, c): 1.0, P(ib, c): 1.0, S(e, c): -1.0}, 1.0, "3f")
    for e in range(ne):  # r = sum_c s
        row = {S(e, c): -1.0 for c in range(n)}
        add({R(e): 1.0, **row}, 0.0, "3g")
        add({R(e): -1.0, **{k: -v for k, v in row.items()}}, 0.0, "3g")
    if size_limits is not None:
        for c in range(n):
            add({P(i, c): 1.0 for i in range(nz)}, float(size_limits.max_size), "4a")
            add({P(i, c): -1.0 for i in range(nz)}, -float(size_limits.min_size), "4a")
        for ca in range(n):
            for cb in range(n):
                if ca == cb:
                    continue
                diff = {}
                for i in range(nz):
                    diff[P(i, ca)] = 1.0
                    diff[P(i, cb)] = -1.0
                add(diff, float(size_limits.max_difference), "4b")
                add({k: -v for k, v in diff.items()}, float(size_limits.max_difference), "4b")
    if symmetry_breaking:
        # zone i may sit in cluster c only if a lower zone sits in cluster c-1
        for c in range(1, n):
            for i in range(nz):
                row = {P(i, c): 1.0}
                for k in range(i):
                    row[P(k, c - 1)] = row.get(P(k, c - 1), 0.0) - 1.0
                add(row, 0.0, "sym")

    A = np.zeros((len(rows), nvar))
    for k, coefs in enumerate(rows):
        for j, v in coefs.items():
            A[k, j] += v
    kinds = np.zeros(nvar, int)
    kinds[: nz * n] = BINARY
    names = (
        [f"p_{v}_{c + 1}" for v in verts for c in range(n)]
        + [f"s_{a}_{b}_{c + 1}" for a, b in edges for c in range(n)]
        + [f"r_{a}_{b}" for a, b in edges]
    )
    return MilpProblem(
        A=A,
        b=np.asarray(rhs, float),
        c=np.zeros(nvar),
        lb=np.zeros(nvar),
        ub=np.ones(nvar),
        kinds=kinds,
        names=tuple(names),
        row_tags=tuple(tags),
        vertices=verts,
        edges=edges,
        n=n,
        symmetry_breaking=symmetry_breaking,
        warnings=tuple(warn),
    )


def _edge_vector(problem: MilpProblem, values: Mapping, what: str) -> list:
    out = []
    for e in problem.edges:
        key = e if e in values else (e[1], e[0])
        if key not in values:
            raise ParameterError(f"missing {what} for edge {e}")
        out.append(values[key])
    return out


def deterministic_objective(problem: MilpProblem, weights: Mapping[tuple[int, int], float]) -> MilpProblem:
    """Objective (1 - r)^T mu for fixed edge weights, constant carried explicitly."""
    mu = np.asarray(_edge_vector(problem, weights, "weight"), float)
    c = np.zeros(problem.A.shape[1])
    c[problem.r_slice] = -mu
    return problem.with_objective(c, mu.sum())


def stochastic_weights(distributions: Mapping[tuple[int, int], InteractionDistribution]) -> dict:
    return {e: d.mean for e, d in distributions.items()}


def stochastic_objective(problem: MilpProblem, distributions) -> MilpProblem:
    """Expected cut weight: every edge weight replaced by its distribution mean."""
    if isinstance(distributions, InteractionGraph):
        distributions = distributions.distributions
    dists = _edge_vector(problem, distributions, "distribution")
    return deterministic_objective(problem, {e: d.mean for e, d in zip(problem.edges, dists)})


def robust_counterpart(problem: MilpProblem, intervals) -> RobustProblem:
    """min z  s.t.  (1 - r)^T mu_max <= z  plus the base rows.

    With every edge weight free in its interval, the worst case of
    (1 - r)^T mu is attained at the upper endpoints, mu_bar + mu_margin.
    """
    if isinstance(intervals, InteractionGraph):
        intervals = intervals.intervals
    ivs: list[InteractionInterval] = _edge_vector(problem, intervals, "interval")
    for e, iv in zip(problem.edges, ivs):
        if iv.upper < iv.lower:
            raise ParameterError(f"degenerate interval on edge {e}")
    mu_bar = np.array([iv.mid for iv in ivs])
    mu_mg = np.array([iv.upper for iv in ivs]) - mu_bar
    mu_max = mu_bar + mu_mg
    m, nvar = problem.A.shape
    A = np.zeros((m + 1, nvar + 1))
    A[:m, :nvar] = problem.A
    A[m, problem.r_slice] = -mu_max
    A[m, nvar] = -1.0
    b = np.append(problem.b, -mu_max.sum())
    c = np.zeros(nvar + 1)
    c[nvar] = 1.0
    return RobustProblem(
        A=A,
        b=b,
        c=c,
        lb=np.append(problem.lb, 0.0),
        ub=np.append(problem.ub, np.inf),
        kinds=np.append(problem.kinds, CONTINUOUS),
        names=problem.names + ("z",),
        row_tags=problem.row_tags + ("robust",),
        vertices=problem.vertices,
        edges=problem.edges,
        n=problem.n,
        constant=0.0,
        symmetry_breaking=problem.symmetry_breaking,
        warnings=problem.warnings,
        base=problem,
        mu_bar=mu_bar,
        mu_margin=mu_mg,
    )
