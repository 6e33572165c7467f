"""Dense bounded-variable primal simplex for  min c'x  s.t.  A x <= b,  lb <= x <= ub.

Two phases with artificial variables on rows whose slack starts negative.
Nonbasic variables sit at either bound; the ratio test allows bound flips.
Dantzig pricing, switching to Bland's rule after a run of degenerate pivots.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = "optimal", "infeasible", "unbounded", "iteration_limit"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 50
DEGENERATE_RUN = 30


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    objective: float
    iterations: int = 0


class _Simplex:
    def __init__(self, M, b, lo, hi, basis, at_upper):
        self.M = M
        self.b = b
        self.lo = lo
        self.hi = hi
        self.basis = list(basis)
        self.at_upper = at_upper  # meaningful for nonbasic columns only
        self.iterations = 0
        self.refactor()

    def nonbasic_values(self):
        x = np.where(self.at_upper, self.hi, self.lo)
        x[self.basis] = 0.0
        return x

    def refactor(self):
        B = self.M[:, self.basis]
        self.Binv = np.linalg.inv(B)
        xn = self.nonbasic_values()
        self.xB = self.Binv @ (self.b - self.M @ xn)

    def full_x(self):
        x = self.nonbasic_values()
        x[self.basis] = self.xB
        return x

    def run(self, cost, max_iter):
        m = len(self.basis)
        degenerate = 0
        is_basic = np.zeros(self.M.shape[1], bool)
        since_refactor = 0
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            if since_refactor >= REFACTOR_EVERY:
                self.refactor()
                since_refactor = 0
            is_basic[:] = False
            is_basic[self.basis] = True
            y = cost[self.basis] @ self.Binv
            d = cost - y @ self.M
            movable = self.hi > self.lo
            elig = ~is_basic & movable & (
                (~self.at_upper & (d < -OPT_TOL)) | (self.at_upper & (d > OPT_TOL))
            )
            cand = np.nonzero(elig)[0]
            if cand.size == 0:
                return OPTIMAL
            bland = degenerate >= DEGENERATE_RUN
            q = int(cand[0]) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            dirn = -1.0 if self.at_upper[q] else 1.0
            alpha = self.Binv @ self.M[:, q]
            delta = dirn * alpha
            loB = self.lo[self.basis]
            hiB = self.hi[self.basis]
            t = np.full(m, np.inf)
            pos = delta > PIVOT_TOL
            neg = delta < -PIVOT_TOL
            t[pos] = (self.xB[pos] - loB[pos]) / delta[pos]
            fin = neg & np.isfinite(hiB)
            t[fin] = (hiB[fin] - self.xB[fin]) / (-delta[fin])
            t = np.maximum(t, 0.0)
            t_flip = self.hi[q] - self.lo[q]
            t_min = t.min() if m else np.inf
            if not np.isfinite(t_min) and not np.isfinite(t_flip):
                return UNBOUNDED
            self.iterations += 1
            since_refactor += 1
            if t_flip <= t_min:
                self.xB -= t_flip * delta
                self.at_upper[q] = not self.at_upper[q]
                degenerate = 0
                continue
            ties = np.nonzero(t <= t_min + 1e-12)[0]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(np.abs(delta[ties]))])
            degenerate = degenerate + 1 if t_min <= 1e-12 else 0
            leaving = self.basis[r]
            enter_val = (self.hi[q] if self.at_upper[q] else self.lo[q]) + dirn * t_min
            self.xB -= t_min * delta
            self.at_upper[leaving] = bool(delta[r] < 0)
            self.xB[r] = enter_val
            self.basis[r] = q
            piv = alpha[r]
            row = self.Binv[r] / piv
            self.Binv -= np.outer(alpha, row)
            self.Binv[r] = row


def _trivial(c, lb, ub) -> LPResult:
    x = np.where(c >= 0, lb, ub)
    if not np.all(np.isfinite(x)):
        return LPResult(UNBOUNDED, None, -np.inf)
    return LPResult(OPTIMAL, x, float(c @ x))


def solve_lp(c, A, b, lb, ub, max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    lb = np.asarray(lb, float)
    ub = np.asarray(ub, float)
    if np.any(lb > ub + FEAS_TOL):
        return LPResult(INFEASIBLE, None, np.nan)
    if not np.all(np.isfinite(lb)):
        raise ValueError("built-in simplex requires finite lower bounds")

    # presolve: substitute fixed columns, drop empty rows
    fixed = ub - lb <= 1e-12
    free_idx = np.nonzero(~fixed)[0]
    b_red = b - A[:, fixed] @ lb[fixed]
    A_red = A[:, free_idx]
    nonempty = np.any(np.abs(A_red) > 0, axis=1)
    if np.any(b_red[~nonempty] < -FEAS_TOL):
        return LPResult(INFEASIBLE, None, np.nan)
    A_red, b_red = A_red[nonempty], b_red[nonempty]
    c_red, lo_red, hi_red = c[free_idx], lb[free_idx], ub[free_idx]

    def expand(xr):
        x = lb.copy()
        x[free_idx] = xr
        return x

    m, n = A_red.shape
    if m == 0:
        res = _trivial(c_red, lo_red, hi_red)
        if res.x is not None:
            res.x = expand(res.x)
            res.objective = float(c @ res.x)
        return res

    resid = b_red - A_red @ lo_red
    art_rows = np.nonzero(resid < 0)[0]
    na = len(art_rows)
    E = np.zeros((m, na))
    E[art_rows, np.arange(na)] = -1.0
    M = np.hstack([A_red, np.eye(m), E])
    lo = np.concatenate([lo_red, np.zeros(m), np.zeros(na)])
    hi = np.concatenate([hi_red, np.full(m, np.inf), np.full(na, np.inf)])
    basis = [n + i for i in range(m)]
    for k, i in enumerate(art_rows):
        basis[i] = n + m + k
    spx = _Simplex(M, b_red, lo, hi, basis, np.zeros(n + m + na, bool))

    if na:
        cost1 = np.zeros(n + m + na)
        cost1[n + m:] = 1.0
        status = spx.run(cost1, max_iter)
        if status != OPTIMAL:
            return LPResult(status, None, np.nan, spx.iterations)
        if cost1 @ spx.full_x() > 1e-7:
            return LPResult(INFEASIBLE, None, np.nan, spx.iterations)
        # pin artificials at zero; basic ones at zero level are harmless
        spx.hi[n + m:] = 0.0
        spx.at_upper[n + m:] = False
        spx.refactor()
    cost2 = np.concatenate([c_red, np.zeros(m + na)])
    status = spx.run(cost2, max_iter)
    if status != OPTIMAL:
        return LPResult(status, None, np.nan, spx.iterations)
    xr = np.clip(spx.full_x()[:n], lo_red, hi_red)
    x = expand(xr)
    return LPResult(OPTIMAL, x, float(c @ x), spx.iterations)
