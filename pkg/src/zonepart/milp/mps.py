"""MPS export of a MilpProblem and plain ``variable value`` solution import."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ParameterError
from .problem import BINARY, MilpProblem


def _fmt(v: float) -> str:
    return repr(float(v))


def to_mps(problem: MilpProblem, name: str = "ZONEPART") -> str:
    m, nvar = problem.A.shape
    rows = [f"R{k:05d}_{tag}" for k, tag in enumerate(problem.row_tags)]
    out = [f"NAME          {name}", "ROWS", " N  OBJ"]
    out += [f" L  {r}" for r in rows]
    out.append("COLUMNS")
    in_int = False
    for j, var in enumerate(problem.names):
        is_int = problem.kinds[j] == BINARY
        if is_int and not in_int:
            out.append("    MARKER                 'MARKER'                 'INTORG'")
            in_int = True
        elif not is_int and in_int:
            out.append("    MARKER                 'MARKER'                 'INTEND'")
            in_int = False
        entries = []
        if problem.c[j] != 0:
            entries.append(("OBJ", problem.c[j]))
        entries += [(rows[k], problem.A[k, j]) for k in np.nonzero(problem.A[:, j])[0]]
        if not entries:
            entries.append(("OBJ", 0.0))
        out += [f"    {var:<22} {r:<22} {_fmt(v)}" for r, v in entries]
    if in_int:
        out.append("    MARKER                 'MARKER'                 'INTEND'")
    out.append("RHS")
    if problem.constant:
        # objective-row RHS holds the negated objective constant
        out.append(f"    RHS                    {'OBJ':<22} {_fmt(-problem.constant)}")
    out += [f"    RHS                    {rows[k]:<22} {_fmt(problem.b[k])}" for k in range(m) if problem.b[k] != 0]
    out.append("BOUNDS")
    for j, var in enumerate(problem.names):
        lo, hi = problem.lb[j], problem.ub[j]
        if problem.kinds[j] == BINARY and lo == 0 and hi == 1:
            out.append(f" BV BND       {var}")
            continue
        if lo != 0:
            out.append(f" LO BND       {var:<22} {_fmt(lo)}")
        if np.isfinite(hi):
            out.append(f" UP BND       {var:<22} {_fmt(hi)}")
        else:
            out.append(f" PL BND       {var}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def write_mps(problem: MilpProblem, path, name: str = "ZONEPART") -> None:
    Path(path).write_text(to_mps(problem, name))


def read_mps(text: str) -> dict:
    """Parse the subset of MPS written by :func:`to_mps`.

    Returns a dict with ``A, b, c, lb, ub, integer, names, constant``.
    """
    section = None
    row_names: list[str] = []
    obj_row = None
    cols: dict[str, dict[str, float]] = {}
    order: list[str] = []
    integer: set[str] = set()
    rhs: dict[str, float] = {}
    bounds: dict[str, list] = {}
    in_int = False
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        tok = raw.split()
        if section == "ROWS":
            kind, rname = tok
            if kind == "N":
                obj_row = rname
            elif kind == "L":
                row_names.append(rname)
            else:
                raise ParameterError(f"unsupported row type {kind}")
        elif section == "COLUMNS":
            if tok[1] == "'MARKER'":
                in_int = tok[2] == "'INTORG'"
                continue
            var = tok[0]
            if var not in cols:
                cols[var] = {}
                order.append(var)
            if in_int:
                integer.add(var)
            for k in range(1, len(tok), 2):
                cols[var][tok[k]] = float(tok[k + 1])
        elif section == "RHS":
            for k in range(1, len(tok), 2):
                rhs[tok[k]] = float(tok[k + 1])
        elif section == "BOUNDS":
            kind, var = tok[0], tok[2]
            b = bounds.setdefault(var, [0.0, np.inf])
            if kind == "UP":
                b[1] = float(tok[3])
            elif kind == "LO":
                b[0] = float(tok[3])
            elif kind == "BV":
                b[:] = [0.0, 1.0]
            elif kind == "PL":
                b[1] = np.inf
            elif kind == "FX":
                b[:] = [float(tok[3])] * 2
    rindex = {r: k for k, r in enumerate(row_names)}
    A = np.zeros((len(row_names), len(order)))
    c = np.zeros(len(order))
    for j, var in enumerate(order):
        for r, v in cols[var].items():
            if r == obj_row:
                c[j] = v
            else:
                A[rindex[r], j] = v
    b = np.array([rhs.get(r, 0.0) for r in row_names])
    lb = np.array([bounds.get(v, [0.0, np.inf])[0] for v in order])
    ub = np.array([bounds.get(v, [0.0, np.inf])[1] for v in order])
    return {
        "A": A, "b": b, "c": c, "lb": lb, "ub": ub,
        "integer": np.array([v in integer for v in order]),
        "names": tuple(order),
        "constant": -rhs.get(obj_row, 0.0),
    }


def read_solution(text: str, problem: MilpProblem) -> np.ndarray:
    """Values from ``variable value`` lines; unlisted variables are zero."""
    index = {name: j for j, name in enumerate(problem.names)}
    x = np.zeros(len(problem.names))
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParameterError(f"line {lineno}: expected 'variable value'")
        if parts[0] not in index:
            raise ParameterError(f"line {lineno}: unknown variable {parts[0]}")
        x[index[parts[0]]] = float(parts[1])
    return x


def write_solution(x: np.ndarray, problem: MilpProblem) -> str:
    return "".join(f"{name} {_fmt(v)}\n" for name, v in zip(problem.names, x))
