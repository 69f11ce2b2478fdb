"""Minimal reader for the LP-format subset written by the exporter.

Test-only: turns the text back into matrices for ``scipy.optimize.milp`` so the
exported model can be solved without trusting the in-memory builder.
"""

from __future__ import annotations

import re

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _linear(expr: str) -> dict[str, float]:
    """Parse ``[-]term (+|- term)*`` where a term is ``[coef] name``."""
    out: dict[str, float] = {}
    sign, coef = 1.0, 1.0
    for tok in expr.replace("-", " - ").replace("e - ", "e-").replace("+", " + ").replace("e + ", "e+").split():
        if tok in ("+", "-"):
            sign, coef = (1.0 if tok == "+" else -1.0), 1.0
        elif NAME.match(tok):
            out[tok] = out.get(tok, 0.0) + sign * coef
            sign, coef = 1.0, 1.0
        else:
            coef = float(tok)
    return out


def parse_lp(text: str) -> dict:
    section = None
    objective: dict[str, float] = {}
    rows: list[tuple[dict[str, float], str, float]] = []
    bounds: dict[str, tuple[float, float]] = {}
    binaries: list[str] = []
    sense = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        head = line.lower()
        if head in ("maximize", "minimize"):
            section, sense = "obj", head
            continue
        if head in ("subject to", "bounds", "binaries", "end"):
            section = head
            continue
        if section == "obj":
            objective = _linear(line.split(":", 1)[1])
        elif section == "subject to":
            _, body = line.split(":", 1)
            m = re.match(r"(.*?)(<=|>=|=)\s*(\S+)$", body.strip())
            rows.append((_linear(m.group(1)), m.group(2), float(m.group(3))))
        elif section == "bounds":
            lo, name, hi = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)", line).groups()
            bounds[name] = (float(lo), float(hi))
        elif section == "binaries":
            binaries.extend(line.split())
    return {"sense": sense, "objective": objective, "rows": rows, "bounds": bounds, "binaries": binaries}


def solve_lp_text(text: str) -> tuple[float, dict[str, float]]:
    model = parse_lp(text)
    names = sorted(
        set(model["objective"]) | set(model["bounds"]) | set(model["binaries"])
        | {v for r in model["rows"] for v in r[0]}
    )
    idx = {v: i for i, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, w in model["objective"].items():
        c[idx[v]] = w
    if model["sense"] == "maximize":
        c = -c
    A = np.zeros((len(model["rows"]), len(names)))
    lo = np.full(len(model["rows"]), -np.inf)
    hi = np.full(len(model["rows"]), np.inf)
    for r, (coefs, op, rhs) in enumerate(model["rows"]):
        for v, w in coefs.items():
            A[r, idx[v]] = w
        if op in ("<=", "="):
            hi[r] = rhs
        if op in (">=", "="):
            lo[r] = rhs
    lb = np.zeros(len(names))
    ub = np.full(len(names), np.inf)
    integrality = np.zeros(len(names))
    for v in model["binaries"]:
        ub[idx[v]] = 1.0
        integrality[idx[v]] = 1
    for v, (a, b) in model["bounds"].items():
        lb[idx[v]], ub[idx[v]] = a, b
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integrality,
               bounds=Bounds(lb, ub))
    if not res.success:
        raise RuntimeError(res.message)
    value = -res.fun if model["sense"] == "maximize" else res.fun
    return value, {v: float(res.x[i]) for v, i in idx.items()}
