"""Mixed-integer formulation of the largest-consistent-subset problem, as LP text.

Variables per problem: a utility level ``U_n`` in ``[0, 1 - delta_U]`` for each
observation, a binary ``x_i`` per agent (agent kept) and a binary ``psi_n_k``
per ordered observation pair (``U_n >= U_k`` allowed).  Four rows per ordered
pair tie the utility ordering to the deflated budget comparisons.  Strict
inequalities are closed off by a margin: ``delta_U`` on the utility scale and
``eps_strict = 1e-6 * A`` on the expenditure scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ls import LsProblem

DELTA_U = 1e-6
EPS_STRICT_REL = 1e-6
BIG_A_FACTOR = 1.01


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=" | ">="
    rhs: float


@dataclass(frozen=True)
class LsMilpModel:
    agents: tuple[str, ...]
    observations: tuple[tuple[str, str], ...]
    objective: tuple[str, ...]
    rows: tuple[Row, ...]
    utility_vars: tuple[str, ...]
    binary_vars: tuple[str, ...]
    A: float
    eps_strict: float
    delta_u: float

    def to_lp(self) -> str:
        out = ["\\ Largest jointly GARP-consistent agent subset"]
        out += [f"\\ x_{i} = agent {a}" for i, a in enumerate(self.agents)]
        out += [f"\\ U_{n} = observation {a}/{o}" for n, (a, o) in enumerate(self.observations)]
        out.append(f"\\ A = {_num(self.A)}, eps_strict = {_num(self.eps_strict)}, delta_U = {_num(self.delta_u)}")
        out.append("Maximize")
        out.append(" obj: " + " + ".join(self.objective))
        out.append("Subject To")
        for r in self.rows:
            out.append(f" {r.name}: {_expr(r.coeffs)} {r.sense} {_num(r.rhs)}")
        out.append("Bounds")
        for u in self.utility_vars:
            out.append(f" 0 <= {u} <= {_num(1.0 - self.delta_u)}")
        out.append("Binaries")
        out.append(" " + " ".join(self.binary_vars))
        out.append("End")
        return "\n".join(out) + "\n"


def _num(v: float) -> str:
    s = f"{float(v):.17g}"
    return "0" if s == "-0" else s


def _expr(coeffs: dict[str, float]) -> str:
    text = ""
    for name, c in coeffs.items():
        if c == 0:
            continue
        term = name if abs(c) == 1 else f"{_num(abs(c))} {name}"
        if not text:
            text = f"-{term}" if c < 0 else term
        else:
            text += f" - {term}" if c < 0 else f" + {term}"
    if not text:
        raise ValueError("empty constraint row")
    return text


def _add(coeffs: dict[str, float], name: str, c: float) -> None:
    coeffs[name] = coeffs.get(name, 0.0) + c


def build_milp(problem: LsProblem) -> LsMilpModel:
    ds = problem.dataset
    agents = problem.agents
    agent_pos = {a: i for i, a in enumerate(agents)}
    rows_idx = ds.rows_for_agents(agents)
    P = ds.prices[rows_idx]
    Q = ds.quantities[rows_idx]
    e = problem.e.for_dataset(ds)[rows_idx]
    owner = [agent_pos[ds.agent_of[r]] for r in rows_idx]
    cost = P @ Q.T  # cost[n, k] = p^n . q^k
    spend = np.diag(cost)
    A = BIG_A_FACTOR * float(spend.max())
    eps = EPS_STRICT_REL * A
    N = len(rows_idx)

    rows: list[Row] = []
    for n in range(N):
        for k in range(N):
            psi = f"psi_{n}_{k}"
            # IP1: U_n - U_k < psi
            c: dict[str, float] = {}
            _add(c, f"U_{n}", 1.0)
            _add(c, f"U_{k}", -1.0)
            _add(c, psi, -1.0)
            rows.append(Row(f"ip1_{n}_{k}", c, "<=", -DELTA_U))
            # IP2: psi - 1 <= U_n - U_k
            c = {}
            _add(c, psi, 1.0)
            _add(c, f"U_{n}", -1.0)
            _add(c, f"U_{k}", 1.0)
            rows.append(Row(f"ip2_{n}_{k}", c, "<=", 1.0))
            # IP3: x_i(n) e^n p^n.q^n - p^n.q^k < psi A
            c = {}
            _add(c, f"x_{owner[n]}", float(e[n] * spend[n]))
            _add(c, psi, -A)
            rows.append(Row(f"ip3_{n}_{k}", c, "<=", float(cost[n, k]) - eps))
            # IP4: (psi - 1) A <= p^k.q^n - x_i(k) e^k p^k.q^k
            c = {}
            _add(c, psi, A)
            _add(c, f"x_{owner[k]}", float(e[k] * spend[k]))
            rows.append(Row(f"ip4_{n}_{k}", c, "<=", float(cost[k, n]) + A))

    return LsMilpModel(
        agents=tuple(agents),
        observations=tuple(ds.observations[r].key for r in rows_idx),
        objective=tuple(f"x_{i}" for i in range(len(agents))),
        rows=tuple(rows),
        utility_vars=tuple(f"U_{n}" for n in range(N)),
        binary_vars=tuple(
            [f"x_{i}" for i in range(len(agents))]
            + [f"psi_{n}_{k}" for n in range(N) for k in range(N)]
        ),
        A=A,
        eps_strict=eps,
        delta_u=DELTA_U,
    )


def export_milp(problem: LsProblem) -> str:
    """LP-format text of the largest-consistent-subset MILP."""
    return build_milp(problem).to_lp()
