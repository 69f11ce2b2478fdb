import pytest
from hypothesis import given, settings

from garpnet.data import Dataset
from garpnet.fixtures import three_agent_dataset
from garpnet.ls import LsProblem, solve_ls_exact
from garpnet.milp import DELTA_U, build_milp, export_milp
from garpnet.relations import garp_check

from .lp_reader import parse_lp, solve_lp_text
from .strategies import panels


def test_minimal_instance_counts():
    ds = Dataset.from_arrays(["a"], [[1, 2]], [[1, 1]])
    model = build_milp(LsProblem(ds, 1.0))
    assert len(model.rows) == 4
    assert model.utility_vars == ("U_0",)
    assert model.binary_vars == ("x_0", "psi_0_0")


def test_two_agents_counts():
    ds = Dataset.from_arrays(["a", "b"], [[1, 2], [2, 1]], [[1, 1], [1, 1]])
    model = build_milp(LsProblem(ds, 1.0))
    assert len(model.rows) == 16
    assert len(model.utility_vars) == 2
    assert sum(v.startswith("x_") for v in model.binary_vars) == 2
    assert sum(v.startswith("psi_") for v in model.binary_vars) == 4


def test_constants_and_text_layout():
    problem = LsProblem(three_agent_dataset(), 1.0)
    model = build_milp(problem)
    assert model.A == pytest.approx(1.01)
    assert model.eps_strict == pytest.approx(1e-6 * model.A)
    text = export_milp(problem)
    assert text == model.to_lp()
    parsed = parse_lp(text)
    assert parsed["sense"] == "maximize"
    assert parsed["objective"] == {"x_0": 1.0, "x_1": 1.0, "x_2": 1.0}
    assert len(parsed["rows"]) == 4 * 36
    assert all(b == (0.0, pytest.approx(1 - DELTA_U)) for b in parsed["bounds"].values())
    assert text.rstrip().endswith("End")


def test_three_agent_round_trip_objective_one():
    problem = LsProblem(three_agent_dataset(), 1.0)
    value, x = solve_lp_text(export_milp(problem))
    assert value == pytest.approx(1.0)
    assert solve_ls_exact(problem).cardinality == 1


@settings(max_examples=25, deadline=None)
@given(panels(max_agents=4, max_obs=2))
def test_milp_optimum_matches_search(ds):
    problem = LsProblem(ds, 1.0)
    value, x = solve_lp_text(export_milp(problem))
    assert round(value) == solve_ls_exact(problem).cardinality
    chosen = [a for i, a in enumerate(problem.agents) if x[f"x_{i}"] > 0.5]
    if chosen:
        assert garp_check(ds, 1.0, ds.rows_for_agents(chosen)).satisfied
