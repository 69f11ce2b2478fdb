import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garpnet.datagen import SimConfig, agent_name, simulate_population
from garpnet.relations import garp_check


def test_config_validation():
    for bad in (
        dict(n_agents=0), dict(n_types=0), dict(n_types=5, n_agents=4), dict(K=1),
        dict(noise=-0.1), dict(concentration=0.0), dict(income_low=0.0),
        dict(income_low=10.0, income_high=5.0),
    ):
        with pytest.raises(ValueError):
            SimConfig(**bad)


def test_shapes_and_labels():
    out = simulate_population(SimConfig(n_agents=6, n_types=3, n_obs=4, K=3, seed=1))
    ds = out.dataset
    assert len(ds) == 24 and ds.K == 3
    assert ds.agents == [agent_name(i, 6) for i in range(6)] == [f"h00{i}" for i in range(6)]
    assert [out.types[a] for a in ds.agents] == [0, 1, 2, 0, 1, 2]
    assert out.exponents.shape == (3, 3)
    np.testing.assert_allclose(out.exponents.sum(axis=1), 1.0)
    assert set(out.covariates) == {"type", "decoy_binary", "decoy_level"}
    assert out.covariates["type"]["h001"] == "T1"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_budget_exhaustion_and_shares(seed, n_types):
    out = simulate_population(SimConfig(n_agents=6, n_types=n_types, n_obs=5, seed=seed))
    ds = out.dataset
    spend = ds.expenditures
    assert ((spend >= 50 - 1e-9) & (spend <= 150 + 1e-9)).all()
    shares = ds.prices * ds.quantities / spend[:, None]
    for r, a in enumerate(ds.agent_of):
        np.testing.assert_allclose(shares[r], out.exponents[out.types[a]], atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_one_type_pools_consistently(seed):
    out = simulate_population(SimConfig(n_agents=10, n_types=1, n_obs=8, seed=seed))
    assert garp_check(out.dataset, 1.0).satisfied


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_each_agent_consistent(seed):
    ds = simulate_population(SimConfig(n_agents=8, n_obs=10, seed=seed)).dataset
    for a in ds.agents:
        assert garp_check(ds, 1.0, ds.rows_for_agents([a])).satisfied


def test_two_separated_types_usually_violate_when_pooled():
    violated = [
        not garp_check(simulate_population(SimConfig(n_agents=10, n_obs=10, seed=s)).dataset, 1.0).satisfied
        for s in range(10)
    ]
    assert sum(violated) >= 9


def test_determinism_and_prefix_stability():
    a = simulate_population(SimConfig(n_agents=5, seed=7))
    b = simulate_population(SimConfig(n_agents=5, seed=7))
    np.testing.assert_array_equal(a.dataset.quantities, b.dataset.quantities)
    # agents' data do not depend on how many agents follow (same name width)
    big = simulate_population(SimConfig(n_agents=8, seed=7))
    np.testing.assert_array_equal(big.dataset.prices[: 5 * 20], a.dataset.prices)
    c = simulate_population(SimConfig(n_agents=5, seed=8))
    assert not np.array_equal(a.dataset.prices, c.dataset.prices)


def test_noise_breaks_exact_shares():
    out = simulate_population(SimConfig(n_agents=4, n_obs=5, noise=0.3, seed=2))
    ds = out.dataset
    shares = ds.prices * ds.quantities / ds.expenditures[:, None]
    assert not np.allclose(shares[0], out.exponents[0])
    assert (ds.quantities >= 0).all()
