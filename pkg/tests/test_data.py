import numpy as np
import pytest
from hypothesis import given, settings

from garpnet.data import (
    Dataset,
    InputError,
    Observation,
    PrecisionAssignment,
    read_covariates_csv,
    read_observations_csv,
    write_covariates_csv,
    write_observations_csv,
)
from garpnet.fixtures import three_agent_dataset

from .strategies import panels


def test_observation_validation():
    Observation("a", "1", (1.0, 2.0), (0.0, 1.0))
    with pytest.raises(InputError):
        Observation("a", "1", (0.0, 2.0), (1.0, 1.0))
    with pytest.raises(InputError):
        Observation("a", "1", (1.0, 2.0), (-1.0, 1.0))
    with pytest.raises(InputError, match="zero expenditure"):
        Observation("a", "1", (1.0, 2.0), (0.0, 0.0))
    with pytest.raises(InputError):
        Observation("a", "1", (1.0,), (1.0, 1.0))


def test_dataset_rejects_duplicates_and_mixed_K():
    o = Observation("a", "1", (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(InputError, match="duplicate"):
        Dataset((o, o))
    with pytest.raises(InputError):
        Dataset((o, Observation("b", "1", (1.0,), (1.0,))))
    with pytest.raises(InputError):
        Dataset(())


def test_dataset_indexing():
    ds = three_agent_dataset()
    assert ds.K == 4 and len(ds) == 6
    assert ds.agents == ["A", "B", "C"]
    assert ds.rows_of("B") == (2, 3)
    assert ds.row("C", "w2") == 5
    assert ds.rows_for_agents(["C", "A"]) == [0, 1, 4, 5]
    assert ds.restrict(["B"]).agents == ["B"]
    assert not ds.prices.flags.writeable
    with pytest.raises(InputError):
        ds.rows_of("Z")
    np.testing.assert_allclose(ds.expenditures, 1.0)
    assert ds.tolerance == pytest.approx(1e-9)


def test_precision_assignment():
    ds = three_agent_dataset()
    np.testing.assert_array_equal(PrecisionAssignment.uniform(0.9).for_dataset(ds), 0.9)
    e = PrecisionAssignment({("A", "x"): 0.5}, default=1.0)
    assert e.for_dataset(ds)[0] == 0.5 and e.for_dataset(ds)[1] == 1.0
    with pytest.raises(InputError):
        PrecisionAssignment({("A", "x"): 1.5})
    with pytest.raises(InputError, match="no precision"):
        PrecisionAssignment({("A", "x"): 0.5}).for_dataset(ds)


@settings(max_examples=30, deadline=None)
@given(panels(max_agents=3, max_obs=3))
def test_csv_round_trip(tmp_path_factory, ds):
    path = tmp_path_factory.mktemp("csv") / "obs.csv"
    write_observations_csv(ds, path)
    back = read_observations_csv(path)
    assert [o.key for o in back.observations] == [o.key for o in ds.observations]
    np.testing.assert_array_equal(back.prices, ds.prices)
    np.testing.assert_array_equal(back.quantities, ds.quantities)


@pytest.mark.parametrize(
    "body, message",
    [
        ("", "empty"),
        ("agent_id,obs_id,price,quantity\n", "missing columns"),
        ("agent_id,obs_id,good_id,price,quantity\n", "no observations"),
        ("agent_id,obs_id,good_id,price,quantity\na,1,g,x,1\n", "non-numeric"),
        ("agent_id,obs_id,good_id,price,quantity\na,1,g,1,1\na,1,g,1,1\n", "duplicate good"),
        ("agent_id,obs_id,good_id,price,quantity\na,1,g,1,1\na,2,h,1,1\n", "lacks goods"),
        ("agent_id,obs_id,good_id,price,quantity\na,1,g,1,0\n", "zero expenditure"),
        ("agent_id,obs_id,good_id,price,quantity\na,1,g,-1,1\n", "prices"),
    ],
)
def test_csv_validation(tmp_path, body, message):
    path = tmp_path / "obs.csv"
    path.write_text(body)
    with pytest.raises(InputError, match=message):
        read_observations_csv(path)


def test_covariate_csv(tmp_path):
    table = {"edu": {"a": "High", "b": "Low"}, "kids": {"a": "1", "c": "0"}}
    path = tmp_path / "cov.csv"
    write_covariates_csv(table, ["a", "b", "c"], path)
    assert read_covariates_csv(path) == table
    path.write_text("id,edu\n")
    with pytest.raises(InputError):
        read_covariates_csv(path)
