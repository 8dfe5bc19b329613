import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utilrisk.errors import ArbitrageError, GenerationError, LengthMismatch, ProbabilityError, RedundancyError
from utilrisk.scenarios import (
    GaussianMarket,
    discretize_gaussian,
    make_scenario_set,
    scenario_set_from_json,
    validate_market,
)


def test_two_scenario_market_is_valid():
    mkt = make_scenario_set([[2.0], [-1.0]], [0.5, 0.5], 0.0)
    assert mkt.n_scenarios == 2 and mkt.n_assets == 1
    assert mkt.report.ok


def test_one_sided_asset_is_arbitrage():
    with pytest.raises(ArbitrageError):
        make_scenario_set([[1.0], [0.0]], [0.5, 0.5])


def test_proportional_columns_are_redundant():
    with pytest.raises(RedundancyError):
        make_scenario_set([[1.0, 2.0], [-1.0, -2.0]], [0.5, 0.5])


@pytest.mark.parametrize("probs", [[0.5, 0.6], [1.0, 0.0], [-0.5, 1.5]])
def test_bad_probabilities(probs):
    with pytest.raises(ProbabilityError):
        make_scenario_set([[2.0], [-1.0]], probs)


def test_probability_length_mismatch():
    with pytest.raises(LengthMismatch):
        make_scenario_set([[2.0], [-1.0]], [1.0])


def test_state_prices_price_assets_to_zero():
    rep = validate_market([[2.0], [-1.0]])
    assert rep.no_arbitrage and rep.non_redundant
    # q = (1, 2)/3 is the unique pricing vector up to scale
    np.testing.assert_allclose(rep.state_prices, [1 / 3, 2 / 3], atol=1e-9)


def test_validate_reports_arbitrage_without_raising():
    rep = validate_market([[1.0], [0.0]])
    assert not rep.no_arbitrage and rep.state_prices is None


def test_rank_three_scenarios():
    assert not validate_market([[1, 1], [-1, -1], [0, 0]]).non_redundant
    assert validate_market([[1, 1], [-1, -1], [0, 3]]).non_redundant


def _sphere_arbitrage(X, k=20000):
    """Dense direction search: some pi has pi.X >= 0 with a positive entry."""
    d = X.shape[1]
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        t = np.linspace(0, 2 * np.pi, k, endpoint=False)
        # extreme rays of {pi: X pi >= 0} are orthogonal to some row; a dense grid alone misses them
        normals = np.stack([-X[:, 1], X[:, 0]], axis=1)
        dirs = np.vstack([np.stack([np.cos(t), np.sin(t)], axis=1), normals, -normals])
    P = dirs @ X.T
    return bool(np.any(np.all(P >= -1e-12, axis=1) & np.any(P > 1e-9, axis=1)))


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(2, 6),
    d=st.integers(1, 2),
    seed=st.integers(0, 2**32 - 1),
)
def test_no_arbitrage_agrees_with_direction_grid(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(-3, 4, size=(n, d)).astype(float)
    rep = validate_market(X)
    if not rep.non_redundant:
        return
    assert rep.no_arbitrage == (not _sphere_arbitrage(X))
    if rep.no_arbitrage:
        assert np.all(rep.state_prices > 0)
        np.testing.assert_allclose(X.T @ rep.state_prices, 0.0, atol=1e-9)


def test_arbitrage_on_boundary_ray():
    # pi = (-2, -3) pays (12, 0, 0): an arbitrage with two zero scenarios
    X = np.array([[-3.0, -2.0], [-3.0, 2.0], [3.0, -2.0]])
    assert not validate_market(X).no_arbitrage
    assert _sphere_arbitrage(X)


def test_discretize_mean_within_three_standard_errors():
    gm = GaussianMarket(mu=[0.2], sigma=[[0.01]], rate=0.0)
    mkt = discretize_gaussian(gm, 1000, seed=42)
    se = np.sqrt(0.01 / 1000)
    assert abs(mkt.returns[:, 0].mean() - 0.2) < 3 * se
    assert np.all(mkt.probs == 1.0 / 1000)


def test_discretize_is_deterministic():
    gm = GaussianMarket(mu=[0.1, 0.05], sigma=[[0.04, 0.01], [0.01, 0.09]], rate=0.01)
    a = discretize_gaussian(gm, 50, seed=3)
    b = discretize_gaussian(gm, 50, seed=3)
    assert np.array_equal(a.returns, b.returns)
    assert not np.array_equal(a.returns, discretize_gaussian(gm, 50, seed=4).returns)


def test_discretize_needs_enough_scenarios():
    gm = GaussianMarket(mu=[0.1], sigma=[[1.0]])
    with pytest.raises(GenerationError):
        discretize_gaussian(gm, 1, seed=0)


def test_discretize_uses_excess_returns():
    gm = GaussianMarket(mu=[1.3], sigma=[[1e-6]], rate=0.3)
    with pytest.raises(GenerationError):
        # every draw is near 1.0 > 0: an arbitrage in every resample
        discretize_gaussian(gm, 20, seed=0, max_retries=3)


def test_gaussian_market_checks():
    with pytest.raises(ValueError):
        GaussianMarket(mu=[0.1], sigma=[[-1.0]])
    with pytest.raises(ValueError):
        GaussianMarket(mu=[0.0], sigma=[[1.0]], rate=0.0)
    gm = GaussianMarket(mu=[0.3, 0.1], sigma=np.diag([0.04, 0.01]), rate=0.1)
    assert gm.sr_max == pytest.approx(np.sqrt(0.2**2 / 0.04))


def test_json_round_trip(tmp_path):
    mkt = make_scenario_set([[2.0, 0.5], [-1.0, 0.3], [0.1, -1.0]], [0.3, 0.3, 0.4], 0.02)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(mkt.to_json()))
    back = scenario_set_from_json(path)
    assert np.array_equal(back.returns, mkt.returns)
    assert np.array_equal(back.probs, mkt.probs)
    assert back.rate == mkt.rate
    assert scenario_set_from_json(mkt.to_json()).n_assets == 2


def test_json_missing_field():
    with pytest.raises(ValueError):
        scenario_set_from_json({"probs": [1.0]})


def test_payoff_shape_check():
    mkt = make_scenario_set([[2.0], [-1.0]], [0.5, 0.5])
    np.testing.assert_array_equal(mkt.payoff([0.5]), [1.0, -0.5])
    with pytest.raises(LengthMismatch):
        mkt.payoff([1.0, 2.0])
