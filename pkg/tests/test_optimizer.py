import numpy as np
import pytest

from utilrisk.errors import DimensionError, InfeasibleError, PreconditionError
from utilrisk.optimizer import (
    DIVERGING,
    INFEASIBLE,
    OPTIMAL,
    SolveOptions,
    divergence_probe,
    grid_oracle,
    maximize_utility,
    maximize_utility_shares,
    minimize_risk,
    uniqueness_probe,
)
from utilrisk.risk import ES, VaR, WorstCase, Zero, ExpectedWeightedLoss, ExpMinusOne
from utilrisk.scenarios import make_scenario_set
from utilrisk.transform import ProblemFrame, make_frame
from utilrisk.utility import ExpectedUtility, Exponential, Mean, SShaped


@pytest.fixture
def half_market():
    return make_scenario_set([[2.0], [-1.0]], [0.5, 0.5], 0.0)


@pytest.fixture
def skewed_market():
    return make_scenario_set([[2.0], [-1.0]], [0.6, 0.4], 0.0)


@pytest.fixture
def two_asset_market():
    X = [[0.3, -0.1], [-0.2, 0.25], [0.05, -0.2], [-0.1, 0.1], [0.15, 0.05]]
    return make_scenario_set(X, [0.2, 0.2, 0.2, 0.2, 0.2], 0.01)


def _frame(mkt, U, R, **kw):
    return make_frame(1.0, mkt.rate, mkt.probs, risk=R, utility=U, **kw)


def test_mean_es_optimum(half_market):
    U, R = Mean(), ES(0.5)
    res = maximize_utility(U, R, half_market, _frame(half_market, U, R, rtilde_max=0.5))
    assert res.status == OPTIMAL
    assert res.pi[0] == pytest.approx(0.5, abs=1e-6)
    assert res.value == pytest.approx(0.25, abs=1e-6)
    assert res.constraint_value <= 0.5 + 1e-9
    assert uniqueness_probe(res)


def test_mean_var_diverges(skewed_market):
    U, R = Mean(), VaR(0.5)
    frame = _frame(skewed_market, U, R, rtilde_max=0.5)
    res = maximize_utility(U, R, skewed_market, frame)
    assert res.status == DIVERGING
    assert res.pi[0] > 0
    trace = res.value_trace
    assert np.all(np.diff(trace) > 0)
    assert np.all(res.evidence.constraint <= 0.5)
    ev = divergence_probe(U, R, skewed_market, frame)
    assert ev is not None and ev.direction[0] == pytest.approx(1.0)


def test_exponential_loss_restores_optimum(skewed_market):
    U, R = Mean(), ExpectedWeightedLoss(ExpMinusOne(1.0))
    frame = _frame(skewed_market, U, R, rtilde_max=0.5)
    res = maximize_utility(U, R, skewed_market, frame)
    assert res.status == OPTIMAL
    _, grid_val = grid_oracle(U, R, skewed_market, frame, box=4.0, steps=4001)
    assert res.value >= grid_val - 1e-9
    assert res.value == pytest.approx(grid_val, abs=1e-3)


@pytest.mark.parametrize("U", [Mean(), ExpectedUtility(Exponential(1.0)), ExpectedUtility(SShaped(0.5, 0.7))], ids=repr)
def test_worst_case_with_zero_budget_holds_cash(U, two_asset_market):
    R = WorstCase()
    res = maximize_utility(U, R, two_asset_market, _frame(two_asset_market, U, R, rtilde_max=0.0))
    assert res.status == OPTIMAL
    np.testing.assert_allclose(res.pi, 0.0, atol=1e-9)
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_worst_case_probe_finds_nothing(two_asset_market):
    U, R = Mean(), WorstCase()
    assert divergence_probe(U, R, two_asset_market, _frame(two_asset_market, U, R, rtilde_max=1.0)) is None


def test_sshaped_without_constraint_probe_finds_nothing(two_asset_market):
    U, R = ExpectedUtility(SShaped(0.5, 0.7)), Zero()
    assert divergence_probe(U, R, two_asset_market, _frame(two_asset_market, U, R, rtilde_max=0.0)) is None


def test_grid_oracle_examples(half_market, two_asset_market):
    U, R = Mean(), ES(0.5)
    pi, val = grid_oracle(U, R, half_market, _frame(half_market, U, R, rtilde_max=0.5), box=4.0, steps=1601)
    assert val == pytest.approx(0.25, abs=8 / 1600)
    pi, val = grid_oracle(U, WorstCase(), two_asset_market, _frame(two_asset_market, U, WorstCase(), rtilde_max=0.0))
    np.testing.assert_array_equal(pi, [0.0, 0.0])


def test_grid_oracle_reflection_symmetry():
    mkt = make_scenario_set([[1.0], [-1.0]], [0.5, 0.5])
    U, R = ExpectedUtility(SShaped(0.5, 0.5)), ES(0.5)
    frame = _frame(mkt, U, R, rtilde_max=0.7)
    pi, val = grid_oracle(U, R, mkt, frame, box=2.0, steps=401)
    flipped = make_scenario_set([[-1.0], [1.0]], [0.5, 0.5])
    pi2, val2 = grid_oracle(U, R, flipped, frame, box=2.0, steps=401)
    assert val == val2


def test_grid_oracle_dimension_limit():
    X = np.vstack([np.eye(3), -np.ones(3)])
    mkt = make_scenario_set(X, np.full(4, 0.25))
    with pytest.raises(DimensionError):
        grid_oracle(Mean(), Zero(), mkt, make_frame(1.0, 0.0, mkt.probs))


def test_minrisk_examples(half_market):
    U, R = Mean(), ES(0.5)
    res = minimize_risk(R, U, half_market, _frame(half_market, U, R, utilde_min=0.0))
    assert res.status == OPTIMAL
    assert res.value <= 1e-9
    res = minimize_risk(R, U, half_market, _frame(half_market, U, R, utilde_min=0.25))
    assert res.status == OPTIMAL
    assert res.pi[0] == pytest.approx(0.5, abs=1e-6)
    assert res.value == pytest.approx(0.5, abs=1e-6)
    assert res.constraint_value >= 0.25 - 1e-9


def test_minrisk_infeasible():
    mkt = make_scenario_set([[2.0], [-1.0]], [0.5, 0.5])
    U, R = ExpectedUtility(Exponential(1.0)), WorstCase()
    res = minimize_risk(R, U, mkt, _frame(mkt, U, R, utilde_min=2.0))
    assert res.status == INFEASIBLE


def test_threshold_below_riskless_risk(half_market):
    U, R = Mean(), ES(0.5)
    with pytest.raises(PreconditionError):
        make_frame(1.0, 0.0, half_market.probs, risk=R, rmax=-5.0)
    # a hand-built frame with a wrong cached base slips past the frame check
    frame = ProblemFrame(w=1.0, r=0.0, rmax=-5.0, risk_base=-10.0)
    with pytest.raises(InfeasibleError):
        maximize_utility(U, R, half_market, frame)


def test_uniqueness_strictly_concave(two_asset_market):
    U, R = ExpectedUtility(Exponential(1.0)), ES(0.5)
    res = maximize_utility(U, R, two_asset_market, _frame(two_asset_market, U, R, rtilde_max=0.1))
    assert res.status == OPTIMAL
    assert uniqueness_probe(res)


def test_uniqueness_flat_objective():
    mkt = make_scenario_set([[1.0, 1.0], [-1.0, 1.0], [0.0, -1.0]], [0.25, 0.25, 0.5])
    U, R = Mean(), Zero()
    res = maximize_utility(U, R, mkt, _frame(mkt, U, R, rtilde_max=0.0))
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert not uniqueness_probe(res)


def test_determinism(two_asset_market):
    U, R = ExpectedUtility(SShaped(0.5, 0.7)), ES(0.3)
    frame = _frame(two_asset_market, U, R, rtilde_max=0.2)
    a = maximize_utility(U, R, two_asset_market, frame, SolveOptions(seed=5))
    b = maximize_utility(U, R, two_asset_market, frame, SolveOptions(seed=5))
    assert a.status == b.status
    np.testing.assert_array_equal(a.pi, b.pi)
    assert a.value == b.value and a.evaluations == b.evaluations


def test_frontier_is_monotone(two_asset_market):
    U, R = ExpectedUtility(Exponential(1.0)), ES(0.3)
    values = []
    for rt in np.linspace(0.0, 0.3, 7):
        res = maximize_utility(U, R, two_asset_market, _frame(two_asset_market, U, R, rtilde_max=rt))
        assert res.status == OPTIMAL
        assert res.constraint_value <= rt + 1e-9
        values.append(res.value)
    assert np.all(np.diff(values) >= -1e-7)


def test_share_space_bridge(two_asset_market):
    U, R = ExpectedUtility(Exponential(1.0)), ES(0.3)
    w, r = 2.0, two_asset_market.rate
    frame = make_frame(w, r, two_asset_market.probs, risk=R, utility=U, rtilde_max=0.15)
    sol = maximize_utility_shares(U, R, two_asset_market, w, r, frame.rmax)
    frac = maximize_utility(U, R, two_asset_market, frame)
    np.testing.assert_allclose(sol.theta[1:] / w, frac.pi, atol=1e-12)
    assert sol.theta.sum() == pytest.approx(w, rel=1e-12)
    assert sol.value - frac.value == pytest.approx(frame.utility_base, abs=1e-9)


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(n_starts=0)
    with pytest.raises(ValueError):
        SolveOptions(ray_lambdas=(1.0, 2.0))
