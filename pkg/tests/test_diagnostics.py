import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from utilrisk.diagnostics import (
    GaussianWitness,
    NotApplicable,
    axiom_harness,
    classify_wellposedness,
    gaussian_witness,
    scaling_probe,
    table_matrix,
)
from utilrisk.diagnostics.classify import ILL_POSED, UNKNOWN, WELL_POSED
from utilrisk.diagnostics.normal import es_standard_normal, norm_ppf, var_standard_normal
from utilrisk.errors import PreconditionError
from utilrisk.optimizer import divergence_probe
from utilrisk.risk import (
    ES,
    VaR,
    Entropic,
    ExpectedWeightedLoss,
    ExpMinusOne,
    Identity,
    PartitionFixture,
    ShortfallRisk,
    WorstCase,
    Zero,
)
from utilrisk.scenarios import discretize_gaussian
from utilrisk.transform import make_frame
from utilrisk.utility import (
    EssinfFixture,
    ExpectedUtility,
    Exponential,
    Mean,
    PartitionEssinfFixture,
    Power,
    SShaped,
)

TABLE1 = [
    "✗✗✓✓✓",
    "✗✗✓✓✓",
    "✗✗✓✓✓",
    "✓✓✓✓✓",
]
TABLE2 = ["✓✗", "✓✓", "✓✗", "✓✓", "✓✗", "✓✓", "✓✗", "✓✓", "✓✗", "✓✓", "✓✗"]


# -- classifier --------------------------------------------------------------


@pytest.mark.parametrize(
    "U, R, verdict",
    [
        (Mean(), VaR(0.05), ILL_POSED),
        (ExpectedUtility(Power(0.5)), ES(0.05), WELL_POSED),
        (Mean(), Entropic(1.0), WELL_POSED),
        (Mean(), Zero(), ILL_POSED),
        (ExpectedUtility(SShaped(0.5, 0.7)), Zero(), WELL_POSED),
        (ExpectedUtility(SShaped(0.7, 0.5)), ExpectedWeightedLoss(Identity()), ILL_POSED),
    ],
    ids=repr,
)
def test_classifier_examples(U, R, verdict):
    assert classify_wellposedness(U, R).verdict == verdict


def test_classification_basis_is_consistent():
    c = classify_wellposedness(Mean(), VaR(0.05))
    assert not c.basis.U_sll and not c.basis.R_sll
    assert c.citations and not c.failing
    js = c.to_json()
    assert js["verdict"] == "IllPosed" and set(js) >= {"verdict", "basis", "citations"}


@pytest.mark.parametrize("U", [Mean(), ExpectedUtility(SShaped(0.5, 0.7)), ExpectedUtility(SShaped(0.7, 0.5)),
                               ExpectedUtility(Exponential(1.0))], ids=repr)
@pytest.mark.parametrize("R", [Zero(), VaR(0.05), ES(0.05), Entropic(1.0), WorstCase(),
                               ShortfallRisk(ExpMinusOne(1.0)), ExpectedWeightedLoss(Identity())], ids=repr)
def test_verdicts_follow_sensitivity(U, R):
    c = classify_wellposedness(U, R)
    sll = c.basis.U_sll or c.basis.R_sll
    if c.verdict == WELL_POSED:
        assert sll
    elif c.verdict == ILL_POSED:
        assert not sll and not c.failing
    else:
        assert c.failing


def test_either_side_suffices():
    # a sensitive utility with an insensitive risk, and the reverse
    a = classify_wellposedness(ExpectedUtility(SShaped(0.5, 0.7)), Zero())
    b = classify_wellposedness(Mean(), Entropic(1.0))
    assert a.basis.U_sll and not a.basis.R_sll
    assert b.basis.R_sll and not b.basis.U_sll
    assert a.verdict == b.verdict == WELL_POSED


def test_fixtures_are_unknown_with_codes():
    c = classify_wellposedness(EssinfFixture(), PartitionFixture((0,)))
    assert c.verdict == UNKNOWN
    # the essinf fixture is weakly but not strongly sensitive
    assert c.failing == ("U_sensitivity_equiv",)
    c = classify_wellposedness(PartitionEssinfFixture((0,)), PartitionFixture((0,)))
    assert c.verdict == UNKNOWN and "law_invariance" in c.failing


def test_tables_match_published_marks():
    t1, t2 = table_matrix()
    assert ["".join(r) for r in t1.marks()] == TABLE1
    assert ["".join(r) for r in t2.marks()] == TABLE2
    assert t1.title == "Market-independent well-posedness of utility-risk portfolio selection"
    assert sum(map(len, TABLE1)) == 20 and sum(map(len, TABLE2)) == 22


def test_table_render_has_every_row():
    t1, t2 = table_matrix()
    text = t1.render()
    for label in t1.row_labels:
        assert label in text
    assert t2.to_json()["cells"] == t2.marks()


# -- normal helpers ------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(p=st.floats(1e-10, 1 - 1e-10))
def test_norm_ppf_against_scipy(p):
    assert abs(norm_ppf(p) - norm.ppf(p)) < 1e-8


def test_thresholds():
    assert var_standard_normal(0.05) == pytest.approx(1.6448536269514722, abs=1e-8)
    closed = norm.pdf(norm.ppf(0.05)) / 0.05
    assert es_standard_normal(0.05) == pytest.approx(closed, abs=1e-9)


# -- Gaussian witness --------------------------------------------------------


def _recheck(wit: GaussianWitness):
    mu_ex = wit.market.excess_mean
    sigma = wit.market.sigma
    sr = math.sqrt(mu_ex @ np.linalg.solve(sigma, mu_ex))
    assert sr == pytest.approx(wit.sr_max, rel=1e-12)
    assert wit.sr_max >= wit.threshold
    m1 = float(wit.sequence[0].pi @ mu_ex)
    for step in wit.sequence:
        m = float(step.pi @ mu_ex)
        s = math.sqrt(step.pi @ sigma @ step.pi)
        assert step.mean == pytest.approx(m, rel=1e-12)
        assert step.risk == pytest.approx(s * wit.threshold - m, abs=1e-9 * step.n)
        assert step.risk <= 1e-9
        assert abs(step.mean / step.n - m1) <= 1e-12 * (1 + abs(m1))
    means = [s.mean for s in wit.sequence]
    assert np.all(np.diff(means) > 0)


@pytest.mark.parametrize("R, sr", [(VaR(0.05), 2.0), (ES(0.05), 2.5), (VaR(0.01), 3.0)], ids=repr)
@pytest.mark.parametrize("d", [1, 2, 5])
def test_witness_invariants(R, sr, d):
    wit = gaussian_witness(R, sr, d, seed=3)
    assert isinstance(wit, GaussianWitness)
    assert len(wit.sequence) == 20
    _recheck(wit)


def test_es_witness_refused_below_threshold():
    out = gaussian_witness(ES(0.05), 2.0, 2, seed=0)
    assert isinstance(out, NotApplicable)
    assert out.gap == pytest.approx(2.0627128 - 2.0, abs=1e-6)


def test_witness_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gaussian_witness(VaR(0.05), 0.0, 2)
    with pytest.raises(ValueError):
        gaussian_witness(VaR(0.05), 2.0, 0)
    with pytest.raises(TypeError):
        gaussian_witness(Entropic(1.0), 2.0, 2)


@pytest.mark.parametrize("R, sr", [(VaR(0.05), 2.0), (ES(0.05), 2.5)], ids=repr)
def test_witness_direction_diverges_on_discretized_market(R, sr):
    wit = gaussian_witness(R, sr, 2, seed=7)
    mkt = discretize_gaussian(wit.market, 20000, seed=1)
    frame = make_frame(1.0, mkt.rate, mkt.probs, risk=R, utility=Mean(), rtilde_max=0.0)
    ev = divergence_probe(Mean(), R, mkt, frame)
    assert ev is not None
    base = wit.base_direction / np.linalg.norm(wit.base_direction)
    assert ev.direction @ base > 0.999
    # the witness ray itself: sample risk stays nonpositive while the mean grows
    lam = 2.0 ** np.arange(0, 30)
    Y = lam[:, None] * (mkt.returns @ base)[None, :]
    assert np.all(R.evaluate(Y, mkt.probs) <= 0)
    assert np.all(np.diff(Y @ mkt.probs) > 0)


# -- scaling probe -------------------------------------------------------------

Y_TAIL = np.array([-1.0, 1.0])
P_TAIL = np.array([0.1, 0.9])


def test_probe_es_does_not_cross():
    tr = scaling_probe(ES(0.3), Y_TAIL, P_TAIL)
    assert not tr.crossed and tr.lambda_at_cross is None
    assert np.all(tr.values < 0)


def test_probe_ew_crosses():
    tr = scaling_probe(ExpectedWeightedLoss(ExpMinusOne(1.0)), Y_TAIL, P_TAIL)
    assert tr.crossed and tr.lambda_at_cross == 4.0


def test_probe_sshaped_crosses_beyond_analytic_point():
    tr = scaling_probe(ExpectedUtility(SShaped(0.5, 0.7)), Y_TAIL, P_TAIL)
    assert tr.crossed and tr.lambda_at_cross > 9.0**5
    # previous schedule point is on the gain side of 9^5
    assert tr.lambda_at_cross / 2 <= 9.0**5


def test_probe_needs_a_loss():
    with pytest.raises(PreconditionError):
        scaling_probe(ES(0.3), [1.0, 0.0], [0.5, 0.5])


# -- axiom harness -------------------------------------------------------------


def test_axioms_es():
    rep = axiom_harness(ES(0.3), trials=1000, seed=0)
    assert rep.mismatches == []
    assert all(r.passed for r in rep.results.values())


def test_axioms_var_nonconvexity_found_but_not_required():
    rep = axiom_harness(VaR(0.3), trials=1000, seed=0)
    res = rep.results["convex_sample"]
    assert not res.required and not res.passed
    ce = res.counterexample
    Y, Z, lam, p = np.array(ce["Y"]), np.array(ce["Z"]), ce["lam"], np.array(ce["probs"])
    v = VaR(0.3)
    assert v.evaluate(lam * Y + (1 - lam) * Z, p) > lam * v.evaluate(Y, p) + (1 - lam) * v.evaluate(Z, p)
    assert rep.mismatches == []


def test_axioms_zero_trivial():
    rep = axiom_harness(Zero(), trials=200, seed=1)
    assert all(r.passed for r in rep.results.values())


def test_axioms_report_json():
    js = axiom_harness(Mean(), trials=10, seed=0).to_json()
    assert js["mismatches"] == [] and "monotone" in js["axioms"]


def test_axioms_seeded():
    a = axiom_harness(VaR(0.3), trials=300, seed=4).to_json()
    b = axiom_harness(VaR(0.3), trials=300, seed=4).to_json()
    assert a == b


def test_axioms_need_trials():
    with pytest.raises(ValueError):
        axiom_harness(ES(0.3), trials=0)
