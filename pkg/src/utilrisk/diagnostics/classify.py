"""Market-independent well-posedness of (utility, risk) portfolio selection.

The verdict is read off analytic catalog metadata and the loss-sensitivity
classifications of both sides.  Three results are applied in order:

* expected-utility dichotomy: for ``E[u(.)]`` with ``u`` unbounded, upper
  semicontinuous and negatively star-shaped on the gains side, and a lower
  Fatou, cash-convex risk functional, selection is well posed for every
  market iff ``ALG(u) = -inf`` or the risk functional is sensitive to large
  losses;
* general characterization: for an upper Fatou, sensitivity-equivalent
  utility and a lower Fatou, cash-convex risk functional with one side law
  invariant, well-posed iff either side is sensitive to large losses;
* sufficiency: with upper/lower Fatou alone, a utility sensitive to large
  losses, or a cash-convex risk functional sensitive to large losses,
  already guarantees well-posedness.

Anything else is ``Unknown`` with the blocking premises listed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..risk import (
    ES,
    OCE,
    VaR,
    AdjustedES,
    Entropic,
    ExpectedWeightedLoss,
    ExpMinusOne,
    Identity,
    LVaR,
    PositivePart,
    RiskProfile,
    RiskSpec,
    ShortfallRisk,
    ThresholdDistribution,
    Zero,
    risk_sll,
)
from ..utility import (
    Exponential,
    ExpectedUtility,
    Mean,
    Power,
    SShaped,
    UtilitySpec,
    alg_of,
    utility_sll,
)

WELL_POSED, ILL_POSED, UNKNOWN = "WellPosed", "IllPosed", "Unknown"

CITE_EU = "expected-utility dichotomy: ALG(u) = -inf or R sensitive to large losses"
CITE_GENERAL = "characterization: U or R sensitive to large losses, under Fatou, cash-convexity, sensitivity equivalence and law invariance"
CITE_SUFFICIENT = "sufficiency: sensitivity to large losses bounds every maximizing sequence"


@dataclass(frozen=True)
class Basis:
    U_sll: bool
    R_sll: bool
    U_weak_sll: bool
    U_upper_fatou: bool
    U_sensitivity_equiv: bool
    R_lower_fatou: bool
    R_cash_convex: bool
    law_invariance_side: str  # "both", "utility", "risk" or "none"
    alg: float | None = None


@dataclass(frozen=True)
class Classification:
    verdict: str
    basis: Basis
    reason: str = ""
    failing: tuple[str, ...] = ()
    citations: tuple[str, ...] = field(default=())

    @property
    def well_posed(self) -> bool:
        return self.verdict == WELL_POSED

    def to_json(self) -> dict:
        basis = asdict(self.basis)
        if basis["alg"] is not None and basis["alg"] == float("-inf"):
            basis["alg"] = "-inf"
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "failing": list(self.failing),
            "basis": basis,
            "citations": list(self.citations),
        }


def _law_side(um, rm) -> str:
    if um.law_invariant and rm.law_invariant:
        return "both"
    if um.law_invariant:
        return "utility"
    if rm.law_invariant:
        return "risk"
    return "none"


def _eu_route_failures(U: UtilitySpec) -> list[str]:
    if not isinstance(U, ExpectedUtility):
        return ["EU_form"]
    u = U.u
    out = []
    if not u.unbounded:
        out.append("EU_unbounded")
    if not u.upper_semicontinuous:
        out.append("EU_upper_semicontinuous")
    if not u.neg_star_shaped_on_plus:
        out.append("EU_neg_star_shaped_on_plus")
    return out


def classify_wellposedness(U: UtilitySpec, R: RiskSpec) -> Classification:
    """Classify ``(U, R)`` as WellPosed, IllPosed or Unknown for every market."""
    um, rm = U.metadata, R.metadata
    us, rs = utility_sll(U), risk_sll(R)
    basis = Basis(
        U_sll=us.sll,
        R_sll=rs.sll,
        U_weak_sll=us.weak_sll,
        U_upper_fatou=um.upper_fatou,
        U_sensitivity_equiv=um.sensitivity_equivalent,
        R_lower_fatou=rm.lower_fatou,
        R_cash_convex=rm.cash_convex,
        law_invariance_side=_law_side(um, rm),
        alg=alg_of(U.u) if isinstance(U, ExpectedUtility) else None,
    )
    risk_premises = [name for name, ok in (("R_lower_fatou", rm.lower_fatou), ("R_cash_convex", rm.cash_convex)) if not ok]
    if not rs.applicable:
        risk_premises.append("R_sll_criterion")

    eu_failures = _eu_route_failures(U)
    if not eu_failures and not risk_premises:
        alg_inf = basis.alg == float("-inf")
        if alg_inf or rs.sll:
            why = "ALG(u) = -inf" if alg_inf else "risk functional is sensitive to large losses"
            return Classification(WELL_POSED, basis, why, (), (CITE_EU,))
        return Classification(
            ILL_POSED, basis, "ALG(u) > -inf and the risk functional is not sensitive to large losses", (), (CITE_EU,)
        )

    general = list(risk_premises)
    if not um.upper_fatou:
        general.append("U_upper_fatou")
    if not um.sensitivity_equivalent:
        general.append("U_sensitivity_equiv")
    if basis.law_invariance_side == "none":
        general.append("law_invariance")
    if not us.applicable:
        general.append("U_sll_criterion")
    if not general:
        if us.sll or rs.sll:
            side = "utility" if us.sll else "risk"
            return Classification(WELL_POSED, basis, f"{side} functional is sensitive to large losses", (), (CITE_GENERAL,))
        return Classification(
            ILL_POSED, basis, "neither functional is sensitive to large losses", (), (CITE_GENERAL,)
        )

    if um.upper_fatou and rm.lower_fatou:
        if us.sll and us.applicable:
            return Classification(WELL_POSED, basis, "utility functional is sensitive to large losses", (), (CITE_SUFFICIENT,))
        if rs.sll and rs.applicable and rm.cash_convex:
            return Classification(
                WELL_POSED, basis, "cash-convex risk functional is sensitive to large losses", (), (CITE_SUFFICIENT,)
            )
    return Classification(
        UNKNOWN, basis, "premises of the characterization fail: " + ", ".join(general), tuple(general), ()
    )


# --------------------------------------------------------------------------
# classification tables


@dataclass(frozen=True)
class Table:
    title: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[Classification, ...], ...]

    def marks(self) -> list[list[str]]:
        sym = {WELL_POSED: "✓", ILL_POSED: "✗", UNKNOWN: "?"}
        return [[sym[c.verdict] for c in row] for row in self.cells]

    def render(self) -> str:
        width = max(len(r) for r in self.row_labels)
        head = " " * width + " | " + " | ".join(self.col_labels)
        lines = [self.title, head, "-" * len(head)]
        for label, row in zip(self.row_labels, self.marks()):
            cells = " | ".join(m.center(len(c)) for m, c in zip(row, self.col_labels))
            lines.append(label.ljust(width) + " | " + cells)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "rows": list(self.row_labels),
            "columns": list(self.col_labels),
            "cells": self.marks(),
        }


TABLE1_COLUMNS = (
    ("Mean", Mean()),
    ("S-shaped a>=b (0.6,0.5)", ExpectedUtility(SShaped(0.6, 0.5))),
    ("S-shaped a<b (0.5,0.7)", ExpectedUtility(SShaped(0.5, 0.7))),
    ("Power (0.5)", ExpectedUtility(Power(0.5))),
    ("Exponential (1)", ExpectedUtility(Exponential(1.0))),
)
TABLE1_ROWS = (
    ("No risk constraint", Zero()),
    ("Value at Risk (0.05)", VaR(0.05)),
    ("Expected Shortfall (0.05)", ES(0.05)),
    ("Entropic Risk (1)", Entropic(1.0)),
)

TABLE2_COLUMNS = (
    ("ALG(u) = -inf: S-shaped (0.5,0.7)", ExpectedUtility(SShaped(0.5, 0.7))),
    ("ALG(u) > -inf: S-shaped (0.7,0.5)", ExpectedUtility(SShaped(0.7, 0.5))),
)
TABLE2_ROWS = (
    ("No risk constraint", Zero()),
    ("LVaR, inf beta = 0", LVaR(ThresholdDistribution((-1.0, 0.0), (0.0, 0.05)))),
    ("LVaR, inf beta > 0", LVaR(ThresholdDistribution((0.0,), (0.05,)))),
    ("ES^g, g finite", AdjustedES(RiskProfile((0.05, 1.0), (1.0, 0.0), limit_at_zero=1.0))),
    ("ES^g, g not finite", AdjustedES(RiskProfile((0.05, 1.0), (float("inf"), 0.0)))),
    ("EW, ALG(l) = -inf", ExpectedWeightedLoss(ExpMinusOne(1.0))),
    ("EW, ALG(l) > -inf", ExpectedWeightedLoss(Identity())),
    ("SR, ALG(l) = -inf", ShortfallRisk(ExpMinusOne(1.0))),
    ("SR, ALG(l) > -inf", ShortfallRisk(Identity())),
    ("OCE, slope conditions hold", OCE(ExpMinusOne(1.0))),
    ("OCE, slope conditions fail", OCE(PositivePart(1.0 / 0.05))),
)


def _table(title, rows, cols) -> Table:
    cells = tuple(tuple(classify_wellposedness(U, R) for _, U in cols) for _, R in rows)
    return Table(title, tuple(r for r, _ in rows), tuple(c for c, _ in cols), cells)


def table_matrix() -> tuple[Table, Table]:
    """Both classification matrices: utility/risk families, then expected utility by ALG regime."""
    t1 = _table("Market-independent well-posedness of utility-risk portfolio selection", TABLE1_ROWS, TABLE1_COLUMNS)
    t2 = _table("Market-independent well-posedness of expected-utility/risk portfolio selection", TABLE2_ROWS, TABLE2_COLUMNS)
    return t1, t2
