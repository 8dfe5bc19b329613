"""Wealth/rate reparametrization of utility and risk functionals.

With initial wealth ``w`` and risk-free rate ``r`` the terminal wealth of a
portfolio holding fractions ``pi`` of wealth in the risky assets is
``w(1+r) + w X_pi``.  The transformed functionals measure that wealth
relative to the riskless position:

    U_{w,r}(Y) = U(w(1+r) + wY) - U(w(1+r))
    R_{w,r}(Y) = R(w(1+r) + wY) - R(w(1+r))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, PreconditionError
from .risk import RiskSpec
from .utility import UtilitySpec

BUDGET_TOL = 1e-12


def _constant(value: float, n: int) -> np.ndarray:
    return np.full(n, float(value))


def utility_base(spec: UtilitySpec, w: float, r: float, probs) -> float:
    """``U(w(1+r))`` on the scenario space of ``probs``."""
    probs = np.asarray(probs, dtype=float)
    return float(spec.evaluate(_constant(w * (1.0 + r), probs.shape[0]), probs))


def risk_base(spec: RiskSpec, w: float, r: float, probs) -> float:
    """``R(w(1+r))`` on the scenario space of ``probs``."""
    probs = np.asarray(probs, dtype=float)
    return float(spec.evaluate(_constant(w * (1.0 + r), probs.shape[0]), probs))


@dataclass(frozen=True)
class ProblemFrame:
    """Wealth, rate and thresholds of one portfolio problem.

    ``rmax`` is the risk budget for terminal wealth and ``risk_base`` the risk
    of the riskless position, so the budget for the transformed problem is
    ``rtilde_max = rmax - risk_base``.  The utility floor ``umin`` (used by
    risk minimization) works the same way.
    """

    w: float
    r: float
    rmax: float = math.inf
    risk_base: float = 0.0
    umin: float | None = None
    utility_base: float = 0.0

    def __post_init__(self):
        if not self.w > 0:
            raise PreconditionError("initial wealth w must be positive")
        if not self.r > -1:
            raise PreconditionError("risk-free rate r must exceed -1")
        if self.rmax < self.risk_base:
            raise PreconditionError(
                f"risk threshold {self.rmax!r} is below the risk {self.risk_base!r} of the riskless position"
            )

    @property
    def riskless_wealth(self) -> float:
        return self.w * (1.0 + self.r)

    @property
    def rtilde_max(self) -> float:
        return self.rmax - self.risk_base

    @property
    def utilde_min(self) -> float | None:
        return None if self.umin is None else self.umin - self.utility_base


def make_frame(
    w: float,
    r: float,
    probs,
    risk: RiskSpec | None = None,
    utility: UtilitySpec | None = None,
    *,
    rmax: float | None = None,
    rtilde_max: float | None = None,
    umin: float | None = None,
    utilde_min: float | None = None,
) -> ProblemFrame:
    """Build a frame from either raw thresholds or transformed ones.

    Bases are evaluated once here; pass ``risk`` (resp. ``utility``) whenever a
    risk (resp. utility) threshold is given.
    """
    if rmax is not None and rtilde_max is not None:
        raise ValueError("give rmax or rtilde_max, not both")
    if umin is not None and utilde_min is not None:
        raise ValueError("give umin or utilde_min, not both")
    rb = risk_base(risk, w, r, probs) if risk is not None else 0.0
    ub = utility_base(utility, w, r, probs) if utility is not None else 0.0
    if rtilde_max is not None:
        if rtilde_max < 0:
            raise PreconditionError("transformed risk threshold must be nonnegative")
        rmax = rb + rtilde_max
    if utilde_min is not None:
        umin = ub + utilde_min
    return ProblemFrame(
        w=float(w), r=float(r), rmax=math.inf if rmax is None else float(rmax),
        risk_base=rb, umin=None if umin is None else float(umin), utility_base=ub,
    )


def transformed_utility(spec: UtilitySpec, frame: ProblemFrame, Y, probs):
    """``U(w(1+r) + wY) - U(w(1+r))``; batched over leading axes of ``Y``."""
    Y = np.asarray(Y, dtype=float)
    c = frame.riskless_wealth
    base = spec.evaluate(_constant(c, Y.shape[-1]), probs)
    return spec.evaluate(c + frame.w * Y, probs) - base


def transformed_risk(spec: RiskSpec, frame: ProblemFrame, Y, probs):
    """``R(w(1+r) + wY) - R(w(1+r))``; batched over leading axes of ``Y``."""
    Y = np.asarray(Y, dtype=float)
    c = frame.riskless_wealth
    base = spec.evaluate(_constant(c, Y.shape[-1]), probs)
    return spec.evaluate(c + frame.w * Y, probs) - base


def shares_to_fractions(theta, w: float) -> np.ndarray:
    """Risky-asset fractions ``theta[1:] / w`` of a share vector ``(theta0, theta1, ...)``.

    All initial prices are 1, so the budget identity reads ``sum(theta) = w``.
    """
    theta = np.asarray(theta, dtype=float)
    if not w > 0:
        raise PreconditionError("initial wealth w must be positive")
    if theta.ndim != 1 or theta.shape[0] < 2:
        raise ValueError("share vector needs a riskless entry and at least one risky asset")
    if abs(theta.sum() - w) > BUDGET_TOL * max(1.0, abs(w)):
        raise BudgetError(f"shares cost {theta.sum()!r}, budget is {w!r}")
    return theta[1:] / w


def fractions_to_shares(pi, w: float) -> np.ndarray:
    """Inverse of :func:`shares_to_fractions`: riskless holding ``w - sum(w pi)``."""
    pi = np.asarray(pi, dtype=float)
    if not w > 0:
        raise PreconditionError("initial wealth w must be positive")
    risky = w * pi
    return np.concatenate([[w - risky.sum()], risky])


def share_payoff(theta, returns, r: float) -> np.ndarray:
    """Terminal value ``theta . S1`` with ``S1 = (1+r, 1+r+X^1, ..., 1+r+X^d)``."""
    theta = np.asarray(theta, dtype=float)
    X = np.asarray(returns, dtype=float)
    n = X.shape[0]
    S1 = np.column_stack([np.full(n, 1.0 + r), 1.0 + r + X])
    return S1 @ theta
