"""Utility functions, utility functionals and their loss-sensitivity classification.

Every functional here evaluates payoffs given as arrays of shape ``(..., n)``
(scenarios along the last axis, arbitrary leading batch axes) against a
probability vector of shape ``(n,)``.  Values live in ``[-inf, inf)``;
``-inf`` is absorbing under expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import expectation
from .errors import DomainError, LengthMismatch

INF = math.inf


def _as_payoff(Y, probs) -> tuple[np.ndarray, np.ndarray]:
    Y = np.asarray(Y, dtype=float)
    p = np.asarray(probs, dtype=float)
    if Y.ndim == 0 or Y.shape[-1] != p.shape[0]:
        raise LengthMismatch(f"payoff shape {Y.shape} does not match {p.shape[0]} scenarios")
    return Y, p


def _expect(values: np.ndarray, p: np.ndarray) -> np.ndarray | float:
    # -inf * p is -inf and dominates any finite sum; +inf never occurs on the utility side
    return expectation(values, p)


# --------------------------------------------------------------------------
# utility functions u : R -> [-inf, inf)


class UtilityFunction:
    """Increasing, normalized ``u`` with ``u(inf) > u(z)`` and at most linear growth."""

    #: analytic properties, overridden per variant
    unbounded = True
    upper_semicontinuous = True
    neg_star_shaped_on_plus = True
    concave = False
    strictly_concave = False

    def __call__(self, y):
        raise NotImplementedError

    @property
    def alg(self) -> float:
        """Asymptotic loss-gain ratio ``limsup u(-y)/u(y)`` as ``y -> inf``; in ``[-inf, 0]``."""
        raise NotImplementedError

    @property
    def bliss(self) -> float:
        return INF


@dataclass(frozen=True)
class Linear(UtilityFunction):
    a: float = 1.0
    concave = True

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("linear utility needs a > 0")

    def __call__(self, y):
        return self.a * np.asarray(y, dtype=float)

    @property
    def alg(self):
        return -1.0


@dataclass(frozen=True)
class Exponential(UtilityFunction):
    a: float = 1.0
    concave = True
    strictly_concave = True

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("exponential utility needs a > 0")

    def __call__(self, y):
        with np.errstate(over="ignore"):
            return -np.expm1(-self.a * np.asarray(y, dtype=float))

    @property
    def alg(self):
        return -INF

    @property
    def bliss(self):
        return 1.0


@dataclass(frozen=True)
class Power(UtilityFunction):
    """``y**gamma / gamma`` on ``y >= 0`` and ``-inf`` on losses."""

    gamma: float = 0.5
    concave = True
    strictly_concave = True

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("power utility needs gamma in (0, 1)")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 0, np.power(np.maximum(y, 0.0), self.gamma) / self.gamma, -INF)

    @property
    def alg(self):
        return -INF


@dataclass(frozen=True)
class SShaped(UtilityFunction):
    """Prospect-theory value function ``y**alpha`` on gains, ``-(-y)**beta`` on losses."""

    alpha: float = 0.5
    beta: float = 0.7

    def __post_init__(self):
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("S-shaped utility needs alpha, beta in (0, 1)")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(
            y >= 0,
            np.power(np.maximum(y, 0.0), self.alpha),
            -np.power(np.maximum(-y, 0.0), self.beta),
        )

    @property
    def alg(self):
        # u(-y)/u(y) = -y**(beta - alpha)
        if self.alpha < self.beta:
            return -INF
        if self.alpha > self.beta:
            return 0.0
        return -1.0


@dataclass(frozen=True)
class BoundedExponential(UtilityFunction):
    """``1 - exp(-y)`` on gains and ``exp(y) - 1`` on losses; bounded on both sides."""

    unbounded = False

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 0, -np.expm1(-np.abs(y)), np.expm1(-np.abs(y)))

    @property
    def alg(self):
        return -1.0

    @property
    def bliss(self):
        return 1.0


@dataclass(frozen=True)
class PiecewiseLinear(UtilityFunction):
    """Linear interpolation through ``(x, y)`` knots, extended by the end slopes.

    Knots must pass through the origin, be nondecreasing and end with a
    strictly positive slope (non-satiation).
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) < 2 or len(xs) != len(ys):
            raise ValueError("need at least two (x, y) knots")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("knot abscissae must be strictly increasing")
        slopes = self.slopes
        if any(s < 0 for s in slopes):
            raise ValueError("piecewise-linear utility must be nondecreasing")
        if not slopes[-1] > 0:
            raise ValueError("last slope must be positive so that u(inf) exceeds every u(z)")
        if abs(float(self(0.0))) > 1e-12:
            raise ValueError("piecewise-linear utility must satisfy u(0) = 0")

    @property
    def slopes(self) -> tuple[float, ...]:
        return tuple((y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:]))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        xs, ys, s = self.xs, self.ys, self.slopes
        out = np.interp(y, xs, ys)
        out = np.where(y < xs[0], ys[0] + s[0] * (y - xs[0]), out)
        return np.where(y > xs[-1], ys[-1] + s[-1] * (y - xs[-1]), out)

    @property
    def alg(self):
        # u(-y)/u(y) -> -s_left / s_right; a flat left tail gives 0
        return -self.slopes[0] / self.slopes[-1] if self.slopes[0] > 0 else 0.0

    @property
    def concave(self):
        s = self.slopes
        return all(b <= a for a, b in zip(s, s[1:]))

    @property
    def neg_star_shaped_on_plus(self):
        # u(y)/y is nonincreasing on (0, inf) iff every affine piece there has a nonnegative intercept
        xs, ys, s = self.xs, self.ys, self.slopes
        for k, slope in enumerate(s):
            right = xs[k + 1] if k + 1 < len(s) else INF
            if right <= 0:
                continue
            if ys[k] - slope * xs[k] < -1e-12:
                return False
        return True


def utility_value(u: UtilityFunction, y: float) -> float:
    """Scalar evaluation ``u(y)``."""
    return float(u(y))


def alg_of(u: UtilityFunction) -> float:
    """Asymptotic loss-gain ratio of ``u``: ``-inf`` or a finite value in ``[-1, 0]`` for the catalog."""
    return u.alg


def numeric_alg_trace(u: UtilityFunction, y_grid) -> np.ndarray:
    """Ratios ``u(-y)/u(y)`` on a positive grid; an empirical companion to :func:`alg_of`."""
    y = np.asarray(y_grid, dtype=float)
    up = u(y)
    if np.any(up <= 0):
        raise DomainError("u(y) must be positive on the whole grid")
    with np.errstate(over="ignore"):
        return u(-y) / up


# --------------------------------------------------------------------------
# utility functionals


@dataclass(frozen=True)
class UtilityMetadata:
    upper_fatou: bool
    law_invariant: bool
    sensitivity_equivalent: bool
    unbounded: bool
    neg_star_shaped_on_plus: bool
    bliss_value: float
    concave: bool = False
    cash_concave: bool = False
    cash_additive: bool = False
    positively_homogeneous: bool = False
    strictly_concave: bool = False
    monotone: bool = True


class UtilitySpec:
    """A utility functional on scenario payoffs."""

    fixture = False

    def evaluate(self, Y, probs):
        raise NotImplementedError

    @property
    def metadata(self) -> UtilityMetadata:
        raise NotImplementedError

    def __call__(self, Y, probs):
        return self.evaluate(Y, probs)


@dataclass(frozen=True)
class ExpectedUtility(UtilitySpec):
    u: UtilityFunction

    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        return _expect(self.u(Y), p)

    @property
    def metadata(self):
        u = self.u
        if isinstance(u, PiecewiseLinear):
            # linear tails: neither SLL nor weakly SLL, so trivially equivalent
            sens_eq = True
        else:
            sens_eq = u.unbounded and u.neg_star_shaped_on_plus
        return UtilityMetadata(
            upper_fatou=u.upper_semicontinuous,
            law_invariant=True,
            sensitivity_equivalent=sens_eq,
            unbounded=u.unbounded,
            neg_star_shaped_on_plus=u.neg_star_shaped_on_plus,
            bliss_value=u.bliss,
            concave=u.concave,
            cash_concave=u.concave,
            cash_additive=isinstance(u, Linear),
            positively_homogeneous=isinstance(u, Linear),
            strictly_concave=u.strictly_concave,
        )


@dataclass(frozen=True)
class Mean(UtilitySpec):
    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        return _expect(Y, p)

    @property
    def metadata(self):
        return UtilityMetadata(
            upper_fatou=True,
            law_invariant=True,
            sensitivity_equivalent=True,
            unbounded=True,
            neg_star_shaped_on_plus=True,
            bliss_value=INF,
            concave=True,
            cash_concave=True,
            cash_additive=True,
            positively_homogeneous=True,
        )


@dataclass(frozen=True)
class EssinfFixture(UtilitySpec):
    """``min Y`` when ``Y >= 0`` in every scenario, else ``f(E[Y])`` with ``f(y) = 1 - exp(-y)``.

    Weakly loss-sensitive but not loss-sensitive: the supremum along a ray
    stays at ``f(inf) = 1`` while the bliss value is ``inf``.  Not monotone on
    finite scenario sets (a small loss added to a nonnegative payoff can jump
    from ``min Y`` up to ``f(E[Y])``), hence ``monotone=False``.
    """

    fixture = True

    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        nonneg = np.all(Y >= 0, axis=-1)
        mean = np.asarray(expectation(Y, p))
        out = np.where(nonneg, np.min(Y, axis=-1), -np.expm1(-mean))
        return float(out) if np.ndim(out) == 0 else out

    @property
    def metadata(self):
        return UtilityMetadata(
            upper_fatou=True,
            law_invariant=True,
            sensitivity_equivalent=False,
            unbounded=True,
            neg_star_shaped_on_plus=True,
            bliss_value=INF,
            monotone=False,
        )


@dataclass(frozen=True)
class PartitionEssinfFixture(UtilitySpec):
    """Worst outcome over the scenario subset ``A`` (0-based indices); blind to ``A``'s complement."""

    A: tuple[int, ...] = (0,)
    fixture = True

    def __post_init__(self):
        A = tuple(sorted({int(i) for i in self.A}))
        if not A or A[0] < 0:
            raise ValueError("index set A must be a non-empty set of scenario indices")
        object.__setattr__(self, "A", A)

    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        if self.A[-1] >= Y.shape[-1]:
            raise LengthMismatch(f"index set {self.A} exceeds {Y.shape[-1]} scenarios")
        out = np.min(Y[..., list(self.A)], axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def metadata(self):
        return UtilityMetadata(
            upper_fatou=True,
            law_invariant=False,
            sensitivity_equivalent=True,
            unbounded=True,
            neg_star_shaped_on_plus=True,
            bliss_value=INF,
            concave=True,
            cash_concave=True,
            cash_additive=True,
            positively_homogeneous=True,
        )


def expected_utility(spec: UtilitySpec, Y, probs):
    """Evaluate a utility functional on payoff(s) ``Y``."""
    return spec.evaluate(Y, probs)


# --------------------------------------------------------------------------
# sensitivity to large losses


@dataclass(frozen=True)
class UtilitySLL:
    sll: bool
    weak_sll: bool
    applicable: bool
    reason: str = field(default="")


def utility_sll(spec: UtilitySpec) -> UtilitySLL:
    """Decide (weak) sensitivity to large losses for a cataloged utility functional."""
    if isinstance(spec, Mean):
        return UtilitySLL(False, False, True, "mean is linear along rays: E[lY] = l E[Y] can stay positive")
    if isinstance(spec, EssinfFixture):
        return UtilitySLL(
            False, True, True,
            "fixture classified by hand: f(l E[Y]) stays below f(inf) = 1 < inf, but is positive when E[Y] > 0",
        )
    if isinstance(spec, PartitionEssinfFixture):
        return UtilitySLL(
            False, False, True,
            "fixture classified by hand: losses confined to the complement of A are invisible, utility grows without bound",
        )
    if not isinstance(spec, ExpectedUtility):
        raise TypeError(f"unknown utility spec {spec!r}")

    u = spec.u
    if isinstance(u, BoundedExponential):
        return UtilitySLL(
            False, True, True,
            "bounded utility: E[u(lY)] -> P[Y>0] - P[Y<0] < 1, which may stay positive",
        )
    if isinstance(u, PiecewiseLinear) and not u.neg_star_shaped_on_plus:
        return UtilitySLL(
            False, False, False,
            "u is not negatively star-shaped on R+, so the ALG criterion does not apply; "
            "linear tails still make E[u(lY)] grow like l(s_R E[Y+] - s_L E[Y-])",
        )
    sll = alg_of(u) == -INF
    if sll:
        reason = "ALG(u) = -inf: large losses dominate large gains"
    else:
        reason = f"ALG(u) = {alg_of(u):g} > -inf: scaled payoffs with dominant gains keep positive utility"
    return UtilitySLL(sll, sll, True, reason)
