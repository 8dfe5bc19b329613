"""Risk functionals on scenario payoffs and their loss-sensitivity classification.

Payoffs are arrays of shape ``(..., n)`` evaluated against probabilities of
shape ``(n,)``; results have the leading shape.  Values live in
``(-inf, inf]`` and ``+inf`` is absorbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import expectation
from .errors import DomainError, LengthMismatch, NoRoot, UnboundedBelow

INF = math.inf
CDF_TOL = 1e-12


def _as_payoff(Y, probs) -> tuple[np.ndarray, np.ndarray]:
    Y = np.asarray(Y, dtype=float)
    p = np.asarray(probs, dtype=float)
    if Y.ndim == 0 or Y.shape[-1] != p.shape[0]:
        raise LengthMismatch(f"payoff shape {Y.shape} does not match {p.shape[0]} scenarios")
    return Y, p


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# --------------------------------------------------------------------------
# loss functions


class LossFunction:
    """Increasing ``l`` with ``l(0) = 0``; all catalog entries are convex."""

    convex = True

    def __call__(self, y):
        raise NotImplementedError

    @property
    def alg(self) -> float:
        """``limsup l(y)/l(-y)`` as ``y -> inf``; ``-inf`` when the left tail vanishes."""
        raise NotImplementedError

    @property
    def dominates_identity(self) -> bool:
        """``l(y) >= y`` everywhere (admissible for the optimized certainty equivalent)."""
        raise NotImplementedError

    @property
    def positive_on_gains(self) -> bool:
        """``l(y) > 0`` for every ``y > 0``."""
        return True

    @property
    def superlinear(self) -> bool:
        """``liminf l(y)/y = inf`` as ``y -> inf``."""
        return False

    @property
    def flat_left(self) -> bool:
        """``limsup l(y)/y = 0`` as ``y -> -inf``."""
        return False

    @property
    def left_limit(self) -> float:
        """``lim l(y)`` as ``y -> -inf``."""
        return -INF

    @property
    def positively_homogeneous(self) -> bool:
        return False


@dataclass(frozen=True)
class Identity(LossFunction):
    def __call__(self, y):
        return np.asarray(y, dtype=float)

    @property
    def alg(self):
        return -1.0

    @property
    def dominates_identity(self):
        return True

    @property
    def positively_homogeneous(self):
        return True


@dataclass(frozen=True)
class ExpMinusOne(LossFunction):
    """``(exp(a y) - 1) / a``."""

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("exponential loss needs a > 0")

    def __call__(self, y):
        with np.errstate(over="ignore"):
            return np.expm1(self.a * np.asarray(y, dtype=float)) / self.a

    @property
    def alg(self):
        return -INF

    @property
    def dominates_identity(self):
        return True

    @property
    def superlinear(self):
        return True

    @property
    def flat_left(self):
        return True

    @property
    def left_limit(self):
        return -1.0 / self.a


@dataclass(frozen=True)
class PositivePart(LossFunction):
    """``c * max(y, 0)`` with ``c >= 1``."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c >= 1:
            raise ValueError("positive-part loss needs c >= 1")

    def __call__(self, y):
        return self.c * np.maximum(np.asarray(y, dtype=float), 0.0)

    @property
    def alg(self):
        return -INF

    @property
    def dominates_identity(self):
        return True

    @property
    def flat_left(self):
        return True

    @property
    def left_limit(self):
        return 0.0

    @property
    def positively_homogeneous(self):
        return True


@dataclass(frozen=True)
class PowerPlus(LossFunction):
    """``c * max(y, 0)**p`` with ``p > 1``; falls below the identity near zero."""

    p: float = 2.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.p > 1 and self.c > 0):
            raise ValueError("power loss needs p > 1 and c > 0")

    def __call__(self, y):
        with np.errstate(over="ignore"):
            return self.c * np.power(np.maximum(np.asarray(y, dtype=float), 0.0), self.p)

    @property
    def alg(self):
        return -INF

    @property
    def dominates_identity(self):
        return False

    @property
    def superlinear(self):
        return True

    @property
    def flat_left(self):
        return True

    @property
    def left_limit(self):
        return 0.0


@dataclass(frozen=True)
class PiecewiseLinearLoss(LossFunction):
    """Convex, nondecreasing interpolation through ``(x, y)`` knots with ``l(0) = 0``."""

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
        s = self.slopes
        if s[0] < 0:
            raise ValueError("piecewise-linear loss must be nondecreasing")
        if any(b < a - 1e-15 for a, b in zip(s, s[1:])):
            raise ValueError("piecewise-linear loss must be convex (nondecreasing slopes)")
        if not s[-1] > 0:
            raise ValueError("piecewise-linear loss must not be constant")
        if abs(float(self(0.0))) > 1e-12:
            raise ValueError("piecewise-linear loss must satisfy l(0) = 0")

    @property
    def slopes(self) -> tuple[float, ...]:
        return tuple((y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:]))

    def _slope_at(self, x: float, side: int) -> float:
        # side=-1: slope just left of x; side=+1: just right
        xs, s = self.xs, self.slopes
        k = int(np.searchsorted(xs, x, side="left" if side < 0 else "right")) - 1
        return s[min(max(k, 0), len(s) - 1)]

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        xs, ys, s = self.xs, self.ys, self.slopes
        out = np.interp(y, xs, ys)
        out = np.where(y < xs[0], ys[0] + s[0] * (y - xs[0]), out)
        return np.where(y > xs[-1], ys[-1] + s[-1] * (y - xs[-1]), out)

    @property
    def alg(self):
        s = self.slopes
        return -s[-1] / s[0] if s[0] > 0 else -INF

    @property
    def dominates_identity(self):
        # convex with l(0) = 0: l >= id iff 1 is a subgradient at 0
        return self._slope_at(0.0, -1) <= 1.0 <= self._slope_at(0.0, +1)

    @property
    def positive_on_gains(self):
        return self._slope_at(0.0, +1) > 0

    @property
    def flat_left(self):
        return self.slopes[0] == 0

    @property
    def left_limit(self):
        if self.slopes[0] > 0:
            return -INF
        return self.ys[0]

    @property
    def positively_homogeneous(self):
        return all(x == 0 for x in self.xs[1:-1]) and 0.0 in self.xs


# --------------------------------------------------------------------------
# threshold distributions and risk profiles


@dataclass(frozen=True)
class ThresholdDistribution:
    """Increasing step function on ``(-inf, 0]``: ``levels[j]`` on ``(breakpoints[j-1], breakpoints[j]]``.

    The first level extends to ``-inf``; the last breakpoint must be ``0``.
    """

    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        lv = tuple(float(x) for x in self.levels)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "levels", lv)
        if not bp or len(bp) != len(lv):
            raise ValueError("threshold distribution needs matching, non-empty breakpoints and levels")
        if bp[-1] != 0.0 or any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing and end at 0")
        if any(b < a for a, b in zip(lv, lv[1:])):
            raise ValueError("levels must be nondecreasing")
        if not all(0.0 <= b < 1.0 for b in lv):
            raise ValueError("levels must lie in [0, 1)")

    @property
    def infimum(self) -> float:
        return self.levels[0]


@dataclass(frozen=True)
class RiskProfile:
    """Decreasing step function on ``(0, 1]``: ``values[j]`` on ``(breakpoints[j-1], breakpoints[j]]``.

    ``breakpoints`` end at 1 and ``values`` end at 0; ``limit_at_zero`` is the
    limit of the profile as the level tends to 0 and defaults to ``values[0]``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    limit_at_zero: float | None = None

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(x) for x in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if not bp or len(bp) != len(vals):
            raise ValueError("risk profile needs matching, non-empty breakpoints and values")
        if bp[-1] != 1.0 or bp[0] <= 0 or any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing in (0, 1] and end at 1")
        if vals[-1] != 0.0 or any(b > a for a, b in zip(vals, vals[1:])) or vals[-1] < 0:
            raise ValueError("values must be nonincreasing, nonnegative and end at 0")
        g0 = vals[0] if self.limit_at_zero is None else float(self.limit_at_zero)
        if g0 < vals[0]:
            raise ValueError("limit_at_zero must be at least the first profile value")
        object.__setattr__(self, "limit_at_zero", g0)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.limit_at_zero) and all(math.isfinite(v) for v in self.values)


# --------------------------------------------------------------------------
# evaluation kernels


def _sorted(Y: np.ndarray, p: np.ndarray):
    idx = np.argsort(Y, axis=-1, kind="stable")
    ys = np.take_along_axis(Y, idx, axis=-1)
    ps = p[idx]
    return ys, ps, np.cumsum(ps, axis=-1)


def _var_sorted(ys, cs, alpha):
    # smallest atom whose distribution function exceeds alpha; ties at alpha go to the next atom
    hit = cs > alpha + CDF_TOL
    hit[..., -1] = True
    k = np.argmax(hit, axis=-1)
    return -np.take_along_axis(ys, k[..., None], axis=-1)[..., 0]


def _es_sorted(ys, ps, cs, alpha):
    if alpha >= 1.0:
        return -np.asarray(expectation(ys, ps))
    eta = _var_sorted(ys, cs, alpha)
    return eta + np.asarray(expectation(np.maximum(-ys - eta[..., None], 0.0), ps)) / alpha


def value_at_risk(Y, probs, alpha: float):
    """``inf{m : P[m + Y < 0] <= alpha}``; ``alpha = 0`` gives the worst-case loss."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("VaR level must lie in [0, 1)")
    Y, p = _as_payoff(Y, probs)
    ys, _, cs = _sorted(Y, p)
    return _out(_var_sorted(ys, cs, alpha))


def expected_shortfall(Y, probs, alpha: float):
    """Average of the VaR curve over ``(0, alpha]``, via the minimization form at its minimizer ``VaR``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("ES level must lie in (0, 1]")
    Y, p = _as_payoff(Y, probs)
    ys, ps, cs = _sorted(Y, p)
    return _out(_es_sorted(ys, ps, cs, alpha))


def worst_case_risk(Y, probs=None):
    Y = np.asarray(Y, dtype=float)
    if probs is not None:
        Y, _ = _as_payoff(Y, probs)
    return _out(-np.min(Y, axis=-1))


def loss_var(Y, probs, beta: ThresholdDistribution):
    """``max_j VaR^{b_j}(Y) + l_j`` over the steps of ``beta``."""
    Y, p = _as_payoff(Y, probs)
    ys, _, cs = _sorted(Y, p)
    terms = [_var_sorted(ys, cs, b) + bp for b, bp in zip(beta.levels, beta.breakpoints)]
    return _out(np.max(np.stack(terms, axis=0), axis=0))


def adjusted_es(Y, probs, g: RiskProfile):
    """``sup_a ES^a(Y) - g(a)``; on each step of ``g`` the supremum sits at the left end."""
    Y, p = _as_payoff(Y, probs)
    ys, ps, cs = _sorted(Y, p)
    terms = []
    if math.isfinite(g.limit_at_zero):
        terms.append(-ys[..., 0] - g.limit_at_zero)
    bp, vals = g.breakpoints, g.values
    for j, gj in enumerate(vals):
        if not math.isfinite(gj):
            continue
        terms.append(_es_sorted(ys, ps, cs, bp[j]) - gj)
        if j > 0:
            terms.append(_es_sorted(ys, ps, cs, bp[j - 1]) - gj)
    return _out(np.max(np.stack(terms, axis=0), axis=0))


def expected_weighted_loss(Y, probs, loss: LossFunction):
    """``E[l(-Y)]``."""
    Y, p = _as_payoff(Y, probs)
    return expectation(loss(-Y), p)


def shortfall_risk(Y, probs, loss: LossFunction):
    """Smallest ``m`` with ``E[l(-Y - m)] <= 0``, by bracketing and bisection to float resolution."""
    Y, p = _as_payoff(Y, probs)

    def accepted(m):
        return np.asarray(expectation(loss(-Y - m[..., None]), p)) <= 0

    hi = -np.min(Y, axis=-1)  # l <= 0 on every scenario there
    lo = -np.max(Y, axis=-1)
    hi, lo = np.asarray(hi, dtype=float), np.asarray(lo, dtype=float)
    width = np.maximum(hi - lo, 1.0)
    cap = 2.0**40 * width
    step = width.copy()
    acc = accepted(lo) & (lo < hi)
    while np.any(acc):
        if np.any(step[acc] > cap[acc]):
            raise NoRoot("acceptance set is unbounded below; shortfall risk is -inf")
        hi = np.where(acc, lo, hi)
        lo = np.where(acc, lo - step, lo)
        step = np.where(acc, 2 * step, step)
        acc = accepted(lo) & acc
    for _ in range(2100):
        mid = 0.5 * (lo + hi)
        done = (mid <= lo) | (mid >= hi)
        if np.all(done):
            break
        ok = accepted(mid)
        hi = np.where(~done & ok, mid, hi)
        lo = np.where(~done & ~ok, mid, lo)
    return _out(hi)


def _oce_objective(Y, p, loss, eta):
    with np.errstate(invalid="ignore", over="ignore"):
        return np.asarray(expectation(loss(eta[..., None] - Y), p)) - eta


def oce_risk(Y, probs, loss: LossFunction):
    """``inf_eta E[l(eta - Y)] - eta`` by golden-section search.

    For an admissible loss the minimizer lies in ``[min Y, max Y]``; the
    bracket starts one unit wider and is only widened as a safeguard.
    """
    if not loss.dominates_identity:
        raise DomainError("optimized certainty equivalent needs a loss with l(y) >= y")
    Y, p = _as_payoff(Y, probs)

    def f(eta):
        return _oce_objective(Y, p, loss, eta)

    lo = np.asarray(np.min(Y, axis=-1) - 1.0, dtype=float)
    hi = np.asarray(np.max(Y, axis=-1) + 1.0, dtype=float)
    cap = 2.0**40 * (hi - lo)
    for _ in range(64):
        h = 1e-3 * (hi - lo)
        f_lo, f_hi = f(lo), f(hi)
        with np.errstate(invalid="ignore"):
            grow_lo = f(lo - h) < f_lo - 1e-12 * (1.0 + np.abs(f_lo))
            grow_hi = f(hi + h) < f_hi - 1e-12 * (1.0 + np.abs(f_hi))
        if not np.any(grow_lo | grow_hi):
            break
        width = hi - lo
        if np.any(width > cap):
            raise UnboundedBelow("OCE objective keeps decreasing; the loss violates the slope conditions")
        lo = np.where(grow_lo, lo - width, lo)
        hi = np.where(grow_hi, hi + width, hi)
    else:
        raise UnboundedBelow("OCE bracket did not close")

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    best = np.minimum(f(a), f(b))
    for _ in range(400):
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = f(c), f(d)
        best = np.minimum(best, np.minimum(fc, fd))
        if np.all(b - a <= 1e-13 * (1.0 + np.abs(a) + np.abs(b))):
            break
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    return _out(best)


def entropic_risk(Y, probs, a: float):
    """``(1/a) log E[exp(-a Y)]`` with a max shift against overflow."""
    if not a > 0:
        raise ValueError("entropic risk needs a > 0")
    Y, p = _as_payoff(Y, probs)
    z = -a * Y
    m = np.max(z, axis=-1)
    return _out((np.log(expectation(np.exp(z - m[..., None]), p)) + m) / a)


# --------------------------------------------------------------------------
# risk functionals


@dataclass(frozen=True)
class RiskMetadata:
    lower_fatou: bool
    cash_convex: bool
    pos_star_shaped: bool
    law_invariant: bool
    cash_additive: bool
    convex: bool = False
    positively_homogeneous: bool = False
    risk_at_infinity: float = -INF


def _coherent(convex=True, homogeneous=True) -> RiskMetadata:
    return RiskMetadata(
        lower_fatou=True, cash_convex=True, pos_star_shaped=True, law_invariant=True,
        cash_additive=True, convex=convex, positively_homogeneous=homogeneous,
    )


class RiskSpec:
    """A risk functional on scenario payoffs."""

    fixture = False

    def evaluate(self, Y, probs):
        raise NotImplementedError

    @property
    def metadata(self) -> RiskMetadata:
        raise NotImplementedError

    def __call__(self, Y, probs):
        return self.evaluate(Y, probs)


@dataclass(frozen=True)
class Zero(RiskSpec):
    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        return _out(np.zeros(Y.shape[:-1]))

    @property
    def metadata(self):
        return RiskMetadata(True, True, True, True, True, convex=True, positively_homogeneous=True, risk_at_infinity=0.0)


@dataclass(frozen=True)
class VaR(RiskSpec):
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("VaR level must lie in [0, 1)")

    def evaluate(self, Y, probs):
        return value_at_risk(Y, probs, self.alpha)

    @property
    def metadata(self):
        return _coherent(convex=self.alpha == 0.0)


@dataclass(frozen=True)
class ES(RiskSpec):
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("ES level must lie in (0, 1]")

    def evaluate(self, Y, probs):
        return expected_shortfall(Y, probs, self.alpha)

    @property
    def metadata(self):
        return _coherent()


@dataclass(frozen=True)
class LVaR(RiskSpec):
    beta: ThresholdDistribution

    def evaluate(self, Y, probs):
        return loss_var(Y, probs, self.beta)

    @property
    def metadata(self):
        homogeneous = len(self.beta.levels) == 1
        return _coherent(convex=homogeneous and self.beta.levels[0] == 0.0, homogeneous=homogeneous)


@dataclass(frozen=True)
class AdjustedES(RiskSpec):
    g: RiskProfile

    def evaluate(self, Y, probs):
        return adjusted_es(Y, probs, self.g)

    @property
    def metadata(self):
        vals = (self.g.limit_at_zero,) + self.g.values
        return _coherent(homogeneous=all(v == 0 or v == INF for v in vals))


@dataclass(frozen=True)
class ExpectedWeightedLoss(RiskSpec):
    loss: LossFunction

    def evaluate(self, Y, probs):
        return expected_weighted_loss(Y, probs, self.loss)

    @property
    def metadata(self):
        return RiskMetadata(
            lower_fatou=True, cash_convex=self.loss.convex, pos_star_shaped=self.loss.convex,
            law_invariant=True, cash_additive=isinstance(self.loss, Identity), convex=self.loss.convex,
            positively_homogeneous=self.loss.positively_homogeneous, risk_at_infinity=self.loss.left_limit,
        )


@dataclass(frozen=True)
class ShortfallRisk(RiskSpec):
    loss: LossFunction

    def evaluate(self, Y, probs):
        return shortfall_risk(Y, probs, self.loss)

    @property
    def metadata(self):
        return _coherent(convex=self.loss.convex, homogeneous=self.loss.positively_homogeneous)


@dataclass(frozen=True)
class OCE(RiskSpec):
    loss: LossFunction

    def evaluate(self, Y, probs):
        return oce_risk(Y, probs, self.loss)

    @property
    def metadata(self):
        return _coherent(homogeneous=self.loss.positively_homogeneous)


@dataclass(frozen=True)
class Entropic(RiskSpec):
    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("entropic risk needs a > 0")

    def evaluate(self, Y, probs):
        return entropic_risk(Y, probs, self.a)

    @property
    def metadata(self):
        return _coherent(homogeneous=False)


@dataclass(frozen=True)
class WorstCase(RiskSpec):
    def evaluate(self, Y, probs):
        return worst_case_risk(Y, probs)

    @property
    def metadata(self):
        return _coherent()


@dataclass(frozen=True)
class PartitionFixture(RiskSpec):
    """``0`` if the payoff is nonnegative outside the scenario subset ``A`` (0-based), else ``+inf``."""

    A: tuple[int, ...] = (0,)
    fixture = True

    def __post_init__(self):
        A = tuple(sorted({int(i) for i in self.A}))
        if not A or A[0] < 0:
            raise ValueError("index set A must be a non-empty set of scenario indices")
        object.__setattr__(self, "A", A)

    def evaluate(self, Y, probs):
        Y, p = _as_payoff(Y, probs)
        n = Y.shape[-1]
        if self.A[-1] >= n:
            raise LengthMismatch(f"index set {self.A} exceeds {n} scenarios")
        outside = np.ones(n, dtype=bool)
        outside[list(self.A)] = False
        ok = np.all(Y[..., outside] >= 0, axis=-1)
        return _out(np.where(ok, 0.0, INF))

    @property
    def metadata(self):
        return RiskMetadata(
            lower_fatou=True, cash_convex=True, pos_star_shaped=True, law_invariant=False,
            cash_additive=False, convex=True, positively_homogeneous=True, risk_at_infinity=0.0,
        )


def risk_value(spec: RiskSpec, Y, probs):
    """Evaluate a risk functional on payoff(s) ``Y``."""
    return spec.evaluate(Y, probs)


# --------------------------------------------------------------------------
# sensitivity to large losses


@dataclass(frozen=True)
class RiskSLL:
    sll: bool
    applicable: bool
    reason: str = field(default="")


def risk_sll(spec: RiskSpec) -> RiskSLL:
    """Decide sensitivity to large losses for a cataloged risk functional."""
    if isinstance(spec, Zero):
        return RiskSLL(False, True, "no constraint: zero risk for every position")
    if isinstance(spec, VaR):
        if spec.alpha == 0.0:
            return RiskSLL(True, True, "VaR at level 0 is the worst-case loss")
        return RiskSLL(False, True, f"losses with mass below {spec.alpha:g} are ignored at any scale")
    if isinstance(spec, ES):
        return RiskSLL(False, True, "profile is infinite below the level: losses of small mass are averaged with gains")
    if isinstance(spec, LVaR):
        if spec.beta.infimum == 0.0:
            return RiskSLL(True, True, "threshold distribution has infimum 0")
        return RiskSLL(False, True, f"threshold distribution has infimum {spec.beta.infimum:g} > 0")
    if isinstance(spec, AdjustedES):
        if spec.g.finite:
            return RiskSLL(True, True, "risk profile is finite everywhere")
        return RiskSLL(False, True, "risk profile takes the value inf")
    if isinstance(spec, ExpectedWeightedLoss):
        sll = spec.loss.alg == -INF
        return RiskSLL(sll, True, f"ALG(l) = {spec.loss.alg:g}")
    if isinstance(spec, ShortfallRisk):
        if not spec.loss.positive_on_gains:
            return RiskSLL(False, False, "loss vanishes somewhere on (0, inf); the ALG criterion does not apply")
        sll = spec.loss.alg == -INF
        return RiskSLL(sll, True, f"l > 0 on (0, inf) and ALG(l) = {spec.loss.alg:g}")
    if isinstance(spec, OCE):
        sup, flat = spec.loss.superlinear, spec.loss.flat_left
        return RiskSLL(
            sup and flat, True,
            f"liminf l(y)/y = inf: {sup}; limsup l(y)/y = 0 as y -> -inf: {flat}",
        )
    if isinstance(spec, Entropic):
        return RiskSLL(True, True, "OCE with exponential loss: superlinear gains side, flat losses side")
    if isinstance(spec, WorstCase):
        return RiskSLL(True, True, "any loss scenario makes the worst case positive")
    if isinstance(spec, PartitionFixture):
        return RiskSLL(
            False, True,
            "fixture classified by hand: losses confined to A never trigger the constraint",
        )
    raise TypeError(f"unknown risk spec {spec!r}")
