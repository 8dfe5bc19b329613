"""Risk-constrained utility maximization and utility-constrained risk minimization.

Both problems are posed over risky-asset fractions ``pi`` on a validated
scenario market, using the transformed functionals of :mod:`utilrisk.transform`:

    maximize  U_{w,r}(X_pi)   subject to  R_{w,r}(X_pi) <= rtilde_max
    minimize  R_{w,r}(X_pi)   subject to  U_{w,r}(X_pi) >= utilde_min

A ray probe looks for portfolios along which the objective improves forever
within the constraint; without such evidence a seeded multistart simplex
search on a quadratic-penalty objective is run, followed by a repair step
that moves each candidate back into the feasible set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._simplex import nelder_mead
from .errors import DimensionError, InfeasibleError, PreconditionError
from .risk import RiskSpec
from .scenarios import ScenarioSet
from .transform import ProblemFrame, fractions_to_shares, make_frame, share_payoff
from .utility import UtilitySpec

OPTIMAL, DIVERGING, INFEASIBLE = "Optimal", "Diverging", "Infeasible"
AGREE_TOL = 1e-4
NOISE_RTOL = 1e-12
DEFAULT_LAMBDAS = tuple(2.0**k for k in range(41))


@dataclass(frozen=True)
class SolveOptions:
    n_starts: int = 16
    max_iters: int = 2000
    tol: float = 1e-8
    penalty: float = 1e6
    ray_lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    seed: int = 0

    def __post_init__(self):
        if self.n_starts < 1 or self.max_iters < 1:
            raise ValueError("n_starts and max_iters must be positive")
        if not (self.tol > 0 and self.penalty >= 0):
            raise ValueError("tol must be positive and penalty nonnegative")
        lam = np.asarray(self.ray_lambdas, dtype=float)
        if lam.size < 11 or np.any(np.diff(lam) <= 0) or lam[0] <= 0:
            raise ValueError("ray schedule must be positive, increasing and hold at least 11 points")
        object.__setattr__(self, "ray_lambdas", tuple(float(x) for x in lam))


@dataclass(frozen=True)
class RayEvidence:
    """A direction along which the objective keeps improving inside the constraint."""

    direction: np.ndarray
    lambdas: np.ndarray
    objective: np.ndarray
    constraint: np.ndarray


@dataclass(frozen=True)
class OptimizationResult:
    status: str
    pi: np.ndarray | None = None  # optimizer (Optimal) or ray direction (Diverging)
    value: float = float("nan")  # utility when maximizing, risk when minimizing
    constraint_value: float = float("nan")
    evaluations: int = 0
    starts_agreeing: int = 0
    converged_starts: int = 0
    evidence: RayEvidence | None = field(default=None, repr=False)
    start_points: np.ndarray | None = field(default=None, repr=False)
    start_converged: np.ndarray | None = field(default=None, repr=False)

    @property
    def value_trace(self) -> np.ndarray | None:
        return None if self.evidence is None else self.evidence.objective


# --------------------------------------------------------------------------
# problem plumbing


class _Problem:
    """``maximize f(pi)`` subject to ``g(pi) <= bound`` with cached riskless bases."""

    def __init__(self, U: UtilitySpec, R: RiskSpec, mkt: ScenarioSet, frame: ProblemFrame, minimize_risk: bool):
        self.U, self.R, self.mkt, self.frame = U, R, mkt, frame
        self.X, self.p = mkt.returns, mkt.probs
        c = frame.riskless_wealth
        const = np.full(mkt.n_scenarios, c)
        self.ubase = float(U.evaluate(const, self.p))
        self.rbase = float(R.evaluate(const, self.p))
        self.minimize_risk = minimize_risk
        if minimize_risk:
            if frame.umin is None:
                raise PreconditionError("risk minimization needs a utility floor umin")
            self.bound = -(frame.umin - self.ubase)
        else:
            self.bound = frame.rmax - self.rbase
        self.count = 0

    def functionals(self, pi):
        """Transformed utility and risk at portfolios ``pi`` of shape ``(m, d)``."""
        pi = np.atleast_2d(pi)
        self.count += pi.shape[0]
        Y = self.frame.riskless_wealth + self.frame.w * (pi @ self.X.T)
        u = np.asarray(self.U.evaluate(Y, self.p), dtype=float) - self.ubase
        r = np.asarray(self.R.evaluate(Y, self.p), dtype=float) - self.rbase
        return u, r

    def fg(self, pi):
        u, r = self.functionals(pi)
        return (-r, -u) if self.minimize_risk else (u, r)


def _unit(v):
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 and np.isfinite(nrm) else None


def _rngs(seed: int):
    dirs, starts = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(dirs), np.random.default_rng(starts)


def probe_directions(mkt: ScenarioSet, opts: SolveOptions) -> np.ndarray:
    """Coordinate axes (both signs), the sample tangency portfolio, then seeded random unit vectors."""
    d = mkt.n_assets
    eye = np.eye(d)
    dirs = [v for i in range(d) for v in (eye[i], -eye[i])]
    mean = mkt.probs @ mkt.returns
    centred = mkt.returns - mean
    cov = centred.T @ (centred * mkt.probs[:, None])
    if np.linalg.cond(cov) < 1e12:
        t = _unit(np.linalg.solve(cov, mean))
        if t is not None:
            dirs.append(t)
    rng, _ = _rngs(opts.seed)
    g = rng.standard_normal((opts.n_starts, d))
    dirs.extend(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.array(dirs)


def _ray_probe(prob: _Problem, mkt: ScenarioSet, opts: SolveOptions) -> RayEvidence | None:
    dirs = probe_directions(mkt, opts)
    lam = np.asarray(opts.ray_lambdas)
    pts = lam[None, :, None] * dirs[:, None, :]
    f, g = prob.fg(pts.reshape(-1, mkt.n_assets))
    f = f.reshape(len(dirs), lam.size)
    g = g.reshape(len(dirs), lam.size)
    # rounding noise in expectations grows like eps * lambda * |payoff|; real growth must clear it
    reach = lam[-1] * prob.frame.w * np.max(np.abs(dirs @ mkt.returns.T), axis=1)
    for k in range(len(dirs)):
        fk, gk = f[k], g[k]
        if not np.all(gk <= prob.bound) or not np.all(np.isfinite(fk[-10:])):
            continue
        significant = fk[-1] - fk[-10] > NOISE_RTOL * reach[k]
        if significant and np.all(np.diff(fk[-10:]) > 0) and fk[-1] > np.max(fk[:-1]):
            return RayEvidence(dirs[k].copy(), lam.copy(), fk.copy(), gk.copy())
    return None


def divergence_probe(U: UtilitySpec, R: RiskSpec, mkt: ScenarioSet, frame: ProblemFrame,
                     opts: SolveOptions | None = None) -> RayEvidence | None:
    """Search rays ``lambda * d`` for ever-growing utility within the risk budget.

    Finding a ray is evidence of ill-posedness; finding none proves nothing.
    """
    opts = opts or SolveOptions()
    return _ray_probe(_Problem(U, R, mkt, frame, minimize_risk=False), mkt, opts)


# --------------------------------------------------------------------------
# multistart search


def _scale(mkt: ScenarioSet, frame: ProblemFrame) -> float:
    rms = float(np.sqrt(mkt.probs @ np.mean(mkt.returns**2, axis=1)))
    return 1.0 / (frame.w * max(rms, 1e-12))


def _order_key(value: float, pi: np.ndarray):
    return (-value, float(np.linalg.norm(pi)), tuple(pi.tolist()))


def _repair(prob: _Problem, cand: np.ndarray, anchor: np.ndarray, iters: int = 80) -> np.ndarray:
    """Largest feasible step from ``anchor`` (feasible) toward each infeasible candidate."""
    _, g = prob.fg(cand)
    bad = ~(g <= prob.bound)
    if not bad.any():
        return cand
    out = cand.copy()
    a, b = anchor, cand[bad]
    lo = np.zeros(b.shape[0])
    hi = np.ones(b.shape[0])
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        _, gm = prob.fg(a + mid[:, None] * (b - a))
        ok = gm <= prob.bound
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    out[bad] = a + lo[:, None] * (b - a)
    return out


def _multistart(prob: _Problem, opts: SolveOptions, seed_points=()):
    mkt, d = prob.mkt, prob.mkt.n_assets
    scale = _scale(mkt, prob.frame)
    _, rng = _rngs(opts.seed)
    starts = np.zeros((opts.n_starts, d))
    for k in range(1, opts.n_starts):
        v = rng.standard_normal(d)
        radius = scale * 4.0 * k / opts.n_starts
        starts[k] = v / np.linalg.norm(v) * radius * rng.random() ** (1.0 / d)

    best = {"f": -np.inf, "pi": None}

    def track(pts, f, g):
        ok = (g <= prob.bound) & np.isfinite(f)
        if not ok.any():
            return
        cand = [(_order_key(float(fi), pi), i) for i, (fi, pi) in enumerate(zip(f, pts)) if ok[i]]
        _, i = min(cand)
        if best["pi"] is None or _order_key(float(f[i]), pts[i]) < _order_key(best["f"], best["pi"]):
            best["f"], best["pi"] = float(f[i]), pts[i].copy()

    for pts in seed_points:
        pts = np.atleast_2d(pts)
        f, g = prob.fg(pts)
        track(pts, f, g)

    def penalized(pts):
        f, g = prob.fg(pts)
        track(pts, f, g)
        viol = np.maximum(g - prob.bound, 0.0)
        with np.errstate(invalid="ignore", over="ignore"):
            val = -f + opts.penalty * viol**2
        return np.where(np.isfinite(f) & np.isfinite(g), val, np.inf)

    step = 0.1 * scale + 0.1 * np.linalg.norm(starts, axis=1)
    first = nelder_mead(penalized, starts, step, opts.max_iters, opts.tol)
    step2 = 0.02 * scale + 0.02 * np.linalg.norm(first.x, axis=1)
    polish = nelder_mead(penalized, first.x, step2, opts.max_iters, opts.tol)
    converged = first.converged & polish.converged & np.isfinite(polish.f)
    return polish.x, converged, best


def _solve(prob: _Problem, mkt: ScenarioSet, opts: SolveOptions) -> OptimizationResult:
    # far-out simplex vertices overflow; non-finite values are already treated as rejected points
    with np.errstate(over="ignore", invalid="ignore"):
        return _solve_checked(prob, mkt, opts)


def _solve_checked(prob: _Problem, mkt: ScenarioSet, opts: SolveOptions) -> OptimizationResult:
    evidence = _ray_probe(prob, mkt, opts)
    if evidence is not None:
        sign = -1.0 if prob.minimize_risk else 1.0
        return OptimizationResult(
            DIVERGING, pi=evidence.direction, value=sign * float(evidence.objective[-1]),
            constraint_value=sign * float(evidence.constraint[-1]), evaluations=prob.count, evidence=evidence,
        )

    d = mkt.n_assets
    origin = np.zeros((1, d))
    lam = np.asarray(opts.ray_lambdas)
    probe_pts = (lam[:8, None, None] * probe_directions(mkt, opts)[None]).reshape(-1, d)
    points, converged, best = _multistart(prob, opts, seed_points=(origin, probe_pts))

    if best["pi"] is None:
        return OptimizationResult(INFEASIBLE, evaluations=prob.count)
    anchor = origin[0] if not prob.minimize_risk else best["pi"]
    repaired = _repair(prob, points, anchor)
    # batched and single-row sums round differently at large scale; judge each point as it is reported
    pool = np.vstack([repaired, best["pi"][None]])
    fg = [prob.fg(pi[None]) for pi in pool]
    f = np.array([float(a[0]) for a, _ in fg])
    g = np.array([float(b[0]) for _, b in fg])
    ok = (g <= prob.bound) & np.isfinite(f)
    feasible = ok[:-1]
    cands = [(_order_key(f[i], pool[i]), i) for i in np.flatnonzero(ok)]
    if not cands:
        return OptimizationResult(INFEASIBLE, evaluations=prob.count)
    _, i_star = min(cands)
    pi_star, f_star, g_star = pool[i_star], f[i_star:i_star + 1], g[i_star:i_star + 1]
    agreeing = int(np.sum(feasible & (np.linalg.norm(repaired - pi_star, axis=1) <= AGREE_TOL)))
    sign = -1.0 if prob.minimize_risk else 1.0
    return OptimizationResult(
        OPTIMAL, pi=pi_star.copy(), value=sign * float(f_star[0]), constraint_value=sign * float(g_star[0]),
        evaluations=prob.count, starts_agreeing=agreeing, converged_starts=int(converged.sum()),
        start_points=repaired, start_converged=converged & feasible,
    )


def maximize_utility(U: UtilitySpec, R: RiskSpec, mkt: ScenarioSet, frame: ProblemFrame,
                     opts: SolveOptions | None = None) -> OptimizationResult:
    """Maximize ``U_{w,r}(X_pi)`` subject to ``R_{w,r}(X_pi) <= frame.rtilde_max``."""
    opts = opts or SolveOptions()
    prob = _Problem(U, R, mkt, frame, minimize_risk=False)
    if not prob.bound >= 0:
        raise InfeasibleError("the riskless portfolio violates the risk constraint")
    return _solve(prob, mkt, opts)


def minimize_risk(R: RiskSpec, U: UtilitySpec, mkt: ScenarioSet, frame: ProblemFrame,
                  opts: SolveOptions | None = None) -> OptimizationResult:
    """Minimize ``R_{w,r}(X_pi)`` subject to ``U_{w,r}(X_pi) >= frame.utilde_min``."""
    opts = opts or SolveOptions()
    prob = _Problem(U, R, mkt, frame, minimize_risk=True)
    return _solve(prob, mkt, opts)


def uniqueness_probe(result: OptimizationResult, tol: float = AGREE_TOL, share: float = 0.9) -> bool:
    """True when at least ``share`` of the converged starts ended within ``tol`` of the optimizer."""
    if result.status != OPTIMAL:
        raise PreconditionError("uniqueness probe needs an Optimal result")
    conv = result.start_converged
    if conv is None or not conv.any():
        return False
    near = np.linalg.norm(result.start_points[conv] - result.pi, axis=1) <= tol
    return bool(near.sum() >= share * conv.sum())


# --------------------------------------------------------------------------
# brute force


def grid_oracle(U: UtilitySpec, R: RiskSpec, mkt: ScenarioSet, frame: ProblemFrame,
                box: float = 4.0, steps: int = 401, chunk: int = 200_000):
    """Best feasible point of the grid ``linspace(-box, box, steps)**d``; ``d <= 2``."""
    d = mkt.n_assets
    if d > 2:
        raise DimensionError("grid oracle supports at most two assets")
    if steps > 4001 or steps < 2:
        raise ValueError("steps must lie in [2, 4001]")
    axis = np.linspace(-box, box, steps)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    prob = _Problem(U, R, mkt, frame, minimize_risk=False)
    vals = np.empty(pts.shape[0])
    for s in range(0, pts.shape[0], chunk):
        f, g = prob.fg(pts[s:s + chunk])
        vals[s:s + chunk] = np.where(g <= prob.bound, f, -np.inf)
    top = np.max(vals)
    tied = np.flatnonzero(vals == top)
    k = min(tied, key=lambda i: _order_key(top, pts[i]))
    return pts[k].copy(), float(top)


# --------------------------------------------------------------------------
# share space


@dataclass(frozen=True)
class ShareSolution:
    theta: np.ndarray | None
    value: float
    fraction_result: OptimizationResult


def maximize_utility_shares(U: UtilitySpec, R: RiskSpec, mkt: ScenarioSet, w: float, r: float, rmax: float,
                            opts: SolveOptions | None = None) -> ShareSolution:
    """Maximize ``U(theta . S1)`` over budget-feasible shares with ``R(theta . S1) <= rmax``.

    Solved in fraction space and mapped back; the reported value is
    ``U(theta* . S1)`` evaluated directly on the terminal wealth.
    """
    frame = make_frame(w, r, mkt.probs, risk=R, utility=U, rmax=rmax)
    res = maximize_utility(U, R, mkt, frame, opts)
    if res.status != OPTIMAL:
        return ShareSolution(None, float("nan"), res)
    theta = fractions_to_shares(res.pi, w)
    wealth = share_payoff(theta, mkt.returns, r)
    return ShareSolution(theta, float(U.evaluate(wealth, mkt.probs)), res)
