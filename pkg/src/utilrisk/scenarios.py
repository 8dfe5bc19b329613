"""Finite-scenario market models.

A market is a matrix of excess returns (one row per scenario, one column per
risky asset) together with strictly positive scenario probabilities and the
risk-free rate.  Every :class:`ScenarioSet` handed out by this module has been
checked to be arbitrage-free and non-redundant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Any

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .errors import (
    ArbitrageError,
    GenerationError,
    LengthMismatch,
    ProbabilityError,
    RedundancyError,
)

PROB_SUM_TOL = 1e-12
RANK_RTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MarketReport:
    no_arbitrage: bool
    non_redundant: bool
    rank: int
    # normalized to sum to one; None when no strictly positive pricing vector exists
    state_prices: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.no_arbitrage and self.non_redundant


@dataclass(frozen=True)
class ScenarioSet:
    """Validated finite market: ``returns[s, i]`` is the excess return of asset i in scenario s."""

    returns: np.ndarray
    probs: np.ndarray
    rate: float = 0.0
    report: MarketReport | None = field(default=None, compare=False, repr=False)

    @property
    def n_scenarios(self) -> int:
        return self.returns.shape[0]

    @property
    def n_assets(self) -> int:
        return self.returns.shape[1]

    def payoff(self, pi) -> np.ndarray:
        """Excess return ``pi . X`` per scenario; ``pi`` may carry leading batch axes."""
        pi = np.asarray(pi, dtype=float)
        if pi.shape[-1] != self.n_assets:
            raise LengthMismatch(f"portfolio has {pi.shape[-1]} weights, market has {self.n_assets} assets")
        return pi @ self.returns.T

    def to_json(self) -> dict[str, Any]:
        return {
            "rate": float(self.rate),
            "probs": self.probs.tolist(),
            "returns": self.returns.tolist(),
        }


@dataclass(frozen=True)
class GaussianMarket:
    """Multivariate normal asset returns with mean ``mu``, covariance ``sigma`` and risk-free ``rate``."""

    mu: np.ndarray
    sigma: np.ndarray
    rate: float = 0.0

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        d = mu.shape[0]
        if sigma.shape != (d, d):
            raise LengthMismatch(f"covariance shape {sigma.shape} does not match {d} assets")
        if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix is not symmetric")
        if np.linalg.eigvalsh(sigma)[0] <= 0:
            raise ValueError("covariance matrix is not positive definite")
        if not self.rate > -1:
            raise ValueError("risk-free rate must exceed -1")
        if np.all(mu == self.rate):
            raise ValueError("mean vector equals the risk-free rate; maximal Sharpe ratio would be zero")
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "sigma", _frozen(sigma))

    @property
    def d(self) -> int:
        return self.mu.shape[0]

    @property
    def excess_mean(self) -> np.ndarray:
        return self.mu - self.rate

    @property
    def sr_max(self) -> float:
        m = self.excess_mean
        return float(np.sqrt(m @ np.linalg.solve(self.sigma, m)))


def validate_market(returns, probs=None) -> MarketReport:
    """Check no-arbitrage and non-redundancy of an excess-return matrix.

    No-arbitrage holds iff some ``q > 0`` prices every column to zero,
    ``returns.T @ q = 0``.  By homogeneity we may ask for ``q >= 1`` and solve
    a small linear program.  ``probs`` only enters through the shape check:
    both properties depend on the support of the distribution, not its weights.
    """
    X = np.atleast_2d(np.asarray(returns, dtype=float))
    n, d = X.shape
    if probs is not None and np.shape(probs) != (n,):
        raise LengthMismatch(f"{np.shape(probs)} probabilities for {n} scenarios")

    norms = np.linalg.norm(X, axis=0)
    if norms.max(initial=0.0) == 0.0:
        rank = 0
    else:
        _, R, _ = scipy.linalg.qr(X, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > RANK_RTOL * norms.max()))
    non_redundant = rank == d

    res = linprog(
        c=np.ones(n),
        A_eq=X.T,
        b_eq=np.zeros(d),
        bounds=[(1.0, None)] * n,
        method="highs",
    )
    q = None
    no_arb = res.status == 0
    if no_arb:
        q = np.asarray(res.x, dtype=float)
        # guard against solver tolerance accepting a near-miss
        scale = max(1.0, float(np.abs(X).max()) * q.sum())
        if np.abs(X.T @ q).max(initial=0.0) > 1e-7 * scale:
            no_arb, q = False, None
        else:
            q = _frozen(q / q.sum())
    return MarketReport(no_arbitrage=no_arb, non_redundant=non_redundant, rank=rank, state_prices=q)


def _check_probs(probs, n: int) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.shape != (n,):
        raise LengthMismatch(f"{p.shape} probabilities for {n} scenarios")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise ProbabilityError("scenario probabilities must be strictly positive")
    if abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise ProbabilityError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def make_scenario_set(returns, probs, rate: float = 0.0) -> ScenarioSet:
    """Build a validated :class:`ScenarioSet`; raises on arbitrage or redundancy."""
    X = np.asarray(returns, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise LengthMismatch(f"returns must be a non-empty scenario-by-asset matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("returns must be finite")
    if not rate > -1:
        raise ValueError("risk-free rate must exceed -1")
    p = _check_probs(probs, X.shape[0])
    report = validate_market(X, p)
    if not report.non_redundant:
        raise RedundancyError(f"asset columns are linearly dependent (rank {report.rank} < {X.shape[1]})")
    if not report.no_arbitrage:
        raise ArbitrageError("market admits an arbitrage portfolio")
    return ScenarioSet(returns=_frozen(X), probs=_frozen(p), rate=float(rate), report=report)


def discretize_gaussian(gm: GaussianMarket, n: int, seed: int = 0, max_retries: int = 16) -> ScenarioSet:
    """Sample ``n`` equally likely excess-return scenarios from ``N(mu - rate, sigma)``.

    Deterministic in ``seed``; a failed validation triggers a resample from the
    next child seed, up to ``max_retries`` attempts.
    """
    d = gm.d
    if n < d + 1:
        raise GenerationError(f"need at least {d + 1} scenarios for {d} assets, got {n}")
    chol = np.linalg.cholesky(gm.sigma)
    probs = np.full(n, 1.0 / n)
    for child in np.random.SeedSequence(seed).spawn(max_retries):
        rng = np.random.default_rng(child)
        X = rng.standard_normal((n, d)) @ chol.T + gm.excess_mean
        try:
            return make_scenario_set(X, probs, gm.rate)
        except (ArbitrageError, RedundancyError):
            continue
    raise GenerationError(f"no valid market after {max_retries} draws")


def scenario_set_from_json(doc: dict[str, Any] | str | PathLike) -> ScenarioSet:
    """Load ``{"rate": r, "probs": [...], "returns": [[...], ...]}`` (row = scenario)."""
    if not isinstance(doc, dict):
        with open(doc) as fh:
            doc = json.load(fh)
    try:
        return make_scenario_set(doc["returns"], doc["probs"], doc.get("rate", 0.0))
    except KeyError as exc:
        raise ValueError(f"scenario document is missing {exc.args[0]!r}") from None
