"""Gaussian markets in which mean maximization under VaR or ES is ill posed.

For normally distributed excess returns a linear portfolio ``pi`` has mean
``m = pi . (mu - r)`` and volatility ``s = sqrt(pi' Sigma pi)``, so its VaR
and ES are ``s * t - m`` with ``t`` the corresponding standard normal
threshold.  When the maximal Sharpe ratio reaches ``t``, the tangency
portfolio has nonpositive risk and scaling it drives the mean to infinity
at no risk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..risk import ES, VaR
from ..scenarios import GaussianMarket
from .normal import es_standard_normal, var_standard_normal


@dataclass(frozen=True)
class WitnessStep:
    n: int
    pi: np.ndarray
    mean: float
    risk: float


@dataclass(frozen=True)
class GaussianWitness:
    market: GaussianMarket
    alpha: float
    threshold: float
    sr_max: float
    base_direction: np.ndarray
    sequence: tuple[WitnessStep, ...]

    def rows(self) -> list[list[float]]:
        return [[s.n, *s.pi.tolist(), s.mean, s.risk] for s in self.sequence]


@dataclass(frozen=True)
class NotApplicable:
    alpha: float
    threshold: float
    sr_max: float

    @property
    def gap(self) -> float:
        """How far the Sharpe ratio falls short of the risk threshold."""
        return self.threshold - self.sr_max


def gaussian_threshold(risk) -> float:
    """``VaR^alpha(Z)`` or ``ES^alpha(Z)`` of a standard normal ``Z``."""
    if isinstance(risk, VaR):
        return var_standard_normal(risk.alpha)
    if isinstance(risk, ES):
        return es_standard_normal(risk.alpha)
    raise TypeError("Gaussian witnesses exist for VaR and ES only")


def linear_portfolio_stats(market: GaussianMarket, pi) -> tuple[float, float]:
    """Mean excess return and volatility of the portfolio ``pi``."""
    pi = np.asarray(pi, dtype=float)
    return float(pi @ market.excess_mean), float(np.sqrt(pi @ market.sigma @ pi))


def gaussian_witness(risk, target_sr: float, d: int, seed: int = 0, n_terms: int = 20, rate: float = 0.0):
    """Build a Gaussian market with maximal Sharpe ratio ``target_sr`` and, if possible, a witness sequence.

    The covariance is a seeded random positive-definite matrix; the excess
    mean is ``target_sr * L e`` for its Cholesky factor ``L`` and a random
    unit vector ``e``.  The base portfolio is the tangency portfolio scaled
    to unit volatility, and the sequence is ``pi_n = n * pi_0``.
    """
    if not target_sr > 0:
        raise ValueError("target Sharpe ratio must be positive")
    if d < 1 or n_terms < 1:
        raise ValueError("need d >= 1 and n_terms >= 1")
    threshold = gaussian_threshold(risk)
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d))
    sigma = A @ A.T / d + 0.5 * np.eye(d)
    sigma = 0.5 * (sigma + sigma.T)
    e = rng.standard_normal(d)
    e /= np.linalg.norm(e)
    L = np.linalg.cholesky(sigma)
    excess = target_sr * (L @ e)
    market = GaussianMarket(mu=rate + excess, sigma=sigma, rate=rate)
    sr = market.sr_max
    if sr < threshold:
        return NotApplicable(risk.alpha, threshold, sr)
    pi0 = np.linalg.solve(sigma, excess) / sr
    steps = []
    for n in range(1, n_terms + 1):
        pi = n * pi0
        m, s = linear_portfolio_stats(market, pi)
        steps.append(WitnessStep(n, pi, m, s * threshold - m))
    return GaussianWitness(market, risk.alpha, threshold, sr, pi0, tuple(steps))
