"""Standard normal quantiles and tail averages without external special functions."""

from __future__ import annotations

import math

import numpy as np

# rational approximation of the inverse normal CDF (relative error about 1e-9)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549671010243304e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def norm_pdf(z):
    return np.exp(-0.5 * np.square(z)) / math.sqrt(2.0 * math.pi)


def norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _poly(coeffs, x):
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def norm_ppf(p: float) -> float:
    """``Phi^{-1}(p)``: rational first guess, then one Halley step on ``Phi(x) - p``."""
    if not 0.0 < p < 1.0:
        if p == 0.0:
            return -math.inf
        if p == 1.0:
            return math.inf
        raise ValueError("probability must lie in [0, 1]")
    if p > 0.5:
        # 1 - p is exact here, and the lower-tail residual avoids cancellation
        return -norm_ppf(1.0 - p)
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = _poly(_C, q) / (_poly(_D, q) * q + 1.0)
    else:
        q = p - 0.5
        r = q * q
        x = _poly(_A, r) * q / (_poly(_B, r) * r + 1.0)
    e = norm_cdf(x) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def var_standard_normal(alpha: float) -> float:
    """``VaR^alpha(Z) = -Phi^{-1}(alpha)`` for ``Z ~ N(0, 1)``."""
    return -norm_ppf(alpha)


def es_standard_normal(alpha: float, nodes: int = 10_000) -> float:
    """``ES^alpha(Z)``: average of ``-z`` over the lower ``alpha`` tail.

    Composite Simpson rule for ``int_{-inf}^{z_alpha} -z phi(z) dz`` on
    ``[z_alpha - 12, z_alpha]``; the neglected tail is below ``1e-30``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("ES level must lie in (0, 1]")
    if alpha == 1.0:
        return 0.0
    za = norm_ppf(alpha)
    m = nodes if nodes % 2 == 0 else nodes + 1
    z = np.linspace(za - 12.0, za, m + 1)
    f = -z * norm_pdf(z)
    h = 12.0 / m
    integral = h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())
    return float(integral / alpha)
