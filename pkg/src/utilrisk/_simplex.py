"""Nelder-Mead simplex search run on a batch of independent starts at once.

Each simplex follows the textbook reflect / expand / contract / shrink
moves; the batch only shares objective calls, so results do not depend on
how many starts run together.  Objective values may be ``+inf`` (worse than
everything); NaN is treated as ``+inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass
class SimplexResult:
    x: np.ndarray  # (B, d) best vertex per start
    f: np.ndarray  # (B,)
    converged: np.ndarray  # (B,) simplex diameter fell below tol
    iterations: np.ndarray  # (B,)
    evaluations: int


def nelder_mead(
    fun: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    step,
    max_iters: int = 2000,
    tol: float = 1e-8,
) -> SimplexResult:
    """Minimize ``fun`` from every row of ``x0``.

    ``fun`` maps an ``(m, d)`` array of points to ``m`` values.  ``step`` is
    the edge length of each initial right-angled simplex (scalar or per start).
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    B, d = x0.shape
    nevals = 0

    def f(points):
        nonlocal nevals
        nevals += points.shape[0]
        vals = np.asarray(fun(points), dtype=float)
        return np.where(np.isnan(vals), np.inf, vals)

    step = np.broadcast_to(np.asarray(step, dtype=float), (B,))
    S = np.repeat(x0[:, None, :], d + 1, axis=1)
    S[:, 1:, :] += step[:, None, None] * np.eye(d)[None]
    F = f(S.reshape(-1, d)).reshape(B, d + 1)

    active = np.ones(B, dtype=bool)
    converged = np.zeros(B, dtype=bool)
    iters = np.zeros(B, dtype=int)
    for _ in range(max_iters):
        order = np.argsort(F, axis=1, kind="stable")
        S = np.take_along_axis(S, order[:, :, None], axis=1)
        F = np.take_along_axis(F, order, axis=1)
        diam = np.max(np.linalg.norm(S[:, 1:, :] - S[:, :1, :], axis=2), axis=1)
        done = active & (diam <= tol)
        converged |= done
        active &= ~done
        if not active.any():
            break
        idx = np.flatnonzero(active)
        s, fv = S[idx], F[idx]
        c = s[:, :-1, :].mean(axis=1)
        xw, fw, fb, fs = s[:, -1, :], fv[:, -1], fv[:, 0], fv[:, -2]

        xr = c + REFLECT * (c - xw)
        fr = f(xr)
        new_x, new_f = xr.copy(), fr.copy()
        shrink = np.zeros(idx.size, dtype=bool)

        exp_m = fr < fb
        if exp_m.any():
            xe = c[exp_m] + EXPAND * (xr[exp_m] - c[exp_m])
            fe = f(xe)
            better = fe < fr[exp_m]
            sub = np.flatnonzero(exp_m)[better]
            new_x[sub], new_f[sub] = xe[better], fe[better]

        con_m = fr >= fs
        if con_m.any():
            outside = fr < fw
            xc = np.where(
                outside[:, None], c + CONTRACT * (xr - c), c + CONTRACT * (xw - c)
            )[con_m]
            fc = f(xc)
            ok = np.where(outside[con_m], fc <= fr[con_m], fc < fw[con_m])
            sub = np.flatnonzero(con_m)
            new_x[sub[ok]], new_f[sub[ok]] = xc[ok], fc[ok]
            shrink[sub[~ok]] = True

        keep = ~shrink
        s[keep, -1, :] = new_x[keep]
        fv[keep, -1] = new_f[keep]
        if shrink.any():
            sh = s[shrink]
            sh[:, 1:, :] = sh[:, :1, :] + SHRINK * (sh[:, 1:, :] - sh[:, :1, :])
            fv_sh = fv[shrink]
            fv_sh[:, 1:] = f(sh[:, 1:, :].reshape(-1, d)).reshape(-1, d)
            s[shrink], fv[shrink] = sh, fv_sh
        S[idx], F[idx] = s, fv
        iters[idx] += 1

    order = np.argsort(F, axis=1, kind="stable")
    S = np.take_along_axis(S, order[:, :, None], axis=1)
    F = np.take_along_axis(F, order, axis=1)
    return SimplexResult(S[:, 0, :].copy(), F[:, 0].copy(), converged, iters, nevals)
