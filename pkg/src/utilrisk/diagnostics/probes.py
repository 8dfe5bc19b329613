"""Scaling probes: does a functional register a loss once the position is large enough?"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from ..risk import RiskSpec
from ..utility import UtilitySpec

DEFAULT_SCHEDULE = tuple(2.0**k for k in range(41))


@dataclass(frozen=True)
class ProbeTrace:
    lambdas: np.ndarray
    values: np.ndarray
    crossed: bool
    lambda_at_cross: float | None


def scaling_probe(spec: UtilitySpec | RiskSpec, Y, probs, schedule=DEFAULT_SCHEDULE) -> ProbeTrace:
    """Evaluate ``spec(lambda * Y)`` along ``schedule``.

    A utility crosses when its values end up negative, a risk functional when
    they end up positive; ``lambda_at_cross`` is where the final run of such
    values begins.  Finite schedules give evidence, not proof.
    """
    Y = np.asarray(Y, dtype=float)
    if not np.any(Y < 0):
        raise PreconditionError("scaling probe needs a payoff with a loss scenario")
    lam = np.asarray(schedule, dtype=float)
    vals = np.asarray(spec.evaluate(lam[:, None] * Y[None, :], probs), dtype=float)
    if isinstance(spec, UtilitySpec):
        hit = vals < 0
    elif isinstance(spec, RiskSpec):
        hit = vals > 0
    else:
        raise TypeError(f"not a utility or risk functional: {spec!r}")
    if not hit[-1]:
        return ProbeTrace(lam, vals, False, None)
    misses = np.flatnonzero(~hit)
    start = 0 if misses.size == 0 else misses[-1] + 1
    return ProbeTrace(lam, vals, True, float(lam[start]))
