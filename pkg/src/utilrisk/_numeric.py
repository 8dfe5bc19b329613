"""Shared numeric helpers."""

from __future__ import annotations

import numpy as np


def expectation(values: np.ndarray, probs: np.ndarray):
    """``sum(probs * values)`` over the last axis, summed in sorted order.

    Sorting the terms first makes the result independent of scenario order,
    so relabelling scenarios never changes a law-invariant value.
    ``-inf`` and ``+inf`` terms are absorbing.
    """
    with np.errstate(invalid="ignore"):
        terms = np.sort(values * probs, axis=-1)
    out = np.sum(terms, axis=-1)
    return float(out) if np.ndim(out) == 0 else out
