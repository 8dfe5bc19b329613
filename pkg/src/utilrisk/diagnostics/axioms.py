"""Randomized checks of the structural axioms of utility and risk functionals.

Each axiom is tested on seeded random payoffs with 2 to 8 scenarios.  An
axiom is *required* when the catalog metadata claims it; a required axiom
that fails is a metadata/behavior mismatch.  Unflagged axioms are still
exercised so that counterexamples (e.g. non-convexity of VaR) are reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..risk import RiskSpec
from ..utility import UtilitySpec

TOL = 1e-9
HOMOGENEITY_FACTORS = (0.5, 2.0, 10.0)


@dataclass
class AxiomResult:
    name: str
    required: bool
    passed: bool = True
    checks: int = 0
    counterexample: dict | None = None


@dataclass
class AxiomReport:
    spec: str
    trials: int
    results: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def mismatches(self) -> list[str]:
        return [name for name, r in self.results.items() if r.required and not r.passed]

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "trials": self.trials,
            "mismatches": self.mismatches,
            "axioms": {
                name: {
                    "required": r.required,
                    "passed": r.passed,
                    "checks": r.checks,
                    "counterexample": r.counterexample,
                }
                for name, r in self.results.items()
            },
        }


def _finite_part(x):
    return np.where(np.isfinite(x), np.abs(x), 0.0)


def _le(a, b, tol=TOL):
    """Elementwise ``a <= b`` up to a relative tolerance, exact on infinities."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    slack = tol * (1.0 + _finite_part(a) + _finite_part(b))
    both_finite = np.isfinite(a) & np.isfinite(b)
    with np.errstate(invalid="ignore"):
        return np.where(both_finite, a <= b + slack, (a <= b) | (a == b))


def _close(a, b, tol=TOL):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    slack = tol * (1.0 + _finite_part(a) + _finite_part(b))
    both_finite = np.isfinite(a) & np.isfinite(b)
    with np.errstate(invalid="ignore"):
        return np.where(both_finite, np.abs(a - b) <= slack, a == b)


def _flags(spec) -> tuple[dict[str, bool], int]:
    md = spec.metadata
    if isinstance(spec, UtilitySpec):
        flags = {
            "monotone": md.monotone,
            "normalized": True,
            "cash_additive": md.cash_additive,
            "positively_homogeneous": md.positively_homogeneous,
            "star_shaped": md.concave or md.cash_concave,
            "concave_sample": md.concave,
            "cash_concave": md.cash_concave,
            "law_invariant_on_uniform": md.law_invariant,
        }
        return flags, +1
    if isinstance(spec, RiskSpec):
        flags = {
            "monotone": True,
            "normalized": True,
            "cash_additive": md.cash_additive,
            "positively_homogeneous": md.positively_homogeneous,
            "star_shaped": md.pos_star_shaped,
            "convex_sample": md.convex,
            "cash_convex": md.cash_convex,
            "law_invariant_on_uniform": md.law_invariant,
        }
        return flags, -1
    raise TypeError(f"not a utility or risk functional: {spec!r}")


def _draw_payoffs(rng, T: int, n: int) -> np.ndarray:
    scale = 10.0 ** rng.uniform(-1.0, 1.0, size=(T, 1))
    Y = rng.standard_normal((T, n)) * scale
    # coarse rounding on some rows produces ties and exact zeros
    coarse = rng.random(T) < 0.3
    Y[coarse] = np.round(Y[coarse])
    return Y


def axiom_harness(spec: UtilitySpec | RiskSpec, trials: int = 1000, seed: int = 0,
                  chunk: int = 25) -> AxiomReport:
    """Run every axiom check ``trials`` times on seeded payoffs and report per axiom."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    flags, sense = _flags(spec)
    report = AxiomReport(repr(spec), trials, {k: AxiomResult(k, v) for k, v in flags.items()})
    rng = np.random.default_rng(seed)
    ns = rng.integers(2, 9, size=trials)

    def H(Y, p):
        return np.asarray(spec.evaluate(Y, p), dtype=float)

    def better(a, b):
        # "a is at least as good as b": utility a >= b, risk a <= b
        return _le(b, a) if sense > 0 else _le(a, b)

    def record(name, ok, **example):
        res = report.results[name]
        res.checks += int(np.size(ok))
        if res.passed and not np.all(ok):
            i = int(np.flatnonzero(~np.asarray(ok))[0])
            res.passed = False
            res.counterexample = {
                k: (np.asarray(v)[i].tolist() if np.ndim(v) > 0 and np.shape(v)[0] == np.size(ok) else np.asarray(v).tolist())
                for k, v in example.items()
            }

    for n in np.unique(ns):
        count = int(np.sum(ns == n))
        for start in range(0, count, chunk):
            T = min(chunk, count - start)
            p = rng.dirichlet(np.ones(n))
            Y = _draw_payoffs(rng, T, n)
            Z = _draw_payoffs(rng, T, n)
            c = rng.normal(0.0, 3.0, size=T)
            lam = rng.uniform(0.05, 0.95, size=T)
            hY, hZ = H(Y, p), H(Z, p)
            hc = H(np.repeat(c[:, None], n, axis=1), p)

            up = Y + np.abs(rng.standard_normal((T, n))) * (rng.random((T, n)) < 0.6)
            record("monotone", better(H(up, p), hY), Y=Y, Z=up, probs=p)

            zero = H(np.zeros((1, n)), p)
            record("normalized", np.abs(zero) <= 1e-12, Y=np.zeros((1, n)), probs=p)

            record("cash_additive", _close(H(Y + c[:, None], p), hY + hc), Y=Y, c=c, probs=p)

            for f in HOMOGENEITY_FACTORS:
                with np.errstate(invalid="ignore"):
                    record("positively_homogeneous", _close(H(f * Y, p), f * hY), Y=Y, factor=np.full(T, f), probs=p)

            lhs = H(lam[:, None] * Y, p)
            record("star_shaped", better(lhs, lam * hY), Y=Y, lam=lam, probs=p)

            mix = H(lam[:, None] * Y + (1 - lam[:, None]) * Z, p)
            combo = lam * hY + (1 - lam) * hZ
            record("concave_sample" if sense > 0 else "convex_sample", better(mix, combo), Y=Y, Z=Z, lam=lam, probs=p)

            cmix = H(lam[:, None] * Y + (1 - lam[:, None]) * c[:, None], p)
            record("cash_concave" if sense > 0 else "cash_convex", better(cmix, lam * hY + (1 - lam) * hc),
                   Y=Y, c=c, lam=lam, probs=p)

            uni = np.full(n, 1.0 / n)
            perm = np.array([rng.permutation(n) for _ in range(T)])
            Yp = np.take_along_axis(Y, perm, axis=1)
            a, b = H(Y, uni), H(Yp, uni)
            record("law_invariant_on_uniform", (a == b) | (np.isnan(a) & np.isnan(b)), Y=Y, permuted=Yp, probs=uni)
    return report
