"""Text grammar for utility and risk descriptions.

Utilities: ``mean``, ``exp:a``, ``power:gamma``, ``sshaped:alpha,beta``,
``linear:a``, ``boundedexp``, ``pwl:x1,y1;x2,y2;...``.

Risks: ``zero``, ``var:alpha``, ``es:alpha``, ``worstcase``, ``entropic:a``,
``lvar:FILE``, ``adjes:FILE``, ``ew:LOSS``, ``sr:LOSS``, ``oce:LOSS`` with
LOSS one of ``id``, ``expm1:a``, ``pospart:c``, ``powplus:p,c``,
``pwl:x1,y1;...``.  LVaR and adjusted-ES files hold
``{"breakpoints": [...], "values": [...], "limit_at_zero": x}``; infinite
entries may be written as the string ``"inf"``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .risk import (
    ES,
    OCE,
    AdjustedES,
    Entropic,
    ExpectedWeightedLoss,
    ExpMinusOne,
    Identity,
    LossFunction,
    LVaR,
    PiecewiseLinearLoss,
    PositivePart,
    PowerPlus,
    RiskProfile,
    RiskSpec,
    ShortfallRisk,
    ThresholdDistribution,
    VaR,
    WorstCase,
    Zero,
)
from .utility import (
    BoundedExponential,
    Exponential,
    ExpectedUtility,
    Linear,
    Mean,
    PiecewiseLinear,
    Power,
    SShaped,
    UtilitySpec,
)


class SpecSyntaxError(ValueError):
    """A description string does not match the grammar."""


def _split(text: str) -> tuple[str, str | None]:
    head, sep, rest = text.strip().partition(":")
    return head.strip().lower(), (rest.strip() if sep else None)


def _numbers(arg: str | None, count: int, what: str) -> list[float]:
    if arg is None:
        raise SpecSyntaxError(f"{what} needs {count} parameter(s)")
    try:
        vals = [float(x) for x in arg.split(",")]
    except ValueError:
        raise SpecSyntaxError(f"{what}: cannot read numbers from {arg!r}") from None
    if len(vals) != count:
        raise SpecSyntaxError(f"{what} needs {count} parameter(s), got {len(vals)}")
    return vals


def _knots(arg: str | None, what: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    if not arg:
        raise SpecSyntaxError(f"{what} needs knots x1,y1;x2,y2;...")
    xs, ys = [], []
    for pair in arg.split(";"):
        x, y = _numbers(pair, 2, what)
        xs.append(x)
        ys.append(y)
    return tuple(xs), tuple(ys)


def _no_arg(arg, what):
    if arg is not None:
        raise SpecSyntaxError(f"{what} takes no parameters")


def _build(factory, *args):
    try:
        return factory(*args)
    except ValueError as exc:
        raise SpecSyntaxError(str(exc)) from None


def parse_utility(text: str) -> UtilitySpec:
    head, arg = _split(text)
    if head == "mean":
        _no_arg(arg, "mean")
        return Mean()
    if head == "boundedexp":
        _no_arg(arg, "boundedexp")
        return ExpectedUtility(BoundedExponential())
    if head == "exp":
        return ExpectedUtility(_build(Exponential, *_numbers(arg, 1, "exp")))
    if head == "power":
        return ExpectedUtility(_build(Power, *_numbers(arg, 1, "power")))
    if head == "sshaped":
        return ExpectedUtility(_build(SShaped, *_numbers(arg, 2, "sshaped")))
    if head == "linear":
        return ExpectedUtility(_build(Linear, *_numbers(arg, 1, "linear")))
    if head == "pwl":
        return ExpectedUtility(_build(PiecewiseLinear, *_knots(arg, "pwl")))
    raise SpecSyntaxError(f"unknown utility {text!r}")


def parse_loss(text: str) -> LossFunction:
    head, arg = _split(text)
    if head == "id":
        _no_arg(arg, "id")
        return Identity()
    if head == "expm1":
        return _build(ExpMinusOne, *_numbers(arg, 1, "expm1"))
    if head == "pospart":
        return _build(PositivePart, *_numbers(arg, 1, "pospart"))
    if head == "powplus":
        return _build(PowerPlus, *_numbers(arg, 2, "powplus"))
    if head == "pwl":
        return _build(PiecewiseLinearLoss, *_knots(arg, "pwl"))
    raise SpecSyntaxError(f"unknown loss function {text!r}")


def _step_document(arg: str | None, what: str, base: Path | None) -> dict:
    if not arg:
        raise SpecSyntaxError(f"{what} needs a JSON file")
    path = Path(arg)
    if base is not None and not path.is_absolute():
        path = base / path
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SpecSyntaxError(f"{what}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(f"{what}: {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "breakpoints" not in doc or "values" not in doc:
        raise SpecSyntaxError(f"{what}: {path} needs 'breakpoints' and 'values'")
    return doc


def _extended(x) -> float:
    return float(x) if x is not None else float("inf")


def parse_risk(text: str, base_dir: str | Path | None = None) -> RiskSpec:
    """Parse a risk description; relative LVaR/ES^g paths resolve against ``base_dir``."""
    base = Path(base_dir) if base_dir is not None else None
    head, arg = _split(text)
    if head == "zero":
        _no_arg(arg, "zero")
        return Zero()
    if head == "worstcase":
        _no_arg(arg, "worstcase")
        return WorstCase()
    if head == "var":
        return _build(VaR, *_numbers(arg, 1, "var"))
    if head == "es":
        return _build(ES, *_numbers(arg, 1, "es"))
    if head == "entropic":
        return _build(Entropic, *_numbers(arg, 1, "entropic"))
    if head == "lvar":
        doc = _step_document(arg, "lvar", base)
        beta = _build(ThresholdDistribution, tuple(doc["breakpoints"]), tuple(doc["values"]))
        return LVaR(beta)
    if head == "adjes":
        doc = _step_document(arg, "adjes", base)
        values = tuple(_extended(v) for v in doc["values"])
        g0 = doc.get("limit_at_zero")
        g = _build(RiskProfile, tuple(doc["breakpoints"]), values, None if g0 is None else float(g0))
        return AdjustedES(g)
    if head in ("ew", "sr", "oce"):
        if arg is None:
            raise SpecSyntaxError(f"{head} needs a loss function")
        loss = parse_loss(arg)
        factory = {"ew": ExpectedWeightedLoss, "sr": ShortfallRisk, "oce": OCE}[head]
        return _build(factory, loss)
    raise SpecSyntaxError(f"unknown risk functional {text!r}")
