"""Command-line front end.

``utilrisk <eval|optimize|minrisk|classify|tables|witness|frontier|axioms> [flags]``

Results go to standard output as JSON (or CSV with ``--csv`` where the result
is tabular).  Exit codes: 0 success, 2 usage error, 3 domain error; domain
errors are reported as a JSON object on standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .diagnostics import axiom_harness, classify_wellposedness, gaussian_witness, table_matrix
from .diagnostics.witness import NotApplicable
from .errors import UtilRiskError
from .optimizer import DIVERGING, OPTIMAL, SolveOptions, maximize_utility, minimize_risk, uniqueness_probe
from .parsing import SpecSyntaxError, parse_risk, parse_utility
from .risk import ES, VaR
from .scenarios import scenario_set_from_json
from .transform import make_frame, transformed_risk, transformed_utility

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3
SHARED = ("scenarios", "utility", "risk", "w", "r", "rmax", "umin", "seed")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# serialization


def _plain(obj):
    """Convert numpy values and non-finite floats into JSON-safe Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _dump_json(obj, out) -> None:
    # repr-based float output is the shortest string that round-trips exactly
    out.write(json.dumps(_plain(obj), indent=2, allow_nan=False))
    out.write("\n")


def _dump_csv(header, rows, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


# --------------------------------------------------------------------------
# argument handling


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _sweep(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("count must be at least 1")
    return np.linspace(start, stop, count)


def _shared(p: argparse.ArgumentParser, *, market=True, utility=True, risk=True, thresholds=True):
    g = p.add_argument_group("shared")
    if market:
        g.add_argument("--scenarios", metavar="FILE", help='scenario JSON {"rate", "probs", "returns"}')
    if utility:
        g.add_argument("--utility", metavar="SPEC", help="utility spec, e.g. mean, exp:1, sshaped:0.5,0.7")
    if risk:
        g.add_argument("--risk", metavar="SPEC", help="risk spec, e.g. es:0.05, ew:expm1:1, lvar:beta.json")
    if market:
        g.add_argument("--w", type=float, metavar="X", help="initial wealth (default 1)")
        g.add_argument("--r", type=float, metavar="X", help="risk-free rate (default: scenario file rate)")
    if thresholds:
        g.add_argument("--rmax", type=float, metavar="X",
                       help="risk budget of the fraction-space problem, R~max = Rmax - R(w(1+r))")
        g.add_argument("--umin", type=float, metavar="X",
                       help="utility floor of the fraction-space problem, U~min = Umin - U(w(1+r))")
    g.add_argument("--seed", type=int, metavar="N", help="random seed (default 0)")
    g.add_argument("--csv", action="store_true", help="emit CSV instead of JSON where tabular")
    g.add_argument("--config", metavar="FILE", help="JSON config; explicit flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="utilrisk", description="Utility/risk portfolio selection toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("eval", help="evaluate U, R and their wealth-transformed versions at a portfolio",
                       description="Evaluate the utility functional U and risk functional R of terminal wealth "
                                   "w(1+r) + w pi.X, together with the transformed functionals U_{w,r}(X_pi) and "
                                   "R_{w,r}(X_pi), for the fraction portfolio pi.")
    _shared(p, thresholds=False)
    p.add_argument("--pi", type=_float_list, metavar="P1,P2,...", help="fractions of wealth (default 0)")

    p = sub.add_parser("optimize", help="risk-constrained utility maximization over fraction portfolios",
                       description="Maximize U_{w,r}(X_pi) subject to R_{w,r}(X_pi) <= R~max "
                                   "(the (U,R)-portfolio selection problem). Reports Optimal, Diverging "
                                   "(ray evidence of a (U,R)-arbitrage) or Infeasible.")
    _shared(p)

    p = sub.add_parser("minrisk", help="utility-constrained risk minimization over fraction portfolios",
                       description="Minimize R_{w,r}(X_pi) subject to U_{w,r}(X_pi) >= U~min "
                                   "(the (R,U)-portfolio selection problem).")
    _shared(p)

    p = sub.add_parser("classify", help="market-independent well-posedness verdict for a (U,R) pair",
                       description="Classify (U,R)-portfolio selection as WellPosed, IllPosed or Unknown for every "
                                   "normalized, arbitrage-free, non-redundant market, from sensitivity to large "
                                   "losses of either side and the catalog premises.")
    _shared(p, market=False, thresholds=False)

    p = sub.add_parser("tables", help="both well-posedness classification matrices",
                       description="Classification matrices of utility families against risk functionals and of "
                                   "expected utilities (by asymptotic loss-gain ratio) against risk-functional "
                                   "conditions.")
    _shared(p, market=False, utility=False, risk=False, thresholds=False)
    p.add_argument("--text", action="store_true", help="render the matrices as text")

    p = sub.add_parser("witness", help="Gaussian market and portfolio sequence with unbounded mean at no risk",
                       description="Build a Gaussian market with maximal Sharpe ratio SR and, when SR reaches the "
                                   "standard normal VaR/ES threshold, the sequence pi_n = n pi_0 with risk <= 0 and "
                                   "linearly increasing mean.")
    _shared(p, market=False, utility=False, thresholds=False)
    p.add_argument("--sr", type=float, required=False, metavar="X", help="target maximal Sharpe ratio")
    p.add_argument("--dim", type=int, default=2, metavar="D", help="number of risky assets (default 2)")
    p.add_argument("--terms", type=int, default=20, metavar="N", help="length of the sequence (default 20)")

    p = sub.add_parser("frontier", help="optimal utility as a function of the risk budget",
                       description="Solve the (U,R)-portfolio selection problem for each R~max on the inclusive "
                                   "grid start:stop:count and emit (rmax, value, status, pi...).")
    _shared(p, thresholds=False)
    p.add_argument("--grid", type=_sweep, metavar="START:STOP:COUNT", help="risk-budget grid")

    p = sub.add_parser("axioms", help="randomized axiom checks of one utility or risk functional",
                       description="Check monotonicity, normalization, cash-additivity, positive homogeneity, "
                                   "star-shapedness, (cash-)convexity or concavity and law invariance on seeded "
                                   "random payoffs; axioms claimed by the catalog must pass.")
    _shared(p, market=False, thresholds=False)
    p.add_argument("--trials", type=int, default=1000, metavar="N", help="number of trials (default 1000)")
    return parser


def _merge_config(args) -> tuple[dict, Path | None]:
    """Fill unset shared flags from ``--config``; returns solver options and the config directory."""
    if not getattr(args, "config", None):
        return {}, None
    path = Path(args.config)
    try:
        cfg = json.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    for key in SHARED:
        if key in cfg and hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, cfg[key])
    return dict(cfg.get("options") or {}), path.parent


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required argument(s): " + ", ".join(missing))


def _market(args, base: Path | None):
    src = args.scenarios
    if isinstance(src, dict):
        return scenario_set_from_json(src)
    path = Path(src)
    if base is not None and not path.is_absolute() and not path.exists():
        path = base / path
    try:
        return scenario_set_from_json(path)
    except OSError as exc:
        raise UsageError(f"cannot read scenarios {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"scenarios {path} are not valid JSON: {exc.msg}") from None


def _options(args, cfg_opts: dict) -> SolveOptions:
    opts = dict(cfg_opts)
    if args.seed is not None:
        opts["seed"] = args.seed
    try:
        return SolveOptions(**opts)
    except TypeError as exc:
        raise UsageError(f"bad solver options: {exc}") from None


def _result_json(res, unique=None) -> dict:
    out = {
        "status": res.status,
        "pi": res.pi,
        "value": res.value,
        "constraint_value": res.constraint_value,
        "evaluations": res.evaluations,
        "starts_agreeing": res.starts_agreeing,
        "converged_starts": res.converged_starts,
    }
    if unique is not None:
        out["unique_evidence"] = unique
    if res.status == DIVERGING and res.evidence is not None:
        out["direction"] = out.pop("pi")
        out["lambdas"] = res.evidence.lambdas
        out["value_trace"] = res.evidence.objective
        out["constraint_trace"] = res.evidence.constraint
    return out


# --------------------------------------------------------------------------
# subcommands


def _setup(args, base):
    _require(args, "scenarios", "utility", "risk")
    mkt = _market(args, base)
    U = parse_utility(args.utility)
    R = parse_risk(args.risk, base)
    w = 1.0 if args.w is None else float(args.w)
    r = float(mkt.rate) if args.r is None else float(args.r)
    return mkt, U, R, w, r


def cmd_eval(args, cfg_opts, base, out):
    mkt, U, R, w, r = _setup(args, base)
    pi = np.zeros(mkt.n_assets) if args.pi is None else np.asarray(args.pi, dtype=float)
    X = mkt.payoff(pi)
    frame = make_frame(w, r, mkt.probs, risk=R, utility=U)
    wealth = frame.riskless_wealth + w * X
    result = {
        "pi": pi,
        "utility": float(U.evaluate(wealth, mkt.probs)),
        "risk": float(R.evaluate(wealth, mkt.probs)),
        "transformed_utility": float(transformed_utility(U, frame, X, mkt.probs)),
        "transformed_risk": float(transformed_risk(R, frame, X, mkt.probs)),
        "utility_base": frame.utility_base,
        "risk_base": frame.risk_base,
    }
    if args.csv:
        _dump_csv(list(result)[1:], [list(result.values())[1:]], out)
    else:
        _dump_json(result, out)


def cmd_optimize(args, cfg_opts, base, out):
    mkt, U, R, w, r = _setup(args, base)
    _require(args, "rmax")
    frame = make_frame(w, r, mkt.probs, risk=R, utility=U, rtilde_max=float(args.rmax))
    res = maximize_utility(U, R, mkt, frame, _options(args, cfg_opts))
    unique = uniqueness_probe(res) if res.status == OPTIMAL else None
    _emit_result(args, res, unique, out)


def cmd_minrisk(args, cfg_opts, base, out):
    mkt, U, R, w, r = _setup(args, base)
    _require(args, "umin")
    frame = make_frame(w, r, mkt.probs, risk=R, utility=U, utilde_min=float(args.umin))
    res = minimize_risk(R, U, mkt, frame, _options(args, cfg_opts))
    unique = uniqueness_probe(res) if res.status == OPTIMAL else None
    _emit_result(args, res, unique, out)


def _emit_result(args, res, unique, out):
    if not args.csv:
        _dump_json(_result_json(res, unique), out)
        return
    pi = [] if res.pi is None else list(res.pi)
    header = ["status", "value", "constraint_value"] + [f"pi_{i + 1}" for i in range(len(pi))]
    _dump_csv(header, [[res.status, res.value, res.constraint_value, *pi]], out)


def cmd_classify(args, cfg_opts, base, out):
    _require(args, "utility", "risk")
    c = classify_wellposedness(parse_utility(args.utility), parse_risk(args.risk, base))
    if args.csv:
        _dump_csv(["verdict", "reason", "failing"], [[c.verdict, c.reason, ";".join(c.failing)]], out)
    else:
        _dump_json(c.to_json(), out)


def cmd_tables(args, cfg_opts, base, out):
    tables = table_matrix()
    if args.text:
        out.write("\n\n".join(t.render() for t in tables) + "\n")
    elif args.csv:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["table", "row", "column", "verdict"])
        for k, t in enumerate(tables, start=1):
            for label, row in zip(t.row_labels, t.cells):
                for col, cell in zip(t.col_labels, row):
                    writer.writerow([k, label, col, cell.verdict])
    else:
        _dump_json({"tables": [t.to_json() for t in tables]}, out)


def cmd_witness(args, cfg_opts, base, out):
    _require(args, "risk", "sr")
    R = parse_risk(args.risk, base)
    if not isinstance(R, (VaR, ES)):
        raise UsageError("witness needs --risk var:ALPHA or es:ALPHA")
    seed = 0 if args.seed is None else args.seed
    wit = gaussian_witness(R, args.sr, args.dim, seed=seed, n_terms=args.terms)
    if isinstance(wit, NotApplicable):
        doc = {"status": "NotApplicable", "alpha": wit.alpha, "threshold": wit.threshold,
               "sr_max": wit.sr_max, "gap": wit.gap}
        if args.csv:
            _dump_csv(list(doc), [list(doc.values())], out)
        else:
            _dump_json(doc, out)
        return
    if args.csv:
        header = ["n"] + [f"pi_{i + 1}" for i in range(args.dim)] + ["mean", "risk"]
        _dump_csv(header, [[s.n, *s.pi.tolist(), s.mean, s.risk] for s in wit.sequence], out)
        return
    _dump_json({
        "status": "Witness",
        "alpha": wit.alpha,
        "threshold": wit.threshold,
        "sr_max": wit.sr_max,
        "market": {"mu": wit.market.mu, "sigma": wit.market.sigma, "rate": wit.market.rate},
        "base_direction": wit.base_direction,
        "sequence": [{"n": s.n, "pi": s.pi, "mean": s.mean, "risk": s.risk} for s in wit.sequence],
    }, out)


def cmd_frontier(args, cfg_opts, base, out):
    mkt, U, R, w, r = _setup(args, base)
    _require(args, "grid")
    opts = _options(args, cfg_opts)
    rows = []
    for rt in args.grid:
        frame = make_frame(w, r, mkt.probs, risk=R, utility=U, rtilde_max=float(rt))
        res = maximize_utility(U, R, mkt, frame, opts)
        pi = res.pi if res.status == OPTIMAL else np.full(mkt.n_assets, np.nan)
        rows.append((float(rt), res.value, res.status, pi))
    if args.csv:
        header = ["rmax", "value", "status"] + [f"pi_{i + 1}" for i in range(mkt.n_assets)]
        _dump_csv(header, [[rt, v, s, *p.tolist()] for rt, v, s, p in rows], out)
    else:
        _dump_json({"frontier": [{"rmax": rt, "value": v, "status": s, "pi": p} for rt, v, s, p in rows]}, out)


def cmd_axioms(args, cfg_opts, base, out):
    if (args.utility is None) == (args.risk is None):
        raise UsageError("axioms needs exactly one of --utility or --risk")
    spec = parse_utility(args.utility) if args.utility is not None else parse_risk(args.risk, base)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    report = axiom_harness(spec, trials=args.trials, seed=0 if args.seed is None else args.seed)
    if args.csv:
        rows = [[name, r.required, r.passed, r.checks] for name, r in report.results.items()]
        _dump_csv(["axiom", "required", "passed", "checks"], rows, out)
    else:
        _dump_json(report.to_json(), out)


COMMANDS = {
    "eval": cmd_eval,
    "optimize": cmd_optimize,
    "minrisk": cmd_minrisk,
    "classify": cmd_classify,
    "tables": cmd_tables,
    "witness": cmd_witness,
    "frontier": cmd_frontier,
    "axioms": cmd_axioms,
}


def run(argv=None, out=None, err=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    buf = io.StringIO()
    try:
        cfg_opts, base = _merge_config(args)
        COMMANDS[args.command](args, cfg_opts, base, buf)
    except (UsageError, SpecSyntaxError) as exc:
        err.write(f"utilrisk {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (UtilRiskError, ValueError) as exc:
        _dump_json({"error": {"type": type(exc).__name__, "message": str(exc)}}, err)
        return EXIT_DOMAIN
    out.write(buf.getvalue())
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
