"""Command-line front end.

Exit codes: 0 success, 1 a validation invariant failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from typing import Any, Optional, Sequence

from innovgeo import __version__
from innovgeo.bifurcation import PARAM_MAX, PARAM_MIN, SWEEP_GRID, classify_scenario, hysteresis_windows, sweep
from innovgeo.core import ModelParams, spec_from_name
from innovgeo.equilibria import DEFAULT_GRID, asymmetric_stability, find_equilibria, lambda_star
from innovgeo.errors import InnovGeoError, ParameterError, Unclassified
from innovgeo.fixtures import fixture, names as fixture_names
from innovgeo.thresholds import threshold_report
from innovgeo.validate import run_suite

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2
PARAM_FLAGS = ("lambda", "gamma", "sigma", "b", "phi", "mu")
DEFAULTS = {"lambda": 2.0, "gamma": 1.0, "sigma": 5.0, "b": 0.342, "phi": 0.3, "mu": 1.0}


class ConfigError(Exception):
    pass


def _round(x: Any, precision: int) -> Any:
    """Round floats to ``precision`` significant digits; other values pass through."""
    if isinstance(x, bool) or not isinstance(x, float):
        if isinstance(x, (list, tuple)):
            return [_round(v, precision) for v in x]
        if isinstance(x, dict):
            return {k: _round(v, precision) for k, v in x.items()}
        if hasattr(x, "item"):
            return _round(x.item(), precision)
        return x
    if not math.isfinite(x):
        return x
    return float(f"{x:.{precision}g}")


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)  # shortest round-trip representation
    if isinstance(x, list):
        return ";".join(_fmt(v) for v in x)
    return str(x)


def _params(args) -> ModelParams:
    values = dict(DEFAULTS)
    if args.fixture:
        try:
            fx = fixture(args.fixture)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        values.update(fx.params.as_dict())
        if args.spec is None:
            args.spec = fx.spec.label
    for name in PARAM_FLAGS:
        v = getattr(args, name.replace("lambda", "lam"))
        if v is not None:
            values[name] = v
    try:
        return ModelParams.from_dict(values)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def _spec(args):
    try:
        return spec_from_name(args.spec or "additive")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(args, meta: dict, results: Any, header: Optional[list] = None, rows: Optional[list] = None) -> None:
    p = args.precision
    if args.format == "json":
        doc = {"meta": _round(meta, p), "results": _round(results, p)}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(_round(v, p)) for v in r])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args, params: ModelParams, spec) -> dict:
    return {"command": args.command, "params": params.as_dict(), "spec": spec.label, "version": __version__}


# -- commands --------------------------------------------------------------


def cmd_equilibria(args) -> int:
    params, spec = _params(args), _spec(args)
    es = find_equilibria(spec, params, grid_n=args.grid)
    header = ["z_star", "kind", "stability", "residual", "derivative"]
    rows = [[e.z_star, e.kind.value, e.stability.value, e.residual, e.derivative] for e in es.equilibria]
    results = {
        "equilibria": [dict(zip(header, r)) for r in rows],
        "count_upper_half": es.interior_count_upper_half,
    }
    _emit(args, _meta(args, params, spec), results, header, rows)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    params, spec = _params(args), _spec(args)
    if not 0.5 < args.z <= 1:
        raise ConfigError(f"z must lie in (1/2, 1] (got {args.z!r})")
    flat = threshold_report(params, z=args.z, spec=spec).flat()
    _emit(args, _meta(args, params, spec), flat, ["key", "value"], [[k, v] for k, v in flat.items()])
    return EXIT_OK


def _sweep(args, params, spec):
    lo, hi = args.range
    if not (PARAM_MIN <= lo < hi <= PARAM_MAX):
        raise ConfigError(f"range must satisfy {PARAM_MIN} <= lo < hi <= {PARAM_MAX} (got {lo}, {hi})")
    if args.n_grid < 50:
        raise ConfigError(f"n-grid must be at least 50 (got {args.n_grid})")
    return sweep(spec, params, swept=args.param, range_=(lo, hi), n_grid=args.n_grid)


def _classification(diagram) -> dict:
    try:
        c = classify_scenario(diagram)
        return {"scenario": c.key, "label": c.label, "regimes": list(c.regimes), "features": list(c.features)}
    except Unclassified as exc:
        return {"scenario": None, "label": "unclassified", "regimes": exc.regimes, "features": []}


def cmd_sweep(args) -> int:
    params, spec = _params(args), _spec(args)
    d = _sweep(args, params, spec)
    header = ["param_value", "branch_id", "kind", "z_star", "stable"]
    rows = [list(r) for r in d.rows()]
    results = {
        "swept": d.swept,
        "rows": [dict(zip(header, r)) for r in rows],
        "events": [
            {"kind": e.kind.value, "location": e.location, "z": e.z_location, "criticality": e.criticality}
            for e in d.events
        ],
        "regimes": [{"lo": r.lo, "hi": r.hi, "label": r.label} for r in d.regimes],
        "hysteresis": [list(w) for w in hysteresis_windows(d)],
    }
    if d.swept == "phi":
        results["classification"] = _classification(d)
        print(f"classification: {results['classification']['label']}", file=sys.stderr)
    _emit(args, _meta(args, params, spec), results, header, rows)
    if args.plot_script:
        with open(args.plot_script, "w", encoding="utf-8") as fh:
            fh.write(PLOT_SCRIPT.format(data=args.out or "sweep.csv", swept=d.swept))
    return EXIT_OK


def cmd_classify(args) -> int:
    params, spec = _params(args), _spec(args)
    args.param = "phi"
    d = _sweep(args, params, spec)
    c = _classification(d)
    c["hysteresis"] = [list(w) for w in hysteresis_windows(d)]
    rows = [[k, v] for k, v in c.items()]
    _emit(args, _meta(args, params, spec), c, ["key", "value"], rows)
    return EXIT_OK


def cmd_lambda_star(args) -> int:
    params, spec = _params(args), _spec(args)
    if not 0.5 < args.z < 1:
        raise ConfigError(f"z must lie in (1/2, 1) (got {args.z!r})")
    ls = lambda_star(params, args.z)
    out = {"z": args.z, "lambda_star": ls.value, "valid": ls.valid, "stability": None}
    if ls.valid:
        out["stability"] = asymmetric_stability(params, args.z).value
    _emit(args, _meta(args, params, spec), out, list(out), [list(out.values())])
    return EXIT_OK


def cmd_validate(args) -> int:
    params, spec = _params(args), _spec(args)
    results = run_suite(spec, params, n_perturb=args.perturbations, seed=args.seed, raw_quartic=args.raw_quartic)
    rows = [[r.name, r.passed, r.detail] for r in results]
    meta = _meta(args, params, spec) | {"seed": args.seed}
    _emit(args, meta, [{"check": n, "passed": ok, "detail": d} for n, ok, d in rows], ["check", "passed", "detail"], rows)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"invariant failed: {failed[0].name}: {failed[0].detail}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


PLOT_SCRIPT = '''"""Plot a bifurcation diagram written by `innovgeo sweep --format csv`."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{data}"
runs = defaultdict(list)
with open(path) as fh:
    for row in csv.DictReader(fh):
        runs[row["branch_id"]].append((float(row["param_value"]), float(row["z_star"]), row["stable"] == "1"))

fig, ax = plt.subplots()
for pts in runs.values():
    # split each branch into runs of constant stability: solid stable, dashed unstable
    seg = [pts[0]]
    for p in pts[1:] + [None]:
        if p is None or p[2] != seg[-1][2]:
            xs = [q[0] for q in seg]
            for zs in ([q[1] for q in seg], [1 - q[1] for q in seg]):
                ax.plot(xs, zs, "k-" if seg[-1][2] else "k--", lw=1.2)
            if p is not None:
                seg = [seg[-1], p]
        else:
            seg.append(p)
ax.set_xlabel("{swept}")
ax.set_ylabel("z")
ax.set_ylim(-0.02, 1.02)
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model parameters")
    g.add_argument("--lambda", dest="lam", type=float, help=f"immobile workers (default {DEFAULTS['lambda']})")
    g.add_argument("--gamma", type=float, help=f"innovation productivity (default {DEFAULTS['gamma']})")
    g.add_argument("--sigma", type=float, help=f"elasticity of substitution (default {DEFAULTS['sigma']})")
    g.add_argument("--b", type=float, help=f"related variety in (0,1) (default {DEFAULTS['b']})")
    g.add_argument("--phi", type=float, help=f"freeness of trade in (0,1) (default {DEFAULTS['phi']})")
    g.add_argument("--mu", type=float, help="expenditure share (default 1)")
    g.add_argument("--spec", choices=["additive", "cobb-douglas"], default=None)
    g.add_argument("--fixture", choices=fixture_names(), help="take parameters from a shipped scenario")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json"], default="csv")
    o.add_argument("--out", help="write here instead of stdout")
    o.add_argument("--precision", type=int, default=12, help="significant digits (default 12)")
    o.add_argument("--grid", type=int, default=DEFAULT_GRID, help="root-scan grid on [1/2, 1]")
    o.add_argument("--seed", type=int, default=42)
    o.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="innovgeo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("equilibria", parents=[common], help="equilibria and stability at one point").set_defaults(
        func=cmd_equilibria
    )
    t = sub.add_parser("thresholds", parents=[common], help="closed-form critical values")
    t.add_argument("--z", type=float, default=0.75, help="state for the z-dependent thresholds")
    t.set_defaults(func=cmd_thresholds)

    def sweep_opts(p):
        p.add_argument("--range", nargs=2, type=float, default=(PARAM_MIN, PARAM_MAX), metavar=("LO", "HI"))
        p.add_argument("--n-grid", type=int, default=SWEEP_GRID)

    s = sub.add_parser("sweep", parents=[common], help="bifurcation diagram over phi or b")
    s.add_argument("--param", choices=["phi", "b"], default="phi")
    sweep_opts(s)
    s.add_argument("--plot-script", help="also write a matplotlib script for the CSV")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("classify", parents=[common], help="scenario of the phi diagram")
    sweep_opts(c)
    c.set_defaults(func=cmd_classify)

    ls = sub.add_parser("lambda-star", parents=[common], help="immobile mass making z an equilibrium")
    ls.add_argument("--z", type=float, required=True)
    ls.set_defaults(func=cmd_lambda_star)

    v = sub.add_parser("validate", parents=[common], help="cross-validation invariants")
    v.add_argument("--perturbations", type=int, default=100)
    v.add_argument("--raw-quartic", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.precision < 1 or args.precision > 17:
        print("error: precision must lie in [1, 17]", file=sys.stderr)
        return EXIT_CONFIG
    if args.grid < 100:
        print(f"error: grid must be at least 100 (got {args.grid})", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InnovGeoError as exc:
        # domain errors (asymptote, invalid equilibrium) come from the configured point
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
