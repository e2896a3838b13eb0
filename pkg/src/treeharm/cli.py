"""Command-line front end.

Subcommands: phi, symbols, extrema, kernel, decompose, strichartz, norms.
Tables go to CSV, reports to JSON; `--plot-data` switches tables to bare
(x, y) series for external plotting.  Exit codes: 0 success / all verdicts
as predicted, 1 internal error, 2 configuration error, 3 verdict mismatch.
The environment variable TREEHARM_SEED overrides any configured RNG seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as tio
from .errors import ConfigError, TreeharmError
from .eigenproject import eigen_decompose
from .harness import (
    multiplier_from_spec,
    run_scenarios,
    scenarios_from_config,
)
from .norms import (
    ball_sum_diagnostic,
    hardy_norm,
    schwartz_seminorm,
    weak_lp_norm,
)
from .spectral import phi_profile, symbol_extrema, tau
from .transforms import synthesize_kernel, synthesize_kernel_adaptive
from .tree import build_tree

DEFAULTS = {
    "q": 2,
    "R": 12,
    "D": 6,
    "p": 1.5,
    "seed": 1234,
    "extrema_grid": 4096,
    "synthesis_tol": 1e-8,
    "invert_min_symbol": 1e-6,
    "growth_detect_ratio": 1.02,
    "boundedness_ratio": 10.0,
    "jobs": 1,
}


def parse_symbol_spec(q: int, text: str) -> dict:
    """Parse compact symbol specs: laplacian | sphere:N | ball:N |
    heat:<complex> | poly:c0,c1,... (coefficients ascending, complex ok)."""
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    if head == "laplacian":
        return {"kind": "laplacian"}
    if head in ("sphere", "ball"):
        try:
            return {"kind": head, "n": int(rest)}
        except ValueError as exc:
            raise ConfigError(f"symbol spec {text!r}: radius must be an integer") from exc
    if head == "heat":
        try:
            xi = complex(rest.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"symbol spec {text!r}: bad complex time") from exc
        return {"kind": "heat", "xi": [xi.real, xi.imag]}
    if head == "poly":
        try:
            coeffs = [complex(tok.replace(" ", "")) for tok in rest.split(",") if tok]
        except ValueError as exc:
            raise ConfigError(f"symbol spec {text!r}: bad coefficient list") from exc
        if not coeffs:
            raise ConfigError(f"symbol spec {text!r}: empty coefficient list")
        return {"kind": "poly", "coeffs": [[c.real, c.imag] for c in coeffs]}
    raise ConfigError(
        f"symbol spec {text!r}: expected laplacian|sphere:N|ball:N|heat:XI|poly:C0,C1,...")


def _parse_complex(text: str, flag: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"{flag} must be a complex number, got {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_function(path: str):
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"input file {path} is not valid JSON: {exc}") from exc
    return tio.function_from_json_dict(doc)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_phi(args) -> int:
    z = _parse_complex(args.z, "--z")
    if args.n_max < 0:
        raise ConfigError("--n-max must be >= 0")
    prof = phi_profile(args.q, z, args.n_max)
    if args.plot_data:
        rows = [(n, float(np.real(v))) for n, v in enumerate(prof)]
        _emit(tio.csv_text(("x", "y"), rows), args.out)
    elif args.format == "json":
        payload = {"q": args.q, "z": [z.real, z.imag],
                   "values": [tio.complex_pair(v) for v in prof]}
        _emit(tio.report_json(payload), args.out)
    else:
        rows = [(n, float(v.real), float(v.imag)) for n, v in enumerate(prof)]
        _emit(tio.csv_text(("n", "re", "im"), rows), args.out)
    return 0


def cmd_symbols(args) -> int:
    spec = parse_symbol_spec(args.q, args.symbol)
    op = multiplier_from_spec(args.q, spec)
    t = tau(args.q)
    alphas = np.linspace(-t / 2, t / 2, args.grid, endpoint=False) + t / args.grid
    from .spectral import delta

    zs = alphas + 1j * (-delta(args.p))
    vals = np.asarray(op.symbol(zs))
    if args.plot_data:
        rows = [(float(a), float(abs(v))) for a, v in zip(alphas, vals)]
        _emit(tio.csv_text(("x", "y"), rows), args.out)
    else:
        rows = [(float(a), float(v.real), float(v.imag), float(abs(v)))
                for a, v in zip(alphas, vals)]
        _emit(tio.csv_text(("alpha", "re", "im", "abs"), rows), args.out)
    return 0


def cmd_extrema(args) -> int:
    spec = parse_symbol_spec(args.q, args.symbol)
    op = multiplier_from_spec(args.q, spec)
    rep = symbol_extrema(op.symbol, args.p, grid_size=args.grid)
    _emit(tio.report_json(rep.to_json_dict()), args.out)
    return 0


def cmd_kernel(args) -> int:
    spec = parse_symbol_spec(args.q, args.symbol)
    op = multiplier_from_spec(args.q, spec)
    if args.adaptive:
        kern, rep = synthesize_kernel_adaptive(op.symbol, args.p, tol=args.tol,
                                               max_support=args.support)
    else:
        kern, rep = synthesize_kernel(op.symbol, args.support, args.p, tol=args.tol)
    payload = {"kernel": tio.radial_to_json_dict(kern),
               "synthesis": rep.to_json_dict()}
    _emit(tio.report_json(payload), args.out)
    return 0


def cmd_decompose(args) -> int:
    f = _load_function(args.input)
    from .transforms import VertexFunction

    if not isinstance(f, VertexFunction):
        raise ConfigError("decompose expects a vertex function file")
    if args.order < 1:
        raise ConfigError("--N (annihilation order) must be >= 1")
    spec = parse_symbol_spec(f.geometry.q, args.multiplier)
    op = multiplier_from_spec(f.geometry.q, spec)
    nodes = [_parse_complex(tok, "--A") for tok in args.A.split(",") if tok]
    if not nodes:
        raise ConfigError("--A must list at least one eigenvalue")
    dec = eigen_decompose(f, op, nodes, order=args.order)
    payload = dec.to_json_dict()
    payload["components_at_root"] = [tio.complex_pair(c.values[0])
                                     for c in dec.components]
    _emit(tio.report_json(payload), args.out)
    return 0


def cmd_norms(args) -> int:
    f = _load_function(args.input)
    from .transforms import VertexFunction

    if not isinstance(f, VertexFunction):
        raise ConfigError("norms expects a vertex function file")
    kind = args.kind
    if kind == "weak":
        rep = weak_lp_norm(f, args.p)
        payload = rep.to_json_dict()
    elif kind == "schwartz":
        rep = schwartz_seminorm(f, args.p, args.m)
        payload = rep.to_json_dict()
    elif kind == "hardy":
        r = math.inf if args.r in ("inf", None) else float(args.r)
        rep = hardy_norm(f, args.p, r)
        payload = rep.to_json_dict()
    elif kind == "ballsum":
        table = ball_sum_diagnostic(f, args.p)
        if args.plot_data:
            _emit(tio.csv_text(("x", "y"), table.to_rows()), args.out)
            return 0
        payload = {"kind": "ballsum", "p": args.p, "max": table.max_value,
                   "rows": table.to_rows()}
    else:
        raise ConfigError(f"--kind must be weak|schwartz|hardy|ballsum, got {kind!r}")
    _emit(tio.report_json(payload), args.out)
    return 0


def cmd_strichartz(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {args.config}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from exc
    seed_env = os.environ.get("TREEHARM_SEED")
    seed_override = args.seed if args.seed is not None else (
        int(seed_env) if seed_env else None)
    scenarios = scenarios_from_config(doc, seed_override=seed_override)
    reports = run_scenarios(scenarios, jobs=args.jobs)

    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    summary = []
    for rep in reports:
        line = f"{rep.scenario.name}: verdict={rep.verdict} expected={rep.expected_verdict}"
        print(line)
        summary.append({"name": rep.scenario.name, "verdict": rep.verdict,
                        "expected": rep.expected_verdict,
                        "matches": rep.matches_expected})
        if outdir:
            (outdir / f"{rep.scenario.name}.json").write_text(
                tio.report_json(rep.to_json_dict()))
            (outdir / f"{rep.scenario.name}_norms.csv").write_text(
                tio.csv_text(("k", "kind", "r", "radius", "value", "stabilized"),
                             rep.norm_csv_rows()))
    if outdir:
        (outdir / "summary.json").write_text(tio.report_json({"scenarios": summary}))
    return 0 if all(s["matches"] for s in summary) else 3


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="treeharm",
        description="Harmonic analysis on truncated homogeneous trees.")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print default parameters as JSON and exit")
    sub = parser.add_subparsers(dest="command")

    def add_common(sp, q=True, p=True):
        if q:
            sp.add_argument("--q", type=int, default=DEFAULTS["q"])
        if p:
            sp.add_argument("--p", type=float, default=DEFAULTS["p"])
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--plot-data", action="store_true",
                        help="emit bare (x, y) rows for plotting")

    sp = sub.add_parser("phi", help="table of phi_z(n)")
    add_common(sp, p=False)
    sp.add_argument("--z", required=True, help="spectral parameter, e.g. 0.3-0.5j")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(fn=cmd_phi)

    sp = sub.add_parser("symbols", help="sample a symbol on the boundary line")
    add_common(sp)
    sp.add_argument("--symbol", required=True)
    sp.add_argument("--grid", type=int, default=256)
    sp.set_defaults(fn=cmd_symbols)

    sp = sub.add_parser("extrema", help="boundary extrema of a symbol")
    add_common(sp)
    sp.add_argument("--symbol", required=True)
    sp.add_argument("--grid", type=int, default=DEFAULTS["extrema_grid"])
    sp.set_defaults(fn=cmd_extrema)

    sp = sub.add_parser("kernel", help="synthesize a radial kernel for a symbol")
    add_common(sp)
    sp.add_argument("--symbol", required=True)
    sp.add_argument("--support", type=int, default=16)
    sp.add_argument("--tol", type=float, default=DEFAULTS["synthesis_tol"])
    sp.add_argument("--adaptive", action="store_true")
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("decompose", help="eigen-decompose a vertex function")
    add_common(sp, q=False, p=False)
    sp.add_argument("--input", required=True, help="vertex function JSON file")
    sp.add_argument("--multiplier", required=True, help="symbol spec")
    sp.add_argument("--A", required=True, help="comma-separated eigenvalues")
    sp.add_argument("--N", dest="order", type=int, default=1)
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("strichartz", help="run scenario configs")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None, help="report output directory")
    sp.add_argument("--jobs", type=int, default=DEFAULTS["jobs"])
    sp.add_argument("--seed", type=int, default=None,
                    help="override every scenario seed")
    sp.set_defaults(fn=cmd_strichartz)

    sp = sub.add_parser("norms", help="norm reports for a function file")
    add_common(sp, q=False)
    sp.add_argument("--input", required=True)
    sp.add_argument("--kind", required=True,
                    choices=("weak", "schwartz", "hardy", "ballsum"))
    sp.add_argument("--m", type=int, default=0, help="Schwartz seminorm order")
    sp.add_argument("--r", default="inf", help="Hardy exponent r (or 'inf')")
    sp.set_defaults(fn=cmd_norms)

    args = parser.parse_args(argv)
    if args.print_defaults:
        print(json.dumps(DEFAULTS, sort_keys=True, indent=2))
        return 0
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TreeharmError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def golden_config_path(name: str = "golden") -> Path:
    """Filesystem path of a bundled scenario config (golden | regime_b)."""
    ref = resources.files("treeharm") / "configs" / f"{name}.json"
    return Path(str(ref))


if __name__ == "__main__":
    sys.exit(main())
