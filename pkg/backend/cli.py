# cli.py - Command line: eval, screen, caustics, verify
#
#   python -m backend.cli eval 1 1 2 0 0 0
#   python -m backend.cli screen 2 2 1 --format svg --overlay both
#   python -m backend.cli caustics 3/2 7/2 all
#   python -m backend.cli verify 4 4 1e-12

import argparse
import logging
import os
import re
import sys
from typing import List, Optional

from pydantic import ValidationError

from backend import config
from backend.errors import InvalidArgumentsError, ParseError, ThreeJError
from backend.exact_core import cg_from_3j, exact_3j, selection_rules
from backend.halfint import HalfInt, ThreeJArgs
from backend.recurrence import PVariant, SolveMethod, solve_screen
from backend.render import (
    DEFAULT_FORMATS,
    Colormap,
    OutputFormat,
    Overlay,
    RenderConfig,
    caustic_basename,
    render_screen,
    write_caustic_csv,
    write_caustic_index,
    write_caustic_svg,
)
from backend.semiclassics import GeomSpec, caustic_sigmas, trace_caustic, trace_ridges
from backend.symmetry import ScreenSpec, canonicalize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_STRICT = 3
EXIT_ERROR = 4

# "-3/2" and "-.5" are values, not options
_NEGATIVE_TOKEN = re.compile(r"^-(\d|\.\d)")


def halfint_arg(token: str) -> HalfInt:
    """argparse type for '3', '3/2', '1.5'; ParseError is a ValueError, so argparse reports it"""
    return HalfInt.parse(token)


def _protect_negatives(argv: List[str]) -> List[str]:
    return [" " + t if _NEGATIVE_TOKEN.match(t) else t for t in argv]


# ========== EVAL ==========

def cmd_eval(args) -> int:
    try:
        symbol = ThreeJArgs(*args.entries)
        if args.strict:
            exact_3j(symbol, strict=True)
    except InvalidArgumentsError as e:
        if args.strict:
            print(f"❌ {e}", file=sys.stderr)
            return EXIT_STRICT
        print("0")
        print(f"note: {e}; the symbol is zero by convention")
        return EXIT_OK

    if not selection_rules(symbol):
        print("0")
        print(f"note: {symbol} violates the selection rules; the symbol is zero by convention")
        return EXIT_OK

    value = exact_3j(symbol)
    print(value.describe())
    print(f"binary64 = {float(value):.17g}")
    if args.cg:
        cg = cg_from_3j(symbol)
        print(f"CG <{symbol.a} {symbol.alpha}, {symbol.b} {symbol.beta} | {symbol.x} {-symbol.gamma}> = {cg.describe()}")
    return EXIT_OK


# ========== SCREEN ==========

def _render_config(args, parser) -> RenderConfig:
    try:
        return RenderConfig(
            floor=args.floor,
            ceiling=args.ceiling,
            colormap=args.colormap,
            overlay=args.overlay,
            scale=args.scale,
            doubled_ints=args.doubled_ints,
        )
    except ValidationError as e:
        parser.error(f"invalid render settings: {e.errors()[0]['msg']}")


def cmd_screen(args) -> int:
    cfg = _render_config(args, args.parser)
    requested = ScreenSpec(args.a, args.b, args.sigma)
    spec, transform = canonicalize(requested)
    if transform.steps:
        print(f"canonicalized to {spec.label()} via {transform.describe()}")
    print(f"Screen {spec.label()}: {spec.x_count} x {spec.delta_count}, method {args.method}")

    u = solve_screen(spec, SolveMethod(args.method))
    formats = args.formats or list(DEFAULT_FORMATS)
    paths = render_screen(u, args.out_dir, formats, cfg)
    for path in paths:
        print(f"✓ wrote {path}")
    return EXIT_OK


# ========== CAUSTICS ==========

def _sigma_list(tokens: List[str], J1: HalfInt, J2: HalfInt) -> List[HalfInt]:
    if not tokens or tokens == ["all"]:
        return list(caustic_sigmas(J1, J2))
    return [HalfInt.parse(t) for t in tokens]


def cmd_caustics(args) -> int:
    sigmas = _sigma_list(args.sigmas, args.J1, args.J2)
    formats = [OutputFormat(f) for f in (args.formats or ["csv"])]
    os.makedirs(args.out_dir, exist_ok=True)

    print("=" * 70)
    print(f"CAUSTICS J1={args.J1}, J2={args.J2}")
    print("=" * 70)
    curves, panels = [], []
    for sigma in sigmas:
        geom = GeomSpec(args.J1, args.J2, sigma)
        curve = trace_caustic(geom)
        stem = os.path.join(args.out_dir, caustic_basename(curve))
        panel = None
        if OutputFormat.CSV in formats:
            panel = write_caustic_csv(curve, stem + ".csv")
        if OutputFormat.SVG in formats:
            svg = write_caustic_svg(curve, trace_ridges(geom), stem + ".svg")
            panel = panel or svg
        curves.append(curve)
        panels.append(panel)
        marker = "cusp" if curve.cusp_flag else ""
        print(f"  sigma={str(sigma):>5}  samples={len(curve.samples):<5} {marker}")

    index = write_caustic_index(curves, panels, os.path.join(args.out_dir, "caustics.csv"))
    print()
    print(f"✓ wrote {len(curves)} panel(s), index {index}")
    return EXIT_OK


# ========== VERIFY ==========

def cmd_verify(args) -> int:
    from experiments.verify_screens import run_verification

    report = run_verification(args.max_a, args.max_b, args.tolerance, PVariant(args.p_variant))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


# ========== PARSER ==========

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threej",
        description="Exact and recurrence-based Wigner 3j values, screens and caustics",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default THREEJ_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_eval = subparsers.add_parser("eval", help="Exact value of one 3j symbol")
    p_eval.add_argument("entries", nargs=6, type=halfint_arg, metavar="J",
                        help="a b x alpha beta gamma")
    p_eval.add_argument("--strict", action="store_true", help="Fail (exit 3) on selection-rule violations")
    p_eval.add_argument("--cg", action="store_true", help="Also print the Clebsch-Gordan coefficient")
    p_eval.set_defaults(handler=cmd_eval)

    p_screen = subparsers.add_parser("screen", help="Solve and render one (a, b, sigma) screen")
    p_screen.add_argument("a", type=halfint_arg)
    p_screen.add_argument("b", type=halfint_arg)
    p_screen.add_argument("sigma", type=halfint_arg)
    p_screen.add_argument("--format", dest="formats", action="append",
                          choices=[f.value for f in OutputFormat],
                          help="Output format, repeatable (default csv + pgm)")
    p_screen.add_argument("--floor", type=float, default=config.FLOOR)
    p_screen.add_argument("--ceiling", type=float, default=config.CEILING)
    p_screen.add_argument("--colormap", choices=[c.value for c in Colormap], default=Colormap.GRAYSCALE.value,
                          help="Cell colors in SVG output (PPM always uses the color map)")
    p_screen.add_argument("--overlay", choices=[o.value for o in Overlay], default=Overlay.BOTH.value)
    p_screen.add_argument("--doubled-ints", action="store_true", help="CSV columns as 2x, 2 delta integers")
    p_screen.add_argument("--method", choices=[m.value for m in SolveMethod], default=SolveMethod.EIGEN.value)
    p_screen.add_argument("--scale", type=int, default=1, help="Pixels per cell in PGM/PPM output")
    p_screen.add_argument("--out-dir", default=config.OUTPUT_DIR)
    p_screen.set_defaults(handler=cmd_screen, parser=p_screen)

    p_caustics = subparsers.add_parser("caustics", help="Caustic polylines for every requested sigma")
    p_caustics.add_argument("J1", type=halfint_arg)
    p_caustics.add_argument("J2", type=halfint_arg)
    p_caustics.add_argument("sigmas", nargs="*", help="sigma values or 'all' (default all)")
    p_caustics.add_argument("--format", dest="formats", action="append", choices=["csv", "svg"])
    p_caustics.add_argument("--out-dir", default=config.OUTPUT_DIR)
    p_caustics.set_defaults(handler=cmd_caustics)

    p_verify = subparsers.add_parser("verify", help="Run the invariant suites against the exact oracle")
    p_verify.add_argument("max_a", type=halfint_arg)
    p_verify.add_argument("max_b", type=halfint_arg)
    p_verify.add_argument("tolerance", type=float, nargs="?", default=1e-12)
    p_verify.add_argument("--p-variant", choices=[v.value for v in PVariant], default=PVariant.DERIVED.value)
    p_verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_protect_negatives(argv))
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    config.setup_logging(args.log_level)

    try:
        return args.handler(args)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    except ParseError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ThreeJError, OSError) as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
