"""
Command-line surface.

Subcommands
-----------
grid    --scenario <path|preset> [--nx N --ny N] [--out FILE] [--format csv|json]
figure  <preset-id> --out-dir DIR      grid CSV + heatmap + peak report + plot script
peaks   --grid <csv|json> [--threshold T] [--min-sep S] [--mass-radius R]
verify  --scenario <path|preset> [--samples N] [--tol T]
render  --grid <csv|json> --out <ppm> [--palette gray|fire]

Exit codes: 0 success, 1 validation/input failure, 2 verification above
tolerance, 64 usage errors.  All outputs are deterministic for fixed
inputs; ATOMLOC_THREADS only parallelizes grid evaluation and never
changes output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, exports, verify
from .oracle import NonConvergenceError
from .scenario import PRESETS, Scenario, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFY = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 64 instead of argparse's default 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="atomloc",
                     description="Conditional position probability of a "
                                 "three-level ladder atom in crossed standing waves")
    sub = parser.add_subparsers(dest="command", metavar="command")

    g = sub.add_parser("grid", help="compute and export a grid")
    g.add_argument("--scenario", required=True, metavar="PATH|PRESET")
    g.add_argument("--nx", type=int, default=None)
    g.add_argument("--ny", type=int, default=None)
    g.add_argument("--out", default=None, metavar="FILE")
    g.add_argument("--format", choices=("csv", "json"), default="csv")

    f = sub.add_parser("figure", help="emit grid, heatmap, peak report, plot script")
    f.add_argument("preset", choices=sorted(PRESETS), metavar="PRESET")
    f.add_argument("--out-dir", default=".", metavar="DIR")
    f.add_argument("--palette", choices=sorted(exports.PALETTES), default="gray")

    p = sub.add_parser("peaks", help="peak report for an exported grid")
    p.add_argument("--grid", required=True, metavar="FILE")
    p.add_argument("--threshold", type=float, default=analysis.DEFAULT_REL_THRESHOLD)
    p.add_argument("--min-sep", type=float, default=analysis.DEFAULT_MIN_SEP)
    p.add_argument("--mass-radius", type=float, default=analysis.DEFAULT_MASS_RADIUS)

    v = sub.add_parser("verify", help="closed-form vs oracle deviation")
    v.add_argument("--scenario", required=True, metavar="PATH|PRESET")
    v.add_argument("--samples", type=int, default=25)
    v.add_argument("--tol", type=float, default=1e-6)

    r = sub.add_parser("render", help="render an exported grid as a PPM heatmap")
    r.add_argument("--grid", required=True, metavar="FILE")
    r.add_argument("--out", required=True, metavar="PPM")
    r.add_argument("--palette", choices=sorted(exports.PALETTES), default="gray")
    return parser


def _write(path: str | None, data: bytes) -> None:
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _cmd_grid(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.nx or args.ny:
        scenario = scenario.with_grid(nx=args.nx, ny=args.ny)
    grid = scenario.compute()
    data = exports.grid_to_csv(grid) if args.format == "csv" else exports.grid_to_json(grid)
    _write(args.out, data)
    return EXIT_OK


def _cmd_figure(args) -> int:
    scenario: Scenario = PRESETS[args.preset]
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = scenario.compute()
    report = analysis.find_peaks(grid)

    csv_name = f"{scenario.name}_grid.csv"
    (outdir / csv_name).write_bytes(exports.grid_to_csv(grid))
    (outdir / f"{scenario.name}_heatmap.ppm").write_bytes(
        exports.render_heatmap(grid, palette=args.palette))
    (outdir / f"{scenario.name}_peaks.json").write_bytes(
        (json.dumps(report.as_dict(), sort_keys=True, separators=(",", ":")) + "\n")
        .encode("ascii"))
    (outdir / f"{scenario.name}_plot.gp").write_bytes(exports.plot_script(csv_name))

    top = report.peaks[0] if report.peaks else None
    where = f" top=({top.u:.4f},{top.v:.4f}) height={top.height:.4g} mass={top.mass:.3f}" \
        if top else ""
    print(f"{scenario.name}: pattern={report.pattern} peaks={len(report.peaks)}{where}")
    return EXIT_OK


def _cmd_peaks(args) -> int:
    grid = exports.load_grid(args.grid)
    report = analysis.find_peaks(grid, rel_threshold=args.threshold,
                                 min_sep=args.min_sep, mass_radius=args.mass_radius)
    print(json.dumps(report.as_dict(), sort_keys=True, separators=(",", ":")))
    return EXIT_OK


def _cmd_verify(args) -> int:
    scenario = load_scenario(args.scenario)
    devs = verify.oracle_deviation([scenario], samples=args.samples)
    dev = devs[scenario.name]
    print(f"{scenario.name}: max |closed - numeric| = {dev:.3e} "
          f"over {args.samples} points (tol {args.tol:.1e})")
    return EXIT_OK if dev <= args.tol else EXIT_VERIFY


def _cmd_render(args) -> int:
    grid = exports.load_grid(args.grid)
    _write(args.out, exports.render_heatmap(grid, palette=args.palette))
    return EXIT_OK


_COMMANDS = {"grid": _cmd_grid, "figure": _cmd_figure, "peaks": _cmd_peaks,
             "verify": _cmd_verify, "render": _cmd_render}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioError, NonConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        target = getattr(exc, "filename", None)
        print(f"error: {exc}" + (f" (path: {target})" if target else ""),
              file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    raise SystemExit(cli_main())
