"""Command-line entry point: ``fracpiezo {run,converge,validate,sweep,preset}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .assembly import DEFAULT_QUAD_ORDER
from .config import PRESET_NAMES, ConfigError, dump_config, load_config, parse_config, preset
from .studies import (
    CONVERGENCE_COLUMNS,
    METRIC_COLUMNS,
    PROFILE_COLUMNS,
    convergence_study,
    first_converged,
    parametric_sweep,
    run_cases,
    validation_report,
    validation_suite,
    write_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _config(source: str):
    """A JSON file path, or the name of a bundled preset."""
    if not Path(source).exists() and source in PRESET_NAMES:
        return parse_config(preset(source))
    return load_config(source)


def _out_dir(args, cfg=None) -> Path:
    out = Path(args.out) if args.out else Path(cfg.outputs.directory if cfg else "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    cfg = _config(args.config)
    out = _out_dir(args, cfg)
    results = run_cases(cfg, args.threads, args.quad_order)
    for r in results:
        if r.profile is not None:
            n = len(r.profile["x"])
            rows = [{k: r.profile[k][i] for k in PROFILE_COLUMNS} for i in range(n)]
            write_csv(out / f"profile_{r.name}.csv", PROFILE_COLUMNS, rows)
    write_csv(out / "metrics.csv", METRIC_COLUMNS, [r.metrics for r in results])
    (out / "config.json").write_text(dump_config(cfg))
    failed = [r.name for r in results if r.metrics["status"] != "ok"]
    for name in failed:
        print(f"case {name} failed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args.config)
    out = _out_dir(args, cfg)
    rows = parametric_sweep(cfg, args.threads, args.quad_order)
    write_csv(out / "metrics.csv", METRIC_COLUMNS, rows)
    print(f"{len(rows)} rows written to {out / 'metrics.csv'}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _config(args.config)
    out = _out_dir(args, cfg)
    rows = convergence_study(cfg, args.quad_order)
    write_csv(out / "convergence.csv", CONVERGENCE_COLUMNS, rows)
    flagged = first_converged(rows)
    print("converged at N_inf = " + (f"{flagged:g}" if flagged is not None else "none (no change below 1%)"))
    return EXIT_OK


def cmd_validate(args) -> int:
    tables = (args.table,) if args.table else (1, 2, 3, 4)
    cells = validation_suite(tables, quad_order=args.quad_order, threads=args.threads)
    report = validation_report(cells)
    out = _out_dir(args)
    (out / "validation_report.txt").write_text(report)
    print(report, end="")
    return EXIT_OK if all(c.passed for c in cells) else EXIT_FAIL


def cmd_preset(args) -> int:
    print(dump_config(parse_config(preset(args.name))), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: the config's outputs.directory)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for grid points")
    common.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER, help="Gauss points per element")

    parser = argparse.ArgumentParser(prog="fracpiezo", description="Fractional-order FE for nonlocal smart beams")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="solve each grid point, write profiles and metrics")
    p.add_argument("config", help="JSON config file or preset name")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="metrics over the (alpha, h_l) grid")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", parents=[common], help="metric against mesh density")
    p.add_argument("config")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", parents=[common], help="compare against the published tables")
    p.add_argument("--table", type=int, choices=(1, 2, 3, 4))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("preset", help="print a bundled config")
    p.add_argument("name", choices=PRESET_NAMES)
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: invalid config field '{exc.field}': {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
