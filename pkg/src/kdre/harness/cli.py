"""Command line entry point.

    kdre simulate   --config C [--seed S] --out DIR
    kdre estimate   --config C --x X.csv --y Y.csv --out DIR [--channels ...]
    kdre experiment --config C [--seed S] --out DIR [--channels ...] [--gnuplot]
    kdre check      [--config C] [--seed S] [--h 0.05] [--N 1000000]

``--config`` takes a YAML path or the name of a packaged canonical config.
Exit codes: 0 success, 2 config error, 3 I/O error, 4 failed check.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from kdre.core import GridSpec, InvalidSpecError, lattice_points
from kdre.harness.config import CANONICAL, ConfigError, ExperimentConfig, load_config
from kdre.harness.experiment import draw_samples, run_experiment
from kdre.harness.io import (
    CsvFormatError,
    read_samples_csv,
    write_field_csv,
    write_gnuplot_script,
    write_samples_csv,
)
from kdre.kernels import KernelSpec
from kdre.oracle import GaussianPair, mc_limit_integral, true_ratio

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CHECK = 4

X_CSV = "x_samples.csv"
Y_CSV = "y_samples.csv"
FIELD_CSV = "field.csv"
METRICS_JSON = "metrics.json"


def _channels(text: str) -> list[str]:
    return [c.strip() for c in text.split(",") if c.strip()]


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "channels", None) is not None:
        changes["channels"] = args.channels
    return config.replace(**changes) if changes else config


def _write_outputs(out: Path, field, metrics, gnuplot: bool) -> None:
    write_field_csv(field, out / FIELD_CSV)
    (out / METRICS_JSON).write_text(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
    if gnuplot:
        write_gnuplot_script(field, FIELD_CSV, out / "field.gp")


def _print_metrics(metrics) -> None:
    for name, m in metrics.channels.items():
        print(f"{name:>8}: mse={m.mse:.6g} median|err|={m.median_abs_error:.6g} max|err|={m.max_abs_error:.6g}")
    if metrics.excluded:
        print(f"excluded flagged cells: {metrics.excluded}")


def cmd_simulate(args) -> int:
    config = _resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    x, y = draw_samples(config)
    write_samples_csv(x, out / X_CSV)
    write_samples_csv(y, out / Y_CSV)
    print(f"wrote {x.size} X and {y.size} Y points to {out}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    config = _resolve_config(args)
    x, y = read_samples_csv(args.x), read_samples_csv(args.y)
    config = config.replace(n=x.size, m=y.size)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    field, metrics = run_experiment(config, samples=(x, y), workers=args.workers)
    _write_outputs(out, field, metrics, args.gnuplot)
    _print_metrics(metrics)
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = _resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    samples = None
    if any(c in config.channels for c in ("direct", "indirect")):
        samples = draw_samples(config)
        write_samples_csv(samples[0], out / X_CSV)
        write_samples_csv(samples[1], out / Y_CSV)
    field, metrics = run_experiment(config, samples=samples, workers=args.workers)
    _write_outputs(out, field, metrics, args.gnuplot)
    _print_metrics(metrics)
    return EXIT_OK


def check_points(d: int) -> np.ndarray:
    """The 3^d lattice over [-0.5, 0.5]^d used by ``check``."""
    return lattice_points(GridSpec([-0.5] * d, [0.5] * d, (3,) * d))


def cmd_check(args) -> int:
    config = _resolve_config(args)
    pair = GaussianPair(config.F, config.G)
    pts = check_points(config.d)
    kernel = KernelSpec("boxcar", config.d)
    mc = mc_limit_integral(pair, pts, kernel, args.h, args.N, config.seed)
    truth = true_ratio(pair, pts)
    passed = 0
    for p, est, tr in zip(pts, mc, truth):
        rel = abs(est / tr - 1.0)
        ok = rel < args.tolerance
        passed += ok
        coords = ", ".join(f"{v:+.2f}" for v in p)
        print(f"{'PASS' if ok else 'FAIL'} z=({coords}) mc={est:.5f} true={tr:.5f} rel_err={rel:.4f}")
    need = args.min_pass if args.min_pass is not None else len(pts) - 1
    verdict = passed >= need
    print(f"{'PASS' if verdict else 'FAIL'}: {passed}/{len(pts)} points within {args.tolerance:.0%} (need {need})")
    return EXIT_OK if verdict else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kdre", description="Direct kernel density-ratio estimation experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out=True, channels=True, config_required=True):
        p.add_argument("--config", required=config_required, default="favorable_n10000",
                       help=f"YAML path or one of: {', '.join(CANONICAL)}")
        p.add_argument("--seed", type=int, help="override the config seed")
        if out:
            p.add_argument("--out", required=True, help="output directory")
        if channels:
            p.add_argument("--channels", type=_channels, help="comma-separated subset of true,direct,indirect")
            p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
            p.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")

    p = sub.add_parser("simulate", help="write seeded X and Y sample CSVs")
    common(p, channels=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="evaluate the field from existing sample CSVs")
    common(p)
    p.add_argument("--x", required=True, help="X samples CSV")
    p.add_argument("--y", required=True, help="Y samples CSV")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="sample, fit and evaluate from a config")
    common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("check", help="Monte-Carlo check that the population estimator recovers f/g")
    common(p, out=False, channels=False, config_required=False)
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--N", type=int, default=1_000_000)
    p.add_argument("--tolerance", type=float, default=0.1)
    p.add_argument("--min-pass", type=int, default=None, help="points that must pass (default: all but one)")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidSpecError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, CsvFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
