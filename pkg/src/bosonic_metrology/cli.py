"""Command-line surface.

Subcommands: ``table``, ``figure fre``, ``figure temp``, ``bound``,
``strategy``, ``selftest`` and ``replay``.  Every data-producing run
writes its outputs plus a ``manifest.json`` echoing the resolved
configuration, from which ``replay`` reproduces the run exactly.

Value precedence: built-in defaults < config file (``--config``, flat
``key = value`` lines with ``#`` comments) < command-line flags.

Environment: ``BOSONIC_METROLOGY_OUTDIR`` sets the default output
directory and ``BOSONIC_METROLOGY_THREADS`` caps the linear-algebra
thread pools.

Exit codes: 0 success, 2 invalid configuration, 3 physics-infeasible
request, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

OUTDIR_ENV = "BOSONIC_METROLOGY_OUTDIR"
THREADS_ENV = "BOSONIC_METROLOGY_THREADS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class ConfigError(ValueError):
    pass


def _apply_thread_cap() -> None:
    cap = os.environ.get(THREADS_ENV)
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` file with ``#`` comments."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


_CONFIG_KEYS = {
    "target": str, "gamma": float, "n_env": float, "photons": float,
    "t_min": float, "t_max": float, "t_points": int, "t_scale": str,
    "cutoff": int, "outdir": str, "formats": str, "seed": int,
    "strategy": str, "time": float,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonic-metrology",
        description=("Precision-rate bounds and strategy simulators for a "
                     "lossy thermal bosonic mode."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path,
                       help="flat key=value config file")
        p.add_argument("--target", choices=[
            "frequency", "displacement", "squeezing", "loss", "temperature"])
        p.add_argument("--gamma", type=float)
        p.add_argument("--n-env", dest="n_env", type=float)
        p.add_argument("--photons", type=float)
        p.add_argument("--t-min", dest="t_min", type=float)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--t-points", dest="t_points", type=int)
        p.add_argument("--t-scale", dest="t_scale",
                       choices=["log", "linear"])
        p.add_argument("--cutoff", type=int)
        p.add_argument("--outdir", type=str)
        p.add_argument("--formats", type=str,
                       help="comma-separated subset of csv,json,svg")
        p.add_argument("--seed", type=int)

    p_table = sub.add_parser("table", help="five-parameter summary table")
    add_common(p_table)

    p_fig = sub.add_parser("figure", help="comparison figures")
    p_fig.add_argument("which", choices=["fre", "temp"])
    add_common(p_fig)

    p_bound = sub.add_parser("bound", help="single rate-bound report")
    add_common(p_bound)

    p_strat = sub.add_parser("strategy", help="evaluate a named strategy")
    add_common(p_strat)
    p_strat.add_argument("--name", dest="strategy", type=str)
    p_strat.add_argument("--time", dest="time", type=float,
                         help="single evaluation time in 1/gamma units")

    p_self = sub.add_parser("selftest", help="run the quick invariant suite")
    add_common(p_self)

    p_replay = sub.add_parser("replay",
                              help="re-run a command from its manifest")
    p_replay.add_argument("manifest", type=Path)
    return parser


def _resolve_config(args: argparse.Namespace):
    from .core import ParameterTag
    from .reports import RunConfig

    merged: dict = {}
    cfg_path = getattr(args, "config", None)
    if cfg_path is not None:
        if not cfg_path.exists():
            raise ConfigError(f"config file not found: {cfg_path}")
        raw = parse_config_file(cfg_path)
        for key, text in raw.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key: {key}")
            try:
                merged[key] = _CONFIG_KEYS[key](text)
            except ValueError as err:
                raise ConfigError(f"bad value for {key}: {text}") from err
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if "target" in merged and isinstance(merged["target"], str):
        try:
            merged["target"] = ParameterTag(merged["target"])
        except ValueError as err:
            raise ConfigError(f"unknown target: {merged['target']}") from err
    if "formats" in merged and isinstance(merged["formats"], str):
        merged["formats"] = tuple(
            f.strip() for f in merged["formats"].split(",") if f.strip())
    if "outdir" not in merged:
        merged["outdir"] = os.environ.get(OUTDIR_ENV, ".")
    try:
        return RunConfig(**merged)
    except (ValueError, TypeError) as err:
        raise ConfigError(str(err)) from err


def _run_command(command: str, cfg) -> int:
    from . import reports

    start = time.perf_counter()
    extra: dict = {}
    if command == "selftest":
        from .selftest import run_selftest

        ok, lines = run_selftest(cfg.seed)
        print("\n".join(lines))
        if not ok:
            print("selftest: FAILED")
            return EXIT_NUMERICAL
        print("selftest: all checks passed")
        return EXIT_OK

    if command == "table":
        ds = reports.summary_table(cfg)
    elif command == "figure-fre":
        ds = reports.frequency_figure(cfg)
    elif command == "figure-temp":
        ds = reports.temperature_figure(cfg)
    elif command == "bound":
        ds = reports.bound_dataset(cfg)
    elif command == "strategy":
        ds = reports.strategy_dataset(cfg)
    else:
        raise ConfigError(f"unknown command {command!r}")

    outdir = Path(cfg.outdir)
    outputs = reports.write_outputs(ds, outdir, reports.stamp_now(),
                                    cfg.formats)
    wall = time.perf_counter() - start
    manifest = reports.write_manifest(outdir, command, cfg, outputs, wall,
                                      extra)
    for path in outputs:
        print(f"wrote {path}")
    print(f"wrote {manifest}")
    _print_summary(ds)
    return EXIT_OK


def _print_summary(ds) -> None:
    units = ds.meta.get("units", {})
    if len(ds.rows) == 1:
        for key in ds.keys:
            val = ds.rows[0].get(key)
            unit = f" [{units[key]}]" if key in units else ""
            print(f"  {key}{unit}: {val}")
    else:
        print(f"  {ds.name}: {len(ds.rows)} grid points")
        for key in ("crossover_time", "single_sensing_time",
                    "fast_protocol_rate", "optimum"):
            if key in ds.meta:
                print(f"  {key}: {ds.meta[key]}")


def _replay(manifest_path: Path) -> int:
    if not manifest_path.exists():
        raise ConfigError(f"manifest not found: {manifest_path}")
    payload = json.loads(manifest_path.read_text())
    command = payload.get("command")
    cfg_dict = dict(payload.get("config", {}))
    from .core import ParameterTag
    from .reports import RunConfig

    if cfg_dict.get("target"):
        cfg_dict["target"] = ParameterTag(cfg_dict["target"])
    if cfg_dict.get("formats"):
        cfg_dict["formats"] = tuple(cfg_dict["formats"])
    try:
        cfg = RunConfig(**cfg_dict)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"manifest config invalid: {err}") from err
    return _run_command(command, cfg)


def main(argv: list[str] | None = None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return _replay(args.manifest)
        command = args.command
        if command == "figure":
            command = f"figure-{args.which}"
        cfg = _resolve_config(args)
        return _run_command(command, cfg)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as err:  # noqa: BLE001 - mapped to exit codes below
        from .core import NumericalAccuracyError, TruncationError
        from .reports import (
            AuditError,
            PhysicsInfeasibleError,
            StrategyLookupError,
        )

        if isinstance(err, StrategyLookupError):
            print(f"configuration error: {err}", file=sys.stderr)
            return EXIT_CONFIG
        if isinstance(err, PhysicsInfeasibleError):
            print(f"infeasible request: {err}", file=sys.stderr)
            return EXIT_INFEASIBLE
        if isinstance(err, (TruncationError, NumericalAccuracyError,
                            AuditError)):
            print(f"numerical failure: {err}", file=sys.stderr)
            return EXIT_NUMERICAL
        raise


if __name__ == "__main__":
    sys.exit(main())
