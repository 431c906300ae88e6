"""Command line entry point: ``radon-spectral <subcommand>``.

Exit status is 0 on success, 1 when a validation check fails and 2 on usage
errors (bad arguments, unreadable or inconsistent inputs).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import checks
from .design import build_grid
from .empirical import covariance_kernel
from .errors import RadonSpectralError
from .estimator import BandwidthRule, FilterSpec, default_bandwidth, estimate_at
from .files import dumps_json, output_dir, read_sinogram, sinogram_to_csv, table_to_csv, write_text
from .harness import (
    ExperimentConfig,
    covariance_study,
    generate_data,
    polar_eval_grid,
    rate_study,
    residual_process_eval,
)

log = logging.getLogger("radon_spectral")


class _UsageFailure(Exception):
    pass


def _load_config(path) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        return ExperimentConfig.from_json(path)
    except (OSError, json.JSONDecodeError, TypeError, KeyError) as exc:
        raise _UsageFailure(f"cannot read config {path}: {exc}") from exc


def _out(args, default_name):
    if args.out is not None:
        return args.out
    return output_dir() / default_name


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if getattr(args, "q", None) is not None:
        cfg.q = args.q
    if getattr(args, "seed", None) is not None:
        cfg.base_seed = args.seed
    if getattr(args, "replications", None) is not None:
        cfg.replications = args.replications
    cfg.threads = args.threads
    return cfg


def _warn_t1(t):
    if t == 1:
        log.warning("bandwidth rule gives t = 1; the rule grows very slowly with n")


def cmd_grid(args) -> int:
    grid = build_grid(args.q, args.ratio)
    write_text(_out(args, "grid.csv"), grid.to_csv())
    return 0


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    grid = build_grid(cfg.q, cfg.ratio)
    data = generate_data(cfg.phantom, grid, cfg.error_law, cfg.base_seed)
    write_text(_out(args, "sinogram.csv"), sinogram_to_csv(data))
    return 0


def _reconstruct_settings(path):
    settings = {"t": "auto", "v": 5.0, "scale": 1.0, "filter": "hard"}
    if path is not None:
        try:
            with open(path) as fh:
                settings.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageFailure(f"cannot read config {path}: {exc}") from exc
    return settings


def cmd_reconstruct(args) -> int:
    data = read_sinogram(args.sinogram)
    st = _reconstruct_settings(args.config)
    if st["t"] in (None, "auto"):
        t = default_bandwidth(data.grid.n, BandwidthRule(float(st["v"]), float(st["scale"])))
        _warn_t1(t)
    else:
        t = int(st["t"])
    r, theta = polar_eval_grid(args.nr, args.ntheta, args.r_max)
    g_hat = estimate_at(data, t, r, theta, FilterSpec.from_name(st["filter"]))
    text = table_to_csv(["r", "theta", "g_hat"], zip(r, theta, g_hat), meta_line=f"t={t}")
    write_text(_out(args, "reconstruction.csv"), text)
    return 0


def cmd_residual_process(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    law = cfg.error_law
    t_grid = cfg.thresholds()
    if args.sinogram is not None:
        data = read_sinogram(args.sinogram)
    else:
        data = generate_data(cfg.phantom, build_grid(cfg.q, cfg.ratio), law, cfg.base_seed)
    t = cfg.bandwidth(data.grid.n)
    _warn_t1(t)
    ev = residual_process_eval(data, t, law, t_grid, cfg.filter_spec)
    gap = ev.lin_gap if ev.lin_gap is not None else np.full(len(t_grid), np.nan)
    diag = covariance_kernel(t_grid, t_grid, law)
    rows = zip(t_grid, ev.f_hat, ev.process, gap, diag)
    meta = f"n={ev.n} t={t} sqrt_n_sup_gap={math.sqrt(ev.n) * float(np.max(np.abs(gap))):.6g}"
    write_text(_out(args, "residual_process.csv"),
               table_to_csv(["t", "F_hat", "process", "lin_gap", "sigma_kernel_diag"], rows, meta_line=meta))
    return 0


def cmd_rate_study(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    out = rate_study(cfg)
    cols = ["q", "n", "t", "median_sup_error", "iqr", "median_ellipsoid_norm"]
    rows = [[row[c] for c in cols] for row in out["rows"]]
    write_text(_out(args, "rate_study.csv"), table_to_csv(cols, rows, meta_line=f"loglog_slope={out['slope']!r}"))
    print(f"log-log slope of median sup-error vs n: {out['slope']:.4f}", file=sys.stderr)
    return 0


def cmd_covariance_check(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    out = covariance_study(cfg)
    write_text(_out(args, "covariance.json"), dumps_json(out))
    for key in ("limit_kernel", "finite_n_kernel"):
        print(f"{key}: entrywise match {'PASS' if out[key]['match'] else 'FAIL'}", file=sys.stderr)
    ok = out["kernel_min_eigenvalue"] >= -1e-8 and out["kernel_symmetric"]
    print(f"kernel PSD and symmetric: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


def cmd_selfcheck(args) -> int:
    rows = checks.selfcheck()
    for name, value, tol, passed in rows:
        print(f"{name:<26s} {value:.3e} <= {tol:.0e}  {'PASS' if passed else 'FAIL'}")
    return 0 if all(r[3] for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radon-spectral", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="worker threads for replication loops")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", type=Path, default=None, help="output file ('-' for stdout)")
        return p

    p = add("grid", cmd_grid, "write the design grid as CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--ratio", type=float, default=2.0 * math.pi)

    p = add("simulate", cmd_simulate, "simulate a sinogram from a config")
    p.add_argument("--config", type=Path)
    p.add_argument("--q", type=int)
    p.add_argument("--seed", type=int)

    p = add("reconstruct", cmd_reconstruct, "spectral cut-off reconstruction of a sinogram")
    p.add_argument("--sinogram", type=Path, required=True)
    p.add_argument("--config", type=Path, help='JSON with {"t": int | "auto", "v", "scale", "filter"}')
    p.add_argument("--nr", type=int, default=50)
    p.add_argument("--ntheta", type=int, default=50)
    p.add_argument("--r-max", type=float, default=0.99)

    p = add("residual-process", cmd_residual_process, "residual ECDF, process and linearization gap")
    p.add_argument("--config", type=Path)
    p.add_argument("--sinogram", type=Path, help="use observed data instead of simulating (no gap column)")
    p.add_argument("--q", type=int)
    p.add_argument("--seed", type=int)

    for name, func, help_ in (
        ("rate-study", cmd_rate_study, "Monte Carlo sup-error versus grid size"),
        ("covariance-check", cmd_covariance_check, "Monte Carlo covariance of the residual process"),
    ):
        p = add(name, func, help_)
        p.add_argument("--config", type=Path)
        p.add_argument("--replications", type=int)
        p.add_argument("--seed", type=int)
        if name == "covariance-check":
            p.add_argument("--q", type=int)

    add("selfcheck", cmd_selfcheck, "SVD identity and orthonormality suites")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (_UsageFailure, RadonSpectralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
