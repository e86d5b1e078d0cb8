"""Command-line interface.

    thermobeam validate <config>
        Parse a config (file path or preset name test1/test2) and check every
        model invariant; exit 0 when clean.

    thermobeam simulate <config> [--out DIR] [--no-figures]
        Run the time integration, write energy.csv, snapshots, fields.csv,
        the gnuplot script and the rendered figures, and print a summary
        (energy decay check, fitted decay rate).

    thermobeam convergence <config> --levels K --ref-factor R [--t-final T]
        Grid-refinement error study starting from the config's element count,
        doubling K times; writes convergence.csv and convergence.png and
        prints the per-level table.  THERMOBEAM_THREADS caps how many levels
        run concurrently.

    thermobeam compare-variants <config> [--out DIR]
        Run the same data under rotation damping and displacement damping and
        tabulate the fitted decay rate of each.

Exit codes: 0 success, 1 runtime/solver failure, 2 configuration or
validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import load_config, serialize_config
from .convergence import run_study
from .energy import check_monotone, fit_decay_rate
from .errors import DegenerateSeries, ParseError, ThermobeamError, ValidationError
from .fem import build_mesh
from .model import Variant, validate, with_variant
from .reporting import (
    emit_plot_scripts,
    render_convergence_figure,
    render_series_figures,
    render_surface_figures,
    write_convergence_csv,
    write_energy_csv,
    write_fields_csv,
    write_snapshot_csv,
)
from .stepper import run


def _worker_cap() -> int:
    raw = os.environ.get("THERMOBEAM_THREADS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    report = validate(cfg.params)
    print(report.summary())
    boundary = cfg.initial_data().check_boundary(cfg.params.length)
    if not boundary.passed:
        print(boundary.summary())
        return 2
    if not report.passed:
        return 2
    print(f"ok: s={cfg.s} dt={cfg.dt:.17g} t_final={cfg.t_final:.17g} "
          f"variant={cfg.params.variant.value}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out_dir = args.out or cfg.output_dir
    mesh = build_mesh(cfg.params.length, cfg.s)
    trajectory, series = run(cfg.params, mesh, cfg.dt, cfg.t_final,
                             cfg.initial_data(), accel_seed=cfg.accel_seed,
                             lyapunov_cfg=cfg.lyapunov)

    os.makedirs(out_dir, exist_ok=True)
    write_energy_csv(series, os.path.join(out_dir, "energy.csv"))
    write_snapshot_csv(trajectory[0], mesh, os.path.join(out_dir, "snapshot_initial.csv"))
    write_snapshot_csv(trajectory[-1], mesh, os.path.join(out_dir, "snapshot_final.csv"))
    if cfg.emit_fields:
        write_fields_csv(trajectory, mesh, os.path.join(out_dir, "fields.csv"),
                         stride=cfg.snapshot_stride)
    emit_plot_scripts(out_dir)
    with open(os.path.join(out_dir, "run.cfg"), "w", encoding="utf-8") as handle:
        handle.write(serialize_config(cfg))
    if not args.no_figures:
        render_series_figures(series, out_dir)
        if cfg.emit_fields:
            render_surface_figures(trajectory, mesh, out_dir, stride=cfg.snapshot_stride)

    monotone = check_monotone(series)
    e0, e_end = float(series.energy[0]), float(series.energy[-1])
    print(f"steps={len(trajectory) - 1} E0={e0:.6g} E_final={e_end:.6g}")
    print(f"energy decay: {'monotone' if monotone.passed else 'VIOLATED'} "
          f"(max rate {monotone.max_rate:.3e}, tolerance {monotone.tolerance:.3e})")
    try:
        fit = fit_decay_rate(series)
        print(f"decay rate fit: lambda1={fit.rate:.6g} R^2={fit.r_squared:.6f} "
              f"tail average={fit.tail_average:.6g}")
    except DegenerateSeries:
        print("decay rate fit: skipped (non-positive energies in the window)")
    print(f"output written to {out_dir}")
    return 0 if monotone.passed else 1


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    t_final = args.t_final if args.t_final is not None else cfg.t_final
    levels = [cfg.s * 2**k for k in range(args.levels)]
    dt_ratio = cfg.dt_ratio if cfg.dt_ratio is not None else cfg.dt * cfg.s / cfg.params.length
    study = run_study(cfg.params, cfg.initial_data(), t_final, levels,
                      reference_factor=args.ref_factor, dt_ratio=dt_ratio,
                      error_over_time=args.error_over_time,
                      accel_seed=cfg.accel_seed,
                      workers=min(_worker_cap(), len(levels)))

    out_dir = args.out or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    write_convergence_csv(study, os.path.join(out_dir, "convergence.csv"))
    if not args.no_figures:
        render_convergence_figure(study, out_dir)

    print("level,s,dt,error,order")
    for level, s, dt, error, order in study.rows():
        order_text = "" if order is None else f"{order:.6g}"
        print(f"{level},{s},{dt:.17g},{error:.17g},{order_text}")
    if study.exact:
        print("all errors vanished: study is exact, orders undefined")
    else:
        print(f"mean order: {study.mean_order:.6g}")
    print(f"reference: s={study.reference[0]} dt={study.reference[1]:.17g}")
    return 0


def cmd_compare_variants(args) -> int:
    cfg = load_config(args.config)
    mesh = build_mesh(cfg.params.length, cfg.s)
    rows = []
    for variant in (Variant.ROTATION_DAMPED, Variant.DISPLACEMENT_DAMPED):
        params = with_variant(cfg.params, variant,
                              mu=cfg.params.mu if cfg.params.mu > 0.0 else 1.0)
        _, series = run(params, mesh, cfg.dt, cfg.t_final, cfg.initial_data(),
                        accel_seed=cfg.accel_seed, lyapunov_cfg=cfg.lyapunov)
        fit = fit_decay_rate(series)
        monotone = check_monotone(series)
        rows.append((variant.value, fit.rate, fit.r_squared, fit.tail_average,
                     monotone.passed))

    lines = ["variant,lambda1,r_squared,tail_average,energy_monotone"]
    for name, rate, r2, tail, mono in rows:
        lines.append(f"{name},{rate:.17g},{r2:.17g},{tail:.17g},{str(mono).lower()}")
    table = "\n".join(lines)
    print(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "variants.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(table + "\n")
        print(f"table written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermobeam",
        description="Thermoelastic beam simulator: P1 elements, implicit Euler, "
                    "energy-decay and error-estimate diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a configuration and exit")
    p_validate.add_argument("config", help="config file path or preset name (test1, test2)")
    p_validate.set_defaults(func=cmd_validate)

    p_sim = sub.add_parser("simulate", help="run the time integration and write reports")
    p_sim.add_argument("config", help="config file path or preset name (test1, test2)")
    p_sim.add_argument("--out", help="output directory (default: config output_dir)")
    p_sim.add_argument("--no-figures", action="store_true",
                       help="skip matplotlib rendering (CSV and gnuplot script only)")
    p_sim.set_defaults(func=cmd_simulate)

    p_conv = sub.add_parser("convergence", help="grid-refinement error study")
    p_conv.add_argument("config", help="config file path or preset name (test1, test2)")
    p_conv.add_argument("--levels", type=int, default=3,
                        help="number of refinement levels, doubling from the config's s")
    p_conv.add_argument("--ref-factor", type=int, default=4,
                        help="reference grid is this many times finer than the finest level")
    p_conv.add_argument("--t-final", type=float, default=None,
                        help="override the config's final time for the study")
    p_conv.add_argument("--error-over-time", action="store_true",
                        help="take the maximum error over common time levels "
                             "instead of the final-time error")
    p_conv.add_argument("--out", help="output directory (default: config output_dir)")
    p_conv.add_argument("--no-figures", action="store_true",
                        help="skip matplotlib rendering")
    p_conv.set_defaults(func=cmd_convergence)

    p_cmp = sub.add_parser("compare-variants",
                           help="fit decay rates under both damping placements")
    p_cmp.add_argument("config", help="config file path or preset name (test1, test2)")
    p_cmp.add_argument("--out", help="directory for variants.csv (optional)")
    p_cmp.set_defaults(func=cmd_compare_variants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    except ThermobeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
