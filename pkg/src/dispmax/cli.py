"""Command-line surface: experiment drivers plus small utility commands.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(quadrature budget, resolution rule, nonconforming profile).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .config import (
    ExperimentConfig,
    ResultTable,
    emit_plot_script,
    parse_config,
    provenance_block,
    write_csv,
)
from .directions import cover_set, parse_direction_spec
from .errors import (
    ConfigError,
    HypothesisError,
    NonconformingProfileError,
    QuadratureError,
    ResolutionError,
)
from .experiments import (
    run_convergence_experiment,
    run_dimension_report,
    run_kernel_scan,
    run_scaling_experiment,
)
from .filters import build_filter_bank, project
from .kernel import standard_phases, van_der_corput_check
from .maximal import grid_for_band, maximal_function
from .spectral import (
    DispersionProfile,
    check_dispersion_conditions,
    evolve,
    forward_transform,
    inverse_transform,
    make_sobolev_data,
    signal_from_csv,
    signal_to_csv,
    sobolev_norm,
)

_CONFIG_FLAGS = {
    "a": "a", "q": "q", "sigma": "sigma", "theta": "theta", "seed": "seed",
    "out": "out", "k_min": "k_min", "k_max": "k_max", "s": "s",
}


def _build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read(), base=cfg)
    overrides = {}
    for attr, key in _CONFIG_FLAGS.items():
        val = getattr(args, attr, None)
        if val is not None:
            overrides[key] = val
    if "out" not in overrides and not args.config:
        env_out = os.environ.get("DISPMAX_OUT")
        if env_out:
            overrides["out"] = env_out
    return replace(cfg, **overrides).validate()


def _out_path(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _cmd_check(cfg: ExperimentConfig) -> int:
    profile = DispersionProfile.power(cfg.a)
    c1, c2 = check_dispersion_conditions(profile)
    print(f"dispersion conditions: C1est={c1:.6g} C2est={c2:.6g}")
    f = make_sobolev_data(1.0, cfg.seed, half_width=8.0, n=256)
    rt = inverse_transform(forward_transform(f))
    rt_err = float(np.max(np.abs(rt.values - f.values)) / np.max(np.abs(f.values)))
    print(f"transform round trip: max rel err {rt_err:.3g}")
    g = evolve(f, 0.5, profile)
    unit_err = abs(g.l2_norm() - f.l2_norm()) / f.l2_norm()
    print(f"propagator unitarity: rel err {unit_err:.3g}")
    bank = build_filter_bank(5)
    xi = np.linspace(-16.0, 16.0, 4001)
    total = bank.psi0(xi) + sum(bank.psi_k(k, xi) for k in range(1, 6))
    pu_err = float(np.max(np.abs(total - 1.0)))
    print(f"partition of unity: max deviation {pu_err:.3g}")
    ok = rt_err < 1e-12 and unit_err < 1e-10 and pu_err < 1e-12
    print("check:", "ok" if ok else "FAILED")
    return 0 if ok else 3


def _cmd_evolve(cfg: ExperimentConfig, args) -> int:
    if args.input:
        with open(args.input) as fh:
            f = signal_from_csv(fh.read())
    else:
        f = make_sobolev_data(cfg.s, cfg.seed, half_width=cfg.half_width, n=cfg.n_grid)
    profile = DispersionProfile.power(cfg.a)
    g = evolve(f, args.t, profile)
    path = _out_path(cfg, "evolved.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# t={args.t:.17g}\n# a={cfg.a:.17g}\n")
        fh.write(signal_to_csv(g))
    print(f"wrote {path} (H^{cfg.s:g} norm in = {sobolev_norm(f, cfg.s):.6g})")
    return 0


def _cmd_dim(cfg: ExperimentConfig) -> int:
    table = run_dimension_report(cfg)
    path = _out_path(cfg, "dimension.csv")
    write_csv(table, path)
    print(f"beta={table.provenance['beta']:.6g} residual={table.provenance['fit_residual']:.3g}")
    print(f"wrote {path}")
    return 0


def _cmd_cover(cfg: ExperimentConfig, args) -> int:
    theta = parse_direction_spec(cfg.theta)
    result = cover_set(theta, args.lam, cfg.resolved_sigma())
    cols = {
        "left": [iv[0] for iv in result.intervals],
        "right": [iv[1] for iv in result.intervals],
    }
    table = ResultTable(
        columns=cols,
        provenance=provenance_block(cfg, experiment="cover", width=result.width,
                                    count=result.count, lam=float(args.lam)),
    )
    path = _out_path(cfg, "cover.csv")
    write_csv(table, path)
    print(f"N={result.count} width={result.width:.6g}")
    print(f"wrote {path}")
    return 0


def _cmd_maximal(cfg: ExperimentConfig, args) -> int:
    theta = parse_direction_spec(cfg.theta)
    profile = DispersionProfile.power(cfg.a)
    if args.input:
        with open(args.input) as fh:
            f = signal_from_csv(fh.read())
    else:
        f = make_sobolev_data(cfg.s, cfg.seed, half_width=cfg.half_width, n=cfg.n_grid)
    if args.band is not None:
        bank = build_filter_bank(max(args.band, 1))
        f = project(f, args.band, bank)
    band = forward_transform(f).band_limit()
    grid = grid_for_band(band, profile, theta, x_count=cfg.x_count)
    res = maximal_function(f, theta, grid, profile)
    table = ResultTable(
        columns={"x": list(res.x), "maximal_value": list(res.values)},
        provenance=provenance_block(cfg, experiment="maximal", band=band),
    )
    path = _out_path(cfg, "maximal.csv")
    write_csv(table, path)
    print(f"wrote {path}")
    return 0


def _cmd_norm_scaling(cfg: ExperimentConfig) -> int:
    table, fit = run_scaling_experiment(cfg)
    path = _out_path(cfg, "scaling.csv")
    write_csv(table, path)
    emit_plot_script(table, _out_path(cfg, "scaling.gp"), "scaling.csv")
    print(f"fitted slope={fit[0]:.4g} intercept={fit[1]:.4g} residual={fit[2]:.3g}")
    print(f"wrote {path}")
    return 0


def _cmd_kernel_scan(cfg: ExperimentConfig) -> int:
    table, report = run_kernel_scan(cfg)
    path = _out_path(cfg, "kernel_scan.csv")
    write_csv(table, path)
    emit_plot_script(table, _out_path(cfg, "kernel_scan.gp"), "kernel_scan.csv")
    lo, hi = report.v2_ratio_range
    print(f"max decay product={report.max_decay_product():.6g} v2 ratio in [{lo:.3g}, {hi:.3g}]")
    vdc_cols = {"phase": [], "order": [], "lambda": [], "abs_integral": [], "normalized_ratio": []}
    lam_list = [2.0**e for e in range(cfg.lambda_min_exp, cfg.lambda_max_exp + 1)]
    for phase, k in standard_phases():
        for lam, absint, ratio in van_der_corput_check(phase, lam_list, k):
            vdc_cols["phase"].append(phase.name)
            vdc_cols["order"].append(k)
            vdc_cols["lambda"].append(lam)
            vdc_cols["abs_integral"].append(absint)
            vdc_cols["normalized_ratio"].append(ratio)
    vdc_table = ResultTable(columns=vdc_cols,
                            provenance=provenance_block(cfg, experiment="van-der-corput"))
    write_csv(vdc_table, _out_path(cfg, "van_der_corput.csv"))
    print(f"wrote {path}")
    return 0


def _cmd_converge(cfg: ExperimentConfig) -> int:
    table = run_convergence_experiment(cfg)
    path = _out_path(cfg, "converge.csv")
    write_csv(table, path)
    emit_plot_script(table, _out_path(cfg, "converge.gp"), "converge.csv")
    med = table.columns["median_err"]
    print(f"median err: {med[0]:.6g} at r={table.columns['r'][0]:g} -> "
          f"{med[-1]:.6g} at r={table.columns['r'][-1]:g}")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispmax",
        description="Numerical lab for directional maximal estimates of dispersive propagators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory (default: $DISPMAX_OUT or .)")
        p.add_argument("--a", type=float, help="dispersion exponent, Phi = |xi|^a")
        p.add_argument("--q", type=float)
        p.add_argument("--sigma", type=float)
        p.add_argument("--theta", help="direction set: point:0 | points:.. | interval:a,b | cantor:m,r,d")
        p.add_argument("--k-min", dest="k_min", type=int)
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--s", type=float, help="Sobolev order for generated data")
        return p

    common(sub.add_parser("check", help="condition and invariant self-test"))
    p = common(sub.add_parser("evolve", help="apply the propagator to a signal"))
    p.add_argument("--t", type=float, default=0.25)
    p.add_argument("--input", help="signal CSV (x,re,im); generated data if omitted")
    common(sub.add_parser("dim", help="box-counting dimension report"))
    p = common(sub.add_parser("cover", help="lambda^-sigma interval cover of theta"))
    p.add_argument("--lam", type=float, default=16.0)
    p = common(sub.add_parser("maximal", help="directional maximal function on the grid"))
    p.add_argument("--input", help="signal CSV (x,re,im); generated data if omitted")
    p.add_argument("--band", type=int, help="apply the dyadic projection P_band first")
    common(sub.add_parser("norm-scaling", help="operator-norm growth experiment"))
    common(sub.add_parser("kernel-scan", help="kernel decay and lemma-ratio scan"))
    common(sub.add_parser("converge", help="pointwise-convergence error scan"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        if args.command == "check":
            return _cmd_check(cfg)
        if args.command == "evolve":
            return _cmd_evolve(cfg, args)
        if args.command == "dim":
            return _cmd_dim(cfg)
        if args.command == "cover":
            return _cmd_cover(cfg, args)
        if args.command == "maximal":
            return _cmd_maximal(cfg, args)
        if args.command == "norm-scaling":
            return _cmd_norm_scaling(cfg)
        if args.command == "kernel-scan":
            return _cmd_kernel_scan(cfg)
        if args.command == "converge":
            return _cmd_converge(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, ResolutionError, NonconformingProfileError, HypothesisError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
