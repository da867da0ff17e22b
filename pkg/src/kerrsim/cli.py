"""Command-line interface.

Subcommands: ``run`` (one pipeline), ``sweep`` (parameter scans), ``wigner``
(exact Wigner grids), ``twopeak`` (post-selected Fock superpositions),
``optomech`` (overlap tables) and ``selftest`` (quick property suite).
Exit codes: 0 success, 2 invalid configuration, 3 numerical-validity failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .branch import TruncationError, fock_cutoff, make_coherent_product, apply_cross_kerr
from .channels import apply_signal_loss
from .exotic import (
    enhancement_factor,
    fock_wigner_grid,
    optomech_overlap,
    phonon_kappa,
    two_peak_amplitudes,
)
from .gaussian import ValidityError, williamson
from .harness import (
    SweepResult,
    SweepRow,
    compare_gaussian_vs_fock,
    emit,
    estimate_footprint,
    run_pipeline,
    sweep,
)
from .heterodyne import EmptyBinError, project_heterodyne
from .params import ConfigError, PARAMETER_SETS, build_parameters
from .photon_stats import g2_curvature, optimize_displacement

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse float list {text!r}") from None


def _add_parameter_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--set", dest="set_name", choices=sorted(PARAMETER_SETS),
                        help="start from a built-in parameter set")
    parser.add_argument("--config", help="flat key=value config file")
    for name in ("eta", "nu", "delta-phi", "epsilon", "p-dark", "phi0",
                 "alpha", "beta"):
        parser.add_argument(f"--{name}", type=float, default=None,
                            help=f"override {name.replace('-', '_')}")


def _parameters_from(args: argparse.Namespace):
    return build_parameters(
        set_name=args.set_name,
        config_path=args.config,
        eta=args.eta, nu=args.nu, delta_phi=args.delta_phi,
        epsilon=args.epsilon, p_dark=args.p_dark, phi0=args.phi0,
        alpha=args.alpha, beta=args.beta,
    )


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _pipeline_kwargs(args: argparse.Namespace) -> dict:
    return {
        "delta": _parse_complex(args.delta) if args.delta else None,
        "gamma": args.gamma,
        "use_window": not args.no_window,
        "allow_large": args.allow_large,
        "loss_order": args.loss_order,
    }


def _cmd_run(args: argparse.Namespace) -> int:
    params = _parameters_from(args)
    result = run_pipeline(params, **_pipeline_kwargs(args))
    opt = optimize_displacement(result.state, params.p_dark)
    curvature = g2_curvature(result.state, params.p_dark, opt.n_opt)
    r, v, theta = williamson(result.state)
    print(f"parameters: {params.asdict()}")
    print(f"post-selection: delta={result.delta:.6g}, envelope width={result.width:.6g}")
    print(f"success probability: {result.success_prob:.6g}")
    print(f"signal state: r={r:.6g}, V={v:.6g}, theta={theta:.6g}")
    print(f"g2 minimum: {opt.g2_min:.8g} at displacement n={opt.n_opt:.4g}")
    print(f"g2 curvature at optimum: {curvature:.4g}")
    if args.oracle:
        g2_gauss, g2_fock, rel = compare_gaussian_vs_fock(params)
        print(f"oracle check: gaussian={g2_gauss:.8g}, fock={g2_fock:.8g}, "
              f"rel diff={rel:.3g}")
    if args.out:
        rows = [SweepRow("none", 0.0, opt.n_opt, opt.g2_min, result.success_prob)]
        res = SweepResult(rows=rows, metadata={
            "parameters": params.asdict(),
            "pipeline": "gaussian",
            "code_version": __version__,
        })
        emit(res, args.format, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _parameters_from(args)
    grid = _parse_floats(args.grid) if args.grid else None
    result = sweep(params, args.param, _parse_floats(args.values),
                   displacement_grid=grid, **_pipeline_kwargs(args))
    if args.out:
        emit(result, args.format, args.out)
        print(f"wrote {args.out} ({len(result.rows)} rows)")
    else:
        print(",".join(("swept_name", "swept_value", "n_displacement",
                        "g2", "success_prob")))
        for row in result.rows:
            print(f"{row.swept_name},{row.swept_value!r},{row.n_displacement!r},"
                  f"{row.g2!r},{row.success_prob!r}")
    return EXIT_OK


def _cmd_wigner(args: argparse.Namespace) -> int:
    params = _parameters_from(args)
    cutoff = fock_cutoff(params.beta)
    state = apply_cross_kerr(
        make_coherent_product(params.alpha, params.beta, cutoff), params.phi0)
    delta = (_parse_complex(args.delta) if args.delta
             else params.alpha * np.exp(-1j * params.phi0 * params.beta**2))
    rho = project_heterodyne(state, complex(delta)).normalized()
    rho = apply_signal_loss(rho, params.eta)
    xs = np.linspace(-args.extent, args.extent, args.points)
    grid = fock_wigner_grid(rho, xs, xs)
    print(f"wigner grid {args.points}x{args.points}, extent ±{args.extent}, "
          f"min={grid.min():.6g}, max={grid.max():.6g}")
    if args.out:
        path = Path(args.out)
        if args.format == "json":
            doc = {"xs": xs.tolist(), "ps": xs.tolist(), "w": grid.tolist(),
                   "delta": [delta.real, delta.imag],
                   "parameters": params.asdict()}
            path.write_text(json.dumps(doc, sort_keys=True) + "\n")
        else:
            with path.open("w") as fh:
                fh.write("x,p,w\n")
                for i, p in enumerate(xs):
                    for j, x in enumerate(xs):
                        fh.write(f"{x!r},{p!r},{grid[i, j]!r}\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_twopeak(args: argparse.Namespace) -> int:
    params = _parameters_from(args)
    delta = _parse_complex(args.delta)
    result = two_peak_amplitudes(params.alpha, params.beta, params.phi0, delta)
    mean_rotation = (params.phi0 * params.beta**2) % (2 * math.pi)
    print(f"post-selection at delta={delta} (arg {np.angle(delta):.4f} rad), "
          f"mean rotation {mean_rotation:.4f} rad")
    if result.degenerate:
        print(f"single-peak output: peaks at {result.peaks}")
    else:
        print(f"peaks at {result.peaks}, separation {result.separation} photons")
    if args.out:
        path = Path(args.out)
        if args.format == "json":
            doc = {"amplitudes_re": result.amplitudes.real.tolist(),
                   "amplitudes_im": result.amplitudes.imag.tolist(),
                   "peaks": list(result.peaks),
                   "separation": result.separation,
                   "parameters": params.asdict()}
            path.write_text(json.dumps(doc, sort_keys=True) + "\n")
        else:
            with path.open("w") as fh:
                fh.write("n,weight,amp_re,amp_im\n")
                for n, amp in enumerate(result.amplitudes):
                    fh.write(f"{n},{abs(amp)**2!r},{amp.real!r},{amp.imag!r}\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_optomech(args: argparse.Namespace) -> int:
    pairs = []
    for chunk in args.pairs.split(","):
        try:
            n, m = chunk.split(":")
            pairs.append((int(n), int(m)))
        except ValueError:
            raise ConfigError(f"cannot parse Fock pair {chunk!r}") from None
    kappa = phonon_kappa(args.g, args.omega_m, args.t)
    print(f"kappa(t) = {kappa:.6g}")
    print("n,m,overlap,equivalent_strength_multiplier")
    for n, m in pairs:
        ov = optomech_overlap(args.g, args.omega_m, args.t, n, m)
        print(f"{n},{m},{ov!r},{enhancement_factor(n, m)}")
    return EXIT_OK


def _cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    failures = run_selftest(verbose=True)
    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrsim",
        description="cross-Kerr number-squeezing simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one pipeline configuration")
    _add_parameter_args(p_run)
    _add_output_args(p_run)
    p_run.add_argument("--delta", help="post-selection center, e.g. '-3.41+2.09j'")
    p_run.add_argument("--gamma", type=float, default=None,
                       help="noise-scaling amplitude override")
    p_run.add_argument("--oracle", action="store_true",
                       help="also run the exact Fock-oracle pipeline (small amplitudes)")
    p_run.add_argument("--allow-large", action="store_true",
                       help="permit pairwise matrices beyond the memory gate")
    p_run.add_argument("--no-window", action="store_true",
                       help="store all Fock indices from 0 (memory-hungry)")
    p_run.add_argument("--loss-order", choices=("after", "before"), default="after",
                       help="apply signal loss after (default) or before post-selection")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    _add_parameter_args(p_sweep)
    _add_output_args(p_sweep)
    p_sweep.add_argument("--param", required=True, help="parameter to sweep")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated swept values")
    p_sweep.add_argument("--grid", help="comma-separated displacement grid")
    p_sweep.add_argument("--delta", help="post-selection center override")
    p_sweep.add_argument("--gamma", type=float, default=None)
    p_sweep.add_argument("--allow-large", action="store_true")
    p_sweep.add_argument("--no-window", action="store_true")
    p_sweep.add_argument("--loss-order", choices=("after", "before"),
                         default="after")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_wig = sub.add_parser("wigner", help="exact Wigner grid of a post-selected state")
    _add_parameter_args(p_wig)
    _add_output_args(p_wig)
    p_wig.add_argument("--delta", help="post-selection center")
    p_wig.add_argument("--extent", type=float, default=8.0,
                       help="half-width of the square grid")
    p_wig.add_argument("--points", type=int, default=121,
                       help="grid points per axis")
    p_wig.set_defaults(func=_cmd_wigner)

    p_two = sub.add_parser("twopeak", help="two-peak post-selected amplitudes")
    _add_parameter_args(p_two)
    _add_output_args(p_two)
    p_two.add_argument("--delta", required=True, help="post-selection center")
    p_two.set_defaults(func=_cmd_twopeak)

    p_opt = sub.add_parser("optomech", help="photon-phonon overlap table")
    p_opt.add_argument("--g", type=float, required=True,
                       help="optomechanical coupling")
    p_opt.add_argument("--omega-m", type=float, required=True,
                       help="mechanical frequency")
    p_opt.add_argument("--t", type=float, required=True, help="interaction time")
    p_opt.add_argument("--pairs", default="0:1",
                       help="Fock pairs n:m, comma separated")
    p_opt.set_defaults(func=_cmd_optomech)

    p_self = sub.add_parser("selftest", help="run the quick property suite")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EmptyBinError, ValidityError, TruncationError) as exc:
        print(f"numerical validity failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
