"""Command line front end: figure presets, free-form sweeps, and checks.

Exit codes: 0 success, 2 configuration problem, 3 solver failure,
4 failed correspondence check.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from dataclasses import replace

from .correlations import default_tau_grid, g2_tau
from .errors import ConfigError, NoInteriorExtremumError, SolverError
from .lindblad import build_liouvillian, default_step, model_for, steady_state
from .quantum_core import HilbertConfig, SystemParams
from . import analytic, correlations
from .sweep import (
    Axis,
    SweepSpec,
    check_correspondence,
    parse_sweep_config,
    read_sweep_csv,
    run_sweep,
    write_sweep_csv,
)

_STANDARD_OUTPUTS = ("g2_analytic", "g2_numeric", "coh_analytic", "coh_numeric")


def fig1_spec(nmax: int = 4, grid: int = 401) -> SweepSpec:
    """Detuning sweep at g = 1: kappa = gamma = 0.05 g, eta = 0.01 g."""
    base = SystemParams(g=1.0, kappa=0.05, gamma=0.05, eta=0.01, delta_a=0.0, delta=0.0)
    return SweepSpec(
        base=base,
        axis1=Axis("Delta", -2.0, 2.0, grid),
        hilbert=HilbertConfig(nmax),
        outputs=_STANDARD_OUTPUTS,
    )


def fig2_params() -> SystemParams:
    """Delayed-correlation point at kappa = 1: gamma = kappa, g = 20, Delta = -20.

    The preset pins everything except the drive amplitude; 0.1 kappa keeps
    the mean photon number small and g2 is drive-independent at this order
    anyway.
    """
    return SystemParams(g=20.0, kappa=1.0, gamma=1.0, eta=0.1, delta_a=-20.0, delta=-20.0)


def fig3_spec(nmax: int = 4, grid: int = 101) -> SweepSpec:
    """Coupling vs detuning map at kappa = 1: gamma = 0.5, eta = 0.1."""
    base = SystemParams(g=1.0, kappa=1.0, gamma=0.5, eta=0.1, delta_a=0.0, delta=0.0)
    return SweepSpec(
        base=base,
        axis1=Axis("g", 5.0, 30.0, grid),
        axis2=Axis("Delta", -40.0, 40.0, grid),
        hilbert=HilbertConfig(nmax),
        outputs=_STANDARD_OUTPUTS,
    )


def fig4_spec(nmax: int = 4, grid: int = 101) -> SweepSpec:
    """Detuning vs cavity decay map at g = 1: gamma = 0.01, eta = 0.001."""
    base = SystemParams(g=1.0, kappa=0.01, gamma=0.01, eta=0.001, delta_a=0.0, delta=0.0)
    return SweepSpec(
        base=base,
        axis1=Axis("Delta", -2.0, 2.0, grid),
        axis2=Axis("kappa", 0.01, 0.5, grid),
        hilbert=HilbertConfig(nmax),
        outputs=_STANDARD_OUTPUTS,
    )


def _out_stream(path: str | None):
    if path is None:
        return nullcontext(sys.stdout)
    return open(path, "w", newline="\n")


def _write_curve_csv(curve, stream) -> None:
    stream.write("tau,g2_tau,status\n")
    for tau, value in zip(curve.tau, curve.values):
        stream.write(f"{repr(float(tau))},{repr(float(value))},ok\n")


def _cmd_figure_sweep(spec: SweepSpec, out: str | None) -> int:
    result = run_sweep(spec)
    with _out_stream(out) as stream:
        write_sweep_csv(result, stream)
    return 0


def _cmd_fig2(args) -> int:
    params = fig2_params()
    h = HilbertConfig(args.nmax)
    liou = build_liouvillian(model_for(params, h))
    rho = steady_state(liou)
    grid = default_tau_grid(params, args.grid or 200)
    curve = g2_tau(rho, liou, h, grid, default_step(params))
    with _out_stream(args.out) as stream:
        _write_curve_csv(curve, stream)
    return 0


def _cmd_sweep(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    spec = parse_sweep_config(text)
    if args.nmax is not None:
        spec = replace(spec, hilbert=HilbertConfig(args.nmax))
    return _cmd_figure_sweep(spec, args.out)


def _cmd_point(args) -> int:
    delta_a = args.delta_cavity if args.delta_cavity is not None else args.delta
    delta = args.delta_atom if args.delta_atom is not None else args.delta
    try:
        params = SystemParams(g=args.g, kappa=args.kappa, gamma=args.gamma,
                              eta=args.eta, delta_a=delta_a, delta=delta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    h = HilbertConfig(args.nmax)
    liou = build_liouvillian(model_for(params, h))
    rho = steady_state(liou)
    lines = [
        f"g2_analytic = {repr(analytic.g2_zero_analytic(params))}",
        f"g2_numeric = {repr(correlations.g2_zero_numeric(rho, h))}",
        f"coh_analytic = {repr(analytic.atom_coherence_analytic(params))}",
        f"coh_numeric = {repr(correlations.atom_coherence_numeric(rho, h))}",
        f"mean_photon = {repr(correlations.mean_photon(rho, h))}",
    ]
    with _out_stream(args.out) as stream:
        stream.write("\n".join(lines) + "\n")
    return 0


def _cmd_check(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as f:
            result = read_sweep_csv(f)
    except OSError as exc:
        raise ConfigError(f"cannot read sweep file: {exc}") from exc
    report = check_correspondence(result, gap_threshold=args.gap_threshold)
    with _out_stream(args.out) as stream:
        stream.write("\n".join(report.format_lines()) + "\n")
    return 0 if report.passed else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockade-lab",
        description="Photon statistics and atomic coherence of a driven atom-cavity system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_help):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--nmax", type=int, default=4, help="cavity photon cutoff (default 4)")
        p.add_argument("--grid", type=int, default=None, help=grid_help)

    for name, helptext in (
        ("fig1", "detuning sweep, both branches"),
        ("fig2", "delayed correlation curve"),
        ("fig3", "coupling vs detuning map"),
        ("fig4", "detuning vs cavity-decay map"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p, "grid points per axis")

    p = sub.add_parser("sweep", help="run a sweep from a config file")
    p.add_argument("--config", required=True, help="flat key = value config file")
    p.add_argument("--out", default=None)
    p.add_argument("--nmax", type=int, default=None, help="override the config cutoff")

    p = sub.add_parser("point", help="evaluate one parameter point, both branches")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0,
                   help="sets both detunings unless overridden")
    p.add_argument("--delta-cavity", type=float, default=None, dest="delta_cavity")
    p.add_argument("--delta-atom", type=float, default=None, dest="delta_atom")
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--out", default=None)

    p = sub.add_parser("check", help="correspondence check on a sweep CSV")
    p.add_argument("file", help="CSV produced by fig1 or sweep")
    p.add_argument("--gap-threshold", type=float, default=1.0)
    p.add_argument("--out", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fig1":
            return _cmd_figure_sweep(fig1_spec(args.nmax, args.grid or 401), args.out)
        if args.command == "fig2":
            return _cmd_fig2(args)
        if args.command == "fig3":
            return _cmd_figure_sweep(fig3_spec(args.nmax, args.grid or 101), args.out)
        if args.command == "fig4":
            return _cmd_figure_sweep(fig4_spec(args.nmax, args.grid or 101), args.out)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "point":
            return _cmd_point(args)
        if args.command == "check":
            return _cmd_check(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, NoInteriorExtremumError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
