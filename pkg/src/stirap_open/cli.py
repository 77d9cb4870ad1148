"""Command-line entry point.

Units: the pulse width T is the unit of time, so rates and frequencies
are given in 1/T and the pulse delay in T.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import serialize
from .core import pure_state
from .dissipator import BathModel
from .drive import PulseSchedule, Sequence
from .experiments import (SweepError, SweepSpec, compare_models, default_alphas,
                          default_gammas, default_jobs, default_n_photons, sweep_gamma,
                          sweep_gamma_alpha, sweep_gamma_n)
from .integrator import IntegrationError, IntegratorConfig, evolve

log = logging.getLogger("stirap_open")

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sequence(value: str) -> Sequence:
    try:
        return Sequence.parse(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown sequence {value!r} (use ci/counterintuitive or i/intuitive)") from None


def _pulse_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sequence", type=_sequence, default=Sequence.COUNTERINTUITIVE,
                   help="ci (STIRAP) or i (b-STIRAP)")
    p.add_argument("--omega0", type=float, default=25.0, help="peak Rabi parameter [1/T]")
    p.add_argument("--tau", type=float, default=1.5, help="pulse delay [T]")
    p.add_argument("--delta", type=float, default=1.0, help="single-photon detuning [1/T]")


def _integrator_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("integrator")
    g.add_argument("--t-start", type=float, default=-6.0)
    g.add_argument("--t-end", type=float, default=6.0)
    g.add_argument("--step-mode", choices=("fixed", "adaptive"), default="fixed")
    g.add_argument("--h", type=float, default=1e-3, help="fixed or initial step [T]")
    g.add_argument("--rel-tol", type=float, default=1e-9)
    g.add_argument("--abs-tol", type=float, default=1e-11)
    g.add_argument("--samples", type=int, default=600, help="trajectory samples")


def _output_args(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("-o", "--output", default=default, help="output file")
    p.add_argument("--format", choices=serialize.FORMATS, default=None,
                   help="csv or json (default: from the output suffix, else csv)")
    p.add_argument("--gnuplot-script", action="store_true",
                   help="also write a gnuplot script next to the output")


def _grid_args(p: argparse.ArgumentParser, alpha_grid: bool = False, n_grid: bool = False) -> None:
    g = p.add_argument_group("grids")
    g.add_argument("--gamma-min", type=float, default=1e-2)
    g.add_argument("--gamma-max", type=float, default=1e2)
    g.add_argument("--gamma-points", type=int, default=40)
    g.add_argument("--gammas", type=float, nargs="+", help="explicit Gamma values")
    if alpha_grid:
        g.add_argument("--alpha-min", type=float, default=0.2)
        g.add_argument("--alpha-max", type=float, default=5.0)
        g.add_argument("--alpha-points", type=int, default=13)
    else:
        g.add_argument("--alpha", type=float, default=1.0)
    if n_grid:
        g.add_argument("--n-min", type=float, default=1e-2)
        g.add_argument("--n-max", type=float, default=1e3)
        g.add_argument("--n-points", type=int, default=21)
        g.add_argument("--no-zero-n", action="store_true", help="omit the N = 0 row")
    else:
        g.add_argument("--n-photons", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default from STIRAP_JOBS, else 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stirap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="single run, writes the trajectory")
    _pulse_args(p)
    p.add_argument("--model", choices=("microscopic", "phenomenological"), default="microscopic")
    p.add_argument("--gamma", type=float, default=0.0, help="decay rate Gamma [1/T]")
    p.add_argument("--alpha", type=float, default=1.0, help="J_b / J_a")
    p.add_argument("--n-photons", type=float, default=0.0, help="thermal occupation N")
    p.add_argument("--initial-state", type=int, choices=(1, 2, 3), default=1)
    _integrator_args(p)
    _output_args(p, "trajectory.csv")

    for name, kw, default, help_ in (
            ("sweep-gamma", {}, "sweep_gamma.csv", "P3 versus Gamma"),
            ("sweep-gamma-alpha", {"alpha_grid": True}, "sweep_gamma_alpha.csv",
             "P3 over (Gamma, alpha)"),
            ("sweep-gamma-n", {"n_grid": True}, "sweep_gamma_n.csv", "P3 over (Gamma, N)")):
        p = sub.add_parser(name, help=help_)
        _pulse_args(p)
        p.add_argument("--model", choices=("microscopic", "phenomenological", "both"),
                       default="both" if name == "sweep-gamma" else "microscopic")
        _grid_args(p, **kw)
        _integrator_args(p)
        _output_args(p, default)

    p = sub.add_parser("compare", help="microscopic versus phenomenological model")
    _pulse_args(p)
    _grid_args(p)
    _integrator_args(p)
    _output_args(p, "compare.csv")
    p.add_argument("--summary", default=None, help="JSON file for the summary statistics")

    sub.add_parser("verify", help="run the oracle and invariant self-checks")
    return parser


@dataclass
class RunConfig:
    command: str
    schedule: PulseSchedule | None
    cfg: IntegratorConfig | None
    spec: SweepSpec | None
    bath: BathModel | None
    output: Path | None
    fmt: str


def _format(args) -> str:
    if args.format:
        return args.format
    return "json" if str(args.output).lower().endswith(".json") else "csv"


def _gamma_grid(args) -> tuple:
    if args.gammas:
        return tuple(args.gammas)
    if not (0 < args.gamma_min <= args.gamma_max) or args.gamma_points < 1:
        raise ValueError("need 0 < gamma-min <= gamma-max and gamma-points >= 1")
    return tuple(np.logspace(np.log10(args.gamma_min), np.log10(args.gamma_max),
                             args.gamma_points))


def build_config(args) -> RunConfig:
    """Validate every parameter before any computation starts."""
    if args.command == "verify":
        return RunConfig("verify", None, None, None, None, None, "csv")
    sched = PulseSchedule(args.omega0, args.tau, args.delta, args.sequence)
    cfg = IntegratorConfig(t_start=args.t_start, t_end=args.t_end, step_mode=args.step_mode,
                           h=args.h, rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                           n_samples=args.samples)
    fmt = _format(args)
    out = Path(args.output)
    if args.command == "simulate":
        bath = BathModel(args.gamma, args.alpha, args.n_photons)
        if args.model == "phenomenological" and args.n_photons:
            raise ValueError("the phenomenological model has no temperature (N must be 0)")
        return RunConfig("simulate", sched, cfg, None, bath, out, fmt)

    gammas = _gamma_grid(args)
    if args.command == "sweep-gamma-alpha":
        if not (0 <= args.alpha_min <= args.alpha_max) or args.alpha_points < 1:
            raise ValueError("need 0 <= alpha-min <= alpha-max and alpha-points >= 1")
        alphas = tuple(np.linspace(args.alpha_min, args.alpha_max, args.alpha_points))
    else:
        alphas = (args.alpha,)
    if args.command == "sweep-gamma-n":
        if not (0 < args.n_min <= args.n_max) or args.n_points < 1:
            raise ValueError("need 0 < n-min <= n-max and n-points >= 1")
        ns = tuple(np.logspace(np.log10(args.n_min), np.log10(args.n_max), args.n_points))
        if not args.no_zero_n:
            ns = (0.0,) + ns
    else:
        ns = (getattr(args, "n_photons", 0.0),)
    model = "both" if args.command == "compare" else args.model
    spec = SweepSpec(sequence=sched.sequence, model=model, gammas=gammas, alphas=alphas,
                     n_photons=ns, omega0=sched.omega0, tau=sched.tau, delta=sched.delta,
                     cfg=cfg)
    if args.jobs is not None and args.jobs < 1:
        raise ValueError("--jobs must be at least 1")
    return RunConfig(args.command, sched, cfg, spec, None, out, fmt)


def _maybe_gnuplot(args, run: RunConfig, kind: str) -> None:
    if getattr(args, "gnuplot_script", False):
        script = run.output.with_suffix(".gp")
        script.write_text(serialize.gnuplot_script(run.output, kind, run.fmt))


def _simulate(args, run: RunConfig) -> int:
    params = run.bath
    if args.model == "phenomenological":
        params = (run.bath.gamma, run.bath.alpha * run.bath.gamma)
    rho, record = evolve(args.model, run.schedule, params, pure_state(args.initial_state), run.cfg)
    serialize.write_trajectory(record, run.fmt, run.output, rho_final=rho)
    _maybe_gnuplot(args, run, "trajectory")
    print(f"final populations: rho11={rho[0, 0].real:.9f} rho22={rho[1, 1].real:.9f} "
          f"rho33={rho[2, 2].real:.9f}")
    return EXIT_OK


def _sweep(args, run: RunConfig) -> int:
    jobs = args.jobs if args.jobs is not None else default_jobs()
    fn = {"sweep-gamma": sweep_gamma, "sweep-gamma-alpha": sweep_gamma_alpha,
          "sweep-gamma-n": sweep_gamma_n}[run.command]
    records = fn(run.spec, jobs)
    serialize.write_records(records, run.fmt, run.output)
    _maybe_gnuplot(args, run, run.command)
    print(f"wrote {len(records)} records to {run.output}")
    return EXIT_OK


def _compare(args, run: RunConfig) -> int:
    jobs = args.jobs if args.jobs is not None else default_jobs()
    spec = run.spec
    comp = compare_models(spec.sequence, spec.gammas, spec.alphas[0], omega0=spec.omega0,
                          tau=spec.tau, delta=spec.delta, cfg=spec.cfg, jobs=jobs)
    serialize.write_records(comp.records, run.fmt, run.output)
    _maybe_gnuplot(args, run, "compare")
    summary = comp.summary()
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _verify() -> int:
    from .verify import run_all

    checks = run_all()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = build_config(args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if run.command == "verify":
            return _verify()
        if run.command == "simulate":
            return _simulate(args, run)
        if run.command == "compare":
            return _compare(args, run)
        return _sweep(args, run)
    except SweepError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IntegrationError as exc:
        print(f"numerical failure at t={exc.t}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
