"""``ovnn`` command line: check, gains, simulate, reproduce.

Exit codes: 0 success, 1 criterion unsatisfied, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config, resolve
from .io import write_json
from .runner import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_UNSATISFIED,
    REPRODUCTIONS,
    check_report,
    gains_report,
    reproduce,
    run_simulation,
    summary_text,
    write_outputs,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ovnn", description="Octonion-valued delayed network experiments.")
    parser.add_argument("--config", type=Path, help="experiment config (JSON)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory (default: current)")
    parser.add_argument("--step", type=float, help="override the integration step h")
    parser.add_argument("--seed", type=int, help="seed for randomized initial states")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", help="evaluate the equilibrium and mu-stability criteria")
    sub.add_parser("gains", help="controller gain lower bounds and designed gains for the target")
    sub.add_parser("simulate", help="integrate the network and write CSV/SVG/report outputs")
    rep = sub.add_parser("reproduce", help="run a canonical experiment bundle")
    rep.add_argument("name", help=f"one of {', '.join(REPRODUCTIONS)}")
    return parser


def _experiment(args, need_equilibrium: bool = True):
    if args.config is None:
        raise ConfigError(f"'{args.command}' needs --config PATH")
    if args.step is not None and not args.step > 0:
        raise ConfigError("--step must be positive")
    data = load_config(args.config)
    return resolve(data, step=args.step, seed=args.seed, name=args.config.stem, need_equilibrium=need_equilibrium)


def cmd_check(args) -> int:
    exp = _experiment(args, need_equilibrium=False)
    report = check_report(exp)
    path = args.out / "check.json"
    write_json(path, report)
    for key in ("unique_equilibrium", "mu_stability"):
        r = report[key]
        worst = r["worst"]
        print(
            f"{key}: {'satisfied' if r['satisfied'] else 'NOT satisfied'} "
            f"(worst p={worst['p'] + 1} l={worst['l']} value {worst['value']:.4f})"
        )
    print(f"report: {path}")
    return EXIT_OK if report["satisfied"] else EXIT_UNSATISFIED


def cmd_gains(args) -> int:
    exp = _experiment(args, need_equilibrium=False)
    if exp.target is None:
        raise ConfigError("gains needs a 'target' (e.g. \"zero\" or an n x 8 array)")
    report = gains_report(exp)
    path = args.out / "gains.json"
    write_json(path, report)
    for p, (k, kh) in enumerate(zip(report["kappa_min"], report["kappa_hat_min"])):
        print(f"neuron {p + 1}: kappa_min " + " ".join(f"{v:.4f}" for v in k))
        print("          kappa_hat_min " + " ".join(f"{v:.4f}" for v in kh))
    print(f"gains: {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    exp = _experiment(args)
    outcome = run_simulation(exp)
    written = write_outputs(exp, outcome, args.out)
    r = outcome.result
    print(f"t_end={r.times[-1]:g} final norm {r.norms[-1]:.3e}")
    if outcome.phases is not None:
        print(f"phases: T1={outcome.phases.T1} T2={outcome.phases.T2}")
    for path in written:
        print(f"wrote {path}")
    if outcome.diverged:
        print(f"numerical failure: {outcome.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.name not in REPRODUCTIONS:
        raise ConfigError(f"unknown experiment {args.name!r}; expected one of {', '.join(REPRODUCTIONS)}")
    summary, code = reproduce(args.name, args.out, step=args.step, seed=args.seed)
    sys.stdout.write(summary_text(summary))
    print(f"bundle: {args.out / args.name}")
    return code


COMMANDS = {"check": cmd_check, "gains": cmd_gains, "simulate": cmd_simulate, "reproduce": cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
