from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import suites
from .bandit import (
    GeneralizedLinUCBPolicy,
    LinearBanditEnv,
    constant_beta,
    log_beta,
    random_env,
    run_episode,
)
from .bounds import (
    Convention,
    bound_table,
    empirical_sum,
    epl_upper_bound,
    lower_bound_value,
    run_sequence,
)
from .config import ExperimentConfig, load_config, merge_overrides, validate_config
from .errors import NormViolationError
from .exports import (
    bounds_to_csv,
    build_records,
    format_float,
    records_to_csv,
    trajectory_to_csv,
    verify_report_to_json,
)
from .linalg import Vector
from .paths import config_path
from .sequences import SequenceKind, find_kind, generate, parse_sequence_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

BOUND_SLACK = 1e-9
FLOOR_SLACK = 1e-12


def _cli_help_text() -> str:
    return "\n".join(
        [
            "eplkit - elliptical potential bounds and experiments",
            "",
            "Commands:",
            "  verify    run the randomized inequality suites, print a JSON report",
            "  bounds    tabulate the closed-form potential-sum bound per power",
            "  simulate  run a sequence through the design matrix, write per-step CSV",
            "  bandit    run a generalized LinUCB episode, write a trajectory CSV",
            "",
            "Common flags: --dim --horizon --ridge --power (repeatable) --seed --trials",
            "  --sequence --sequence-file --config --out --arms --noise --beta",
            "  --beta-schedule --verbose",
            "",
            "Sequence kinds: " + ", ".join(kind.value for kind in SequenceKind),
            "",
            "Sequence file: one vector per line, entries separated by spaces or commas,",
            "blank lines and text after '#' ignored.",
            "",
            "Simulate CSV: t,i,lambda_i,eps_sq_i,norm_before,norm_after",
            "Bandit CSV:   t,arm_index,reward,instant_regret,bonus,cum_regret",
            "",
            "Exit codes: 0 success, 1 inequality violated, 2 usage or config error.",
            "Randomness: numpy PCG64 (numpy.random.default_rng) seeded by --seed.",
            "",
            f"Default config: {config_path()}",
        ]
    )


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, help="Vector dimension d")
    common.add_argument("--horizon", type=int, help="Number of steps T")
    common.add_argument("--ridge", type=float, help="Ridge parameter lambda")
    common.add_argument(
        "--power",
        type=float,
        action="append",
        dest="powers",
        help="Exponent p (repeatable)",
    )
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--trials", type=int, help="Base trial count for verify")
    common.add_argument("--sequence", help="Sequence kind")
    common.add_argument("--sequence-file", dest="sequence_file", help="Vectors for from-file")
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help="Output path (CSV or JSON)")
    common.add_argument("--arms", type=int, help="Number of random arms for bandit")
    common.add_argument("--noise", type=float, help="Reward noise scale")
    common.add_argument("--beta", type=float, help="Confidence width scale")
    common.add_argument("--beta-schedule", dest="beta_schedule", help="constant or log")
    common.add_argument("--verbose", action="store_true", default=None, help="Log progress")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eplkit")
    parser.add_argument(
        "-help",
        dest="help_extended",
        action="store_true",
        help="Show extended help and exit",
    )
    common = _common_flags()
    commands = parser.add_subparsers(dest="command")
    commands.add_parser("verify", parents=[common], help="Run inequality suites")
    commands.add_parser("bounds", parents=[common], help="Tabulate closed-form bounds")
    commands.add_parser("simulate", parents=[common], help="Run a sequence experiment")
    commands.add_parser("bandit", parents=[common], help="Run a bandit episode")
    return parser


def resolve_config(args: argparse.Namespace) -> tuple[ExperimentConfig, str | None]:
    if args.config:
        path = Path(args.config).expanduser()
        if not path.exists():
            return ExperimentConfig(), f"Config file not found: {path}"
        config, error = load_config(path)
    else:
        config, error = load_config()
    if error:
        return config, error
    overrides: dict[str, Any] = {
        "dim": args.dim,
        "horizon": args.horizon,
        "ridge": args.ridge,
        "powers": tuple(args.powers) if args.powers else None,
        "seed": args.seed,
        "trials": args.trials,
        "sequence": args.sequence,
        "sequence_file": args.sequence_file,
        "out": args.out,
        "arms": args.arms,
        "noise": args.noise,
        "beta": args.beta,
        "beta_schedule": args.beta_schedule,
        "verbose": args.verbose,
    }
    return merge_overrides(config, overrides), None


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _write_output(path: str, text: str) -> str | None:
    target = Path(path).expanduser()
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        return f"Failed to write output: {target} ({exc})"
    return None


def _emit(config: ExperimentConfig, text: str) -> int:
    if config.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    error = _write_output(config.out, text)
    if error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _summary(config: ExperimentConfig, line: str) -> None:
    # Keep stdout clean for CSV/JSON when no --out is given.
    stream = sys.stdout if config.out is not None else sys.stderr
    print(line, file=stream)


def cmd_verify(config: ExperimentConfig) -> int:
    outcomes = suites.run_suites(config.trials, config.seed, suites.SUITES)
    status = _emit(config, verify_report_to_json(outcomes) + "\n")
    if status != EXIT_OK:
        return status
    total = suites.total_trials(outcomes)
    failed = [outcome for outcome in outcomes if outcome.failures]
    _summary(config, f"trials={total} failures={sum(o.failures for o in outcomes)}")
    if failed:
        first = failed[0]
        print(
            f"violation: suite {first.suite} first failed at {first.first_failure}",
            file=sys.stderr,
        )
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_bounds(config: ExperimentConfig) -> int:
    rows = bound_table(config.horizon, config.dim, config.ridge, config.powers)
    for power, regime, bound in rows:
        print(f"p={power:g}, regime {regime.value}, bound {format_float(bound)}")
    if config.out is not None:
        text = bounds_to_csv([(power, regime.value, bound) for power, regime, bound in rows])
        error = _write_output(config.out, text)
        if error:
            print(f"error: {error}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK


def _load_sequence(config: ExperimentConfig) -> tuple[list[Vector], str | None]:
    kind = find_kind(config.sequence)
    if kind is SequenceKind.FROM_FILE:
        path = Path(config.sequence_file or "").expanduser()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            return [], f"Failed to read sequence file: {path} ({exc})"
        try:
            vectors = parse_sequence_file(text)
        except ValueError as exc:
            return [], f"{path}: {exc}"
        if not vectors:
            return [], f"Sequence file has no vectors: {path}"
        return vectors, None
    assert kind is not None
    return generate(kind, config.horizon, config.dim, config.seed), None


def cmd_simulate(config: ExperimentConfig) -> int:
    sequence, error = _load_sequence(config)
    if error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    power = config.powers[0]
    try:
        acc = run_sequence(sequence, config.ridge, power)
    except NormViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    status = _emit(config, records_to_csv(build_records(acc.records())))
    if status != EXIT_OK:
        return status

    horizon = acc.step - 1
    total = empirical_sum(acc, Convention.NEXT)
    bound = epl_upper_bound(horizon, acc.dim, config.ridge, power)
    parts = [
        f"sum={format_float(total)}",
        f"bound={format_float(bound)}",
        f"slack={format_float(bound - total)}",
    ]
    violated = total > bound + BOUND_SLACK
    if find_kind(config.sequence) is SequenceKind.CONSTANT_LOWER_BOUND and acc.dim == 1:
        if power > 1:
            floor = lower_bound_value(horizon, config.ridge, power)
            parts.append(f"floor={format_float(floor)}")
            violated = violated or total < floor - FLOOR_SLACK
    _summary(config, " ".join(parts))
    if violated:
        print("violation: empirical sum outside its proven range", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _build_env(config: ExperimentConfig) -> LinearBanditEnv:
    if config.arm_vectors is not None and config.theta is not None:
        return LinearBanditEnv(
            theta=np.array(config.theta),
            arms=np.array(config.arm_vectors),
            noise=config.noise,
            seed=config.seed,
        )
    return random_env(config.dim, config.arms, config.noise, config.seed)


def cmd_bandit(config: ExperimentConfig) -> int:
    try:
        env = _build_env(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    power = config.powers[0]
    schedule = log_beta if config.beta_schedule == "log" else constant_beta
    policy = GeneralizedLinUCBPolicy(env.dim, config.ridge, power, schedule(config.beta))
    trajectory = run_episode(env, policy, config.horizon)

    status = _emit(config, trajectory_to_csv(trajectory))
    if status != EXIT_OK:
        return status

    potential_bound = trajectory.potential_bound()
    _summary(
        config,
        " ".join(
            [
                f"cum_regret={format_float(trajectory.cumulative_regret)}",
                f"potential_sum={format_float(trajectory.potential_sum)}",
                f"potential_bound={format_float(potential_bound)}",
                f"bonus_sum={format_float(trajectory.bonus_sum)}",
                f"bonus_bound={format_float(trajectory.bonus_bound())}",
            ]
        ),
    )
    if trajectory.potential_sum > potential_bound + BOUND_SLACK:
        print("violation: potential sum exceeds its bound", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


_HANDLERS = {
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "bandit": cmd_bandit,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.help_extended:
        print(_cli_help_text())
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    config, error = resolve_config(args)
    if error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(config.verbose)

    problems = validate_config(config, args.command)
    if problems:
        for problem in problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_USAGE
    logger.info("Running %s with %s", args.command, config)
    return _HANDLERS[args.command](config)
