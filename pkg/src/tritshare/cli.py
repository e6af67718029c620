"""Command-line front end.

Subcommands: ``share`` (one sharing session), ``check-channel``
(correlation rounds plus verdict) and ``attack`` (Monte Carlo
experiments). Reports go to stdout or ``--out`` as JSON (canonical) or
CSV; diagnostics go to stderr. Exit codes: 0 success, 2 argument error,
3 internal invariant violation, 4 disturbed channel verdict.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import reporting
from .attacks import (
    ALWAYS_COMPUTATIONAL,
    ALWAYS_FOURIER,
    EXACT,
    RANDOM_PER_QUTRIT,
    SINGLE_COPY,
    InsideAttack,
    OutsideAttack,
    run_check_rounds,
    run_inside_attack_experiment,
    run_outside_attack_experiment,
)
from .core import INPUT_NORM_TOL, PureState, haar_random_state
from .errors import ConfigInvalid, NotNormalized, ParseError, TritshareError
from .protocol import SessionConfig, run_sharing_session, verify_correlations

#: Secrets whose squared norm is off by more than this are rejected outright.
GROSS_NORM_TOL = 1e-3

_EVE_POLICIES = {
    "intercept-computational": ALWAYS_COMPUTATIONAL,
    "intercept-fourier": ALWAYS_FOURIER,
    "intercept-random": RANDOM_PER_QUTRIT,
}
_EVE_CHOICES = ["none"] + sorted(_EVE_POLICIES)
_COMPARISON = {"exact": EXACT, "single-copy": SINGLE_COPY}


def _parse_secret_checked(text: str, rng: np.random.Generator | None) -> tuple[PureState, str | None]:
    """Parse a secret literal; returns the state and a renormalization warning, if any."""
    if text.strip().lower() == "random":
        if rng is None:
            raise ParseError("a 'random' secret needs a seeded generator")
        return haar_random_state(rng), None
    parts = text.split(";")
    if len(parts) != 3:
        raise ParseError(f"expected three ';'-separated components, got {len(parts)}")
    values = []
    for part in parts:
        halves = part.split(",")
        if len(halves) != 2:
            raise ParseError(f"component {part!r} is not 're,im'")
        try:
            values.append(complex(float(halves[0]), float(halves[1])))
        except ValueError:
            raise ParseError(f"component {part!r} has a non-numeric entry") from None
    vec = np.array(values, dtype=np.complex128)
    norm_sq = float(np.vdot(vec, vec).real)
    if abs(norm_sq - 1.0) > GROSS_NORM_TOL:
        raise NotNormalized(f"secret squared norm {norm_sq:.6g} is off by more than {GROSS_NORM_TOL}")
    warning = None
    if abs(norm_sq - 1.0) > INPUT_NORM_TOL:
        warning = f"secret renormalized; squared norm deviated from 1 by {abs(norm_sq - 1.0):.3g}"
    return PureState(1, vec / np.sqrt(norm_sq)), warning


def parse_secret(text: str, rng: np.random.Generator | None = None) -> PureState:
    """Parse 're,im;re,im;re,im' into a single-qutrit state, or draw one
    Haar-uniformly for the literal 'random'."""
    state, _ = _parse_secret_checked(text, rng)
    return state


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default: fresh entropy, echoed in the report)")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="report format")
    parser.add_argument("--out", default=None, help="write the report to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritshare",
        description="Simulate GHZ-channel qutrit state sharing, channel checks, and attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    share = sub.add_parser("share", help="run one sharing session")
    share.add_argument("--agents", type=int, default=2, help="number of agents (default 2)")
    share.add_argument("--designate", default="random", help="reconstructing agent index, or 'random'")
    share.add_argument("--secret", default="random", help="'re,im;re,im;re,im' or 'random'")
    _add_common(share)

    check = sub.add_parser("check-channel", help="run channel-verification rounds")
    check.add_argument("--rounds", type=int, default=1000, help="number of check rounds (default 1000)")
    check.add_argument("--basis", choices=["computational", "fourier", "random"], default="random")
    check.add_argument("--eve", choices=_EVE_CHOICES, default="none", help="outside attack during distribution")
    _add_common(check)

    attack = sub.add_parser("attack", help="run an attack experiment")
    attack.add_argument("--model", choices=["inside", "outside"], required=True)
    attack.add_argument("--trials", type=int, default=10000)
    attack.add_argument("--comparison", choices=sorted(_COMPARISON), default="exact", help="inside model: how the dealer compares states")
    attack.add_argument("--fake", default="zero", help="inside model: fake qutrit ('zero', 'random', 'genuine', or 're,im;re,im;re,im')")
    attack.add_argument("--designate", default="random", help="inside model: force designation to this agent index")
    attack.add_argument("--eve", choices=sorted(_EVE_POLICIES), default="intercept-computational", help="outside model: interception policy")
    attack.add_argument("--basis", choices=["computational", "fourier", "random"], default="random", help="outside model: check-basis policy")
    _add_common(attack)

    return parser


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        if args.seed < 0:
            raise ParseError("seed must be non-negative")
        return int(args.seed)
    return int(np.random.SeedSequence().entropy)


def _parse_designate(raw: str, num_agents: int, rng: np.random.Generator) -> int:
    if str(raw).strip().lower() == "random":
        return int(rng.integers(1, num_agents + 1))
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"--designate must be an agent index or 'random', got {raw!r}") from None
    return value


def _cmd_share(args: argparse.Namespace) -> tuple[dict, dict, list[str], int]:
    seed = _resolve_seed(args)
    setup_rng = np.random.default_rng([seed, 1])
    secret, warning = _parse_secret_checked(args.secret, setup_rng)
    designated = _parse_designate(args.designate, args.agents, setup_rng)
    cfg = SessionConfig(num_agents=args.agents, designated=designated, secret=secret, seed=seed)
    transcript = run_sharing_session(cfg)
    config = {
        "agents": args.agents,
        "designated": designated,
        "secret": reporting.complex_vector(secret.amplitudes),
        "secret_spec": args.secret,
        "seed": seed,
    }
    results = {"transcript": reporting.encode_transcript(transcript)}
    return config, results, [warning] if warning else [], 0


def _cmd_check_channel(args: argparse.Namespace) -> tuple[dict, dict, list[str], int]:
    seed = _resolve_seed(args)
    attack = None
    if args.eve != "none":
        attack = OutsideAttack(target_qutrits=(2,), measure_basis_policy=_EVE_POLICIES[args.eve])
    records = run_check_rounds(args.rounds, attack, args.basis, seed)
    verdict = verify_correlations(records)
    config = {"rounds": args.rounds, "basis": args.basis, "eve": args.eve, "parties": 3, "seed": seed}
    results = {"verdict": reporting.encode_verdict(verdict)}
    return config, results, [], 4 if verdict.disturbed else 0


def _cmd_attack(args: argparse.Namespace) -> tuple[dict, dict, list[str], int]:
    seed = _resolve_seed(args)
    warnings: list[str] = []
    if args.model == "inside":
        setup_rng = np.random.default_rng([seed, 1])
        fake_spec = args.fake.strip().lower()
        if fake_spec == "zero":
            fake = PureState(1, np.array([1.0, 0.0, 0.0]))
        elif fake_spec == "genuine":
            fake = None  # no-op control: forward the captured qutrit untouched
        else:
            fake, warning = _parse_secret_checked(args.fake, setup_rng)
            if warning:
                warnings.append(warning.replace("secret", "fake state"))
        force = None
        if str(args.designate).strip().lower() != "random":
            force = _parse_designate(args.designate, 2, setup_rng)
        stats = run_inside_attack_experiment(
            args.trials, InsideAttack(dishonest_agent=1, fake_state=fake), _COMPARISON[args.comparison], seed, force
        )
        config = {
            "model": "inside",
            "trials": args.trials,
            "comparison": args.comparison,
            "fake": args.fake,
            "designate": args.designate,
            "dishonest_agent": 1,
            "seed": seed,
        }
    else:
        attack = OutsideAttack(target_qutrits=(2,), measure_basis_policy=_EVE_POLICIES[args.eve])
        stats = run_outside_attack_experiment(args.trials, attack, args.basis, seed)
        config = {
            "model": "outside",
            "trials": args.trials,
            "eve": args.eve,
            "check_basis": args.basis,
            "seed": seed,
        }
    return config, {"stats": reporting.encode_attack_stats(stats)}, warnings, 0


_HANDLERS = {
    "share": _cmd_share,
    "check-channel": _cmd_check_channel,
    "attack": _cmd_attack,
}


def run_command(argv: list[str], stdout=None, stderr=None) -> int:
    """Parse argv, run the subcommand, and emit its report. Returns the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed its message
        return 0 if exc.code in (0, None) else int(exc.code)

    if args.format == "csv" and args.command != "attack":
        print("error: only attack reports have a CSV form; use --format json", file=stderr)
        return 2

    started = time.perf_counter()
    try:
        config, results, warnings, code = _HANDLERS[args.command](args)
    except (ParseError, NotNormalized, ConfigInvalid) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except TritshareError as exc:
        print(f"internal error: {exc}", file=stderr)
        return 3
    wall_time_ms = int(round((time.perf_counter() - started) * 1000.0))

    report = reporting.build_report(args.command, config, results, wall_time_ms, warnings)
    try:
        reporting.validate_report(report)
    except jsonschema.ValidationError as exc:
        print(f"internal error: report violates schema: {exc.message}", file=stderr)
        return 3

    text = reporting.render_csv(report) if args.format == "csv" else reporting.render_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
