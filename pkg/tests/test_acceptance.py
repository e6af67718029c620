"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import io
import itertools
import json
import re
import time

import numpy as np

from tritshare import (
    BellOutcome,
    InsideAttack,
    OutsideAttack,
    SessionConfig,
    basis_state,
    bell_family,
    born_distribution,
    ghz_state,
    haar_random_state,
    pauli_x,
    pauli_z,
    project_subsystem,
    recovery_operator,
    reduced_density,
    run_check_rounds,
    run_command,
    run_inside_attack_experiment,
    run_sharing_session,
    tensor,
    verify_correlations,
    xi_family,
)
from tritshare.attacks import ALWAYS_COMPUTATIONAL, EXACT


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, f"criterion {number}: {detail}"


def test_criterion_1_exhaustive_reconstruction():
    started = time.perf_counter()
    worst = 1.0
    sessions = 0
    for num_agents in (2, 3, 4):
        rng = np.random.default_rng(1000 + num_agents)
        secrets = [haar_random_state(rng) for _ in range(10)]
        for designated in range(1, num_agents + 1):
            for bell_index in range(9):
                bell = BellOutcome.from_index(bell_index)
                for helpers in itertools.product(range(3), repeat=num_agents - 1):
                    for secret in secrets:
                        cfg = SessionConfig(num_agents, designated, secret, 0)
                        transcript = run_sharing_session(cfg, forced_bell=bell, forced_helpers=helpers)
                        worst = min(worst, transcript.fidelity_to_secret)
                        sessions += 1
    elapsed = time.perf_counter() - started
    ok = worst > 1.0 - 1e-10 and elapsed < 10.0
    _report(1, ok, f"{sessions} sessions, worst fidelity deviation {1.0 - worst:.1e} (tol 1e-10), {elapsed:.1f}s")


def test_criterion_2_recovery_operator_oracle():
    rng = np.random.default_rng(2024)
    secrets = [haar_random_state(rng) for _ in range(10)]
    candidates = {(a, b): pauli_z(b).entries @ pauli_x(a).entries for a in range(3) for b in range(3)}
    mismatches = 0
    for n, m, L in itertools.product(range(3), repeat=3):
        collapsed = []
        for secret in secrets:
            joint = tensor(secret, ghz_state(3))
            agents = project_subsystem(joint, (1, 2), bell_family(), 3 * n + m).collapsed
            collapsed.append(project_subsystem(agents, (1,), xi_family(), L).collapsed)
        winners = [
            key
            for key, mat in candidates.items()
            if all(
                abs(np.vdot(s.amplitudes, mat @ c.amplitudes)) ** 2 > 1 - 1e-10
                for s, c in zip(secrets, collapsed)
            )
        ]
        closed = recovery_operator(BellOutcome(n, m), L).entries
        expected_key = ((3 - m) % 3, (n + L) % 3)
        phase_free = abs(abs(np.trace(candidates[expected_key].conj().T @ closed)) - 3.0) < 1e-9
        if winners != [expected_key] or not phase_free:
            mismatches += 1
    _report(2, mismatches == 0, f"27 announcement triples, {mismatches} mismatches")


def test_criterion_3_born_uniformity():
    rng = np.random.default_rng(3001)
    worst_bell = 0.0
    worst_helper = 0.0
    for _ in range(100):
        joint = tensor(haar_random_state(rng), ghz_state(3))
        probs = born_distribution(joint, (1, 2), bell_family())
        worst_bell = max(worst_bell, float(np.max(np.abs(probs - 1 / 9))))
        agents = project_subsystem(joint, (1, 2), bell_family(), int(rng.integers(0, 9))).collapsed
        helper = born_distribution(agents, (1,), xi_family())
        worst_helper = max(worst_helper, float(np.max(np.abs(helper - 1 / 3))))
    ok = worst_bell < 1e-12 and worst_helper < 1e-12
    _report(3, ok, f"100 secrets, max |p-1/9| = {worst_bell:.1e}, max |p-1/3| = {worst_helper:.1e}")


def test_criterion_4_inside_attacker_success_rate():
    started = time.perf_counter()
    stats = run_inside_attack_experiment(10_000, InsideAttack(1, basis_state([0])), EXACT, seed=4004)
    elapsed = time.perf_counter() - started
    forced = run_inside_attack_experiment(2_000, InsideAttack(1, basis_state([0])), EXACT, seed=4005, force_designate=1)
    ok = abs(stats.success_rate - 0.5) <= 0.02 and forced.success_rate == 1.0 and forced.detection_rate == 0.0 and elapsed < 5.0
    _report(
        4,
        ok,
        f"success rate {stats.success_rate:.4f} (target 0.50 +/- 0.02) in {elapsed:.1f}s; forced designation 1.0",
    )


def test_criterion_5_channel_checks():
    honest = run_check_rounds(10_000, None, "random", seed=5005)
    honest_verdict = verify_correlations(honest)
    attack = OutsideAttack((2,), ALWAYS_COMPUTATIONAL)
    tampered = run_check_rounds(10_000, attack, "random", seed=5006)
    tampered_verdict = verify_correlations(tampered)
    ok = (
        honest_verdict.failures_computational == 0
        and honest_verdict.failures_fourier == 0
        and honest_verdict.rounds_computational > 0
        and honest_verdict.rounds_fourier > 0
        and tampered_verdict.failure_rate_computational == 0.0
        and abs(tampered_verdict.failure_rate_fourier - 2 / 3) <= 0.02
    )
    _report(
        5,
        ok,
        "honest failures (0, 0); intercepted Fourier rate "
        f"{tampered_verdict.failure_rate_fourier:.4f} (target 2/3 +/- 0.02), computational rate "
        f"{tampered_verdict.failure_rate_computational}",
    )


def test_criterion_6_secrecy_single_agent_marginal():
    rng = np.random.default_rng(6006)
    worst = 0.0
    for _ in range(100):
        joint = tensor(haar_random_state(rng), ghz_state(3))
        for agent_label in (1, 2):
            total = np.zeros((3, 3), dtype=complex)
            for bell_index in range(9):
                record = project_subsystem(joint, (1, 2), bell_family(), bell_index)
                total += record.probability * reduced_density(record.collapsed, (agent_label,)).entries
            worst = max(worst, float(np.max(np.abs(total - np.eye(3) / 3))))
    _report(6, worst < 1e-12, f"100 secrets, max deviation of averaged marginal from I/3 = {worst:.1e}")


def test_criterion_7_cli_determinism():
    def run(argv):
        out = io.StringIO()
        code = run_command(argv, stdout=out, stderr=io.StringIO())
        return code, re.sub(r'"wall_time_ms": \d+', '"wall_time_ms": 0', out.getvalue())

    commands = [
        ["share", "--agents", "3", "--secret", "random", "--seed", "77"],
        ["check-channel", "--rounds", "100", "--basis", "random", "--seed", "77"],
        ["attack", "--model", "inside", "--trials", "150", "--seed", "77"],
        ["attack", "--model", "outside", "--trials", "150", "--seed", "77"],
        ["attack", "--model", "inside", "--trials", "80", "--seed", "77", "--format", "csv"],
    ]
    stable = True
    for argv in commands:
        code_a, text_a = run(argv)
        code_b, text_b = run(argv)
        if code_a != code_b or text_a.encode() != text_b.encode():
            stable = False
        if argv[0] == "share":
            assert json.loads(text_a)["config"]["seed"] == 77
    _report(7, stable, f"{len(commands)} commands byte-identical across reruns (timing excluded)")
