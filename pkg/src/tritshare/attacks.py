"""Eavesdropper models and the Monte Carlo experiments that measure them.

The outside attacker intercepts transit qutrits during distribution,
measures them, and forwards the collapsed basis state. The inside
attacker is a dishonest agent who captures another agent's channel
qutrit and substitutes a fake one; the dealer's random designation then
decides whether the theft pays off silently or shows up when the
reconstruction is compared against the secret.

Every experiment draws trial ``t`` from the substream ``(seed, t)``, so
aggregate counts are reproducible bit for bit and independent of
execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    PureState,
    apply_single,
    born_distribution,
    fidelity,
    haar_random_state,
    measure_subsystem,
    reduced_density,
    sample_index,
    tensor,
)
from .errors import ConfigInvalid, LabelOutOfRange, SelfCapture
from .operators import BellOutcome, bell_family, computational_family, ghz_state, recovery_operator, xi_family
from .protocol import (
    CHECK_BASES,
    COMPUTATIONAL,
    FOURIER,
    ChannelTamperer,
    CheckRecord,
    channel_check_round,
    reconstruct,
)

ALWAYS_COMPUTATIONAL = "always_computational"
ALWAYS_FOURIER = "always_fourier"
RANDOM_PER_QUTRIT = "random_per_qutrit"
BASIS_POLICIES = (ALWAYS_COMPUTATIONAL, ALWAYS_FOURIER, RANDOM_PER_QUTRIT)

EXACT = "exact"
SINGLE_COPY = "single_copy"
COMPARISON_MODES = (EXACT, SINGLE_COPY)

#: Exact comparison flags any reconstruction whose fidelity falls below this.
EXACT_COMPARISON_THRESHOLD = 1.0 - 1e-9

RANDOM_CHECK_BASIS = "random"


@dataclass(frozen=True)
class OutsideAttack:
    """Intercept-resend on chosen transit qutrits with a per-qutrit basis policy."""

    target_qutrits: tuple[int, ...]
    measure_basis_policy: str = ALWAYS_COMPUTATIONAL

    def __post_init__(self) -> None:
        targets = tuple(sorted(int(t) for t in self.target_qutrits))
        if not targets:
            raise ConfigInvalid("an outside attack targets at least one transit qutrit")
        if len(set(targets)) != len(targets):
            raise ConfigInvalid(f"duplicate target qutrits in {targets}")
        if self.measure_basis_policy not in BASIS_POLICIES:
            raise ConfigInvalid(f"basis policy must be one of {BASIS_POLICIES}")
        object.__setattr__(self, "target_qutrits", targets)


@dataclass(frozen=True)
class InsideAttack:
    """A dishonest agent plus the substitute qutrit the victim receives.

    ``fake_state=None`` forwards the captured qutrit untouched (the no-op
    control case).
    """

    dishonest_agent: int
    fake_state: PureState | None

    def __post_init__(self) -> None:
        if self.fake_state is not None and self.fake_state.num_qutrits != 1:
            raise ConfigInvalid("the fake qutrit is a single-qutrit state")


@dataclass(frozen=True)
class AttackStats:
    """Aggregate Monte Carlo counters with their per-trial rates."""

    trials: int
    attacker_successes: int
    detections: int
    success_rate: float
    detection_rate: float
    seed: int


def _resolve_basis(policy: str, rng: np.random.Generator) -> str:
    if policy == ALWAYS_COMPUTATIONAL:
        return COMPUTATIONAL
    if policy == ALWAYS_FOURIER:
        return FOURIER
    return COMPUTATIONAL if rng.random() < 0.5 else FOURIER


def _insert_qutrit(state: PureState, label: int, qutrit: PureState) -> PureState:
    """Re-tensor a single qutrit so that it takes the given register label."""
    joined = tensor(state, qutrit)
    n = joined.num_qutrits
    psi = joined.amplitudes.reshape((3,) * n)
    return PureState(n, np.moveaxis(psi, n - 1, label - 1).reshape(-1))


def outside_intercept_resend(
    state: PureState, label: int, basis: str, rng: np.random.Generator
) -> PureState:
    """Measure one transit qutrit in the given basis and forward the observed basis state."""
    if not 1 <= int(label) <= state.num_qutrits:
        raise LabelOutOfRange(f"label {label} outside register of {state.num_qutrits} qutrit(s)")
    if basis not in CHECK_BASES:
        raise ConfigInvalid(f"basis must be one of {CHECK_BASES}, got {basis!r}")
    family = computational_family() if basis == COMPUTATIONAL else xi_family()
    if state.num_qutrits == 1:
        return family[sample_index(born_distribution(state, (1,), family), rng)]
    record = measure_subsystem(state, (int(label),), family, rng)
    return _insert_qutrit(record.collapsed, int(label), family[record.outcome_index])


def intercept_tamperer(attack: OutsideAttack) -> ChannelTamperer:
    """Channel tamperer applying the attack to each target during distribution."""

    def tamper(state: PureState, rng: np.random.Generator) -> PureState:
        for target in attack.target_qutrits:
            state = outside_intercept_resend(state, target, _resolve_basis(attack.measure_basis_policy, rng), rng)
        return state

    return tamper


def run_check_rounds(
    rounds: int,
    attack: OutsideAttack | None,
    check_basis_policy: str,
    seed: int,
    num_parties: int = 3,
) -> list[CheckRecord]:
    """Seeded stream of verification rounds, optionally under attack.

    ``check_basis_policy`` is ``computational``, ``fourier`` or
    ``random`` (a fresh 50/50 draw per round).
    """
    if rounds < 1:
        raise ConfigInvalid("at least one check round is required")
    if check_basis_policy not in CHECK_BASES + (RANDOM_CHECK_BASIS,):
        raise ConfigInvalid(f"unknown check basis policy {check_basis_policy!r}")
    tamper = None
    if attack is not None:
        for target in attack.target_qutrits:
            if not 2 <= target <= num_parties:
                raise LabelOutOfRange(f"target {target} is not a transit qutrit (2..{num_parties})")
        tamper = intercept_tamperer(attack)

    records = []
    for r in range(int(rounds)):
        rng = np.random.default_rng([int(seed), r])
        if check_basis_policy == RANDOM_CHECK_BASIS:
            basis = COMPUTATIONAL if rng.random() < 0.5 else FOURIER
        else:
            basis = check_basis_policy
        records.append(channel_check_round(basis, rng, tamper, num_parties))
    return records


def run_outside_attack_experiment(
    trials: int,
    attack: OutsideAttack | None,
    check_basis_policy: str,
    seed: int,
    num_parties: int = 3,
) -> AttackStats:
    """Each trial distributes one check GHZ copy, lets the attacker act,
    and runs one check round; detections count failed rounds.

    Interception yields the attacker no claimable reconstruction, so the
    success counters stay at zero; the figure of merit is the detection
    rate.
    """
    records = run_check_rounds(trials, attack, check_basis_policy, seed, num_parties)
    detections = sum(1 for record in records if not record.passed)
    return AttackStats(
        trials=int(trials),
        attacker_successes=0,
        detections=detections,
        success_rate=0.0,
        detection_rate=detections / int(trials),
        seed=int(seed),
    )


@dataclass
class LiveSession:
    """A session's joint state mid-distribution plus who holds which register label."""

    state: PureState
    dealer_labels: tuple[int, int]
    agent_label: dict[int, int]  # agent -> label of the qutrit that agent uses in the protocol
    captured_label: dict[int, int]  # agent -> label of a qutrit that agent secretly captured


def start_session(secret: PureState, num_agents: int = 2) -> LiveSession:
    """Distribute a fresh channel: the dealer keeps labels 1-2, agent i receives label i+2."""
    state = tensor(secret, ghz_state(num_agents + 1))
    return LiveSession(state, (1, 2), {a: a + 2 for a in range(1, num_agents + 1)}, {})


def inside_capture_and_fake(session: LiveSession, attack: InsideAttack, victim: int) -> LiveSession:
    """Reroute the victim's channel qutrit to the dishonest agent and hand the victim the fake.

    The fake is tensored on as a fresh register slot, so it stays
    unentangled from the genuine channel. A ``None`` fake leaves the
    session untouched.
    """
    if victim == attack.dishonest_agent:
        raise SelfCapture("the dishonest agent cannot capture its own qutrit")
    if victim not in session.agent_label or attack.dishonest_agent not in session.agent_label:
        raise ConfigInvalid("both the dishonest agent and the victim must hold a channel qutrit")
    if attack.fake_state is None:
        return session
    state = tensor(session.state, attack.fake_state)
    agent_label = dict(session.agent_label)
    captured = dict(session.captured_label)
    captured[attack.dishonest_agent] = agent_label[victim]
    agent_label[victim] = state.num_qutrits
    return LiveSession(state, session.dealer_labels, agent_label, captured)


@dataclass(frozen=True)
class InsideTrialOutcome:
    """What one tampered three-party run produced."""

    bell: BellOutcome
    designated: int
    attacker_designated: bool
    reconstruction_fidelity: float


def _measure_xi_and_drop(
    state: PureState, labels: dict[int, int], captured: dict[int, int], target: int, rng: np.random.Generator
) -> tuple[PureState, int]:
    """Fourier-measure one qutrit, shift every tracked label past it, return the outcome."""
    record = measure_subsystem(state, (target,), xi_family(), rng)
    for mapping in (labels, captured):
        for key in list(mapping):
            if mapping[key] == target:
                del mapping[key]
            elif mapping[key] > target:
                mapping[key] -= 1
    return record.collapsed, record.outcome_index


def run_inside_trial(
    secret: PureState, attack: InsideAttack, designated: int, rng: np.random.Generator
) -> InsideTrialOutcome:
    """Play one tampered three-party session with the given designation.

    When the dishonest agent is designated, the victim's announcement
    comes off the fake qutrit and is ignored: the attacker privately
    Fourier-measures the captured qutrit instead and recovers the secret
    on their own. Otherwise the attacker plays helper on their genuine
    qutrit and the victim reconstructs on whatever they hold, which is
    what the dealer's comparison sees.
    """
    attacker = attack.dishonest_agent
    if attacker not in (1, 2):
        raise ConfigInvalid("the three-party setting has agents 1 and 2")
    if designated not in (1, 2):
        raise ConfigInvalid("designated agent must be 1 or 2")
    victim = 2 if attacker == 1 else 1

    session = inside_capture_and_fake(start_session(secret, num_agents=2), attack, victim)

    bell_record = measure_subsystem(session.state, session.dealer_labels, bell_family(), rng)
    bell = BellOutcome.from_index(bell_record.outcome_index)
    state = bell_record.collapsed
    labels = {a: lbl - 2 for a, lbl in session.agent_label.items()}
    captured = {a: lbl - 2 for a, lbl in session.captured_label.items()}

    if designated == attacker:
        state, announced = _measure_xi_and_drop(state, labels, captured, labels[victim], rng)
        if attacker in captured:
            state, helper_sum = _measure_xi_and_drop(state, labels, captured, captured[attacker], rng)
        else:
            helper_sum = announced  # no-op attack: the victim's announcement is genuine
        reconstructed = reconstruct(state, bell, helper_sum)
        fid = fidelity(reconstructed, secret)
    else:
        state, announced = _measure_xi_and_drop(state, labels, captured, labels[attacker], rng)
        target = labels[victim]
        corrected = apply_single(recovery_operator(bell, announced), target, state)
        if corrected.num_qutrits == 1:
            fid = fidelity(corrected, secret)
        else:
            # The captured qutrit is still in the attacker's hands; compare
            # only the victim's marginal against the secret.
            rho = reduced_density(corrected, (target,))
            fid = float(np.vdot(secret.amplitudes, rho.entries @ secret.amplitudes).real)

    return InsideTrialOutcome(bell, designated, designated == attacker, fid)


def run_inside_attack_experiment(
    trials: int,
    attack: InsideAttack,
    comparison_mode: str,
    seed: int,
    force_designate: int | None = None,
) -> AttackStats:
    """Monte Carlo over tampered three-party runs.

    Each trial draws a fresh Haar-random secret; the dealer designates
    uniformly between the two agents unless ``force_designate`` pins it.
    A designated attacker counts as a success; otherwise the honest
    reconstruction is compared with the secret: ``exact`` flags any
    fidelity below 1 - 1e-9, ``single_copy`` flags with probability
    1 - fidelity.
    """
    if trials < 1:
        raise ConfigInvalid("at least one trial is required")
    if comparison_mode not in COMPARISON_MODES:
        raise ConfigInvalid(f"comparison mode must be one of {COMPARISON_MODES}")
    if force_designate is not None and force_designate not in (1, 2):
        raise ConfigInvalid("forced designation must be agent 1 or 2")

    successes = 0
    detections = 0
    for t in range(int(trials)):
        rng = np.random.default_rng([int(seed), t])
        secret = haar_random_state(rng)
        designated = force_designate if force_designate is not None else int(rng.integers(1, 3))
        outcome = run_inside_trial(secret, attack, designated, rng)
        if outcome.attacker_designated:
            successes += 1
        elif comparison_mode == EXACT:
            if outcome.reconstruction_fidelity < EXACT_COMPARISON_THRESHOLD:
                detections += 1
        elif rng.random() < 1.0 - outcome.reconstruction_fidelity:
            detections += 1

    return AttackStats(
        trials=int(trials),
        attacker_successes=successes,
        detections=detections,
        success_rate=successes / int(trials),
        detection_rate=detections / int(trials),
        seed=int(seed),
    )
