"""Protocol-specific states, bases, and correction operators.

GHZ channel states, the nine-member generalized Bell basis on two
qutrits, the single-qutrit Fourier (xi) basis, the shift/clock Pauli
operators, and the recovery unitary the designated agent applies for any
combination of public announcements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .core import PureState, Unitary3
from .errors import SizeOutOfRange

#: Primitive cube root of unity, exp(2 pi i / 3).
OMEGA = np.exp(2j * np.pi / 3.0)
#: Desk-scale cap on GHZ register size.
MAX_GHZ_QUTRITS = 12


@dataclass(frozen=True)
class BellOutcome:
    """Result (n, m) of the two-qutrit generalized Bell measurement; both reduced mod 3."""

    n: int
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", int(self.n) % 3)
        object.__setattr__(self, "m", int(self.m) % 3)

    @property
    def index(self) -> int:
        """Position in the family ordering, 3n + m."""
        return 3 * self.n + self.m

    @classmethod
    def from_index(cls, index: int) -> BellOutcome:
        return cls(int(index) // 3, int(index) % 3)


@dataclass(frozen=True)
class XiOutcome:
    """Result of a single-qutrit Fourier-basis measurement, reduced mod 3."""

    l: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "l", int(self.l) % 3)


@dataclass(frozen=True)
class HelperSum:
    """Mod-3 sum of the helper agents' Fourier outcomes; selects the phase correction."""

    L: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "L", int(self.L) % 3)

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[XiOutcome | int]) -> HelperSum:
        total = 0
        for outcome in outcomes:
            total += outcome.l if isinstance(outcome, XiOutcome) else int(outcome)
        return cls(total % 3)


@lru_cache(maxsize=None)
def ghz_state(k: int) -> PureState:
    """Equal superposition of |00...0>, |11...1>, |22...2> on k qutrits."""
    k = int(k)
    if not 1 <= k <= MAX_GHZ_QUTRITS:
        raise SizeOutOfRange(f"GHZ register size must be in 1..{MAX_GHZ_QUTRITS}, got {k}")
    amps = np.zeros(3**k, dtype=np.complex128)
    step = (3**k - 1) // 2  # index of |11...1| in base 3
    amps[[0, step, 2 * step]] = 1.0 / np.sqrt(3.0)
    return PureState(k, amps)


def bell_state(outcome: BellOutcome | tuple[int, int]) -> PureState:
    """Two-qutrit basis member sum_j w^{jn} |j>|(j+m) mod 3> / sqrt(3)."""
    o = outcome if isinstance(outcome, BellOutcome) else BellOutcome(*outcome)
    amps = np.zeros(9, dtype=np.complex128)
    for j in range(3):
        amps[3 * j + (j + o.m) % 3] = OMEGA ** (j * o.n)
    return PureState(2, amps / np.sqrt(3.0))


def xi_state(t: XiOutcome | int) -> PureState:
    """Single-qutrit Fourier-basis member sum_k w^{tk} |k> / sqrt(3)."""
    l = t.l if isinstance(t, XiOutcome) else int(t) % 3
    amps = np.array([OMEGA ** (l * k) for k in range(3)], dtype=np.complex128)
    return PureState(1, amps / np.sqrt(3.0))


@lru_cache(maxsize=None)
def _bell_family() -> tuple[PureState, ...]:
    return tuple(bell_state(BellOutcome.from_index(i)) for i in range(9))


def bell_family() -> list[PureState]:
    """All nine Bell outcomes, ordered by index 3n + m."""
    return list(_bell_family())


@lru_cache(maxsize=None)
def _xi_family() -> tuple[PureState, ...]:
    return tuple(xi_state(l) for l in range(3))


def xi_family() -> list[PureState]:
    """The three Fourier-basis states, ordered by phase index."""
    return list(_xi_family())


@lru_cache(maxsize=None)
def _computational_family(num_qutrits: int) -> tuple[PureState, ...]:
    dim = 3**num_qutrits
    members = []
    for i in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[i] = 1.0
        members.append(PureState(num_qutrits, amps))
    return tuple(members)


def computational_family(num_qutrits: int = 1) -> list[PureState]:
    """Computational-basis kets on a register, in ascending index order."""
    return list(_computational_family(int(num_qutrits)))


@lru_cache(maxsize=None)
def pauli_x(a: int = 1) -> Unitary3:
    """Cyclic shift |j> -> |(j+a) mod 3>."""
    a = int(a) % 3
    mat = np.zeros((3, 3), dtype=np.complex128)
    for j in range(3):
        mat[(j + a) % 3, j] = 1.0
    return Unitary3(mat)


@lru_cache(maxsize=None)
def pauli_z(b: int = 1) -> Unitary3:
    """Clock phase diag(1, w^b, w^{2b}) with w = exp(2 pi i / 3)."""
    b = int(b) % 3
    return Unitary3(np.diag([OMEGA ** (b * j) for j in range(3)]))


@lru_cache(maxsize=None)
def _recovery_operator(n: int, m: int, L: int) -> Unitary3:
    return Unitary3(pauli_z((n + L) % 3).entries @ pauli_x((3 - m) % 3).entries)


def recovery_operator(outcome: BellOutcome, helper_sum: HelperSum | int) -> Unitary3:
    """Correction that maps the designated agent's collapsed qutrit back to the secret.

    For announcement (n, m) and helper sum L this is
    Z^{(n+L) mod 3} X^{(3-m) mod 3}: the shift undoes the digit rotation,
    the clock phase cancels the accumulated measurement phases. It is the
    unique shift/clock product achieving fidelity 1 for every secret.
    """
    L = helper_sum.L if isinstance(helper_sum, HelperSum) else int(helper_sum) % 3
    return _recovery_operator(outcome.n, outcome.m, L)
