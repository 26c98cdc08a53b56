"""The "two winning, two losing boxes" game.

Two of four boxes hold a treasure; Alice learns which and sends one bit, Bob
opens a box. Sharing a singlet, the protocol below wins with probability
(4 + sqrt 2)/6, while any classical one-bit strategy (with or without shared
randomness) wins with probability at most 5/6.

Configurations are always ordered {1,2}, {1,3}, {1,4}, {2,3}, {2,4}, {3,4};
this fixes the column order of the induced 4 x 6 channel. Row y of the
channel is box y + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import qmat
from .channels import AssistedQuantumProtocol, ClassicalChannel, Game, assisted_channel_quantum
from .quantum import Povm, conditional_states, singlet
from .simulate import TheoremInstance

N_BOXES = 4
SQRT2 = np.sqrt(2.0)
_I = qmat.identity(2)
_O = qmat.zeros(2)
_X, _Z = qmat.SIGMA_X, qmat.SIGMA_Z


@dataclass(frozen=True, order=True)
class TreasureConfig:
    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a <= N_BOXES and 1 <= self.b <= N_BOXES) or self.a == self.b:
            raise ValueError(f"invalid treasure boxes {{{self.a}, {self.b}}}")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def boxes(self) -> frozenset:
        return frozenset((self.a, self.b))

    def __str__(self):
        return f"{{{self.a},{self.b}}}"


CONFIGS = tuple(TreasureConfig(a, b) for a, b in combinations(range(1, N_BOXES + 1), 2))

_ALICE = {
    (1, 2): (_I, _O),
    (1, 3): ((_I + _Z) / 2, (_I - _Z) / 2),
    (2, 4): ((_I - _Z) / 2, (_I + _Z) / 2),
    (1, 4): ((_I + _X) / 2, (_I - _X) / 2),
    (2, 3): ((_I - _X) / 2, (_I + _X) / 2),
    (3, 4): (_O, _I),
}


def alice_povm(c: TreasureConfig) -> Povm:
    """Two-outcome measurement Alice performs when the treasures are in ``c``; labels '+', '-'."""
    plus, minus = _ALICE[(c.a, c.b)]
    return Povm(2, (plus, minus), ("+", "-"))


def bob_povm(sign: str) -> Povm:
    """Bob's four-outcome measurement after receiving ``sign``; outcome y means box y + 1."""
    if sign == "+":
        e1 = (_I - (_Z + _X) / SQRT2) / 2
        elems = (e1, _I - e1, _O, _O)
    elif sign == "-":
        e3 = (_I + (_Z - _X) / SQRT2) / 2
        elems = (_O, _O, e3, _I - e3)
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return Povm(2, elems, (1, 2, 3, 4))


def protocol() -> AssistedQuantumProtocol:
    return AssistedQuantumProtocol(singlet(), tuple(alice_povm(c) for c in CONFIGS), (bob_povm("+"), bob_povm("-")))


def win_probability(c: TreasureConfig) -> float:
    """sum_s tr rho(F^c_s (x) (E^s_a + E^s_b)) for the singlet rho."""
    rho = singlet()
    f = alice_povm(c)
    total = 0.0
    for s, sign in enumerate("+-"):
        e = bob_povm(sign)
        won = e[c.a - 1] + e[c.b - 1]
        total += rho.expectation(qmat.kron(f[s], won)).real
    return total


def overall_win_probability() -> float:
    return sum(win_probability(c) for c in CONFIGS) / len(CONFIGS)


def induced_channel() -> ClassicalChannel:
    """The 4 x 6 channel (box chosen | configuration) realized by the protocol."""
    return assisted_channel_quantum(protocol())


def treasure_game(exact: bool = False) -> Game:
    """Uniform configuration, reward 1 iff Bob opens a treasure box.

    With ``exact`` the entries are ``Fraction`` objects so classical optima
    come out as exact rationals.
    """
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    reward = np.array(
        [[one if y + 1 in c.boxes else zero for y in range(N_BOXES)] for c in CONFIGS],
        dtype=object if exact else float,
    )
    q = np.array([one / len(CONFIGS)] * len(CONFIGS), dtype=object if exact else float)
    return Game(q, reward)


def theorem_instance() -> TheoremInstance:
    """Bob's POVMs and the singlet's conditional states for each configuration."""
    rho = singlet()
    betas = tuple(tuple(conditional_states(rho, alice_povm(c)).parts) for c in CONFIGS)
    e_plus, e_minus = bob_povm("+"), bob_povm("-")
    return TheoremInstance(2, e_plus.elements, e_minus.elements, betas, induced_channel())
