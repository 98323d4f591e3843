"""Boards, game states, round schedules, and utility families.

States are subsets of a fixed prize board, held as bitmasks over the board's
(ascending) positions. All types are immutable values and every operation is
a pure function, so everything here is safe under concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .errors import DomainError, RangeError

# CRRA collapses to log utility at gamma = 1; the singularity is removable
# and gammas within this band evaluate as log. The band must cover
# gamma = 1 +/- 1e-6 with float-representation margin: the exact family
# deviates from log by |1-gamma| * ln(x)^2 / 2, which already breaches the
# advertised 1e-4 continuity bound at the top of the money range.
LOG_GAMMA_BAND = 1e-5


class Action(Enum):
    DEAL = "deal"
    NO_DEAL = "no_deal"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return "Deal" if self is Action.DEAL else "No Deal"


@dataclass(frozen=True)
class PrizeLadder:
    """The ordered board: strictly ascending, strictly positive prize values.

    Zero is rejected because log/CRRA utilities are undefined there. A
    single-prize ladder is admitted: it is the degenerate terminal game
    (the contestant holds the last case).
    """

    prizes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.prizes) < 1:
            raise DomainError("a prize ladder needs at least one prize")
        for i, p in enumerate(self.prizes):
            if not (p > 0) or not math.isfinite(p):
                raise DomainError(f"prize #{i} must be strictly positive, got {p!r}")
        for a, b in zip(self.prizes, self.prizes[1:]):
            if not a < b:
                raise DomainError(f"prizes must be strictly ascending, got {a!r} before {b!r}")

    @classmethod
    def from_values(cls, values) -> "PrizeLadder":
        """Build from prizes in any order; duplicates are rejected."""
        return cls(tuple(sorted(float(v) for v in values)))

    def __len__(self) -> int:
        return len(self.prizes)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.prizes)) - 1

    def indices_of(self, values) -> int:
        """Bitmask of the given prize values; every value must be on the board."""
        mask = 0
        for v in values:
            v = float(v)
            try:
                i = self.prizes.index(v)
            except ValueError:
                raise DomainError(f"prize {v!r} is not on the board") from None
            bit = 1 << i
            if mask & bit:
                raise DomainError(f"prize {v!r} listed twice")
            mask |= bit
        return mask


@dataclass(frozen=True)
class RoundSchedule:
    """Cases opened after each No Deal, indexed by offer-point round."""

    opens_per_round: tuple[int, ...]

    def __post_init__(self) -> None:
        for i, k in enumerate(self.opens_per_round):
            if not isinstance(k, int) or k < 1:
                raise DomainError(f"opens_per_round[{i}] must be a positive integer, got {k!r}")

    def __len__(self) -> int:
        return len(self.opens_per_round)

    def opens_at(self, round_index: int) -> int:
        return self.opens_per_round[round_index]


@dataclass(frozen=True)
class GameState:
    """Remaining prizes (bitmask over ladder positions) at an offer point."""

    remaining: int
    round: int

    def __post_init__(self) -> None:
        if self.remaining <= 0:
            raise DomainError("a game state needs at least one remaining prize")
        if self.round < 0:
            raise DomainError("round index must be nonnegative")

    @property
    def size(self) -> int:
        return self.remaining.bit_count()

    def prize_values(self, ladder: PrizeLadder) -> tuple[float, ...]:
        return tuple(p for i, p in enumerate(ladder.prizes) if self.remaining >> i & 1)

    @classmethod
    def from_prizes(cls, ladder: PrizeLadder, values, round: int = 0) -> "GameState":
        return cls(ladder.indices_of(values), round)


def state_mean(state: GameState, ladder: PrizeLadder) -> float:
    values = state.prize_values(ladder)
    return sum(values) / len(values)


def successor_states(state: GameState, opens: int) -> list[tuple[GameState, float]]:
    """All states after uniformly opening ``opens`` of the remaining cases.

    Returns every C(n, opens) removal subset with equal probability, round
    advanced by one, in ascending-bitmask order (the solver's documented
    summation order). The contestant's own case is never opened, hence
    ``opens`` must leave at least one prize.
    """
    n = state.size
    if opens < 1:
        raise DomainError(f"must open at least one case, got {opens}")
    if opens >= n:
        raise DomainError(f"cannot open {opens} of {n} remaining cases; the contestant's case stays shut")
    bits = [i for i in range(state.remaining.bit_length()) if state.remaining >> i & 1]
    masks = []
    for removed in combinations(bits, opens):
        mask = state.remaining
        for i in removed:
            mask ^= 1 << i
        masks.append(mask)
    masks.sort()
    p = 1.0 / len(masks)
    return [(GameState(m, state.round + 1), p) for m in masks]


# ---------------------------------------------------------------------------
# Utility families
#
# Each family exposes:
#   value(x)    utility of money x (utiles)
#   inverse(q)  certainty equivalent of q utiles (money)
# plus a solver-facing "score" channel. Scores are order-isomorphic to
# utilities but chosen for numerical safety: for CRRA away from gamma = 1 the
# score is sign(1-gamma) * x^(1-gamma), which keeps full relative precision
# where the utile representation saturates against its supremum (deep risk
# aversion on large-money boards).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogUtility:
    """Natural-log utility, the Kelly criterion."""

    def value(self, x: float) -> float:
        if not x > 0:
            raise DomainError(f"log utility needs x > 0, got {x!r}")
        return math.log(x)

    def inverse(self, q: float) -> float:
        try:
            return math.exp(q)
        except OverflowError:
            raise RangeError(f"certainty equivalent of {q!r} utiles overflows") from None

    # score channel: identical to utiles
    def score(self, x: float) -> float:
        return self.value(x)

    def score_to_q(self, s: float) -> float:
        return s

    def ce_from_score(self, s: float) -> float:
        return self.inverse(s)


@dataclass(frozen=True)
class CRRAUtility:
    """Constant relative risk aversion: u(x) = (x^(1-gamma) - 1) / (1-gamma).

    gamma may be negative (risk seeking) or zero (risk neutral). Within
    LOG_GAMMA_BAND of 1 the family is evaluated as log utility, its
    continuity limit.
    """

    gamma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma):
            raise DomainError(f"gamma must be finite, got {self.gamma!r}")

    @property
    def _as_log(self) -> bool:
        return abs(self.gamma - 1.0) <= LOG_GAMMA_BAND

    def value(self, x: float) -> float:
        if not x > 0:
            raise DomainError(f"CRRA utility needs x > 0, got {x!r}")
        if self._as_log:
            return math.log(x)
        e = 1.0 - self.gamma
        try:
            return math.expm1(e * math.log(x)) / e
        except OverflowError:
            raise RangeError(f"CRRA(gamma={self.gamma}) overflows at x={x!r}") from None

    def inverse(self, q: float) -> float:
        """Closed-form inverse ((1-gamma) q + 1)^(1/(1-gamma)).

        For gamma > 1 the family has supremum 1/(gamma-1); q at or above it
        is unattainable. Inputs within one ulp of the supremum are
        ill-conditioned by construction (the utile encoding has destroyed
        the information) and are rejected the same way.
        """
        if self._as_log:
            try:
                return math.exp(q)
            except OverflowError:
                raise RangeError(f"certainty equivalent of {q!r} utiles overflows") from None
        e = 1.0 - self.gamma
        arg = e * q
        if arg <= -1.0:
            raise RangeError(
                f"q={q!r} is outside the range of CRRA(gamma={self.gamma})"
                + (f"; the supremum is {1.0 / (self.gamma - 1.0)!r}" if self.gamma > 1 else "")
            )
        try:
            return math.exp(math.log1p(arg) / e)
        except OverflowError:
            raise RangeError(f"certainty equivalent of {q!r} utiles overflows") from None

    def score(self, x: float) -> float:
        if not x > 0:
            raise DomainError(f"CRRA utility needs x > 0, got {x!r}")
        if self._as_log:
            return math.log(x)
        e = 1.0 - self.gamma
        try:
            t = math.exp(e * math.log(x))
        except OverflowError:
            raise RangeError(f"CRRA(gamma={self.gamma}) overflows at x={x!r}") from None
        return math.copysign(t, e)

    def score_to_q(self, s: float) -> float:
        if self._as_log:
            return s
        e = 1.0 - self.gamma
        return (abs(s) - 1.0) / e

    def ce_from_score(self, s: float) -> float:
        if self._as_log:
            return self.inverse(s)
        e = 1.0 - self.gamma
        return math.exp(math.log(abs(s)) / e)


@dataclass(frozen=True)
class ExpPowerUtility:
    """Exponential-power utility over wealth W plus winnings.

    u(x) = (1 - exp(-alpha (W + x)^(1-gamma))) / alpha.

    Restricted to gamma < 1: for gamma >= 1 the map is constant or
    decreasing in x and no longer orders money sensibly.
    """

    alpha: float
    gamma: float
    wealth: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.gamma < 1:
            raise DomainError(f"exp-power utility needs gamma < 1, got {self.gamma!r}")
        if self.wealth < 0:
            raise DomainError(f"wealth must be nonnegative, got {self.wealth!r}")

    def value(self, x: float) -> float:
        if x < 0:
            raise DomainError(f"exp-power utility needs x >= 0, got {x!r}")
        w = self.wealth + x
        if not w > 0:
            raise DomainError("wealth plus winnings must be positive")
        t = math.exp((1.0 - self.gamma) * math.log(w))
        try:
            return -math.expm1(-self.alpha * t) / self.alpha
        except OverflowError:
            raise RangeError(f"exp-power utility overflows at x={x!r}") from None

    def inverse(self, q: float) -> float:
        arg = -self.alpha * q
        if arg <= -1.0:
            raise RangeError(
                f"q={q!r} is at or above the exp-power supremum {1.0 / self.alpha!r}"
            )
        t = -math.log1p(arg) / self.alpha
        if t < 0 or (t == 0 and self.wealth > 0):
            raise RangeError(f"q={q!r} is below the utility of zero winnings")
        if t == 0:
            return 0.0
        w = math.exp(math.log(t) / (1.0 - self.gamma))
        x = w - self.wealth
        if x < 0:
            raise RangeError(f"q={q!r} is below the utility of zero winnings")
        return x

    def score(self, x: float) -> float:
        return self.value(x)

    def score_to_q(self, s: float) -> float:
        return s

    def ce_from_score(self, s: float) -> float:
        return self.inverse(s)


UtilitySpec = LogUtility | CRRAUtility | ExpPowerUtility


def utility_value(utility: UtilitySpec, x: float) -> float:
    """Utility of money ``x`` in utiles."""
    return utility.value(x)


def certainty_equivalent(utility: UtilitySpec, q: float) -> float:
    """The money amount whose utility equals ``q`` utiles."""
    return utility.inverse(q)
