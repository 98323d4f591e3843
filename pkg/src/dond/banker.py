"""Banker offer models and implied-multiplier calibration."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum

from .core import GameState, PrizeLadder, state_mean
from .errors import DomainError


class Extrapolation(Enum):
    HOLD_LAST = "hold_last"
    LINEAR_TREND = "linear_trend"


@dataclass(frozen=True)
class ExpectedValueBanker:
    """Offers the mean of the remaining prizes."""

    def offer(self, state: GameState, ladder: PrizeLadder) -> float:
        return state_mean(state, ladder)


@dataclass(frozen=True)
class MultiplierSchedule:
    """Offers a round-indexed fraction of the remaining-prize mean.

    Multipliers above 1 are legal: real bankers have been observed offering
    119.88% of expected value. Rounds past the observed schedule are filled
    by the configured extrapolation: hold the last value, or extend a
    least-squares linear trend (clamped at zero).
    """

    multipliers: tuple[float, ...]
    extrapolation: Extrapolation = Extrapolation.HOLD_LAST

    def __post_init__(self) -> None:
        for i, m in enumerate(self.multipliers):
            if m < 0:
                raise DomainError(f"multiplier #{i} must be nonnegative, got {m!r}")

    def multiplier_for_round(self, round_index: int) -> float:
        if round_index < 0:
            raise DomainError(f"round index must be nonnegative, got {round_index}")
        if not self.multipliers:
            raise DomainError("cannot extrapolate from an empty multiplier schedule")
        if round_index < len(self.multipliers):
            return self.multipliers[round_index]
        if self.extrapolation is Extrapolation.HOLD_LAST or len(self.multipliers) == 1:
            return self.multipliers[-1]
        slope, intercept = statistics.linear_regression(
            range(len(self.multipliers)), self.multipliers
        )
        return max(0.0, intercept + slope * round_index)

    def offer(self, state: GameState, ladder: PrizeLadder) -> float:
        return self.multiplier_for_round(state.round) * state_mean(state, ladder)


def _expected_value_fallback() -> "BankerModel":
    return ExpectedValueBanker()


@dataclass(frozen=True)
class OnlineRule:
    """The published online-game formula for two- and three-prize boards.

    With three prizes left the offer is 0.305*big + 0.5*small; with two,
    0.355*big + 0.5*small. The rule says nothing about other board sizes,
    so those delegate to a configurable fallback (expected value unless
    overridden).
    """

    coeff3_big: float = 0.305
    coeff3_small: float = 0.5
    coeff2_big: float = 0.355
    coeff2_small: float = 0.5
    fallback: "BankerModel" = field(default_factory=_expected_value_fallback)

    def rule_for_size(self, size: int) -> str:
        if size == 3:
            return "online-3"
        if size == 2:
            return "online-2"
        return "fallback"

    def offer(self, state: GameState, ladder: PrizeLadder) -> float:
        values = state.prize_values(ladder)
        if len(values) == 3:
            return self.coeff3_big * max(values) + self.coeff3_small * min(values)
        if len(values) == 2:
            return self.coeff2_big * max(values) + self.coeff2_small * min(values)
        return self.fallback.offer(state, ladder)


BankerModel = ExpectedValueBanker | MultiplierSchedule | OnlineRule


def banker_offer(model: BankerModel, state: GameState, ladder: PrizeLadder) -> float:
    """The banker's offer at ``state``."""
    return model.offer(state, ladder)


def implied_multiplier(offer: float, state: GameState, ladder: PrizeLadder) -> float:
    """The offer expressed as a fraction of the remaining-prize mean."""
    if offer < 0:
        raise DomainError(f"offer must be nonnegative, got {offer!r}")
    return offer / state_mean(state, ladder)
