"""Observed contestant trajectories: schema, validation, derived games.

Wire schema (exact field names)::

    {
      "contestant": "Suzanne",
      "currency": "EUR",
      "rounds": [
        {"remaining": [0.5, 1000, 100000, 150000], "offer": 46000, "decision": "no_deal"},
        ...
      ]
    }

``offer`` and ``decision`` may be absent on a round; unknown extra keys are
ignored on read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import Action, GameState, PrizeLadder, RoundSchedule
from .errors import ValidationError


@dataclass(frozen=True)
class TrajectoryRound:
    remaining: tuple[float, ...]  # ascending
    offer: float | None = None
    decision: Action | None = None


@dataclass(frozen=True)
class Trajectory:
    contestant: str
    currency: str
    rounds: tuple[TrajectoryRound, ...]

    def ladder(self) -> PrizeLadder:
        """The board at the first observed offer point."""
        return PrizeLadder(self.rounds[0].remaining)

    def schedule(self) -> RoundSchedule:
        """Opens-per-round implied by the observed sets.

        Rounds past the last observation default to one case at a time, the
        standard end-game, so the schedule always plays down to one prize.
        """
        opens = [
            len(a.remaining) - len(b.remaining)
            for a, b in zip(self.rounds, self.rounds[1:])
        ]
        opens.extend([1] * (len(self.rounds[-1].remaining) - 1))
        return RoundSchedule(tuple(opens))

    def state_at(self, index: int) -> GameState:
        """The bitmask state of round ``index`` over this trajectory's ladder."""
        return GameState.from_prizes(self.ladder(), self.rounds[index].remaining, round=index)

    def slice_from(self, start: int) -> "Trajectory":
        if not 0 <= start < len(self.rounds):
            raise ValidationError(f"slice start {start} out of range")
        return Trajectory(self.contestant, self.currency, self.rounds[start:])

    def to_json_dict(self) -> dict:
        rounds = []
        for r in self.rounds:
            obj: dict = {"remaining": list(r.remaining)}
            if r.offer is not None:
                obj["offer"] = r.offer
            if r.decision is not None:
                obj["decision"] = r.decision.value
            rounds.append(obj)
        return {"contestant": self.contestant, "currency": self.currency, "rounds": rounds}


def _parse_round(obj, index: int) -> TrajectoryRound:
    if not isinstance(obj, dict):
        raise ValidationError(f"round {index} must be an object", round_index=index)
    remaining = obj.get("remaining")
    if not isinstance(remaining, list) or not remaining:
        raise ValidationError(f"round {index} needs a nonempty 'remaining' list", round_index=index)
    values = []
    for v in remaining:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValidationError(f"round {index} has a non-numeric prize {v!r}", round_index=index)
        if not v > 0:
            raise ValidationError(f"round {index} has a non-positive prize {v!r}", round_index=index)
        values.append(float(v))
    if len(set(values)) != len(values):
        raise ValidationError(f"round {index} lists a prize twice", round_index=index)

    offer = obj.get("offer")
    if offer is not None:
        if not isinstance(offer, (int, float)) or isinstance(offer, bool):
            raise ValidationError(f"round {index} offer must be a number", round_index=index)
        if not offer > 0:
            raise ValidationError(f"round {index} offer must be positive, got {offer!r}", round_index=index)
        offer = float(offer)

    decision = obj.get("decision")
    if decision is not None:
        try:
            decision = Action(decision)
        except ValueError:
            raise ValidationError(
                f"round {index} decision must be 'deal' or 'no_deal', got {decision!r}",
                round_index=index,
            ) from None

    return TrajectoryRound(tuple(sorted(values)), offer, decision)


def parse_trajectory(document: dict) -> Trajectory:
    """Validate a trajectory document and return the typed value.

    Enforces the structural invariants: each round's remaining set is a
    strict subset of the previous one, rounds carrying a decision carry an
    offer, and only the final recorded round may be a Deal.
    """
    if not isinstance(document, dict):
        raise ValidationError("trajectory document must be a JSON object")
    contestant = document.get("contestant")
    if not isinstance(contestant, str) or not contestant:
        raise ValidationError("trajectory needs a 'contestant' name")
    currency = document.get("currency")
    if not isinstance(currency, str) or not currency:
        raise ValidationError("trajectory needs a 'currency' label")
    raw_rounds = document.get("rounds")
    if not isinstance(raw_rounds, list) or not raw_rounds:
        raise ValidationError("trajectory needs a nonempty 'rounds' list")

    rounds = [_parse_round(obj, i) for i, obj in enumerate(raw_rounds)]

    for i in range(1, len(rounds)):
        prev, cur = set(rounds[i - 1].remaining), set(rounds[i].remaining)
        if not cur < prev:
            raise ValidationError(
                f"round {i} remaining set is not a strict subset of round {i - 1}",
                round_index=i,
            )
    for i, r in enumerate(rounds):
        if r.decision is not None and r.offer is None:
            raise ValidationError(f"round {i} has a decision but no offer", round_index=i)
        if r.decision is Action.DEAL and i != len(rounds) - 1:
            raise ValidationError(
                f"round {i} is a Deal but later rounds were recorded", round_index=i
            )

    return Trajectory(contestant, currency, tuple(rounds))


def load_trajectory(path: str | Path) -> Trajectory:
    """Read and validate a trajectory JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return parse_trajectory(document)
