"""Exact backward-induction Q-values over all reachable subset states.

The recursion is memoized on (remaining-set bitmask, round index); the round
matters because multiplier-schedule bankers are round-indexed. Opening k
cases in one round is modeled as a uniform draw over the C(n, k) removal
subsets, which is identical to opening them one at a time with no offers in
between.

Internally the solver works in each utility family's *score* space (see
``dond.core``): scores order money exactly like utiles but keep full
relative precision where the utile representation saturates (CRRA far from
gamma = 1 on large boards). Reported Q-values are converted back to utiles;
at double-precision saturation the two reported Q-values can collide even
though the underlying preference is strict, in which case the recorded
action follows the preference. Summation over successors runs in ascending
bitmask order with plain double accumulation, so independent recomputations
match bit for bit.

Each solve call owns a private memo table, so concurrent solves over
immutable specs are safe.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

from .banker import BankerModel, banker_offer
from .core import (
    Action,
    CRRAUtility,
    GameState,
    PrizeLadder,
    RoundSchedule,
    UtilitySpec,
    successor_states,
)
from .errors import BudgetError, DomainError
from .trajectory import Trajectory

GUARD_EDGES_ENV = "DOND_GUARD_EDGES"


@dataclass(frozen=True)
class SolverGuard:
    """Refusal thresholds for combinatorially explosive solves.

    Full 26-box boards with multi-case rounds can silently blow up; the
    defaults refuse anything beyond 22 prizes or half a billion estimated
    transition edges. ``DOND_GUARD_EDGES`` overrides the edge budget.
    """

    max_prizes: int = 22
    max_edges: float = 5e8

    @classmethod
    def from_env(cls) -> "SolverGuard":
        raw = os.environ.get(GUARD_EDGES_ENV)
        if raw is None:
            return cls()
        try:
            return cls(max_edges=float(raw))
        except ValueError:
            raise DomainError(f"{GUARD_EDGES_ENV} must be a number, got {raw!r}") from None


@dataclass(frozen=True)
class GameSpec:
    """Everything needed to value a game: board, schedule, banker, utility."""

    ladder: PrizeLadder
    schedule: RoundSchedule
    banker: BankerModel
    utility: UtilitySpec

    def __post_init__(self) -> None:
        total = sum(self.schedule.opens_per_round)
        if total != len(self.ladder) - 1:
            raise DomainError(
                f"schedule opens {total} cases but the board needs exactly "
                f"{len(self.ladder) - 1} opened to play down to one prize"
            )

    def expected_size(self, round_index: int) -> int:
        """Remaining-prize count the schedule implies at an offer point."""
        if not 0 <= round_index <= len(self.schedule):
            raise DomainError(f"round {round_index} is outside the schedule")
        return len(self.ladder) - sum(self.schedule.opens_per_round[:round_index])

    def round_for_size(self, size: int) -> int:
        for r in range(len(self.schedule) + 1):
            if self.expected_size(r) == size:
                return r
        raise DomainError(f"no offer point leaves exactly {size} prizes under this schedule")

    def initial_state(self) -> GameState:
        return GameState(self.ladder.full_mask, 0)


@dataclass(frozen=True)
class QResult:
    """Q-values of the two actions at one state, plus the derived quantities."""

    q_deal: float
    q_nodeal: float
    offer: float
    ce_nodeal: float
    action: Action


def estimate_edges(n_prizes: int, schedule: RoundSchedule, start_round: int = 0) -> int:
    """Upper bound on successor expansions for a solve from ``start_round``."""
    edges = 0
    size = n_prizes
    for r in range(start_round, len(schedule)):
        k = schedule.opens_at(r)
        if size - k < 1:
            break
        edges += math.comb(n_prizes, n_prizes - size) * math.comb(size, k)
        size -= k
    return edges


def _check_guard(
    spec: GameSpec, state: GameState, guard: SolverGuard | None, scale: float = 1.0
) -> None:
    """Refuse solves over budget; ``scale`` multiplies the edge estimate for
    callers that re-solve many times (threshold grid scans)."""
    guard = guard or SolverGuard.from_env()
    if state.size > guard.max_prizes:
        raise BudgetError(
            f"{state.size} remaining prizes exceeds the guard limit of "
            f"{guard.max_prizes}; pass a larger SolverGuard to override"
        )
    edges = estimate_edges(state.size, spec.schedule, state.round) * scale
    if edges > guard.max_edges:
        raise BudgetError(
            f"solve needs about {edges:.3g} transition edges, over the budget "
            f"of {guard.max_edges:.3g}; set {GUARD_EDGES_ENV} to override"
        )


class _Solve:
    """One backward-induction pass with a private memo table."""

    def __init__(self, spec: GameSpec):
        self.spec = spec
        self.memo: dict[tuple[int, int], tuple[float, float, float]] = {}

    def scores(self, state: GameState) -> tuple[float, float, float]:
        """(score_deal, score_nodeal, offer) at ``state``."""
        key = (state.remaining, state.round)
        hit = self.memo.get(key)
        if hit is not None:
            return hit

        u = self.spec.utility
        if state.size == 1:
            # Terminal certainty: the offer has converged to the last prize.
            prize = state.prize_values(self.spec.ladder)[0]
            s = u.score(prize)
            result = (s, s, prize)
        else:
            offer = banker_offer(self.spec.banker, state, self.spec.ladder)
            score_deal = u.score(offer)
            opens = self.spec.schedule.opens_at(state.round)
            acc = 0.0
            successors = successor_states(state, opens)
            for child, p in successors:
                cd, cn, _ = self.scores(child)
                acc += p * max(cd, cn)
            result = (score_deal, acc, offer)

        self.memo[key] = result
        return result


def _validate_state(spec: GameSpec, state: GameState) -> None:
    if state.remaining & ~spec.ladder.full_mask:
        raise DomainError("state references prizes outside the board")
    if state.size != spec.expected_size(state.round):
        raise DomainError(
            f"{state.size} remaining prizes is inconsistent with round "
            f"{state.round}: the schedule implies {spec.expected_size(state.round)}"
        )


def _to_qresult(spec: GameSpec, state: GameState, scores: tuple[float, float, float]) -> QResult:
    score_deal, score_nodeal, offer = scores
    u = spec.utility
    if state.size == 1:
        q = u.score_to_q(score_deal)
        return QResult(q, q, offer, offer, Action.DEAL)
    action = Action.DEAL if score_deal >= score_nodeal else Action.NO_DEAL
    return QResult(
        q_deal=u.score_to_q(score_deal),
        q_nodeal=u.score_to_q(score_nodeal),
        offer=offer,
        ce_nodeal=u.ce_from_score(score_nodeal),
        action=action,
    )


def q_values(spec: GameSpec, state: GameState, guard: SolverGuard | None = None) -> QResult:
    """Q-values and optimal action at one state.

    Deal yields the utility of the current offer; No Deal yields the
    probability-weighted continuation value with zero immediate utility.
    Ties break toward Deal (certainty preferred at indifference).
    """
    _validate_state(spec, state)
    _check_guard(spec, state, guard)
    return _to_qresult(spec, state, _Solve(spec).scores(state))


def score_difference(spec: GameSpec, state: GameState, guard: SolverGuard | None = None) -> float:
    """score(No Deal) - score(Deal); positive means No Deal is strictly optimal.

    Same sign as q_nodeal - q_deal but computed in score space, which stays
    well-conditioned at deep risk aversion where utiles saturate.
    """
    _validate_state(spec, state)
    _check_guard(spec, state, guard)
    score_deal, score_nodeal, _ = _Solve(spec).scores(state)
    return score_nodeal - score_deal


def optimal_policy(spec: GameSpec, guard: SolverGuard | None = None) -> dict[GameState, QResult]:
    """One QResult per state reachable from the full board under the schedule."""
    root = spec.initial_state()
    _check_guard(spec, root, guard)
    solve = _Solve(spec)
    solve.scores(root)
    policy: dict[GameState, QResult] = {}
    for (mask, round_index), scores in solve.memo.items():
        state = GameState(mask, round_index)
        policy[state] = _to_qresult(spec, state, scores)
    return policy


@dataclass(frozen=True)
class SeriesRow:
    round: int
    gamma: float
    deal_value: float
    continuation_ce: float


def action_value_series(
    spec: GameSpec,
    traj: Trajectory,
    gammas: list[float] | tuple[float, ...],
    round_offset: int = 0,
    guard: SolverGuard | None = None,
) -> list[SeriesRow]:
    """Evolving money values of the two actions along an observed trajectory.

    For each observed round and each gamma: the banker's offer (the Deal
    value) and the continuation certainty equivalent (the No Deal value),
    under CRRA at that gamma. This is the data behind the evolving-values
    figures; ``round_offset`` shifts the emitted round labels.
    """
    if tuple(traj.ladder().prizes) != spec.ladder.prizes:
        raise DomainError("trajectory board does not match the game spec ladder")
    rows = []
    for g in gammas:
        spec_g = replace(spec, utility=CRRAUtility(float(g)))
        for i in range(len(traj.rounds)):
            state = traj.state_at(i)
            result = q_values(spec_g, state, guard)
            rows.append(
                SeriesRow(
                    round=i + round_offset,
                    gamma=float(g),
                    deal_value=result.offer,
                    continuation_ce=result.ce_nodeal,
                )
            )
    rows.sort(key=lambda r: (r.round, r.gamma))
    return rows
