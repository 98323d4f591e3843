"""Shared oracles and randomized fixtures.

The brute-force solver here deliberately mirrors nothing of the engine's
internals: no bitmasks, no memoization, no score transform. It recurses over
plain prize tuples and works directly in utiles, so agreement with the
memoized solver is a genuine cross-check.
"""

from __future__ import annotations

import random
from itertools import combinations

from dond import (
    Action,
    CRRAUtility,
    ExpectedValueBanker,
    GameSpec,
    GameState,
    LogUtility,
    MultiplierSchedule,
    OnlineRule,
    PrizeLadder,
    RoundSchedule,
    Trajectory,
    banker_offer,
    optimal_policy,
    parse_trajectory,
    utility_value,
)


def brute_force_q(spec: GameSpec, remaining: tuple[float, ...], round_index: int):
    """(q_deal, q_nodeal, offer) by raw tree enumeration, utiles throughout."""
    remaining = tuple(sorted(remaining))
    state = GameState.from_prizes(spec.ladder, remaining, round=round_index)
    if len(remaining) == 1:
        q = utility_value(spec.utility, remaining[0])
        return q, q, remaining[0]
    offer = banker_offer(spec.banker, state, spec.ladder)
    q_deal = utility_value(spec.utility, offer)
    opens = spec.schedule.opens_at(round_index)
    children = list(combinations(remaining, len(remaining) - opens))
    total = 0.0
    for child in children:
        cd, cn, _ = brute_force_q(spec, child, round_index + 1)
        total += max(cd, cn) / len(children)
    return q_deal, total, offer


def random_board(rng: random.Random, max_prizes: int = 6):
    """A random (spec, gamma) pair: ladder, schedule, banker all randomized."""
    n = rng.randint(2, max_prizes)
    prizes = sorted(rng.sample(range(1, 2_000_000), n))
    # perturb off the integers so boards rarely collide
    prizes = [p * rng.uniform(0.5, 1.5) for p in prizes]
    prizes = sorted(set(prizes))
    while len(prizes) < 2:
        prizes.append(prizes[-1] * 2)
    ladder = PrizeLadder.from_values(prizes)

    opens = []
    left = len(prizes) - 1
    while left > 0:
        k = rng.randint(1, left)
        opens.append(k)
        left -= k
    schedule = RoundSchedule(tuple(opens))

    kind = rng.choice(["ev", "multipliers", "online"])
    if kind == "ev":
        banker = ExpectedValueBanker()
    elif kind == "online":
        banker = OnlineRule()
    else:
        banker = MultiplierSchedule(tuple(rng.uniform(0.3, 1.3) for _ in opens))

    gamma = rng.uniform(-2.0, 3.0)
    utility = LogUtility() if rng.random() < 0.25 else CRRAUtility(gamma)
    return GameSpec(ladder, schedule, banker, utility), gamma


def simulate_optimal_play(spec: GameSpec, rng: random.Random) -> Trajectory:
    """Play the optimal policy once; cases open uniformly at random."""
    policy = optimal_policy(spec)
    state = spec.initial_state()
    rounds = []
    while True:
        result = policy[state]
        remaining = state.prize_values(spec.ladder)
        rounds.append(
            {
                "remaining": list(remaining),
                "offer": result.offer,
                "decision": result.action.value,
            }
        )
        if result.action is Action.DEAL or state.size == 1:
            break
        opens = spec.schedule.opens_at(state.round)
        bits = [i for i in range(state.remaining.bit_length()) if state.remaining >> i & 1]
        for i in rng.sample(bits, opens):
            state = GameState(state.remaining ^ (1 << i), state.round)
        state = GameState(state.remaining, state.round + 1)
        if state.size == 1:
            break
    return parse_trajectory(
        {"contestant": "synthetic", "currency": "EUR", "rounds": rounds}
    )
