from __future__ import annotations

import math
import random
import time
from dataclasses import replace

import pytest

from conftest import brute_force_q, random_board

from dond import (
    Action,
    BudgetError,
    CRRAUtility,
    DomainError,
    ExpectedValueBanker,
    GameSpec,
    GameState,
    LogUtility,
    MultiplierSchedule,
    OnlineRule,
    PrizeLadder,
    RoundSchedule,
    action_value_series,
    optimal_policy,
    q_values,
)
from dond.replication import calibrate_multipliers, load_dataset
from dond.solver import SolverGuard, estimate_edges


def _spec(values, banker, utility, schedule=None):
    ladder = PrizeLadder.from_values(values)
    schedule = RoundSchedule(schedule or (1,) * (len(ladder) - 1))
    return GameSpec(ladder, schedule, banker, utility)


# --- worked-example regressions (exact arithmetic, frozen) -------------------

def test_log_expected_value_board_regression():
    spec = _spec([750, 500, 25], ExpectedValueBanker(), LogUtility())
    result = q_values(spec, spec.initial_state())
    assert result.offer == 425.0
    assert result.q_deal == pytest.approx(6.052089168924417, abs=1e-12)
    assert result.q_nodeal == pytest.approx(5.989239526853827, abs=1e-12)
    assert result.action is Action.DEAL


def test_log_online_board_regression():
    spec = _spec([750, 500, 25], OnlineRule(), LogUtility())
    root = spec.initial_state()
    result = q_values(spec, root)
    assert result.offer == 241.25
    assert result.q_deal == pytest.approx(5.485833740219095, abs=1e-12)
    assert result.q_nodeal == pytest.approx(5.764893349137030, abs=1e-12)
    assert result.ce_nodeal == pytest.approx(318.90503072577256, rel=1e-12)
    assert result.action is Action.NO_DEAL

    # the three two-prize subgames, exact values
    ladder = spec.ladder
    expected = {
        (500.0, 750.0): (6.417340652476273, 6.246591144275243, Action.NO_DEAL, 516.25),
        (25.0, 750.0): (4.919474515699278, 5.630315322774329, Action.DEAL, 278.75),
        (25.0, 500.0): (4.716741961645196, 5.247024072160486, Action.DEAL, 190.0),
    }
    for values, (q_nodeal, q_deal, action, offer) in expected.items():
        state = GameState.from_prizes(ladder, values, round=1)
        sub = q_values(spec, state)
        assert sub.q_nodeal == pytest.approx(q_nodeal, abs=1e-12)
        assert sub.q_deal == pytest.approx(q_deal, abs=1e-12)
        assert sub.offer == pytest.approx(offer)
        assert sub.action is action


def test_online_board_full_policy_structure():
    spec = _spec([750, 500, 25], OnlineRule(), LogUtility())
    policy = optimal_policy(spec)
    by_values = {
        state.prize_values(spec.ladder): result.action for state, result in policy.items()
    }
    assert by_values[(25.0, 500.0, 750.0)] is Action.NO_DEAL
    assert by_values[(500.0, 750.0)] is Action.NO_DEAL
    assert by_values[(25.0, 750.0)] is Action.DEAL
    assert by_values[(25.0, 500.0)] is Action.DEAL
    # terminal certainties
    for single in ((25.0,), (500.0,), (750.0,)):
        assert by_values[single] is Action.DEAL


def test_terminal_state_normalization():
    spec = _spec([100], ExpectedValueBanker(), LogUtility(), schedule=())
    result = q_values(spec, spec.initial_state())
    assert result.q_deal == result.q_nodeal == pytest.approx(math.log(100))
    assert result.offer == 100.0
    assert result.ce_nodeal == 100.0  # exact, not via the inverse
    assert result.action is Action.DEAL


def test_two_prize_board_jensen_deal_under_crra():
    for gamma in (0.2, 0.7, 1.0, 1.8, 3.5):
        spec = _spec([40, 60], ExpectedValueBanker(), CRRAUtility(gamma))
        result = q_values(spec, spec.initial_state())
        assert result.action is Action.DEAL
        assert result.q_deal > result.q_nodeal


# --- exactness and structural properties --------------------------------------

def test_oracle_equivalence_fifty_random_boards():
    rng = random.Random(2024)
    for _ in range(50):
        spec, _ = random_board(rng)
        root = spec.initial_state()
        result = q_values(spec, root)
        q_deal, q_nodeal, offer = brute_force_q(spec, spec.ladder.prizes, 0)
        assert result.q_deal == pytest.approx(q_deal, rel=1e-10, abs=1e-10)
        assert result.q_nodeal == pytest.approx(q_nodeal, rel=1e-10, abs=1e-10)
        assert result.offer == pytest.approx(offer, rel=1e-12)


def test_bellman_consistency_recomputed_independently():
    rng = random.Random(77)
    for _ in range(25):
        spec, _ = random_board(rng)
        policy = optimal_policy(spec)
        for state, result in policy.items():
            if state.size == 1:
                continue
            opens = spec.schedule.opens_at(state.round)
            from dond import successor_states

            acc = 0.0
            for child, p in successor_states(state, opens):
                child_result = policy[child]
                acc += p * max(child_result.q_deal, child_result.q_nodeal)
            assert result.q_nodeal == pytest.approx(acc, rel=1e-10, abs=1e-10)


def test_policy_covers_exactly_the_reachable_states():
    spec = _spec([1, 2, 3, 4, 5], ExpectedValueBanker(), LogUtility(), schedule=(2, 1, 1))
    policy = optimal_policy(spec)
    sizes = {}
    for state in policy:
        sizes.setdefault(state.round, set()).add(state.size)
    assert sizes == {0: {5}, 1: {3}, 2: {2}, 3: {1}}
    assert len([s for s in policy if s.round == 1]) == math.comb(5, 2)
    for state, result in policy.items():
        again = q_values(spec, state)
        assert again == result


class _AffineUtility:
    """a * u + b: same ordering, different utiles. Test-only wrapper."""

    def __init__(self, base, a, b):
        assert a > 0
        self.base, self.a, self.b = base, a, b

    def value(self, x):
        return self.a * self.base.value(x) + self.b

    def inverse(self, q):
        return self.base.inverse((q - self.b) / self.a)

    def score(self, x):
        return self.value(x)

    def score_to_q(self, s):
        return s

    def ce_from_score(self, s):
        return self.inverse(s)


def test_affine_rescaling_never_changes_actions():
    rng = random.Random(4242)
    for _ in range(20):
        spec, _ = random_board(rng, max_prizes=5)
        wrapped = replace(
            spec, utility=_AffineUtility(spec.utility, rng.uniform(0.1, 10), rng.uniform(-5, 5))
        )
        base_policy = optimal_policy(spec)
        wrapped_policy = optimal_policy(wrapped)
        assert set(base_policy) == set(wrapped_policy)
        for state in base_policy:
            assert base_policy[state].action is wrapped_policy[state].action, state


def test_raising_multipliers_weakly_raises_both_qs():
    rng = random.Random(31)
    for _ in range(20):
        spec, _ = random_board(rng, max_prizes=5)
        if not isinstance(spec.banker, MultiplierSchedule):
            spec = replace(
                spec,
                banker=MultiplierSchedule(
                    tuple(rng.uniform(0.3, 1.2) for _ in spec.schedule.opens_per_round)
                ),
            )
        bump = tuple(m + rng.uniform(0.0, 0.3) for m in spec.banker.multipliers)
        raised = replace(spec, banker=MultiplierSchedule(bump, spec.banker.extrapolation))
        low_policy = optimal_policy(spec)
        high_policy = optimal_policy(raised)
        for state in low_policy:
            assert high_policy[state].q_deal >= low_policy[state].q_deal - 1e-12
            assert high_policy[state].q_nodeal >= low_policy[state].q_nodeal - 1e-12


def test_zero_multiplier_offer_rejected_by_log_utility():
    spec = _spec([10, 20], MultiplierSchedule((0.0,)), LogUtility())
    with pytest.raises(DomainError):
        q_values(spec, spec.initial_state())


# --- guards and validation ----------------------------------------------------

def test_state_round_consistency_enforced():
    spec = _spec([750, 500, 25], ExpectedValueBanker(), LogUtility())
    ladder = spec.ladder
    with pytest.raises(DomainError):
        q_values(spec, GameState.from_prizes(ladder, [750, 500, 25], round=1))
    with pytest.raises(DomainError):
        q_values(spec, GameState.from_prizes(ladder, [750], round=1))


def test_schedule_must_play_to_one_prize():
    ladder = PrizeLadder.from_values([1, 2, 3, 4])
    with pytest.raises(DomainError):
        GameSpec(ladder, RoundSchedule((1,)), ExpectedValueBanker(), LogUtility())
    with pytest.raises(DomainError):
        GameSpec(ladder, RoundSchedule((2, 2)), ExpectedValueBanker(), LogUtility())


def test_prize_count_guard():
    values = list(range(1, 25))  # 24 prizes
    spec = _spec(values, ExpectedValueBanker(), LogUtility())
    with pytest.raises(BudgetError):
        q_values(spec, spec.initial_state())


def test_edge_budget_guard_and_estimate():
    spec = _spec([1, 2, 3, 4, 5, 6], ExpectedValueBanker(), LogUtility())
    est = estimate_edges(6, spec.schedule)
    assert est == 6 + 6 * 5 + 15 * 4 + 20 * 3 + 15 * 2
    tight = SolverGuard(max_edges=est - 1)
    with pytest.raises(BudgetError) as err:
        q_values(spec, spec.initial_state(), guard=tight)
    assert "budget" in str(err.value)
    q_values(spec, spec.initial_state(), guard=SolverGuard(max_edges=est))


def test_env_var_overrides_edge_budget(monkeypatch):
    spec = _spec([1, 2, 3, 4, 5, 6], ExpectedValueBanker(), LogUtility())
    monkeypatch.setenv("DOND_GUARD_EDGES", "10")
    with pytest.raises(BudgetError):
        q_values(spec, spec.initial_state())
    monkeypatch.setenv("DOND_GUARD_EDGES", "1e9")
    q_values(spec, spec.initial_state())
    monkeypatch.setenv("DOND_GUARD_EDGES", "not-a-number")
    with pytest.raises(DomainError):
        q_values(spec, spec.initial_state())


def test_solve_runtime_is_fast():
    spec = _spec([750, 500, 25], ExpectedValueBanker(), LogUtility())
    start = time.perf_counter()
    q_values(spec, spec.initial_state())
    assert time.perf_counter() - start < 1.0


# --- evolving-value series ----------------------------------------------------

def test_series_risk_neutral_rows_are_expectations():
    traj = load_dataset("suzanne").slice_from(6)
    schedule = calibrate_multipliers(traj)
    spec = GameSpec(traj.ladder(), traj.schedule(), schedule, LogUtility())
    rows = action_value_series(spec, traj, [0.0])
    by_round = {r.round: r for r in rows}

    # ce at gamma=0 equals the probability-weighted mean of next-round
    # max(offer, ce), recomputed here from the policy
    policy = optimal_policy(replace(spec, utility=CRRAUtility(0.0)))
    from dond import successor_states

    state = traj.state_at(0)
    acc = 0.0
    for child, p in successor_states(state, 1):
        res = policy[child]
        acc += p * max(res.offer, res.ce_nodeal)
    assert by_round[0].continuation_ce == pytest.approx(acc, rel=1e-9)


def test_series_frank_terminal_round_always_deals_for_positive_gamma():
    traj = load_dataset("frank").slice_from(6)
    schedule = calibrate_multipliers(traj)
    spec = GameSpec(traj.ladder(), traj.schedule(), schedule, LogUtility())
    rows = action_value_series(spec, traj, [0.5, 1.0, 1.5], round_offset=7)
    for row in rows:
        if row.round == 9:
            assert row.deal_value == pytest.approx(6000.0, rel=1e-9)
            assert row.continuation_ce < row.deal_value


def test_series_suzanne_crossing_at_final_round():
    traj = load_dataset("suzanne").slice_from(6)
    schedule = calibrate_multipliers(traj)
    spec = GameSpec(traj.ladder(), traj.schedule(), schedule, LogUtility())
    rows = action_value_series(spec, traj, [1.54085], round_offset=7)
    by_round = {r.round: r for r in rows}
    assert by_round[7].continuation_ce > by_round[7].deal_value
    # 1.54085 is the round-8 indifference point; the values meet there
    assert by_round[8].continuation_ce == pytest.approx(by_round[8].deal_value, rel=1e-4)
    assert by_round[9].continuation_ce < by_round[9].deal_value


def test_series_requires_matching_board():
    traj = load_dataset("suzanne").slice_from(6)
    spec = _spec([1, 2, 3, 4], ExpectedValueBanker(), LogUtility())
    with pytest.raises(DomainError):
        action_value_series(spec, traj, [0.5])
