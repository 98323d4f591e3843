"""Risk-aversion inference: indifference breakpoints, choice bounds, benefits.

``decision_thresholds`` maps a state to its piecewise action-in-gamma policy
under CRRA utility. Breakpoints of descendant states are propagated upward
first: the parent's Q-difference is smooth between descendant switch points
and is root-found inside each such interval. A 512-point safety grid per
interval catches sign changes the propagation alone would miss; every grid
hit is refined by bracketed root finding to |dgamma| <= 1e-7.

``infer_gamma_bounds`` turns a contestant's observed choices into the gamma
constraints they imply. A No Deal observation caps gamma from above; a Deal
bounds it from below, and since Deal ends the game at most one lower bound
can ever exist. A No Deal against an offer that Deal dominates everywhere on
gamma > 0 is flagged infeasible (risk seeking), and such rounds are excluded
from the reported intersection, mirroring the separate treatment of the
terminal risk-seeking choice.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace

from scipy.optimize import brentq

from .banker import BankerModel, banker_offer
from .core import Action, CRRAUtility, GameState, successor_states
from .errors import DomainError, RangeError, ValidationError
from .solver import GameSpec, SolverGuard, _check_guard
from .trajectory import Trajectory

GAMMA_MIN = -5.0
GAMMA_MAX = 20.0
DEFAULT_GAMMA_RANGE = (GAMMA_MIN, GAMMA_MAX)
GRID_POINTS = 512
ROOT_TOL = 1e-7
DEDUP_TOL = 1e-6
MIN_INTERVAL_WIDTH = 1e-6


@dataclass(frozen=True)
class BranchCrossing:
    """Crossing of the Q-difference with the downstream policy frozen.

    The policy is pinned to its optimal actions at the midpoint of
    (branch_lo, branch_hi) and the frozen difference is root-found over the
    whole gamma range; these are diagnostics, not action switches.
    """

    branch_lo: float
    branch_hi: float
    crossing: float | None


@dataclass(frozen=True)
class GammaPolicy:
    """Piecewise action-in-gamma policy at one state.

    ``breakpoints`` are this state's own action switches (strictly
    ascending, adjacent intervals carry distinct actions); ``actions`` has
    one entry per interval between them, ends clamped to the searched
    range. ``child_breakpoints`` are the switch points of strict
    descendants, reported for diagnosis.
    """

    gamma_lo: float
    gamma_hi: float
    breakpoints: tuple[float, ...]
    actions: tuple[Action, ...]
    child_breakpoints: tuple[float, ...] = ()
    branch_crossings: tuple[BranchCrossing, ...] = ()

    def action_at(self, gamma: float) -> Action:
        if not self.gamma_lo <= gamma <= self.gamma_hi:
            raise DomainError(f"gamma {gamma} outside the policy range")
        return self.actions[bisect_right(self.breakpoints, gamma)]

    def intervals(self) -> list[tuple[float, float, Action]]:
        edges = [self.gamma_lo, *self.breakpoints, self.gamma_hi]
        return [(edges[i], edges[i + 1], a) for i, a in enumerate(self.actions)]

    def feasible_intervals(self, action: Action) -> list[tuple[float, float]]:
        return [(a, b) for a, b, act in self.intervals() if act is action]


def _validate_range(gamma_range: tuple[float, float] | None) -> tuple[float, float]:
    if gamma_range is None:
        return DEFAULT_GAMMA_RANGE
    lo, hi = float(gamma_range[0]), float(gamma_range[1])
    if not (GAMMA_MIN <= lo < hi <= GAMMA_MAX):
        raise DomainError(
            f"gamma range must satisfy {GAMMA_MIN} <= lo < hi <= {GAMMA_MAX}, got ({lo}, {hi})"
        )
    return lo, hi


class _Node:
    """Prebuilt transition skeleton entry: offer and successor keys."""

    __slots__ = ("offer", "prize", "children", "prob")

    def __init__(self, offer, prize, children, prob):
        self.offer = offer
        self.prize = prize
        self.children = children
        self.prob = prob


class _ThresholdFinder:
    """Shared machinery for one board: skeleton, evaluators, policy cache."""

    def __init__(self, spec: GameSpec, lo: float, hi: float):
        self.spec = spec
        self.lo = lo
        self.hi = hi
        self.nodes: dict[tuple[int, int], _Node] = {}
        self.policies: dict[tuple[int, int], GammaPolicy] = {}
        self._diagnosed: set[tuple[int, int]] = set()

    def _build(self, state: GameState) -> tuple[int, int]:
        key = (state.remaining, state.round)
        if key in self.nodes:
            return key
        if state.size == 1:
            prize = state.prize_values(self.spec.ladder)[0]
            self.nodes[key] = _Node(prize, prize, (), 0.0)
            return key
        offer = banker_offer(self.spec.banker, state, self.spec.ladder)
        successors = successor_states(state, self.spec.schedule.opens_at(state.round))
        children = tuple(self._build(child) for child, _ in successors)
        self.nodes[key] = _Node(offer, None, children, 1.0 / len(children))
        return key

    def _evaluate(self, key, gamma: float, frozen=None):
        """(score_deal, score_nodeal) at ``key`` under CRRA(gamma).

        With ``frozen`` set, descendant nodes follow the given action map
        instead of optimizing; the node itself still reports both actions.
        Accumulation order matches the solver (ascending successor masks,
        plain double sums).
        """
        u = CRRAUtility(gamma)
        memo: dict = {}

        def downstream(k):
            if k in memo:
                return memo[k]
            node = self.nodes[k]
            if not node.children:
                v = u.score(node.prize)
            else:
                deal = u.score(node.offer)
                cont = 0.0
                for c in node.children:
                    cont += node.prob * downstream(c)
                if frozen is None:
                    v = max(deal, cont)
                else:
                    v = deal if frozen[k] is Action.DEAL else cont
            memo[k] = v
            return v

        node = self.nodes[key]
        if not node.children:
            s = u.score(node.prize)
            return s, s
        score_deal = u.score(node.offer)
        score_nodeal = 0.0
        for c in node.children:
            score_nodeal += node.prob * downstream(c)
        return score_deal, score_nodeal

    def diff(self, key, gamma: float, frozen=None) -> float:
        deal, nodeal = self._evaluate(key, gamma, frozen)
        d = nodeal - deal
        if not math.isfinite(d):
            raise RangeError(f"Q-difference is non-finite at gamma={gamma}")
        return d

    def _scan(self, f, lo: float, hi: float) -> list[float]:
        """Sign changes of ``f`` on [lo, hi], refined by bracketed root finding."""
        xs = [lo + (hi - lo) * i / (GRID_POINTS - 1) for i in range(GRID_POINTS)]
        crossings = []
        prev_x, prev_d = xs[0], f(xs[0])
        for x in xs[1:]:
            d = f(x)
            if (prev_d > 0) != (d > 0):
                if prev_d == 0.0 or d == 0.0:
                    crossings.append(prev_x if prev_d == 0.0 else x)
                else:
                    crossings.append(float(brentq(f, prev_x, x, xtol=ROOT_TOL)))
            prev_x, prev_d = x, d
        return crossings

    def _frozen_actions(self, key, gamma: float) -> dict:
        """Optimal action of every node in the subtree at one gamma."""
        u = CRRAUtility(gamma)
        actions: dict = {}
        memo: dict = {}

        def visit(k):
            if k in memo:
                return memo[k]
            node = self.nodes[k]
            if not node.children:
                v = u.score(node.prize)
                actions[k] = Action.DEAL
            else:
                deal = u.score(node.offer)
                cont = 0.0
                for c in node.children:
                    cont += node.prob * visit(c)
                actions[k] = Action.DEAL if deal >= cont else Action.NO_DEAL
                v = max(deal, cont)
            memo[k] = v
            return v

        visit(key)
        return actions

    def policy(self, state: GameState, diagnostics: bool = False) -> GammaPolicy:
        key = self._build(state)
        cached = self.policies.get(key)
        if cached is not None and (not diagnostics or key in self._diagnosed):
            return cached

        node = self.nodes[key]
        if not node.children:
            pol = GammaPolicy(self.lo, self.hi, (), (Action.DEAL,))
            self.policies[key] = pol
            return pol

        # Descendant switch points delimit the smooth pieces of this
        # state's Q-difference.
        child_points: set[float] = set()
        for child_key in node.children:
            child_state = GameState(*child_key)
            child_pol = self.policy(child_state)
            child_points.update(child_pol.breakpoints)
            child_points.update(child_pol.child_breakpoints)
        inner: list[float] = []
        for p in sorted(child_points):
            if self.lo < p < self.hi and (not inner or p - inner[-1] > DEDUP_TOL):
                inner.append(p)

        edges = [self.lo, *inner, self.hi]
        f = lambda g: self.diff(key, g)
        crossings: list[float] = []
        for a, b in zip(edges, edges[1:]):
            crossings.extend(self._scan(f, a, b))

        crossings.sort()
        deduped: list[float] = []
        for c in crossings:
            if self.lo < c < self.hi and (not deduped or c - deduped[-1] > DEDUP_TOL):
                deduped.append(c)

        # Record actions per interval; drop breakpoints that do not switch
        # the action (tangential touches).
        while True:
            bounds = [self.lo, *deduped, self.hi]
            acts = []
            for a, b in zip(bounds, bounds[1:]):
                acts.append(Action.NO_DEAL if f((a + b) / 2) > 0 else Action.DEAL)
            drop = next(
                (i for i in range(len(deduped)) if acts[i] is acts[i + 1]), None
            )
            if drop is None:
                break
            deduped.pop(drop)

        branch_crossings: tuple[BranchCrossing, ...] = ()
        if diagnostics:
            found = []
            for a, b in zip(edges, edges[1:]):
                frozen = self._frozen_actions(key, (a + b) / 2)
                frozen_f = lambda g: self.diff(key, g, frozen)
                hits = self._scan(frozen_f, self.lo, self.hi)
                found.append(BranchCrossing(a, b, hits[0] if hits else None))
            branch_crossings = tuple(found)
            self._diagnosed.add(key)

        pol = GammaPolicy(
            self.lo,
            self.hi,
            tuple(deduped),
            tuple(acts),
            child_breakpoints=tuple(inner),
            branch_crossings=branch_crossings,
        )
        self.policies[key] = pol
        return pol


def decision_thresholds(
    spec: GameSpec,
    state: GameState,
    gamma_range: tuple[float, float] | None = None,
    guard: SolverGuard | None = None,
    diagnostics: bool = True,
) -> GammaPolicy:
    """Piecewise action-in-gamma policy at ``state`` under CRRA utility.

    The utility carried by ``spec`` is ignored; gamma is the free variable.
    """
    lo, hi = _validate_range(gamma_range)
    _check_guard(spec, state, guard, scale=GRID_POINTS)
    finder = _ThresholdFinder(spec, lo, hi)
    return finder.policy(state, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Bounds from observed choices
# ---------------------------------------------------------------------------

CONSTRAINT_UPPER = "upper"
CONSTRAINT_LOWER = "lower"
CONSTRAINT_NONE = "none"
CONSTRAINT_INFEASIBLE = "infeasible"
CONSTRAINT_SET = "set"


@dataclass(frozen=True)
class RoundConstraint:
    round: int
    action: Action
    kind: str
    value: float | None
    feasible: tuple[tuple[float, float], ...]  # over gamma > 0
    policy: GammaPolicy


@dataclass(frozen=True)
class BoundsReport:
    gamma_lo: float
    gamma_hi: float
    per_round: tuple[RoundConstraint, ...]
    intersection: tuple[tuple[float, float], ...]  # empty when jointly infeasible
    infeasible_rounds: tuple[int, ...]

    @property
    def upper_bound(self) -> float | None:
        """The binding upper bound when the intersection is a single (0, c)."""
        if len(self.intersection) == 1:
            lo, hi = self.intersection[0]
            if lo <= MIN_INTERVAL_WIDTH and hi < self.gamma_hi - MIN_INTERVAL_WIDTH:
                return hi
        return None


def _clip_positive(intervals, hi) -> tuple[tuple[float, float], ...]:
    out = []
    for a, b in intervals:
        a2, b2 = max(a, 0.0), min(b, hi)
        if b2 - a2 > MIN_INTERVAL_WIDTH:
            out.append((a2, b2))
    return tuple(out)


def _intersect(xs, ys):
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if hi - lo > MIN_INTERVAL_WIDTH:
                out.append((lo, hi))
    return tuple(sorted(out))


def _classify(feasible, hi) -> tuple[str, float | None]:
    if not feasible:
        return CONSTRAINT_INFEASIBLE, None
    if len(feasible) == 1:
        a, b = feasible[0]
        starts_at_zero = a <= MIN_INTERVAL_WIDTH
        ends_at_hi = b >= hi - MIN_INTERVAL_WIDTH
        if starts_at_zero and ends_at_hi:
            return CONSTRAINT_NONE, None
        if starts_at_zero:
            return CONSTRAINT_UPPER, b
        if ends_at_hi:
            return CONSTRAINT_LOWER, a
    return CONSTRAINT_SET, None


def infer_gamma_bounds(
    traj: Trajectory,
    banker: BankerModel,
    gamma_range: tuple[float, float] | None = None,
    guard: SolverGuard | None = None,
    diagnostics_rounds: tuple[int, ...] = (),
) -> BoundsReport:
    """Convert a contestant's observed choices into gamma constraints.

    Rounds flagged infeasible for gamma > 0 (No Deal where Deal dominates
    throughout, the risk-seeking signature) are excluded from the reported
    intersection; everything else is intersected over gamma > 0.
    """
    lo, hi = _validate_range(gamma_range)
    if hi <= 0:
        raise DomainError("bounds inference needs a gamma range extending above 0")
    spec = GameSpec(traj.ladder(), traj.schedule(), banker, CRRAUtility(1.0))
    root = spec.initial_state()
    _check_guard(spec, root, guard, scale=GRID_POINTS)
    finder = _ThresholdFinder(spec, lo, hi)

    per_round: list[RoundConstraint] = []
    infeasible: list[int] = []
    intersection: tuple[tuple[float, float], ...] = ((0.0, hi),)
    for i, r in enumerate(traj.rounds):
        if r.decision is None:
            continue
        state = traj.state_at(i)
        policy = finder.policy(state, diagnostics=i in diagnostics_rounds)
        feasible = _clip_positive(policy.feasible_intervals(r.decision), hi)
        kind, value = _classify(feasible, hi)
        per_round.append(RoundConstraint(i, r.decision, kind, value, feasible, policy))
        if kind == CONSTRAINT_INFEASIBLE:
            infeasible.append(i)
        else:
            intersection = _intersect(intersection, feasible)

    return BoundsReport(lo, hi, tuple(per_round), intersection, tuple(infeasible))


def enjoyment_benefit(
    offer: float,
    prizes,
    gamma: float,
    cap_factor: float = 10.0,
    tolerance: float = 0.01,
) -> float:
    """Smallest terminal bonus b >= 0 that justifies refusing the final offer.

    Solves u(offer) = (u(p1 + b) + u(p2 + b)) / 2 for the CRRA utility at
    ``gamma`` by bracketed root finding to 0.01 currency units; returns 0
    when refusing is already justified at b = 0.
    """
    prizes = tuple(float(p) for p in prizes)
    if len(prizes) != 2:
        raise ValidationError(f"the terminal gamble has exactly two prizes, got {len(prizes)}")
    if not all(p > 0 for p in prizes) or not offer > 0:
        raise DomainError("offer and prizes must be positive")
    if not math.isfinite(gamma):
        raise DomainError(f"gamma must be finite, got {gamma!r}")

    u = CRRAUtility(gamma)

    def shortfall(b: float) -> float:
        return 0.5 * (u.value(prizes[0] + b) + u.value(prizes[1] + b)) - u.value(offer)

    if shortfall(0.0) >= 0:
        return 0.0
    cap = cap_factor * max(prizes)
    if shortfall(cap) < 0:
        raise RangeError(
            f"no benefit below the cap {cap} justifies refusing {offer}; "
            "the condition never holds"
        )
    return float(brentq(shortfall, 0.0, cap, xtol=tolerance))
