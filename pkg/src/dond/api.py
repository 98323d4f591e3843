"""Stateless JSON API: payload codecs and request handlers.

Handlers are pure functions from parsed payloads to JSON-ready dicts; the
HTTP server and the CLI's ``--json`` mode share them, so identical inputs
produce structurally identical payloads on both surfaces.

Endpoints::

    GET  /api/health
    GET  /api/datasets
    POST /api/solve         SolveRequest -> QResult (+ per-gamma results)
    POST /api/thresholds    state + banker -> gamma policy
    POST /api/invert        trajectory -> bounds report
    POST /api/benefit       offer + prizes + gamma -> benefit

Errors are ``{"error": {"code", "message", "round"?}}`` with HTTP 400 for
malformed JSON and 422 for semantic rejections. All money is unrounded
doubles; display rounding is the client's concern.
"""

from __future__ import annotations

import json
from dataclasses import replace

from .banker import (
    BankerModel,
    ExpectedValueBanker,
    Extrapolation,
    MultiplierSchedule,
    OnlineRule,
)
from .core import (
    CRRAUtility,
    ExpPowerUtility,
    GameState,
    LogUtility,
    PrizeLadder,
    RoundSchedule,
    UtilitySpec,
)
from .errors import BudgetError, DomainError, EngineError, RangeError, ValidationError
from .inversion import GammaPolicy, decision_thresholds, enjoyment_benefit, infer_gamma_bounds
from .replication import (
    ANALYSIS_START_SIZE,
    analysis_start_index,
    calibrate_multipliers,
    dataset_document,
    list_datasets,
)
from .solver import GameSpec, QResult, q_values
from .trajectory import parse_trajectory


# ---------------------------------------------------------------------------
# Descriptor codecs
# ---------------------------------------------------------------------------

def banker_from_json(obj) -> BankerModel:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError("banker descriptor must be an object with a 'type'")
    kind = obj["type"]
    if kind == "expected_value":
        return ExpectedValueBanker()
    if kind == "multipliers":
        values = obj.get("multipliers")
        if not isinstance(values, list) or not values:
            raise ValidationError("multiplier banker needs a nonempty 'multipliers' list")
        extrapolation = obj.get("extrapolation", "hold_last")
        try:
            mode = Extrapolation(extrapolation)
        except ValueError:
            raise ValidationError(f"unknown extrapolation {extrapolation!r}") from None
        return MultiplierSchedule(tuple(float(v) for v in values), mode)
    if kind == "online":
        fallback = obj.get("fallback")
        if fallback is None:
            return OnlineRule()
        return OnlineRule(fallback=banker_from_json(fallback))
    raise ValidationError(f"unknown banker type {kind!r}")


def banker_to_json(model: BankerModel) -> dict:
    if isinstance(model, ExpectedValueBanker):
        return {"type": "expected_value"}
    if isinstance(model, MultiplierSchedule):
        return {
            "type": "multipliers",
            "multipliers": list(model.multipliers),
            "extrapolation": model.extrapolation.value,
        }
    if isinstance(model, OnlineRule):
        return {"type": "online", "fallback": banker_to_json(model.fallback)}
    raise DomainError(f"unknown banker model {model!r}")


def utility_from_json(obj) -> UtilitySpec:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError("utility descriptor must be an object with a 'type'")
    kind = obj["type"]
    try:
        if kind == "log":
            return LogUtility()
        if kind == "crra":
            return CRRAUtility(float(obj["gamma"]))
        if kind == "exp_power":
            return ExpPowerUtility(
                float(obj["alpha"]), float(obj["gamma"]), float(obj.get("wealth", 0.0))
            )
    except KeyError as exc:
        raise ValidationError(f"utility descriptor missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad utility descriptor: {exc}") from None
    raise ValidationError(f"unknown utility type {kind!r}")


def utility_to_json(utility: UtilitySpec) -> dict:
    if isinstance(utility, LogUtility):
        return {"type": "log"}
    if isinstance(utility, CRRAUtility):
        return {"type": "crra", "gamma": utility.gamma}
    if isinstance(utility, ExpPowerUtility):
        return {
            "type": "exp_power",
            "alpha": utility.alpha,
            "gamma": utility.gamma,
            "wealth": utility.wealth,
        }
    raise DomainError(f"unknown utility {utility!r}")


def qresult_to_json(result: QResult, round_index: int) -> dict:
    return {
        "offer": result.offer,
        "q_deal": result.q_deal,
        "q_nodeal": result.q_nodeal,
        "ce_nodeal": result.ce_nodeal,
        "action": result.action.value,
        "round": round_index,
    }


def policy_to_json(policy: GammaPolicy) -> dict:
    return {
        "gamma_range": [policy.gamma_lo, policy.gamma_hi],
        "breakpoints": list(policy.breakpoints),
        "actions": [a.value for a in policy.actions],
        "child_breakpoints": list(policy.child_breakpoints),
        "branch_crossings": [
            {"branch": [bc.branch_lo, bc.branch_hi], "crossing": bc.crossing}
            for bc in policy.branch_crossings
        ],
    }


# ---------------------------------------------------------------------------
# Request helpers
# ---------------------------------------------------------------------------

def _number_list(payload, key, required=True) -> list[float] | None:
    values = payload.get(key)
    if values is None:
        if required:
            raise ValidationError(f"request needs a '{key}' list")
        return None
    if not isinstance(values, list) or not values:
        raise ValidationError(f"'{key}' must be a nonempty list")
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValidationError(f"'{key}' must contain numbers, got {v!r}")
        out.append(float(v))
    return out


def _game_setup(payload) -> tuple[GameSpec, GameState]:
    """ladder / remaining / schedule / banker from a request body."""
    ladder_values = _number_list(payload, "ladder")
    remaining = _number_list(payload, "remaining", required=False) or ladder_values
    ladder = PrizeLadder.from_values(ladder_values)
    if not set(remaining) <= set(ladder_values):
        raise ValidationError("'remaining' must be a subset of 'ladder'")

    raw_schedule = payload.get("schedule")
    if raw_schedule is None:
        schedule = RoundSchedule((1,) * (len(ladder) - 1))
    else:
        if not isinstance(raw_schedule, list):
            raise ValidationError("'schedule' must be a list of case counts")
        try:
            schedule = RoundSchedule(tuple(int(k) for k in raw_schedule))
        except (TypeError, ValueError):
            raise ValidationError("'schedule' must contain integers") from None

    banker = banker_from_json(payload.get("banker", {"type": "expected_value"}))
    utility = utility_from_json(payload.get("utility", {"type": "log"}))
    spec = GameSpec(ladder, schedule, banker, utility)
    round_index = spec.round_for_size(len(remaining))
    state = GameState.from_prizes(ladder, remaining, round=round_index)
    return spec, state


def _gamma_range(payload) -> tuple[float, float] | None:
    raw = payload.get("gamma_range")
    if raw is None:
        return None
    values = _number_list(payload, "gamma_range")
    if len(values) != 2:
        raise ValidationError("'gamma_range' must be [lo, hi]")
    return values[0], values[1]


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def handle_health(_payload=None) -> dict:
    return {"status": "ok"}


def handle_datasets(_payload=None) -> dict:
    out = []
    for name in list_datasets():
        doc = dataset_document(name)
        out.append(
            {
                "name": name,
                "contestant": doc["contestant"],
                "currency": doc["currency"],
                "rounds": len(doc["rounds"]),
                "trajectory": {k: doc[k] for k in ("contestant", "currency", "rounds")},
            }
        )
    return {"datasets": out}


def handle_solve(payload) -> dict:
    spec, state = _game_setup(payload)
    response = qresult_to_json(q_values(spec, state), state.round)
    gamma_grid = _number_list(payload, "gamma_grid", required=False)
    if gamma_grid is not None:
        results = []
        for g in gamma_grid:
            spec_g = replace(spec, utility=CRRAUtility(g))
            entry = qresult_to_json(q_values(spec_g, state), state.round)
            entry["gamma"] = g
            results.append(entry)
        response["gamma_results"] = results
    return response


def handle_thresholds(payload) -> dict:
    spec, state = _game_setup(payload)
    policy = decision_thresholds(spec, state, gamma_range=_gamma_range(payload))
    return policy_to_json(policy)


def handle_invert(payload) -> dict:
    if not isinstance(payload, dict) or "trajectory" not in payload:
        raise ValidationError("request needs a 'trajectory' object")
    traj = parse_trajectory(payload["trajectory"])

    # Full-game inversion of long trajectories is combinatorially heavy; by
    # default analysis starts at the end-game window (4 remaining prizes),
    # the scope the bundled case studies are analyzed at. start_size 0
    # requests the full game (subject to the solver guard).
    start_size = payload.get("start_size", ANALYSIS_START_SIZE)
    if not isinstance(start_size, int) or isinstance(start_size, bool) or start_size < 0:
        raise ValidationError("'start_size' must be a nonnegative integer")
    start = 0
    if start_size:
        try:
            start = analysis_start_index(traj, start_size)
        except DomainError:
            start = 0
        traj = traj.slice_from(start) if start else traj

    if "banker" in payload:
        banker = banker_from_json(payload["banker"])
    else:
        banker = calibrate_multipliers(traj)
    report = infer_gamma_bounds(traj, banker, gamma_range=_gamma_range(payload))
    return {
        "gamma_range": [report.gamma_lo, report.gamma_hi],
        "analysis_start_round": start,
        "note": (
            "No Deal choices cap gamma from above; a Deal ends the game, so "
            "at most one lower bound can ever be observed"
        ),
        "per_round": [
            {
                "round": c.round + start,
                "action": c.action.value,
                "kind": c.kind,
                "value": c.value,
                "feasible": [list(iv) for iv in c.feasible],
                "breakpoints": list(c.policy.breakpoints),
            }
            for c in report.per_round
        ],
        "intersection": [list(iv) for iv in report.intersection],
        "upper_bound": report.upper_bound,
        "infeasible_rounds": [i + start for i in report.infeasible_rounds],
    }


def handle_benefit(payload) -> dict:
    if "offer" not in payload or "prizes" not in payload or "gamma" not in payload:
        raise ValidationError("request needs 'offer', 'prizes', and 'gamma'")
    offer = payload["offer"]
    if not isinstance(offer, (int, float)) or isinstance(offer, bool):
        raise ValidationError("'offer' must be a number")
    prizes = _number_list(payload, "prizes")
    gamma = payload["gamma"]
    if not isinstance(gamma, (int, float)) or isinstance(gamma, bool):
        raise ValidationError("'gamma' must be a number")
    benefit = enjoyment_benefit(float(offer), prizes, float(gamma))
    return {"benefit": benefit, "offer": float(offer), "prizes": prizes, "gamma": float(gamma)}


_GET_ROUTES = {
    "/api/health": handle_health,
    "/api/datasets": handle_datasets,
}
_POST_ROUTES = {
    "/api/solve": handle_solve,
    "/api/thresholds": handle_thresholds,
    "/api/invert": handle_invert,
    "/api/benefit": handle_benefit,
}


def _error(status: int, code: str, message: str, round_index: int | None = None):
    body: dict = {"code": code, "message": message}
    if round_index is not None:
        body["round"] = round_index
    return status, {"error": body}


def handle_request(method: str, path: str, body: bytes | None) -> tuple[int, dict]:
    """Dispatch one API request; returns (HTTP status, JSON-ready payload)."""
    if path in _GET_ROUTES:
        if method != "GET":
            return _error(405, "method_not_allowed", f"{path} only supports GET")
        return 200, _GET_ROUTES[path]()
    if path in _POST_ROUTES:
        if method != "POST":
            return _error(405, "method_not_allowed", f"{path} only supports POST")
        try:
            payload = json.loads(body or b"")
        except json.JSONDecodeError as exc:
            return _error(400, "bad_json", f"request body is not valid JSON: {exc}")
        if not isinstance(payload, dict):
            return _error(400, "bad_json", "request body must be a JSON object")
        try:
            return 200, _POST_ROUTES[path](payload)
        except ValidationError as exc:
            return _error(422, "validation", str(exc), exc.round_index)
        except BudgetError as exc:
            return _error(422, "guard", str(exc))
        except RangeError as exc:
            return _error(422, "range", str(exc))
        except DomainError as exc:
            return _error(422, "domain", str(exc))
        except EngineError as exc:  # anything else deliberate
            return _error(422, "rejected", str(exc))
    return _error(404, "not_found", f"no such endpoint: {path}")
