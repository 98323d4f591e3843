"""Bundled case studies and the end-to-end replication driver.

The two bundled trajectories transcribe the published per-round tables for
Suzanne (German edition) and Frank (Dutch edition). ``replicate_case_study``
calibrates a multiplier schedule from the observed offers, computes
per-round gamma policies and choice bounds over the end-game (from four
remaining prizes on), solves the terminal enjoyment-benefit equation at the
inferred upper bound, and emits the evolving-values figure data.
"""

from __future__ import annotations

import json
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .banker import Extrapolation, MultiplierSchedule, implied_multiplier
from .core import CRRAUtility
from .errors import DomainError
from .inversion import BoundsReport, GammaPolicy, infer_gamma_bounds, enjoyment_benefit
from .solver import GameSpec, SeriesRow, SolverGuard, action_value_series
from .trajectory import Trajectory, parse_trajectory

ANALYSIS_START_SIZE = 4
FIGURE_GAMMA_GRID = (0.0, 0.5, 1.0, 1.54085, 2.5)
FIGURE_HEADER = "round,gamma,deal_value,continuation_ce"


def list_datasets() -> list[str]:
    files = resources.files("dond.data")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def dataset_document(name: str) -> dict:
    """The raw JSON document of a bundled trajectory."""
    if name not in list_datasets():
        raise DomainError(f"unknown dataset {name!r}; bundled: {', '.join(list_datasets())}")
    raw = resources.files("dond.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(raw)


def load_dataset(name: str) -> Trajectory:
    return parse_trajectory(dataset_document(name))


def calibrate_multipliers(
    traj: Trajectory, extrapolation: Extrapolation = Extrapolation.HOLD_LAST
) -> MultiplierSchedule:
    """Multiplier schedule implied by the observed offers, round by round."""
    ladder = traj.ladder()
    values = []
    for i, r in enumerate(traj.rounds):
        if r.offer is None:
            raise DomainError(f"round {i} has no offer; cannot calibrate a multiplier for it")
        values.append(implied_multiplier(r.offer, traj.state_at(i), ladder))
    return MultiplierSchedule(tuple(values), extrapolation)


def analysis_start_index(traj: Trajectory, start_size: int = ANALYSIS_START_SIZE) -> int:
    """First round with at most ``start_size`` prizes remaining."""
    for i, r in enumerate(traj.rounds):
        if len(r.remaining) <= start_size:
            return i
    raise DomainError(f"no round has {start_size} or fewer prizes remaining")


def render_figure_csv(rows: list[SeriesRow]) -> str:
    """Six-significant-digit CSV of the evolving-values series."""
    lines = [FIGURE_HEADER]
    for r in rows:
        lines.append(f"{r.round},{r.gamma:.6g},{r.deal_value:.6g},{r.continuation_ce:.6g}")
    return "\n".join(lines) + "\n"


def _policy_json(policy: GammaPolicy) -> dict:
    out = {
        "gamma_range": [policy.gamma_lo, policy.gamma_hi],
        "breakpoints": list(policy.breakpoints),
        "actions": [a.value for a in policy.actions],
        "child_breakpoints": list(policy.child_breakpoints),
    }
    if policy.branch_crossings:
        out["branch_crossings"] = [
            {"branch": [bc.branch_lo, bc.branch_hi], "crossing": bc.crossing}
            for bc in policy.branch_crossings
        ]
    return out


def _bounds_json(report: BoundsReport, round_offset: int) -> dict:
    return {
        "gamma_range": [report.gamma_lo, report.gamma_hi],
        "intersection": [list(iv) for iv in report.intersection],
        "upper_bound": report.upper_bound,
        "infeasible_rounds": [i + round_offset for i in report.infeasible_rounds],
    }


def replicate_case_study(
    name: str,
    out_dir: str | Path | None = None,
    gamma_grid: tuple[float, ...] = FIGURE_GAMMA_GRID,
    guard: SolverGuard | None = None,
) -> tuple[dict, str]:
    """Full reproduction of one bundled case study.

    Returns ``(report, figure_csv)``; with ``out_dir`` set, also writes
    ``<name>_report.json`` and ``<name>_figure.csv`` there. Output is
    deterministic: identical bytes on every run.
    """
    traj = load_dataset(name)
    full_schedule = calibrate_multipliers(traj)

    start = analysis_start_index(traj)
    tail = traj.slice_from(start)
    schedule = calibrate_multipliers(tail)
    offset = start + 1  # 1-based round labels matching the published tables

    bounds = infer_gamma_bounds(tail, schedule, diagnostics_rounds=(0,))

    spec = GameSpec(tail.ladder(), tail.schedule(), schedule, CRRAUtility(1.0))
    series = action_value_series(spec, tail, gamma_grid, round_offset=offset, guard=guard)
    figure_csv = render_figure_csv(series)

    rounds_json = []
    for constraint in bounds.per_round:
        r = tail.rounds[constraint.round]
        rounds_json.append(
            {
                "round": constraint.round + offset,
                "remaining": list(r.remaining),
                "offer": r.offer,
                "decision": r.decision.value if r.decision else None,
                "multiplier": schedule.multipliers[constraint.round],
                "thresholds": _policy_json(constraint.policy),
                "constraint": {
                    "kind": constraint.kind,
                    "value": constraint.value,
                    "feasible": [list(iv) for iv in constraint.feasible],
                },
            }
        )

    benefit_json = None
    last = tail.rounds[-1]
    upper = bounds.upper_bound
    if upper is not None and len(last.remaining) == 2 and last.offer is not None:
        benefit_json = {
            "gamma": upper,
            "offer": last.offer,
            "prizes": list(last.remaining),
            "benefit": enjoyment_benefit(last.offer, last.remaining, upper),
        }

    report = {
        "contestant": traj.contestant,
        "currency": traj.currency,
        "multipliers": {
            "rounds": list(range(1, len(traj.rounds) + 1)),
            "values": list(full_schedule.multipliers),
        },
        "analysis_start_round": offset,
        "rounds": rounds_json,
        "bounds": _bounds_json(bounds, offset),
        "enjoyment_benefit": benefit_json,
        "figure_gammas": list(gamma_grid),
    }

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report_text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        (out / f"{name}_report.json").write_text(report_text, encoding="utf-8")
        (out / f"{name}_figure.csv").write_text(figure_csv, encoding="utf-8")

    return report, figure_csv
