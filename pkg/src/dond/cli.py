"""Command-line entry points.

Exit codes: 0 success, 2 validation or computation rejected, 64 unparsable
flags. ``--json`` prints exactly the payload the HTTP API would return for
the same inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import api
from .errors import EngineError, ValidationError
from .replication import replicate_case_study
from .server import serve_forever
from .trajectory import load_trajectory

EX_OK = 0
EX_REJECTED = 2
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def _csv_floats(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValidationError(f"{flag} must be a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise ValidationError(f"{flag} must list at least one number")
    return values


def _banker_descriptor(text: str, extrapolation: str) -> dict:
    if text == "ev":
        return {"type": "expected_value"}
    if text == "online":
        return {"type": "online"}
    if text.startswith("multipliers:"):
        values = _csv_floats(text[len("multipliers:"):], "--banker multipliers")
        return {"type": "multipliers", "multipliers": values, "extrapolation": extrapolation}
    raise ValidationError(f"unknown banker {text!r}; use ev, online, or multipliers:<csv>")


def _utility_descriptor(text: str) -> dict:
    if text == "log":
        return {"type": "log"}
    if text.startswith("crra:"):
        return {"type": "crra", "gamma": _csv_floats(text[len("crra:"):], "--utility crra")[0]}
    if text.startswith("exppower:"):
        values = _csv_floats(text[len("exppower:"):], "--utility exppower")
        if len(values) != 3:
            raise ValidationError("exppower takes alpha,gamma,wealth")
        return {"type": "exp_power", "alpha": values[0], "gamma": values[1], "wealth": values[2]}
    raise ValidationError(f"unknown utility {text!r}; use log, crra:<g>, or exppower:<a>,<g>,<W>")


def _gamma_range(text: str | None) -> list[float] | None:
    if text is None:
        return None
    values = _csv_floats(text, "--gamma-range")
    if len(values) != 2:
        raise ValidationError("--gamma-range takes lo,hi")
    return values


def _print_solve(payload: dict) -> None:
    print(f"round       {payload['round']}")
    print(f"offer       {payload['offer']:.2f}")
    print(f"q(deal)     {payload['q_deal']:.6g}")
    print(f"q(no deal)  {payload['q_nodeal']:.6g}")
    print(f"ce(no deal) {payload['ce_nodeal']:.2f}")
    print(f"action      {payload['action'].replace('_', ' ').title()}")
    for entry in payload.get("gamma_results", ()):
        print(
            f"  gamma={entry['gamma']:g}: offer {entry['offer']:.2f}, "
            f"ce {entry['ce_nodeal']:.2f}, action {entry['action']}"
        )


def _print_invert(payload: dict) -> None:
    for row in payload["per_round"]:
        label = f"round {row['round'] + 1}: {row['action']}"
        kind = row["kind"]
        if kind == "upper":
            print(f"{label} -> gamma < {row['value']:.5f}")
        elif kind == "lower":
            print(f"{label} -> gamma > {row['value']:.5f}")
        elif kind == "infeasible":
            print(f"{label} -> infeasible for gamma > 0 (risk seeking, or an enjoyment benefit)")
        elif kind == "none":
            print(f"{label} -> no constraint")
        else:
            print(f"{label} -> gamma in {row['feasible']}")
    if payload["upper_bound"] is not None:
        print(f"intersection over gamma > 0: gamma < {payload['upper_bound']:.5f}")
    elif payload["intersection"]:
        print(f"intersection over gamma > 0: {payload['intersection']}")
    else:
        print("intersection over gamma > 0: empty")
    if any(row["kind"] == "lower" for row in payload["per_round"]):
        print("(a Deal ends the game: at most one lower bound can ever be observed)")


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="dond", description="Deal or No Deal decision engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="Q-values and the optimal action at a state")
    p_solve.add_argument("--prizes", required=True, help="board prizes, e.g. 750,500,25")
    p_solve.add_argument("--banker", default="ev", help="ev | online | multipliers:<csv>")
    p_solve.add_argument("--utility", default="log", help="log | crra:<g> | exppower:<a>,<g>,<W>")
    p_solve.add_argument("--schedule", default=None, help="cases opened per round, e.g. 1,1")
    p_solve.add_argument("--remaining", default=None, help="remaining prizes if not the full board")
    p_solve.add_argument("--gamma-grid", default=None, help="extra CRRA gammas to evaluate")
    p_solve.add_argument("--extrapolation", default="hold_last", choices=["hold_last", "linear_trend"])
    p_solve.add_argument("--json", action="store_true")

    p_invert = sub.add_parser("invert", help="gamma bounds implied by an observed trajectory")
    p_invert.add_argument("--trajectory", required=True, help="trajectory JSON file")
    p_invert.add_argument("--gamma-range", default=None, help="lo,hi")
    p_invert.add_argument(
        "--start-size",
        type=int,
        default=4,
        help="analyze from the first round with at most this many prizes (0 = full game)",
    )
    p_invert.add_argument("--json", action="store_true")

    p_replicate = sub.add_parser("replicate", help="reproduce a bundled case study")
    p_replicate.add_argument("name", help="suzanne | frank")
    p_replicate.add_argument("--out", default="out", help="directory for report JSON and figure CSV")

    p_benefit = sub.add_parser("benefit", help="terminal enjoyment benefit")
    p_benefit.add_argument("--offer", required=True, type=float)
    p_benefit.add_argument("--prizes", required=True, help="the two terminal prizes, e.g. 100000,150000")
    p_benefit.add_argument("--gamma", required=True, type=float)
    p_benefit.add_argument("--json", action="store_true")

    p_serve = sub.add_parser("serve", help="run the JSON API (and optional static UI)")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", default=None, help="directory of UI assets to serve")

    args = parser.parse_args(argv)

    try:
        if args.command == "solve":
            payload: dict = {
                "ladder": _csv_floats(args.prizes, "--prizes"),
                "banker": _banker_descriptor(args.banker, args.extrapolation),
                "utility": _utility_descriptor(args.utility),
            }
            if args.remaining:
                payload["remaining"] = _csv_floats(args.remaining, "--remaining")
            if args.schedule:
                payload["schedule"] = [int(v) for v in _csv_floats(args.schedule, "--schedule")]
            if args.gamma_grid:
                payload["gamma_grid"] = _csv_floats(args.gamma_grid, "--gamma-grid")
            response = api.handle_solve(payload)
            print(json.dumps(response)) if args.json else _print_solve(response)
            return EX_OK

        if args.command == "invert":
            traj = load_trajectory(args.trajectory)
            payload = {"trajectory": traj.to_json_dict(), "start_size": args.start_size}
            if args.gamma_range:
                payload["gamma_range"] = _gamma_range(args.gamma_range)
            response = api.handle_invert(payload)
            print(json.dumps(response)) if args.json else _print_invert(response)
            return EX_OK

        if args.command == "replicate":
            out = Path(args.out)
            report, _ = replicate_case_study(args.name, out_dir=out)
            print(f"wrote {out / (args.name + '_report.json')}")
            print(f"wrote {out / (args.name + '_figure.csv')}")
            multipliers = report["multipliers"]["values"]
            print("multipliers: " + ", ".join(f"{m:.4f}" for m in multipliers))
            upper = report["bounds"]["upper_bound"]
            if upper is not None:
                print(f"bound: gamma < {upper:.5f}")
            if report["enjoyment_benefit"]:
                print(f"enjoyment benefit at the bound: {report['enjoyment_benefit']['benefit']:.2f}")
            return EX_OK

        if args.command == "benefit":
            response = api.handle_benefit(
                {
                    "offer": args.offer,
                    "prizes": _csv_floats(args.prizes, "--prizes"),
                    "gamma": args.gamma,
                }
            )
            print(json.dumps(response)) if args.json else print(f"{response['benefit']:.2f}")
            return EX_OK

        if args.command == "serve":
            try:
                serve_forever(args.port, args.static)
            except OSError as exc:
                print(f"dond serve: {exc}", file=sys.stderr)
                return EX_REJECTED
            return EX_OK

    except FileNotFoundError as exc:
        print(f"dond: {exc}", file=sys.stderr)
        return EX_REJECTED
    except EngineError as exc:
        suffix = ""
        if isinstance(exc, ValidationError) and exc.round_index is not None:
            suffix = f" (round {exc.round_index})"
        print(f"dond: {exc}{suffix}", file=sys.stderr)
        return EX_REJECTED

    raise AssertionError("unreachable")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
