from __future__ import annotations

import json

import pytest

from dond import Action, ValidationError, load_trajectory, parse_trajectory
from dond.replication import dataset_document, load_dataset


def test_bundled_suzanne_shape():
    traj = load_dataset("suzanne")
    assert len(traj.rounds) == 9
    assert traj.contestant == "Suzanne"
    assert traj.rounds[8].remaining == (100000.0, 150000.0)
    assert traj.rounds[8].offer == 125000.0
    assert all(r.decision is Action.NO_DEAL for r in traj.rounds)


def test_bundled_frank_shape():
    traj = load_dataset("frank")
    assert len(traj.rounds) == 9
    assert traj.rounds[6].remaining == (0.5, 10.0, 20.0, 10000.0)
    assert traj.rounds[6].offer == 2400.0
    assert traj.rounds[0].remaining[-1] == 5_000_000.0


def test_single_round_single_prize_is_valid_terminal():
    traj = parse_trajectory(
        {"contestant": "t", "currency": "EUR", "rounds": [{"remaining": [100]}]}
    )
    assert traj.rounds[0].decision is None
    assert len(traj.schedule()) == 0
    assert len(traj.ladder()) == 1


def test_schedule_derivation():
    traj = load_dataset("suzanne")
    assert traj.schedule().opens_per_round == (5, 4, 3, 2, 1, 1, 1, 1, 1)
    tail = traj.slice_from(6)
    assert tail.schedule().opens_per_round == (1, 1, 1)
    assert tail.state_at(0).size == 4
    assert tail.state_at(2).round == 2


def _doc(rounds):
    return {"contestant": "x", "currency": "EUR", "rounds": rounds}


def test_nesting_violation_reports_round():
    with pytest.raises(ValidationError) as err:
        parse_trajectory(
            _doc(
                [
                    {"remaining": [1, 2, 3], "offer": 2, "decision": "no_deal"},
                    {"remaining": [1, 4], "offer": 2, "decision": "no_deal"},
                ]
            )
        )
    assert err.value.round_index == 1


def test_non_strict_subset_rejected():
    with pytest.raises(ValidationError):
        parse_trajectory(
            _doc(
                [
                    {"remaining": [1, 2], "offer": 1.5, "decision": "no_deal"},
                    {"remaining": [1, 2], "offer": 1.5},
                ]
            )
        )


def test_nonpositive_prize_rejected():
    with pytest.raises(ValidationError) as err:
        parse_trajectory(_doc([{"remaining": [0, 5]}]))
    assert err.value.round_index == 0


def test_decision_requires_offer():
    with pytest.raises(ValidationError):
        parse_trajectory(_doc([{"remaining": [1, 2], "decision": "no_deal"}]))


def test_deal_must_be_last():
    with pytest.raises(ValidationError):
        parse_trajectory(
            _doc(
                [
                    {"remaining": [1, 2, 3], "offer": 2, "decision": "deal"},
                    {"remaining": [1, 2], "offer": 1.5},
                ]
            )
        )


def test_bad_decision_label():
    with pytest.raises(ValidationError):
        parse_trajectory(_doc([{"remaining": [1, 2], "offer": 1, "decision": "maybe"}]))


def test_duplicate_prize_rejected():
    with pytest.raises(ValidationError):
        parse_trajectory(_doc([{"remaining": [5, 5]}]))


def test_schema_rejects_missing_fields():
    with pytest.raises(ValidationError):
        parse_trajectory({"currency": "EUR", "rounds": [{"remaining": [1]}]})
    with pytest.raises(ValidationError):
        parse_trajectory({"contestant": "x", "currency": "EUR", "rounds": []})
    with pytest.raises(ValidationError):
        parse_trajectory({"contestant": "x", "currency": "EUR"})


def test_load_trajectory_roundtrip(tmp_path):
    doc = dataset_document("frank")
    path = tmp_path / "frank.json"
    path.write_text(json.dumps(doc))
    traj = load_trajectory(path)
    assert traj.to_json_dict()["rounds"] == doc["rounds"]
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ValidationError):
        load_trajectory(bad)
