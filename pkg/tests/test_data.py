import json
from datetime import date

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epicost.data import (
    CaseSeries,
    PipelineArtifact,
    canonical_json,
    load_artifact,
    load_case_series,
    provenance_hash,
    repair_cumulative,
    save_artifact,
    scenario_from_dict,
    scenario_to_dict,
)
from epicost.errors import ArtifactFormatError, ConfigError, DataIntegrityWarning


def write_cases(path, rows):
    lines = ["date,location,cumulative_confirmed,cumulative_deaths"]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def test_load_passthrough(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [
        ("2020-01-20", "KOR", 1, 0),
        ("2020-01-21", "KOR", 2, 0),
        ("2020-01-22", "KOR", 2, 0),
    ])
    series = load_case_series(p, "KOR", date(2020, 1, 20), date(2020, 1, 22))
    assert list(series.cumulative_confirmed) == [1.0, 2.0, 2.0]
    assert series.n_days == 3


def test_load_running_max_repair(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [
        ("2020-01-20", "KOR", 5, 0),
        ("2020-01-21", "KOR", 4, 0),
        ("2020-01-22", "KOR", 6, 0),
    ])
    with pytest.warns(DataIntegrityWarning):
        series = load_case_series(p, "KOR", date(2020, 1, 20), date(2020, 1, 22))
    assert list(series.cumulative_confirmed) == [5.0, 5.0, 6.0]


def test_load_forward_fills_gaps(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [
        ("2020-01-20", "KOR", 3, 0),
        ("2020-01-23", "KOR", 9, 1),
    ])
    series = load_case_series(p, "KOR", date(2020, 1, 20), date(2020, 1, 23))
    assert list(series.cumulative_confirmed) == [3.0, 3.0, 3.0, 9.0]


def test_load_missing_country(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [("2020-01-20", "KOR", 1, 0)])
    with pytest.raises(ConfigError, match="not found"):
        load_case_series(p, "JPN")


def test_load_empty_window(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [("2020-01-20", "KOR", 1, 0)])
    with pytest.raises(ConfigError, match="empty window"):
        load_case_series(p, "KOR", date(2020, 2, 1), date(2020, 1, 1))


def test_default_window_starts_at_first_case(tmp_path):
    p = tmp_path / "cases.csv"
    write_cases(p, [
        ("2020-01-18", "KOR", 0, 0),
        ("2020-01-19", "KOR", 0, 0),
        ("2020-01-20", "KOR", 1, 0),
        ("2020-01-21", "KOR", 2, 0),
    ])
    series = load_case_series(p, "KOR")
    assert series.dates[0] == date(2020, 1, 20)


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=50))
def test_repair_idempotent(values):
    once = repair_cumulative(values)
    twice = repair_cumulative(once)
    assert np.array_equal(once, twice)
    assert np.all(np.diff(once) >= 0)


def test_case_series_rejects_non_daily():
    with pytest.raises(ConfigError):
        CaseSeries(
            dates=(date(2020, 1, 1), date(2020, 1, 3)),
            cumulative_confirmed=np.array([1.0, 2.0]),
        )


# ------------------------------------------------------------- artifacts

def test_artifact_round_trip(tmp_path):
    art = PipelineArtifact(
        kind="front",
        payload={"points": [{"f1": 0.1, "f2": 1234.5678901234567}] * 3},
        provenance=provenance_hash({"a": 1}, seed=7),
    )
    path = tmp_path / "artifact.front.json"
    save_artifact(art, path)
    back = load_artifact(path, expected_kind="front")
    assert back == art


@given(
    payload=st.recursive(
        st.one_of(
            st.floats(allow_nan=False, allow_infinity=False),
            st.integers(-10**12, 10**12),
            st.text(max_size=20),
            st.booleans(),
            st.none(),
        ),
        lambda children: st.one_of(
            st.lists(children, max_size=4),
            st.dictionaries(st.text(max_size=8), children, max_size=4),
        ),
        max_leaves=20,
    )
)
def test_artifact_payload_round_trip_randomized(tmp_path_factory, payload):
    art = PipelineArtifact(kind="estimate", payload={"body": payload}, provenance="x")
    path = tmp_path_factory.mktemp("rt") / "a.json"
    save_artifact(art, path)
    assert load_artifact(path).payload == art.payload


def test_artifact_wrong_kind(tmp_path):
    art = PipelineArtifact(kind="front", payload={}, provenance="x")
    path = tmp_path / "a.json"
    save_artifact(art, path)
    with pytest.raises(ArtifactFormatError, match="expected"):
        load_artifact(path, expected_kind="chain")


def test_artifact_bad_schema_version(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"schema_version": 99, "kind": "front",
                                "provenance": "x", "payload": {}}))
    with pytest.raises(ArtifactFormatError, match="schema_version"):
        load_artifact(path)


def test_artifact_unknown_kind_rejected():
    with pytest.raises(ArtifactFormatError):
        PipelineArtifact(kind="mystery", payload={}, provenance="x")


def test_provenance_hash_sensitive_to_seed_and_config():
    h1 = provenance_hash({"a": 1}, seed=7)
    assert h1 == provenance_hash({"a": 1}, seed=7)
    assert h1 != provenance_hash({"a": 1}, seed=8)
    assert h1 != provenance_hash({"a": 2}, seed=7)


def test_canonical_json_is_key_ordered():
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_scenario_round_trip(korea_scenario):
    d = scenario_to_dict(korea_scenario)
    back = scenario_from_dict(json.loads(json.dumps(d)))
    assert back == korea_scenario


def test_scenario_malformed():
    with pytest.raises(ConfigError, match="malformed"):
        scenario_from_dict({"disease": {"r0": 2.0}})
