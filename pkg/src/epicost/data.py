"""Observed-case ingestion, config files, and pipeline artifact persistence.

File formats (see FORMATS.md for the field-by-field reference):

* ``cases.csv``     daily rows of (date, location, cumulative_confirmed,
                    cumulative_deaths)
* ``scenario.json`` mirrors ScenarioConfig
* ``costs.json``    mirrors CostParams
* ``artifact.*.json`` versioned envelope around a pipeline stage output,
                    stamped with the provenance hash of the config + seed
                    that produced it
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import warnings
from dataclasses import asdict, dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .errors import ArtifactFormatError, ConfigError, DataIntegrityWarning
from .model import DiseaseParams, MuSchedule, PolicyParams, ScenarioConfig

SCHEMA_VERSION = 1
ARTIFACT_KINDS = ("estimate", "chain", "front", "costmap")

DEFAULT_WINDOW_DAYS = 336


@dataclass(frozen=True)
class CaseSeries:
    """Daily cumulative confirmed cases (and optionally deaths)."""

    dates: tuple[date, ...]
    cumulative_confirmed: np.ndarray
    cumulative_deaths: np.ndarray | None = None

    def __post_init__(self):
        if len(self.dates) != len(self.cumulative_confirmed):
            raise ConfigError("dates and counts must align")
        if len(self.dates) >= 2:
            deltas = {(b - a).days for a, b in zip(self.dates, self.dates[1:])}
            if deltas != {1}:
                raise ConfigError("series must have strict daily cadence")
        if np.any(np.diff(self.cumulative_confirmed) < 0):
            raise ConfigError("cumulative counts must be non-decreasing")

    @property
    def n_days(self) -> int:
        return len(self.dates)

    @property
    def days(self) -> np.ndarray:
        """Day offsets 0..n-1 relative to the window start."""
        return np.arange(self.n_days, dtype=float)


@dataclass(frozen=True)
class PipelineArtifact:
    """Envelope for a persisted stage output.

    created_at is None unless the caller explicitly stamps a wall-clock
    time; leaving it unset keeps repeated pipeline runs byte-identical.
    """

    kind: str
    payload: dict
    provenance: str
    created_at: str | None = None

    def __post_init__(self):
        if self.kind not in ARTIFACT_KINDS:
            raise ArtifactFormatError(f"unknown artifact kind {self.kind!r}")


def canonical_json(obj) -> str:
    """Stable serialization used for hashing and artifact files."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def provenance_hash(config_obj, seed: int | None = None) -> str:
    """Digest of a config (plus seed) identifying what produced an artifact."""
    body = {"config": config_obj}
    if seed is not None:
        body["seed"] = seed
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# ------------------------------------------------------------- case data

def load_case_series(
    path: str | Path,
    country: str,
    start: date | None = None,
    end: date | None = None,
) -> CaseSeries:
    """Load one country's daily cumulative series from a cases CSV.

    Missing days are forward-filled from the last observation.  Decreasing
    cumulative counts are repaired with a running max and reported via a
    DataIntegrityWarning.  The default window runs from the first confirmed
    case through 336 days later (clipped to the available data).
    """
    rows: dict[date, tuple[float, float | None]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"date", "location", "cumulative_confirmed"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ConfigError(f"cases CSV must have columns {sorted(required)}")
        for row in reader:
            if row["location"] != country:
                continue
            day = date.fromisoformat(row["date"])
            confirmed = float(row["cumulative_confirmed"])
            deaths_raw = (row.get("cumulative_deaths") or "").strip()
            deaths = float(deaths_raw) if deaths_raw else None
            rows[day] = (confirmed, deaths)
    if not rows:
        raise ConfigError(f"country {country!r} not found in {path}")

    observed = sorted(rows)
    if start is None:
        nonzero = [d for d in observed if rows[d][0] > 0]
        start = nonzero[0] if nonzero else observed[0]
    if end is None:
        end = min(observed[-1], start + timedelta(days=DEFAULT_WINDOW_DAYS))
    if end < start:
        raise ConfigError(f"empty window: start {start} after end {end}")

    n = (end - start).days + 1
    confirmed = np.zeros(n)
    deaths = np.zeros(n)
    have_deaths = False
    last_c, last_d = 0.0, 0.0
    # Seed the forward-fill with the most recent observation before start.
    for day in observed:
        if day < start:
            last_c = rows[day][0]
            if rows[day][1] is not None:
                last_d = rows[day][1]
    for k in range(n):
        day = start + timedelta(days=k)
        if day in rows:
            last_c = rows[day][0]
            if rows[day][1] is not None:
                last_d = rows[day][1]
                have_deaths = True
        confirmed[k] = last_c
        deaths[k] = last_d

    repaired = np.maximum.accumulate(confirmed)
    if np.any(repaired != confirmed):
        bad = int(np.sum(repaired != confirmed))
        warnings.warn(
            f"{bad} decreasing cumulative count(s) repaired with running max",
            DataIntegrityWarning,
        )
        confirmed = repaired

    dates = tuple(start + timedelta(days=k) for k in range(n))
    return CaseSeries(
        dates=dates,
        cumulative_confirmed=confirmed,
        cumulative_deaths=np.maximum.accumulate(deaths) if have_deaths else None,
    )


def repair_cumulative(values: np.ndarray) -> np.ndarray:
    """Running-max repair; idempotent."""
    return np.maximum.accumulate(np.asarray(values, dtype=float))


# ------------------------------------------------------------- artifacts

def save_artifact(artifact: PipelineArtifact, path: str | Path) -> None:
    """Write atomically (temp file + rename)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": artifact.kind,
        "created_at": artifact.created_at,
        "provenance": artifact.provenance,
        "payload": artifact.payload,
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(canonical_json(doc))
    os.replace(tmp, path)


def load_artifact(path: str | Path, expected_kind: str | None = None) -> PipelineArtifact:
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ArtifactFormatError(
            f"unsupported artifact schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    kind = doc.get("kind")
    if expected_kind is not None and kind != expected_kind:
        raise ArtifactFormatError(f"expected a {expected_kind!r} artifact, got {kind!r}")
    return PipelineArtifact(
        kind=kind,
        payload=doc["payload"],
        provenance=doc["provenance"],
        created_at=doc.get("created_at"),
    )


# ------------------------------------------------------------- configs

def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["policy"]["schedule"]["knots"] = list(d["policy"]["schedule"]["knots"])
    return d


def scenario_from_dict(d: dict) -> ScenarioConfig:
    try:
        disease = DiseaseParams(**d["disease"])
        sched = MuSchedule(
            knots=tuple(d["policy"]["schedule"]["knots"]),
            knot_spacing=d["policy"]["schedule"].get("knot_spacing", 14.0),
        )
        policy = PolicyParams(xi=d["policy"]["xi"], tau=d["policy"]["tau"], schedule=sched)
        return ScenarioConfig(
            disease=disease,
            policy=policy,
            population=d["population"],
            horizon=d["horizon"],
            step=d.get("step", 0.5),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed scenario config: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        doc = json.load(fh)
    return scenario_from_dict(doc)
