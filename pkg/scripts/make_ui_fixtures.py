"""Record real service responses as fixtures for the dashboard tests.

Builds a small deterministic front, spins the service app up in-process,
and captures /v1/front plus /v1/cost-optimal responses for sweeps of each
slider (others held at the Korea baseline). The dashboard test replays
these through a mocked fetch, so every number it checks against the DOM
is a genuine service response.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from epicost.cli import main
from epicost.service import create_app

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"
SCENARIO = ROOT / "configs" / "scenario_korea.json"

BASELINE = {
    "gdp": 4519595671.232877,
    "gdp_max_reduction": 0.0426,
    "hospitalization_cost": 21913.0,
    "vsl": 1000000.0,
    "fatality": 0.0173,
}

SWEEPS = {
    "gdp": [5e8, 2e9, 4519595671.232877, 2e10, 8e10],
    "gdp_max_reduction": [0.005, 0.02, 0.0426, 0.1, 0.2],
    "hospitalization_cost": [500.0, 5000.0, 21913.0, 1e5, 8e5],
    "vsl": [1e5, 2.7e5, 7.2e5, 1e6, 1.9e6, 5.2e6, 1.4e7, 3.7e7, 7e7, 1e8],
    "fatality": [0.0, 0.005, 0.0173, 0.05, 0.1],
}


def main_fixtures() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    front_path = FIXTURES / "artifact.front.json"
    code = main([
        "optimize", "--scenario", str(SCENARIO), "--runs", "4",
        "--population", "32", "--generations", "60",
        "--out", str(front_path), "--seed", "5",
    ])
    assert code == 0

    client = TestClient(create_app(front_path, SCENARIO))
    front = client.get("/v1/front").json()

    cases = []
    for field, values in SWEEPS.items():
        for value in values:
            body = dict(BASELINE)
            body[field] = value
            res = client.post("/v1/cost-optimal", json=body)
            assert res.status_code == 200, res.text
            cases.append({"field": field, "value": value,
                          "body": body, "response": res.json()})

    out = FIXTURES / "responses.json"
    out.write_text(json.dumps({"front": front, "cases": cases}))
    print(f"wrote {out} ({len(cases)} recorded responses)")


if __name__ == "__main__":
    main_fixtures()
