"""Production-scale pipeline run for the Korea scenario.

Same stages as `epicost pipeline`, but with calibration budgets and run
counts sized for quality rather than speed.  Expect on the order of an
hour of compute.  Results land in runs/korea_full/.
"""

import json
import sys
from pathlib import Path

from epicost.cli import main

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "runs" / "korea_full"


def build_config(tmpdir: Path) -> Path:
    config = {
        "scenario": str(ROOT / "configs" / "scenario_korea.json"),
        "data": {
            "path": str(ROOT / "data" / "cases_sample.csv"),
            "country": "KOR",
            "start": "2020-01-20",
            "end": "2020-12-21",
        },
        "calibrate": {
            "restarts": 25,
            "budget": 100_000,
            "chain_length": 1_000_000,
            "thin": 100,
            "xi_max": 2.0,
        },
        "sensitivity": {"samples": 1000, "study": "transmission"},
        "optimize": {"runs": 1000, "population": 100, "generations": 200,
                     "workers": 4},
        "cost": {"costs": str(ROOT / "configs" / "costs_korea.json"),
                 "grid": {"min": 1e3, "max": 1e7, "n": 200}},
    }
    path = tmpdir / "pipeline_full.json"
    path.write_text(json.dumps(config, indent=2))
    return path


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    config = build_config(OUT)
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    sys.exit(main(["pipeline", "--config", str(config),
                   "--outdir", str(OUT), "--seed", str(seed)]))
