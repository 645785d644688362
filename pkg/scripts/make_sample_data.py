"""Regenerate data/cases_sample.csv.

The shipped sample is model-generated (not the public surveillance data):
the Korea scenario simulated forward, integer-rounded, with small
observation noise on the later counts.  It exists so the calibrate stage
and the pipeline have a realistic input to run against out of the box.
"""

from datetime import date, timedelta
from pathlib import Path

import numpy as np

from epicost.data import load_scenario
from epicost.model import simulate_scenario

ROOT = Path(__file__).resolve().parent.parent
START = date(2020, 1, 20)
NOISE_SD = 3.0
NOISE_FROM_DAY = 28


def main() -> None:
    scenario = load_scenario(ROOT / "configs" / "scenario_korea.json")
    traj = simulate_scenario(scenario)
    days = np.arange(int(scenario.horizon) + 1, dtype=float)
    confirmed = traj.confirmed_at(days)
    deaths = traj.states[np.searchsorted(traj.times, days), 5]

    rng = np.random.default_rng(20200120)
    bump = rng.normal(0.0, NOISE_SD, confirmed.size)
    bump[:NOISE_FROM_DAY] = 0.0
    confirmed = np.maximum.accumulate(np.round(np.maximum(0.0, confirmed + bump)))
    deaths = np.maximum.accumulate(np.round(deaths))

    out = ROOT / "data" / "cases_sample.csv"
    out.parent.mkdir(exist_ok=True)
    with open(out, "w") as fh:
        fh.write("date,location,cumulative_confirmed,cumulative_deaths\n")
        for k in range(confirmed.size):
            day = START + timedelta(days=k)
            fh.write(f"{day.isoformat()},KOR,{int(confirmed[k])},{int(deaths[k])}\n")
    print(f"wrote {out} ({confirmed.size} rows, final {int(confirmed[-1])})")


if __name__ == "__main__":
    main()
