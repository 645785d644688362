"""Render the analysis panels from pipeline artifacts.

Usage: python scripts/plot_cost_panels.py <outdir> [panels.png]

Reads artifact.front.json and artifact.costmap.json from <outdir> and
draws four panels: the Pareto front with the cost-optimal point, the
cost-optimal schedule, total cost along the front, and the
cost-per-infection sweep with its pattern segments.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from epicost.data import load_artifact
from epicost.pareto import front_from_payload


def main(outdir: str, target: str = "panels.png") -> None:
    outdir = Path(outdir)
    front_art = load_artifact(outdir / "artifact.front.json", expected_kind="front")
    cost_art = load_artifact(outdir / "artifact.costmap.json", expected_kind="costmap")
    front = front_from_payload(front_art.payload, front_art.provenance)
    body = cost_art.payload
    opt = body["optimal"]

    fig, axes = plt.subplots(2, 2, figsize=(11, 8))

    ax = axes[0, 0]
    ax.semilogy(front.f1_values, front.f2_values, "k.-", lw=0.7, ms=3)
    ax.semilogy([opt["f1"]], [opt["f2"]], "gs", ms=9, label="cost-optimal")
    ax.set_xlabel("average transmission reduction $f_1$")
    ax.set_ylabel("infections $f_2$")
    ax.set_title("Pareto front")
    ax.legend()

    ax = axes[0, 1]
    knots = opt["schedule"]["knots"]
    spacing = opt["schedule"]["knot_spacing"]
    t = np.arange(len(knots)) * spacing
    ax.step(t / 7.0, knots, where="post", color="g")
    ax.set_xlabel("week")
    ax.set_ylabel("reduction level")
    ax.set_ylim(0, 1)
    ax.set_title("cost-optimal schedule")

    ax = axes[1, 0]
    horizon = body["horizon"]
    intervention = body["c1"] * front.f1_values * horizon
    infection = body["c2"] * front.f2_values
    ax.semilogy(front.f1_values, intervention + infection, "0.4", label="total")
    ax.semilogy(front.f1_values, intervention, "g--", label="intervention")
    ax.semilogy(front.f1_values, infection, "r--", label="infection")
    ax.axvline(opt["f1"], color="g", lw=0.8)
    ax.set_xlabel("average transmission reduction $f_1$")
    ax.set_ylabel("cost (USD)")
    ax.set_title(f"costs at c2 = {body['c2']:,.0f} USD/infection")
    ax.legend()

    ax = axes[1, 1]
    sweep = body["sweep"]
    ax.semilogx(sweep["grid"], sweep["optimal_f1"], "g.-", ms=3)
    for seg in body["segments"]:
        ax.axvspan(seg["lo"], seg["hi"], alpha=0.12)
        mid = np.sqrt(seg["lo"] * seg["hi"])
        label = "-" if seg["pattern"]["begin"] is None else str(seg["pattern"]["begin"])
        ax.annotate(f"wk {label}", (mid, 0.05), ha="center", fontsize=8)
    ax.set_xlabel("cost per infection (USD)")
    ax.set_ylabel("optimal $f_1$")
    ax.set_ylim(0, 1)
    ax.set_title(f"cost-optimal map ({len(body['segments'])} pattern segments)")

    fig.tight_layout()
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")


if __name__ == "__main__":
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    main(*sys.argv[1:])
