"""Stage-oriented command line: simulate, calibrate, sensitivity, optimize,
cost, serve, and a pipeline command chaining all stages with shared
provenance.  Exit codes: 0 success, 2 configuration problem, 1 runtime
failure."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from datetime import date
from pathlib import Path


from .calibration import (
    EstimationProblem,
    chain_diagnostics,
    dram_sample,
    run_restarts,
)
from .costs import cost_report, default_grid, load_cost_params, report_payload
from .data import (
    PipelineArtifact,
    load_artifact,
    load_case_series,
    load_scenario,
    provenance_hash,
    save_artifact,
    scenario_to_dict,
)
from .errors import ArtifactFormatError, ConfigError, ProvenanceMismatchWarning
from .model import simulate_scenario
from .pareto import (
    MooProblem,
    front_from_payload,
    front_to_payload,
    optimize_many,
)
from .sensitivity import default_spec, run_sensitivity, transmission_study_spec

CHAIN_SEED_OFFSET = 1_000
SENSITIVITY_SEED_OFFSET = 2_000
OPTIMIZE_SEED_OFFSET = 3_000


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, ArtifactFormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epicost",
        description="Epidemic intervention planning: simulate, calibrate, "
                    "optimize schedules, and price strategies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario, write a trajectory CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=stage_simulate)

    p = sub.add_parser("calibrate", help="fit policy parameters to case data")
    p.add_argument("--scenario", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--country", required=True)
    p.add_argument("--start", default=None, help="ISO date")
    p.add_argument("--end", default=None, help="ISO date")
    p.add_argument("--restarts", type=int, default=25)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--chain-length", type=int, default=1_000_000)
    p.add_argument("--thin", type=int, default=100)
    p.add_argument("--sigma-obs", type=float, default=None)
    p.add_argument("--xi-max", type=float, default=10.0)
    p.add_argument("--out-estimate", required=True)
    p.add_argument("--out-chain", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=stage_calibrate)

    p = sub.add_parser("sensitivity", help="LHS + PRCC study, tidy CSV output")
    p.add_argument("--scenario", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--study", choices=["default", "transmission"],
                   default="transmission")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=stage_sensitivity)

    p = sub.add_parser("optimize", help="NSGA-II schedule search, front artifact")
    p.add_argument("--scenario", required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--objective-form", choices=["incidence", "averted"],
                   default="incidence")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--xi", type=float, default=None, help="override scenario xi")
    p.add_argument("--tau", type=float, default=None, help="override scenario tau")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=stage_optimize)

    p = sub.add_parser("cost", help="price a front, write cost map + segments")
    p.add_argument("--front", required=True)
    p.add_argument("--costs", required=True)
    p.add_argument("--grid-min", type=float, default=1e3)
    p.add_argument("--grid-max", type=float, default=1e7)
    p.add_argument("--grid-n", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=stage_cost)

    p = sub.add_parser("serve", help="HTTP service over a precomputed front")
    p.add_argument("--front", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=stage_serve)

    p = sub.add_parser("pipeline", help="all stages end to end, one seed")
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=stage_pipeline)

    return parser


# --------------------------------------------------------------- stages

def write_trajectory_csv(traj, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s", "e", "i", "q", "r", "d",
                         "cumulative_confirmed", "cumulative_incidence"])
        for k in range(traj.times.size):
            writer.writerow([
                repr(float(traj.times[k])),
                *(repr(float(v)) for v in traj.states[k]),
                repr(float(traj.cumulative_confirmed[k])),
                repr(float(traj.cumulative_incidence[k])),
            ])


def stage_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.step is not None:
        from dataclasses import replace
        scenario = replace(scenario, step=args.step)
    traj = simulate_scenario(scenario)
    write_trajectory_csv(traj, args.out)
    print(f"wrote {args.out}: {traj.times.size} rows, "
          f"final confirmed {traj.final_confirmed:.1f}")
    return 0


def _calibration_problem(scenario, args) -> EstimationProblem:
    start = date.fromisoformat(args.start) if args.start else None
    end = date.fromisoformat(args.end) if args.end else None
    series = load_case_series(args.data, args.country, start, end)
    return EstimationProblem(
        disease=scenario.disease,
        population=scenario.population,
        data=series,
        xi_max=args.xi_max,
        step=scenario.step,
    )


def stage_calibrate(args) -> int:
    scenario = load_scenario(args.scenario)
    problem = _calibration_problem(scenario, args)
    config = {
        "scenario": scenario_to_dict(scenario),
        "data": {"country": args.country, "start": args.start, "end": args.end,
                 "n_days": problem.data.n_days},
        "restarts": args.restarts,
        "budget": args.budget,
        "chain_length": args.chain_length,
        "xi_max": args.xi_max,
    }
    prov = provenance_hash(config, seed=args.seed)

    estimates, best = run_restarts(problem, args.restarts, args.budget, args.seed)
    names = [p.name for p in problem.theta_spec]
    save_artifact(PipelineArtifact(
        kind="estimate",
        payload={
            "names": names,
            "theta": best.theta.tolist(),
            "loss_value": best.loss_value,
            "evaluations_used": best.evaluations_used,
            "restarts": [
                {"theta": e.theta.tolist(), "loss_value": e.loss_value}
                for e in estimates
            ],
        },
        provenance=prov,
    ), args.out_estimate)

    chain = dram_sample(problem, best, args.chain_length,
                        args.seed + CHAIN_SEED_OFFSET, sigma_obs=args.sigma_obs)
    diag = chain_diagnostics(chain)
    post = chain.posterior[::args.thin]
    save_artifact(PipelineArtifact(
        kind="chain",
        payload={
            "names": names,
            "samples": [row.tolist() for row in post],
            "log_posterior": chain.log_posterior[chain.burn_in::args.thin].tolist(),
            "acceptance_rate": chain.acceptance_rate,
            "iterations": args.chain_length,
            "burn_in": chain.burn_in,
            "thin": args.thin,
            "diagnostics": {
                "means": diag.means.tolist(),
                "ci_lower": diag.ci_lower.tolist(),
                "ci_upper": diag.ci_upper.tolist(),
                "correlation": [row.tolist() for row in diag.correlation],
                "zero_variance": list(diag.zero_variance),
            },
        },
        provenance=prov,
    ), args.out_chain)

    # informational only: how the fit compares to the scenario's reference
    # policy constants (no tolerance is asserted anywhere)
    print(f"best loss {best.loss_value:.4g} after {args.restarts} restarts")
    print(f"xi  estimated {best.theta[0]:.4f}  (scenario reference {scenario.policy.xi})")
    print(f"tau estimated {best.theta[1]:.4f}  (scenario reference {scenario.policy.tau})")
    print(f"chain acceptance {chain.acceptance_rate:.3f}")
    return 0


def stage_sensitivity(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.study == "transmission":
        spec = transmission_study_spec(scenario, samples=args.samples)
    else:
        spec = default_spec(scenario, samples=args.samples)
    result = run_sensitivity(spec, scenario, seed=args.seed + SENSITIVITY_SEED_OFFSET)
    result.to_csv(args.out)
    if result.dropped_samples:
        print(f"dropped {result.dropped_samples} failed samples")
    print(f"wrote {args.out}: {len(result.parameters)} parameters "
          f"x {len(result.times)} times (excluded: {list(result.excluded) or 'none'})")
    return 0


def stage_optimize(args) -> int:
    scenario = load_scenario(args.scenario)
    xi = scenario.policy.xi if args.xi is None else args.xi
    tau = scenario.policy.tau if args.tau is None else args.tau
    problem = MooProblem(
        disease=scenario.disease, xi=xi, tau=tau,
        population=scenario.population, horizon=scenario.horizon,
        step=scenario.step, objective_form=args.objective_form,
    )
    front = optimize_many(problem, runs=args.runs, population=args.population,
                          generations=args.generations,
                          seed=args.seed + OPTIMIZE_SEED_OFFSET,
                          workers=args.workers)
    payload = front_to_payload(front)
    payload["problem"] = problem.to_dict()
    payload["settings"] = {"runs": args.runs, "population": args.population,
                           "generations": args.generations, "seed": args.seed}
    save_artifact(PipelineArtifact(kind="front", payload=payload,
                                   provenance=front.provenance), args.out)
    print(f"wrote {args.out}: {len(front)} non-dominated points, "
          f"f1 in [{front.f1_values.min():.3f}, {front.f1_values.max():.3f}]")
    return 0


def stage_cost(args) -> int:
    artifact = load_artifact(args.front, expected_kind="front")
    expected = provenance_hash(artifact.payload["problem"])
    if artifact.provenance != expected:
        warnings.warn(
            "front artifact provenance does not match its own problem config",
            ProvenanceMismatchWarning,
        )
    front = front_from_payload(artifact.payload, artifact.provenance)
    horizon = artifact.payload["problem"]["horizon"]
    params = load_cost_params(args.costs)
    grid = default_grid(args.grid_min, args.grid_max, args.grid_n)
    report = cost_report(front, params, horizon, grid)
    payload = report_payload(report, front)
    payload["horizon"] = horizon
    payload["front_provenance"] = front.provenance
    payload["costs"] = {
        "gdp": params.gdp, "gdp_max_reduction": params.gdp_max_reduction,
        "hospitalization_cost": params.hospitalization_cost,
        "vsl": params.vsl, "fatality": params.fatality,
    }
    prov = provenance_hash({
        "front": front.provenance, "costs": payload["costs"],
        "grid": [args.grid_min, args.grid_max, args.grid_n],
    })
    save_artifact(PipelineArtifact(kind="costmap", payload=payload,
                                   provenance=prov), args.out)
    if args.csv:
        seg_of = {}
        for sid, seg in enumerate(report.segmentation.segments):
            for k, g in enumerate(report.cost_map.grid):
                if seg.lo <= g <= seg.hi:
                    seg_of[k] = sid
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cost_per_infection", "optimal_f1",
                             "optimal_total_cost", "segment"])
            for k, g in enumerate(report.cost_map.grid):
                writer.writerow([repr(float(g)),
                                 repr(float(report.cost_map.optimal_f1[k])),
                                 repr(float(report.cost_map.optimal_total_cost[k])),
                                 seg_of[k]])
    opt = front.points[report.optimal_index]
    print(f"c1 {report.c1:.6g} USD/day, c2 {report.c2:.6g} USD/infection")
    print(f"cost-optimal point: f1 {opt.f1:.4f}, total {report.optimal_total_cost:.6g} USD, "
          f"{len(report.segmentation)} pattern segments")
    return 0


def resolve_bind(host: str, port: int, env: dict | None = None) -> tuple[str, int]:
    """EPICOST_BIND=host:port (or :port) overrides the CLI flags."""
    bind = (env if env is not None else os.environ).get("EPICOST_BIND")
    if not bind:
        return host, port
    bound_host, _, port_text = bind.rpartition(":")
    try:
        return (bound_host or host), int(port_text)
    except ValueError as exc:
        raise ConfigError(f"EPICOST_BIND must look like host:port, got {bind!r}") from exc


def stage_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, port = resolve_bind(args.host, args.port)
    app = create_app(args.front, args.scenario)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def stage_pipeline(args) -> int:
    config_path = Path(args.config)
    with open(config_path) as fh:
        config = json.load(fh)
    base = config_path.parent
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    scenario_path = resolve(config["scenario"])
    scenario = load_scenario(scenario_path)

    ns = argparse.Namespace(scenario=str(scenario_path),
                            out=str(outdir / "trajectory.csv"), step=None)
    stage_simulate(ns)

    cal = config.get("calibrate", {})
    data_cfg = config["data"]
    ns = argparse.Namespace(
        scenario=str(scenario_path),
        data=str(resolve(data_cfg["path"])),
        country=data_cfg["country"],
        start=data_cfg.get("start"),
        end=data_cfg.get("end"),
        restarts=cal.get("restarts", 25),
        budget=cal.get("budget", 100_000),
        chain_length=cal.get("chain_length", 1_000_000),
        thin=cal.get("thin", 100),
        sigma_obs=cal.get("sigma_obs"),
        xi_max=cal.get("xi_max", 10.0),
        out_estimate=str(outdir / "artifact.estimate.json"),
        out_chain=str(outdir / "artifact.chain.json"),
        seed=args.seed,
    )
    stage_calibrate(ns)
    estimate = load_artifact(ns.out_estimate, expected_kind="estimate")
    theta = estimate.payload["theta"]

    sens = config.get("sensitivity", {})
    ns = argparse.Namespace(
        scenario=str(scenario_path),
        samples=sens.get("samples", 1000),
        study=sens.get("study", "transmission"),
        out=str(outdir / "sensitivity.csv"),
        seed=args.seed,
    )
    stage_sensitivity(ns)

    opt = config.get("optimize", {})
    ns = argparse.Namespace(
        scenario=str(scenario_path),
        runs=opt.get("runs", 100),
        population=opt.get("population", 100),
        generations=opt.get("generations", 200),
        objective_form=opt.get("objective_form", "incidence"),
        workers=opt.get("workers", 1),
        xi=theta[0],            # optimize around the calibrated policy
        tau=theta[1],
        out=str(outdir / "artifact.front.json"),
        seed=args.seed,
    )
    stage_optimize(ns)

    cost = config.get("cost", {})
    grid_cfg = cost.get("grid", {})
    ns = argparse.Namespace(
        front=str(outdir / "artifact.front.json"),
        costs=str(resolve(cost["costs"])),
        grid_min=grid_cfg.get("min", 1e3),
        grid_max=grid_cfg.get("max", 1e7),
        grid_n=grid_cfg.get("n", 200),
        out=str(outdir / "artifact.costmap.json"),
        csv=str(outdir / "costmap.csv"),
    )
    stage_cost(ns)
    print(f"pipeline complete: artifacts in {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
