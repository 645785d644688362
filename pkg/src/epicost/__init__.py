"""Cost-optimal epidemic intervention planning.

Pipeline: simulate a SEIQRD model with time-varying transmission
reduction, calibrate policy parameters to case data (differential
evolution + DRAM posterior), rank parameter influence with PRCC, search
reduction schedules with NSGA-II, convert the front into money, and
serve the result to an interactive dashboard.
"""

from .calibration import (
    Chain,
    ChainDiagnostics,
    Estimate,
    EstimationProblem,
    chain_diagnostics,
    de_minimize,
    de_optimize,
    dram,
    dram_sample,
    loss,
    run_restarts,
)
from .costs import (
    CopSegmentation,
    CostOptimalMap,
    CostParams,
    classify_pattern,
    cost_curve,
    cost_optimal,
    cost_report,
    load_cost_params,
    segment_cops,
    sweep_cost_per_infection,
    unit_costs,
)
from .data import (
    CaseSeries,
    PipelineArtifact,
    load_artifact,
    load_case_series,
    load_scenario,
    provenance_hash,
    save_artifact,
)
from .errors import (
    ArtifactFormatError,
    ConfigError,
    DataIntegrityWarning,
    DegeneratePopulationError,
    ProvenanceMismatchWarning,
    ScheduleRangeError,
)
from .model import (
    DiseaseParams,
    MuSchedule,
    PolicyParams,
    ScenarioConfig,
    StateVector,
    Trajectory,
    derivatives,
    force_of_infection,
    mu_at,
    mu_time_average,
    simulate,
    simulate_scenario,
)
from .pareto import (
    MooProblem,
    ParetoFront,
    ParetoPoint,
    assemble_front,
    hypervolume,
    nsga2_run,
    objectives,
    optimize_many,
    select_by_f2_fraction,
)
from .sensitivity import (
    PrccResult,
    SensitivitySpec,
    default_spec,
    lhs_sample,
    prcc,
    run_sensitivity,
    transmission_study_spec,
)

__version__ = "0.1.0"
