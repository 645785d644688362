"""Print the frozen golden values used by the test suite.

Currently one value: the final cumulative incidence of the uncontrolled
(all-zero schedule) importation-driven epidemic under the Korea scenario
constants. If the integrator changes on purpose, rerun this and update
UNCONTROLLED_F2 in tests/test_pareto.py.
"""

from epicost.model import DiseaseParams, MuSchedule
from epicost.pareto import MooProblem, objectives

problem = MooProblem(
    disease=DiseaseParams(r0=2.87, kappa=0.25, alpha=0.1, gamma=1 / 14,
                          fatality=0.0173),
    xi=0.278,
    tau=0.6218,
    population=51_710_000.0,
    horizon=336.0,
)

if __name__ == "__main__":
    f1, f2 = objectives(MuSchedule.constant(0.0, problem.horizon), problem)
    print(f"uncontrolled final cumulative incidence: {f2!r}")
