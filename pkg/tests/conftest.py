from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from epicost.data import load_scenario
from epicost.model import DiseaseParams, ScenarioConfig

settings.register_profile("epicost", deadline=None, max_examples=50)
settings.load_profile("epicost")

REPO = Path(__file__).resolve().parent.parent
KOREA_POPULATION = 51_710_000.0


@pytest.fixture(scope="session")
def table1_disease() -> DiseaseParams:
    # r0 2.87, latent 4 d, infectious 10 d, isolation 14 d, fatality 1.73%
    return DiseaseParams(r0=2.87, kappa=1 / 4, alpha=1 / 10, gamma=1 / 14, fatality=0.0173)


@pytest.fixture(scope="session")
def korea_scenario() -> ScenarioConfig:
    return load_scenario(REPO / "configs" / "scenario_korea.json")


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
