"""Pytest configuration and shared fixtures."""

import tempfile
from pathlib import Path
from typing import Dict, Generator

import numpy as np
import pytest

from af_gauge.algebra.afcore import SCAN_CASES, EmbeddingSpec, case_embedding, validate_embedding
from af_gauge.algebra.lift import LiftedBasis, build_lifted_basis
from af_gauge.algebra.matalg import SlBasis, gellmann_basis
from af_gauge.config.settings import Settings


@pytest.fixture(scope="session")
def test_settings() -> Settings:
    """Create test settings."""
    return Settings(
        testing=True,
        log_level="WARNING",  # Reduce log noise in tests
        debug=False,
    )


@pytest.fixture(scope="session")
def sl2() -> SlBasis:
    return gellmann_basis(2)


@pytest.fixture(scope="session")
def sl3() -> SlBasis:
    return gellmann_basis(3)


@pytest.fixture(scope="session")
def case_specs() -> Dict[str, EmbeddingSpec]:
    """The four scan cases M2->M3, M2+M2->M4, M2+M2->M5, M2+M3->M5."""
    return {name: case_embedding(name) for name in SCAN_CASES}


@pytest.fixture(scope="session")
def lifted_cases(case_specs) -> Dict[str, LiftedBasis]:
    return {name: build_lifted_basis(spec) for name, spec in case_specs.items()}


@pytest.fixture(scope="session")
def case1(lifted_cases) -> LiftedBasis:
    return lifted_cases["case1"]


@pytest.fixture(scope="session")
def case2(lifted_cases) -> LiftedBasis:
    return lifted_cases["case2"]


@pytest.fixture(scope="session")
def m2_identity() -> LiftedBasis:
    """The identity embedding M2 -> M2: no free fields at all."""
    return build_lifted_basis(validate_embedding((2,), (2,), ((1,),)))


@pytest.fixture(scope="session")
def double_copy() -> LiftedBasis:
    """M2 -> M5 with multiplicity 2 and a one-row pad."""
    return build_lifted_basis(validate_embedding((2,), (5,), ((2,),)))


@pytest.fixture
def rng() -> np.random.Generator:
    """Fresh seeded generator per test."""
    return np.random.default_rng(20240611)


@pytest.fixture
def temp_output_dir() -> Generator[Path, None, None]:
    """Temporary output directory removed after the test."""
    with tempfile.TemporaryDirectory(prefix="af_gauge_") as directory:
        yield Path(directory)
