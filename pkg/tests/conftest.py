"""Shared fixtures: the standard measurement setup and synthesized data.

The expensive near-field assemblies are session-scoped so the forward,
monotonicity, reconstruction, and acceptance tests share them.
"""

import numpy as np
import pytest

from monoscat import (
    Circle,
    ContrastSpec,
    Ellipse,
    MeasurementLine,
    WaveConfig,
    assemble_near_field,
    rasterize,
)

RNG_SEED = 20260817


@pytest.fixture(scope="session")
def wave5():
    return WaveConfig(k=5.0)


@pytest.fixture(scope="session")
def line30():
    return MeasurementLine(a=-25.0, b=25.0, height_m=20.0, d=30)


@pytest.fixture(scope="session")
def disk_contrast():
    return ContrastSpec(shapes=(Circle(center=(0.5, 0.5), radius=0.2),), amplitude=1.0)


@pytest.fixture(scope="session")
def ellipse_contrast():
    return ContrastSpec(
        shapes=(Ellipse(center=(0.5, 0.6), semi_axes=(0.15, 0.3)),), amplitude=1.0
    )


@pytest.fixture(scope="session")
def disk_grid48(disk_contrast):
    return rasterize(disk_contrast, 48)


@pytest.fixture(scope="session")
def nf_disk(wave5, line30, disk_grid48):
    return assemble_near_field(wave5, disk_grid48, line30)


@pytest.fixture(scope="session")
def nf_ellipse(wave5, line30, ellipse_contrast):
    return assemble_near_field(wave5, rasterize(ellipse_contrast, 48), line30)


@pytest.fixture()
def rng():
    return np.random.default_rng(RNG_SEED)
