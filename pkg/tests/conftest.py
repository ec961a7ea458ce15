# File: conftest.py
# Description: Shared fixtures with small scenarios.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.scenario.system_params import SystemParams


@pytest.fixture
def small_params():
    """
    Two cells with two UEs each and four antennas.
    """
    return SystemParams(M=4, K=2, L=2)


@pytest.fixture
def small_covset(small_params):
    """
    Covariance set of the small scenario, observed by both BSs.
    """
    return CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(small_params), small_params)


@pytest.fixture
def oracle_covset():
    """
    Covariance set with eight antennas, the size of the Monte-Carlo checks.
    """
    params = SystemParams(M=8, K=2, L=2)
    return CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params, observing_bs=(0,))


@pytest.fixture
def rng():
    """
    Generator with a fixed seed.
    """
    return np.random.default_rng(20250101)


@pytest.fixture(scope="session")
def default_covset():
    """
    Covariance set of the seven-cell scenario with 100 antennas, seen by the center BS.
    """
    params = SystemParams()
    return CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params, observing_bs=(0,))
