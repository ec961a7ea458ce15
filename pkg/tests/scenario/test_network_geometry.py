# File: test_network_geometry.py
# Description: Unit tests for the NetworkGeometry class.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.scenario.system_params import SystemParams


@pytest.fixture
def geometry():
    """
    Layout of the default seven-cell scenario.
    """
    return NetworkGeometry.build_geometry(SystemParams())


def test_shapes(geometry):
    """
    Test the number of cells and UEs.
    """
    assert geometry.num_cells == 7
    assert geometry.num_ues == 10
    assert geometry.ue_positions.shape == (7, 10)


def test_center_bs_at_origin(geometry):
    """
    Test that cell 0 is the center cell.
    """
    assert geometry.bs_positions[0] == 0.0


def test_neighbors_on_ring(geometry):
    """
    Test that the neighbors sit at the inter-BS distance, 60 degrees apart.
    """
    neighbors = geometry.bs_positions[1:]
    assert np.allclose(np.abs(neighbors), 300.0)
    angles = np.rad2deg(np.angle(neighbors)) % 360.0
    assert np.allclose(angles, [0.0, 60.0, 120.0, 180.0, 240.0, 300.0])


def test_ues_on_ring_around_serving_bs(geometry):
    """
    Test that every UE is at the ring radius from its serving BS.
    """
    for l in range(7):
        for k in range(10):
            assert geometry.distance(l, l, k) == pytest.approx(120.0)


def test_azimuth_of_own_ues(geometry):
    """
    Test that UE k of the center cell is at azimuth 360 k / K.
    """
    assert geometry.azimuth(0, 0, 0) == pytest.approx(0.0)
    assert geometry.azimuth(0, 0, 1) == pytest.approx(np.deg2rad(36.0))


def test_interfering_ue_farther_than_own(geometry):
    """
    Test that the same-pilot UE of a neighbor cell is farther from the center BS.
    """
    for l in range(1, 7):
        assert geometry.distance(0, l, 0) > geometry.distance(0, 0, 0)


def test_single_cell():
    """
    Test that a single-cell layout has only the center BS.
    """
    geometry = NetworkGeometry.build_geometry(SystemParams(L=1, K=2))
    assert geometry.num_cells == 1
    assert geometry.bs_positions.tolist() == [0j]


def test_rotation_permutes_center_covariances():
    """
    Test that rotating every position by 60 degrees about the center BS only permutes the center covariances.

    With K = 6 the rotation moves neighbor cell l to cell l + 1 (cell 6 to cell 1) and UE k to UE k + 1 mod 6.
    """
    params = SystemParams(M=8, K=6, L=7)
    geometry = NetworkGeometry.build_geometry(params)
    rotation = np.exp(1j * np.deg2rad(60.0))
    rotated = NetworkGeometry(bs_positions=rotation * geometry.bs_positions,
                              ue_positions=rotation * geometry.ue_positions)

    original = CovarianceSet.build_covariance_set(geometry, params, observing_bs=(0,))
    permuted = CovarianceSet.build_covariance_set(rotated, params, observing_bs=(0,))

    def cell_after_rotation(l):
        return 0 if l == 0 else l % 6 + 1

    for l in range(7):
        for k in range(6):
            expected = original.R(0, cell_after_rotation(l), (k + 1) % 6)
            assert np.max(np.abs(permuted.R(0, l, k) - expected)) <= 1e-10 * np.max(np.abs(expected))
