# File: test_covariance_set.py
# Description: Unit tests for the CovarianceSet class.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.scenario.system_params import SystemParams


def test_observation_covariance_assembly(small_covset, small_params):
    """
    Test that Q_jk = sum_l R_jlk + I / rho_tr.
    """
    for j in range(2):
        for k in range(2):
            expected = small_covset.R(j, 0, k) + small_covset.R(j, 1, k) + np.eye(4)
            assert np.allclose(small_covset.Q(j, k), expected, rtol=1e-12, atol=0.0)


def test_pilot_power_scales_noise():
    """
    Test that rho_tr scales the noise term of Q.
    """
    params = SystemParams(M=3, K=1, L=1, rho_tr=4.0)
    covset = CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params)
    assert np.allclose(covset.Q(0, 0) - covset.R(0, 0, 0), 0.25 * np.eye(3))


def test_matrices_are_read_only(small_covset):
    """
    Test that stored matrices cannot be modified.
    """
    with pytest.raises(ValueError):
        small_covset.R(0, 0, 0)[0, 0] = 1.0
    with pytest.raises(ValueError):
        small_covset.Q(0, 0)[0, 0] = 1.0


def test_unknown_index_raises(small_covset):
    """
    Test that indices outside the set raise IndexError.
    """
    with pytest.raises(IndexError):
        small_covset.R(0, 2, 0)
    with pytest.raises(IndexError):
        small_covset.Q(3, 0)


def test_factor_is_cached(small_covset):
    """
    Test that factor returns the same array on every call and reproduces R.
    """
    first = small_covset.factor(0, 1, 1)
    assert small_covset.factor(0, 1, 1) is first
    assert np.allclose(first @ first.conj().T, small_covset.R(0, 1, 1), atol=1e-10)


def test_interference_sum(small_covset):
    """
    Test that interference_sum adds every R_jli of BS j.
    """
    expected = sum(small_covset.R(1, l, i) for l in range(2) for i in range(2))
    assert np.allclose(small_covset.interference_sum(1), expected)


def test_list_keys_and_len(small_covset):
    """
    Test the keys of a two-cell, two-UE set observed by both BSs.
    """
    assert len(small_covset) == 8
    assert (1, 0, 1) in small_covset.list_keys()


def test_observing_bs_subset():
    """
    Test that only the requested BSs are built.
    """
    params = SystemParams(M=2, K=2, L=3)
    covset = CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params, observing_bs=(0,))
    assert covset.observing_bs == (0,)
    assert len(covset) == 6
    with pytest.raises(IndexError):
        covset.Q(1, 0)


def test_build_rejects_mismatch():
    """
    Test that a geometry of another size or an unknown BS raises ValueError.
    """
    params = SystemParams(M=2, K=2, L=2)
    other = NetworkGeometry.build_geometry(SystemParams(M=2, K=3, L=2))
    with pytest.raises(ValueError):
        CovarianceSet.build_covariance_set(other, params)
    with pytest.raises(ValueError):
        CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params, observing_bs=(2,))


def test_summary(small_covset):
    """
    Test that the own cell is the strongest in the summary of BS 0.
    """
    summary = small_covset.summary()
    assert summary['bs'] == 0
    assert summary['M'] == 4
    own, neighbor = summary['cells']
    assert own['mean_gain_db'] > neighbor['mean_gain_db']
    assert 1.0 <= own['mean_effective_rank'] <= 4.0
