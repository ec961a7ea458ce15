# File: test_channel_estimator.py
# Description: Unit tests for the ChannelEstimator class.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.channels.channel_sampler import ChannelSampler
from mimo_covariance.channels.observation_kind import ObservationKind
from mimo_covariance.channels.pilot_observer import PilotObservation
from mimo_covariance.estimation.channel_estimator import ChannelEstimator, FilterMatrix
from mimo_covariance.estimation.filter_type import AcquisitionScheme, FilterType
from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.scenario.system_params import SystemParams
from mimo_covariance.services.matrix_service import SingularMatrixError
from mimo_covariance.services.random_service import RandomService


def test_filter_type_values():
    """
    Test the FilterType and AcquisitionScheme values.
    """
    assert {kind.value for kind in FilterType} == {'mmse', 'approx_mmse', 'ls'}
    assert {scheme.value for scheme in AcquisitionScheme} == {'rdirect', 'viaq'}


def test_mmse_identity_at_full_scale(default_covset):
    """
    Test that the analytic MSE of the MMSE filter equals tr(R - Phi) for every center-cell UE.
    """
    for k in range(default_covset.params.K):
        R, Q = default_covset.R(0, 0, k), default_covset.Q(0, k)
        mmse = ChannelEstimator.mmse_filter(R, Q)
        assert mmse.kind == FilterType.FILTER_TYPE_MMSE
        reference = np.real(np.trace(R - mmse.phi))
        assert ChannelEstimator.analytic_mse(mmse, R, Q) == pytest.approx(reference, rel=1e-10)


def test_mmse_filter_single_antenna():
    """
    Test the scalar case R = 2, Q = 3: W = 2/3 and Phi = 4/3.
    """
    mmse = ChannelEstimator.mmse_filter(np.array([[2.0]]), np.array([[3.0]]))
    assert mmse.W[0, 0] == pytest.approx(2.0 / 3.0)
    assert mmse.phi[0, 0] == pytest.approx(4.0 / 3.0)


def test_ls_mse_single_cell():
    """
    Test that the LS MSE of a single cell with M = 4 and rho_tr = 1 is M / rho_tr = 4.
    """
    params = SystemParams(M=4, K=1, L=1)
    covset = CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params)
    ls = ChannelEstimator.ls_filter(4)
    assert ls.kind == FilterType.FILTER_TYPE_LS
    assert np.array_equal(ls.W, np.eye(4))
    assert ChannelEstimator.analytic_mse(ls, covset.R(0, 0, 0), covset.Q(0, 0)) == pytest.approx(4.0)


def test_ls_mse_is_contamination_plus_noise(small_covset):
    """
    Test that the LS MSE equals tr(Q) - tr(R).
    """
    R, Q = small_covset.R(0, 0, 1), small_covset.Q(0, 1)
    expected = np.real(np.trace(Q) - np.trace(R))
    assert ChannelEstimator.analytic_mse(ChannelEstimator.ls_filter(4), R, Q) == pytest.approx(expected)


def test_zero_filter(small_covset):
    """
    Test that the zero filter has MSE tr(R) and normalized MSE 1.
    """
    R, Q = small_covset.R(0, 0, 0), small_covset.Q(0, 0)
    zero = FilterMatrix(W=np.zeros((4, 4), dtype=complex), kind=FilterType.FILTER_TYPE_APPROX_MMSE)
    assert ChannelEstimator.analytic_mse(zero, R, Q) == pytest.approx(np.real(np.trace(R)))
    assert ChannelEstimator.normalized_mse(zero, R, Q) == pytest.approx(1.0)
    assert np.array_equal(ChannelEstimator.estimate_channel(zero, np.ones(4)), np.zeros(4))


def test_mmse_is_stationary(small_covset):
    """
    Test that random perturbations of the MMSE filter never lower the MSE.
    """
    rng = np.random.default_rng(17)
    R, Q = small_covset.R(0, 0, 0), small_covset.Q(0, 0)
    mmse = ChannelEstimator.mmse_filter(R, Q)
    best = ChannelEstimator.analytic_mse(mmse, R, Q)
    for _ in range(100):
        perturbed = FilterMatrix(W=mmse.W + 1e-3 * RandomService.complex_normal(rng, (4, 4)),
                                 kind=FilterType.FILTER_TYPE_APPROX_MMSE)
        assert ChannelEstimator.analytic_mse(perturbed, R, Q) >= best - 1e-12


def test_analytic_mse_unitary_invariance(oracle_covset):
    """
    Test that conjugating W, R and Q by the same unitary matrix leaves the analytic MSE unchanged.
    """
    rng = np.random.default_rng(18)
    U, _ = np.linalg.qr(RandomService.complex_normal(rng, (8, 8)))
    R, Q = oracle_covset.R(0, 0, 0), oracle_covset.Q(0, 0)
    W = RandomService.complex_normal(rng, (8, 8)) / np.sqrt(8)

    def rotate(matrix):
        return U @ matrix @ U.conj().T

    original = ChannelEstimator.analytic_mse(FilterMatrix(W=W, kind=FilterType.FILTER_TYPE_APPROX_MMSE), R, Q)
    rotated = ChannelEstimator.analytic_mse(FilterMatrix(W=rotate(W), kind=FilterType.FILTER_TYPE_APPROX_MMSE),
                                            rotate(R), rotate(Q))
    assert rotated == pytest.approx(original, rel=1e-10, abs=1e-10)


def test_analytic_mse_matches_monte_carlo(oracle_covset):
    """
    Test that the analytic MSE of a random filter matches the brute-force MSE within 1%.
    """
    rng = np.random.default_rng(31)
    R, Q = oracle_covset.R(0, 0, 0), oracle_covset.Q(0, 0)
    W = RandomService.complex_normal(rng, (8, 8)) / np.sqrt(8)
    filter_matrix = FilterMatrix(W=W, kind=FilterType.FILTER_TYPE_APPROX_MMSE)

    n_draws = 400_000
    channels = ChannelSampler.draw_batch(oracle_covset, 0, n_draws, rng, ue_indices=[0])[:, 0]
    y = np.sum(channels, axis=0) + RandomService.complex_normal(rng, (8, n_draws))
    empirical = np.mean(np.sum(np.abs(channels[0] - ChannelEstimator.estimate_channel(filter_matrix, y)) ** 2, axis=0))

    assert empirical == pytest.approx(ChannelEstimator.analytic_mse(filter_matrix, R, Q), rel=0.01)


def test_mmse_mse_matches_monte_carlo(oracle_covset):
    """
    Test that the brute-force MSE of the MMSE filter matches tr(R - Phi) within 1%.
    """
    rng = np.random.default_rng(32)
    R, Q = oracle_covset.R(0, 0, 1), oracle_covset.Q(0, 1)
    mmse = ChannelEstimator.mmse_filter(R, Q)

    n_draws = 200_000
    channels = ChannelSampler.draw_batch(oracle_covset, 0, n_draws, rng, ue_indices=[1])[:, 0]
    y = np.sum(channels, axis=0) + RandomService.complex_normal(rng, (8, n_draws))
    empirical = np.mean(np.sum(np.abs(channels[0] - ChannelEstimator.estimate_channel(mmse, y)) ** 2, axis=0))

    assert empirical == pytest.approx(np.real(np.trace(R - mmse.phi)), rel=0.01)


def test_approx_mmse_filter_metadata():
    """
    Test that the factors and the scheme are stored with the filter.
    """
    result = ChannelEstimator.approx_mmse_filter(np.eye(2), 2.0 * np.eye(2), eta=0.5, mu=0.25,
                                                 scheme=AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q, n_q=10)
    assert result.kind == FilterType.FILTER_TYPE_APPROX_MMSE
    assert np.allclose(result.W, 0.5 * np.eye(2))
    assert (result.eta, result.mu, result.scheme) == (0.5, 0.25, AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q)


def test_approx_mmse_filter_true_covariances_give_mmse(small_covset):
    """
    Test that the approximate filter built from the true matrices is the MMSE filter.
    """
    R, Q = small_covset.R(0, 0, 0), small_covset.Q(0, 0)
    assert np.allclose(ChannelEstimator.approx_mmse_filter(R, Q).W, ChannelEstimator.mmse_filter(R, Q).W)


def test_approx_mmse_filter_singular_estimate():
    """
    Test that a singular estimate of Q raises SingularMatrixError naming eta and N_Q.
    """
    with pytest.raises(SingularMatrixError, match='eta=1.0, N_Q=1'):
        ChannelEstimator.approx_mmse_filter(np.eye(2), np.ones((2, 2)), eta=1.0, n_q=1)


def test_estimate_channel_accepts_observation():
    """
    Test that a PilotObservation and its vector give the same estimate.
    """
    filter_matrix = FilterMatrix(W=np.diag([1.0, 2.0]), kind=FilterType.FILTER_TYPE_APPROX_MMSE)
    observation = PilotObservation(y=np.array([1.0, 1j]), kind=ObservationKind.OBSERVATION_KIND_REGULAR)
    assert np.allclose(ChannelEstimator.estimate_channel(filter_matrix, observation), [1.0, 2j])
    assert np.allclose(ChannelEstimator.estimate_channel(filter_matrix, observation.y), [1.0, 2j])


def test_dimension_mismatch():
    """
    Test that mismatching dimensions raise ValueError.
    """
    ls = ChannelEstimator.ls_filter(3)
    with pytest.raises(ValueError):
        ChannelEstimator.estimate_channel(ls, np.ones(2))
    with pytest.raises(ValueError):
        ChannelEstimator.analytic_mse(ls, np.eye(2), np.eye(2))


def test_normalized_mse_zero_trace():
    """
    Test that a zero channel covariance raises ValueError.
    """
    with pytest.raises(ValueError):
        ChannelEstimator.normalized_mse(ChannelEstimator.ls_filter(2), np.zeros((2, 2)), np.eye(2))
