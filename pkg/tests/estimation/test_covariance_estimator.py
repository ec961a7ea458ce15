# File: test_covariance_estimator.py
# Description: Unit tests for the CovarianceEstimator class.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.channels.observation_kind import ObservationKind
from mimo_covariance.channels.pilot_observer import PilotObserver
from mimo_covariance.estimation.covariance_estimator import (CovarianceEstimator, RegularizationFactors,
                                                             SampleCovariance)
from mimo_covariance.services.matrix_service import MatrixService
from mimo_covariance.services.random_service import RandomService


def _observations(rng, M, N):
    return RandomService.complex_normal(rng, (M, N))


def test_sample_covariance_list_and_array_agree(rng):
    """
    Test that a list of vectors and the stacked array give the same estimate.
    """
    Y = _observations(rng, 3, 5)
    from_array = CovarianceEstimator.sample_covariance(Y)
    from_list = CovarianceEstimator.sample_covariance([Y[:, n] for n in range(5)])
    assert np.allclose(from_array.S, from_list.S)
    assert from_array.n_obs == from_list.n_obs == 5


def test_sample_covariance_hermitian_and_normalized(rng):
    """
    Test that S is exactly Hermitian and equals Y Y^H / N.
    """
    Y = _observations(rng, 4, 6)
    sample = CovarianceEstimator.sample_covariance(Y)
    assert MatrixService.is_hermitian(sample.S)
    assert np.allclose(sample.S, Y @ Y.conj().T / 6)


def test_sample_covariance_single_observation():
    """
    Test that one observation gives the rank-one matrix y y^H.
    """
    y = np.array([1.0, 1j])
    sample = CovarianceEstimator.sample_covariance([y])
    assert np.allclose(sample.S, np.outer(y, y.conj()))


def test_sample_covariance_empty():
    """
    Test that no observations raise ValueError.
    """
    with pytest.raises(ValueError):
        CovarianceEstimator.sample_covariance([])
    with pytest.raises(ValueError):
        CovarianceEstimator.sample_covariance(np.zeros((3, 0)))


def test_merge_equals_union(rng):
    """
    Test that merging the estimates of two batches gives the estimate of their union.
    """
    first, second = _observations(rng, 3, 4), _observations(rng, 3, 7)
    merged = CovarianceEstimator.merge(CovarianceEstimator.sample_covariance(first),
                                       CovarianceEstimator.sample_covariance(second))
    union = CovarianceEstimator.sample_covariance(np.hstack([first, second]))
    assert merged.n_obs == 11
    assert np.allclose(merged.S, union.S)


def test_merge_dimension_mismatch(rng):
    """
    Test that merging matrices of different sizes raises ValueError.
    """
    with pytest.raises(ValueError):
        CovarianceEstimator.merge(SampleCovariance(np.eye(2), 1), SampleCovariance(np.eye(3), 1))


@pytest.fixture
def sample_S():
    """
    Sample covariance of three observations in six dimensions.
    """
    return CovarianceEstimator.sample_covariance(_observations(np.random.default_rng(4), 6, 3)).S


def test_shrink_endpoints(sample_S):
    """
    Test that factor 1 keeps S and factor 0 keeps its diagonal, both exactly.
    """
    assert np.array_equal(CovarianceEstimator.shrink(sample_S, 1.0), sample_S)
    assert np.array_equal(CovarianceEstimator.shrink(sample_S, 0.0), np.diag(np.diag(sample_S)))


def test_shrink_diagonal_kept_and_off_diagonal_scaled(sample_S):
    """
    Test that the diagonal is unchanged and the off-diagonal entries scale by the factor.
    """
    shrunk = CovarianceEstimator.shrink(sample_S, 0.3)
    assert np.array_equal(np.diag(shrunk), np.diag(sample_S))
    off_diagonal = ~np.eye(6, dtype=bool)
    assert np.allclose(shrunk[off_diagonal], 0.3 * sample_S[off_diagonal])


def test_shrink_full_rank_with_few_observations(sample_S):
    """
    Test that three observations in six dimensions give a full-rank matrix for any factor below 1.
    """
    assert MatrixService.effective_rank(sample_S, threshold=1e-12) == 3
    for factor in (0.0, 0.5, 0.95):
        assert MatrixService.relative_min_eigenvalue(CovarianceEstimator.shrink(sample_S, factor)) > 0.0


def test_shrink_accepts_sample_covariance(sample_S):
    """
    Test that a SampleCovariance and its matrix give the same result.
    """
    sample = SampleCovariance(S=sample_S, n_obs=3)
    assert np.array_equal(CovarianceEstimator.shrink(sample, 0.4), CovarianceEstimator.shrink(sample_S, 0.4))


def test_shrink_does_not_modify_input(sample_S):
    """
    Test that the input matrix is left unchanged.
    """
    copy = sample_S.copy()
    CovarianceEstimator.shrink(sample_S, 0.2)
    assert np.array_equal(sample_S, copy)


@pytest.mark.parametrize('factor', [-0.1, 1.1])
def test_shrink_invalid_factor(sample_S, factor):
    """
    Test that a factor outside [0, 1] raises ValueError.
    """
    with pytest.raises(ValueError):
        CovarianceEstimator.shrink(sample_S, factor)


def test_debiased_clean_covariance_removes_noise(small_covset):
    """
    Test that the debiased sample covariance of clean observations approaches R.
    """
    y = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CLEAN, 0, 0, small_covset, 100_000,
                                    np.random.default_rng(8))
    estimate = CovarianceEstimator.debiased_clean_covariance(y, small_covset.params)
    R = small_covset.R(0, 0, 0)
    assert np.linalg.norm(estimate - R) / np.linalg.norm(R) < 0.05


def test_estimate_R_direct_may_be_indefinite(small_covset):
    """
    Test that few clean observations can give an indefinite estimate, which is kept as is.
    """
    rng = np.random.default_rng(12)
    minimum = min(MatrixService.relative_min_eigenvalue(CovarianceEstimator.estimate_R_direct(
        PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CLEAN, 0, 0, small_covset, 2, rng),
        1.0, small_covset.params)) for _ in range(10))
    assert minimum < 0.0


def test_estimate_R_direct_shrinks(small_covset):
    """
    Test that estimate_R_direct equals the shrunk debiased sample covariance.
    """
    y = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CLEAN, 0, 0, small_covset, 10,
                                    np.random.default_rng(1))
    expected = CovarianceEstimator.shrink(CovarianceEstimator.debiased_clean_covariance(y, small_covset.params), 0.6)
    assert np.allclose(CovarianceEstimator.estimate_R_direct(y, 0.6, small_covset.params), expected)


def test_via_q_is_unbiased(small_covset):
    """
    Test that the average of many Via-Q differences approaches R.
    """
    rng = np.random.default_rng(21)
    total = np.zeros((4, 4), dtype=complex)
    n_realizations = 500
    for _ in range(n_realizations):
        regular = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_REGULAR, 0, 0, small_covset, 100, rng)
        contaminants = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CONTAMINANTS, 0, 0, small_covset,
                                                   10, rng)
        total += CovarianceEstimator.via_q_difference(CovarianceEstimator.sample_covariance(regular),
                                                      CovarianceEstimator.sample_covariance(contaminants))
    R = small_covset.R(0, 0, 0)
    assert np.linalg.norm(total / n_realizations - R) / np.linalg.norm(R) < 0.1


def test_estimate_R_via_q():
    """
    Test the difference of two known sample covariance matrices, shrunk.
    """
    q = SampleCovariance(S=np.array([[3.0, 1.0], [1.0, 2.0]]), n_obs=10)
    q_minus = SampleCovariance(S=np.array([[1.0, 0.5], [0.5, 1.0]]), n_obs=1)
    assert np.allclose(CovarianceEstimator.estimate_R_via_q(q, q_minus, 1.0), [[2.0, 0.5], [0.5, 1.0]])
    assert np.allclose(CovarianceEstimator.estimate_R_via_q(q, q_minus, 0.0), [[2.0, 0.0], [0.0, 1.0]])


def test_via_q_dimension_mismatch():
    """
    Test that sample covariance matrices of different sizes raise ValueError.
    """
    with pytest.raises(ValueError):
        CovarianceEstimator.via_q_difference(SampleCovariance(np.eye(2), 1), SampleCovariance(np.eye(3), 1))


def test_estimate_Q(rng):
    """
    Test that estimate_Q shrinks the sample covariance of the regular observations.
    """
    Y = _observations(rng, 3, 8)
    expected = CovarianceEstimator.shrink(CovarianceEstimator.sample_covariance(Y), 0.25)
    assert np.allclose(CovarianceEstimator.estimate_Q(Y, 0.25), expected)


def test_regularization_factors_range():
    """
    Test that factors outside [0, 1] raise ValueError.
    """
    RegularizationFactors(eta=0.0, mu=1.0)
    with pytest.raises(ValueError):
        RegularizationFactors(eta=1.5, mu=0.5)
    with pytest.raises(ValueError):
        RegularizationFactors(eta=0.5, mu=-0.5)
