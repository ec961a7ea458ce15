# File: test_covariance_acquisition.py
# Description: Unit tests for the CovarianceAcquisition class.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np
import pytest

from mimo_covariance.estimation.covariance_acquisition import CovarianceAcquisition, SamplingContext
from mimo_covariance.estimation.covariance_estimator import CovarianceEstimator, RegularizationFactors
from mimo_covariance.estimation.filter_type import AcquisitionScheme, FilterType
from mimo_covariance.services.matrix_service import MatrixService


def _context(covset, scheme, n_q=20, n_r=5):
    return SamplingContext(covset=covset, bs_index=0, ue_index=1, n_q=n_q, n_r=n_r, scheme=scheme)


@pytest.mark.parametrize('n_q, n_r', [(0, 1), (1, 0)])
def test_sampling_context_counts(small_covset, n_q, n_r):
    """
    Test that zero observations raise ValueError.
    """
    with pytest.raises(ValueError):
        _context(small_covset, AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q, n_q=n_q, n_r=n_r)


@pytest.mark.parametrize('scheme', list(AcquisitionScheme))
def test_acquire(small_covset, scheme):
    """
    Test the sizes and the Hermitian symmetry of an acquired realization.
    """
    samples = CovarianceAcquisition.acquire(_context(small_covset, scheme), np.random.default_rng(0))
    assert samples.q_sample.n_obs == 20
    assert samples.q_sample.S.shape == (4, 4)
    assert samples.r_sample.shape == (4, 4)
    assert MatrixService.is_hermitian(samples.r_sample, tolerance=1e-12)
    assert samples.context.scheme == scheme


def test_acquire_is_reproducible(small_covset):
    """
    Test that the same generator state gives identical samples.
    """
    context = _context(small_covset, AcquisitionScheme.ACQUISITION_SCHEME_R_DIRECT)
    first = CovarianceAcquisition.acquire(context, np.random.default_rng(3))
    second = CovarianceAcquisition.acquire(context, np.random.default_rng(3))
    assert np.array_equal(first.q_sample.S, second.q_sample.S)
    assert np.array_equal(first.r_sample, second.r_sample)


def test_acquire_statistics(small_covset):
    """
    Test that the averages of both estimates approach Q and R.
    """
    context = _context(small_covset, AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q, n_q=200, n_r=50)
    rng = np.random.default_rng(5)
    q_total = np.zeros((4, 4), dtype=complex)
    r_total = np.zeros((4, 4), dtype=complex)
    for _ in range(200):
        samples = CovarianceAcquisition.acquire(context, rng)
        q_total += samples.q_sample.S
        r_total += samples.r_sample

    Q, R = small_covset.Q(0, 1), small_covset.R(0, 0, 1)
    assert np.linalg.norm(q_total / 200 - Q) / np.linalg.norm(Q) < 0.05
    assert np.linalg.norm(r_total / 200 - R) / np.linalg.norm(R) < 0.1


def test_build_filter(small_covset):
    """
    Test that the filter is shrink(R) shrink(Q)^-1 and carries the factors.
    """
    samples = CovarianceAcquisition.acquire(_context(small_covset, AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q),
                                            np.random.default_rng(2))
    factors = RegularizationFactors(eta=0.6, mu=0.4)
    filter_matrix = CovarianceAcquisition.build_filter(samples, factors)

    R_hat = CovarianceEstimator.shrink(samples.r_sample, 0.4)
    Q_hat = CovarianceEstimator.shrink(samples.q_sample, 0.6)
    assert filter_matrix.kind == FilterType.FILTER_TYPE_APPROX_MMSE
    assert np.allclose(filter_matrix.W @ Q_hat, R_hat)
    assert (filter_matrix.eta, filter_matrix.mu) == (0.6, 0.4)
    assert filter_matrix.scheme == AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q


def test_via_q_more_accurate_than_r_direct(default_covset):
    """
    Test that with N_R = 50 and N_Q = 500 the Via-Q estimate of R has a smaller average Frobenius
    error than the R-direct estimate.
    """
    R = default_covset.R(0, 0, 0)
    errors = dict()
    for scheme in AcquisitionScheme:
        context = SamplingContext(covset=default_covset, bs_index=0, ue_index=0, n_q=500, n_r=50, scheme=scheme)
        rng = np.random.default_rng(11)
        errors[scheme] = np.mean([np.linalg.norm(CovarianceAcquisition.acquire(context, rng).r_sample - R)
                                  for _ in range(10)])

    assert errors[AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q] < errors[AcquisitionScheme.ACQUISITION_SCHEME_R_DIRECT]
