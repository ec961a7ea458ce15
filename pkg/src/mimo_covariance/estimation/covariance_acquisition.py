# File: covariance_acquisition.py
# Description: Acquisition of the sample covariance matrices behind an approximate MMSE filter.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mimo_covariance.channels.observation_kind import ObservationKind
from mimo_covariance.channels.pilot_observer import PilotObserver
from mimo_covariance.scenario.covariance_set import CovarianceSet

from .channel_estimator import ChannelEstimator, FilterMatrix
from .covariance_estimator import CovarianceEstimator, RegularizationFactors, SampleCovariance
from .filter_type import AcquisitionScheme


@dataclass(frozen=True)
class SamplingContext:
    """
    Where and how the covariance matrices of one UE are estimated.

    Attributes:
        covset: CovarianceSet, true covariance matrices the observations are drawn from
        bs_index: int, observing BS j
        ue_index: int, UE k of cell j
        n_q: int, regular observations N_Q behind the estimate of Q_jk
        n_r: int, extra-pilot observations N_R behind the estimate of R_jjk
        scheme: AcquisitionScheme, how R_jjk is estimated
    """

    covset: CovarianceSet
    bs_index: int
    ue_index: int
    n_q: int
    n_r: int
    scheme: AcquisitionScheme

    def __post_init__(self) -> None:
        """
        :raises ValueError: if N_Q or N_R is not positive
        """
        if self.n_q < 1:
            raise ValueError('N_Q must be at least 1')
        if self.n_r < 1:
            raise ValueError('N_R must be at least 1')


@dataclass(frozen=True)
class CovarianceSamples:
    """
    The unregularized estimates of one covariance-estimation realization.

    Attributes:
        q_sample: SampleCovariance, sample covariance of the N_Q regular observations
        r_sample: np.ndarray, unbiased estimate of R_jjk before shrinkage, possibly indefinite
        context: SamplingContext, how the samples were acquired
    """

    q_sample: SampleCovariance
    r_sample: np.ndarray
    context: SamplingContext


class CovarianceAcquisition:
    """
    Draws the pilot observations that a BS collects for one UE within a statistics window, and
    turns them into approximate MMSE filters.

    The N_Q regular observations and the N_R extra-pilot observations come from distinct
    coherence blocks, so they are independent.
    """

    @staticmethod
    def acquire(context: SamplingContext, rng: np.random.Generator) -> CovarianceSamples:
        """
        Draw one covariance-estimation realization.

        :param context: SamplingContext, UE and observation counts
        :param rng: np.random.Generator, source of randomness
        :return: CovarianceSamples, the sample estimates of Q_jk and R_jjk

        :raises ValueError: if the acquisition scheme is not supported
        """

        j, k, covset = context.bs_index, context.ue_index, context.covset

        regular = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_REGULAR, j, k, covset, context.n_q, rng)
        q_sample = CovarianceEstimator.sample_covariance(regular)

        if context.scheme == AcquisitionScheme.ACQUISITION_SCHEME_R_DIRECT:
            clean = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CLEAN, j, k, covset, context.n_r, rng)
            r_sample = CovarianceEstimator.debiased_clean_covariance(clean, covset.params)
        elif context.scheme == AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q:
            contaminants = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_CONTAMINANTS, j, k, covset,
                                                       context.n_r, rng)
            q_minus_sample = CovarianceEstimator.sample_covariance(contaminants)
            r_sample = CovarianceEstimator.via_q_difference(q_sample, q_minus_sample)
        else:
            raise ValueError(f'unsupported acquisition scheme: {context.scheme}')

        return CovarianceSamples(q_sample=q_sample, r_sample=r_sample, context=context)

    @staticmethod
    def build_filter(samples: CovarianceSamples, factors: RegularizationFactors) -> FilterMatrix:
        """
        Regularize the samples and build the approximate MMSE filter.

        :param samples: CovarianceSamples, one covariance-estimation realization
        :param factors: RegularizationFactors, shrinkage factors
        :return: FilterMatrix, approximate MMSE filter

        :raises SingularMatrixError: if the regularized estimate of Q_jk is numerically singular
        """

        R_hat = CovarianceEstimator.shrink(samples.r_sample, factors.mu)
        Q_hat = CovarianceEstimator.shrink(samples.q_sample, factors.eta)
        return ChannelEstimator.approx_mmse_filter(R_hat, Q_hat,
                                                   eta=factors.eta,
                                                   mu=factors.mu,
                                                   scheme=samples.context.scheme,
                                                   n_q=samples.q_sample.n_obs)
