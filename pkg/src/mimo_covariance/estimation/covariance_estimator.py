# File: covariance_estimator.py
# Description: Sample covariance matrices, diagonal shrinkage and the two estimators of R_jjk.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from mimo_covariance.scenario.system_params import SystemParams
from mimo_covariance.services.matrix_service import MatrixService


@dataclass(frozen=True)
class SampleCovariance:
    """
    A sample covariance matrix S = (1 / N) sum_n y[n] y[n]^H.

    Attributes:
        S: np.ndarray, M x M Hermitian matrix
        n_obs: int, number of observations N
    """

    S: np.ndarray
    n_obs: int


@dataclass(frozen=True)
class RegularizationFactors:
    """
    Shrinkage factors of the estimates of Q_jk (eta) and R_jjk (mu).

    Attributes:
        eta: float, factor for Q in [0, 1]
        mu: float, factor for R in [0, 1]
    """

    eta: float
    mu: float

    def __post_init__(self) -> None:
        """
        :raises ValueError: if a factor is outside [0, 1]
        """
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError('eta must be within [0, 1]')
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError('mu must be within [0, 1]')


class CovarianceEstimator:
    """
    Estimators of Q_jk and R_jjk from finite sets of pilot observations.

    The regularized estimate is the convex combination

        shrink(S, f) = f S + (1 - f) diag(S)

    which keeps the main diagonal of S for every f and scales the off-diagonal entries by f.
    No projection onto the positive semidefinite cone is applied anywhere: the estimates of R_jjk
    may be indefinite.
    """

    @staticmethod
    def _stack_observations(observations) -> np.ndarray:
        """
        Arrange observations as the columns of an M x N array.

        :param observations: list of complex M-vectors, or an M x N array with one observation per column
        :return: np.ndarray, M x N array

        :raises ValueError: if there are no observations
        """

        if isinstance(observations, np.ndarray) and observations.ndim == 2:
            matrix = observations
        else:
            if len(observations) == 0:
                raise ValueError('at least one observation is required')
            matrix = np.column_stack([np.asarray(y) for y in observations])

        if matrix.shape[1] == 0:
            raise ValueError('at least one observation is required')
        return matrix

    @staticmethod
    def sample_covariance(observations) -> SampleCovariance:
        """
        Form the sample covariance matrix of the observations.

        :param observations: list of complex M-vectors, or an M x N array with one observation per column
        :return: SampleCovariance, Hermitian by construction

        :raises ValueError: if there are no observations
        """

        matrix = CovarianceEstimator._stack_observations(observations)
        n_obs = matrix.shape[1]
        S = MatrixService.hermitian_part(matrix @ matrix.conj().T) / n_obs
        return SampleCovariance(S=S, n_obs=n_obs)

    @staticmethod
    def merge(first: SampleCovariance, second: SampleCovariance) -> SampleCovariance:
        """
        Merge the sample covariance matrices of two disjoint sets of observations.

        :param first: SampleCovariance, first set
        :param second: SampleCovariance, second set
        :return: SampleCovariance, equal to the sample covariance of the union

        :raises ValueError: if the dimensions do not match
        """

        if first.S.shape != second.S.shape:
            raise ValueError('sample covariance dimensions do not match')

        n_obs = first.n_obs + second.n_obs
        S = (first.n_obs * first.S + second.n_obs * second.S) / n_obs
        return SampleCovariance(S=S, n_obs=n_obs)

    @staticmethod
    def shrink(sample: Union[SampleCovariance, np.ndarray], factor: float) -> np.ndarray:
        """
        Shrink a Hermitian matrix towards its diagonal.

        :param sample: SampleCovariance or np.ndarray, the matrix S
        :param factor: float, f in [0, 1], 1 keeps S and 0 keeps only its diagonal
        :return: np.ndarray, f S + (1 - f) diag(S)

        :raises ValueError: if the factor is outside [0, 1]
        """

        if not 0.0 <= factor <= 1.0:
            raise ValueError('shrinkage factor must be within [0, 1]')

        S = sample.S if isinstance(sample, SampleCovariance) else sample
        if factor == 1.0:
            return S.copy()

        shrunk = factor * S
        np.fill_diagonal(shrunk, np.diag(S))
        return shrunk

    @staticmethod
    def debiased_clean_covariance(clean_observations, params: SystemParams) -> np.ndarray:
        """
        Sample covariance of clean observations with the known noise variance removed.

        :param clean_observations: list of complex M-vectors, or an M x N array
        :param params: SystemParams, model constants with rho_tr
        :return: np.ndarray, S - (1 / rho_tr) I, an unbiased estimate of R_jjk

        :raises ValueError: if there are no observations
        """

        sample = CovarianceEstimator.sample_covariance(clean_observations)
        return sample.S - np.eye(sample.S.shape[0]) / params.rho_tr

    @staticmethod
    def estimate_R_direct(clean_observations, mu: float, params: SystemParams) -> np.ndarray:
        """
        Estimate R_jjk from N_R clean observations of the desired UE ("R direct").

        :param clean_observations: list of complex M-vectors, or an M x N_R array
        :param mu: float, shrinkage factor in [0, 1]
        :param params: SystemParams, model constants with rho_tr
        :return: np.ndarray, the regularized estimate

        :raises ValueError: if there are no observations or mu is outside [0, 1]
        """

        debiased = CovarianceEstimator.debiased_clean_covariance(clean_observations, params)
        return CovarianceEstimator.shrink(debiased, mu)

    @staticmethod
    def via_q_difference(q_sample: SampleCovariance, q_minus_sample: SampleCovariance) -> np.ndarray:
        """
        Difference between the regular and contaminants-only sample covariance matrices.

        The noise covariance enters both and cancels in expectation.

        :param q_sample: SampleCovariance, from N_Q regular observations
        :param q_minus_sample: SampleCovariance, from N_R contaminants observations
        :return: np.ndarray, an unbiased estimate of R_jjk, possibly indefinite

        :raises ValueError: if the dimensions do not match
        """

        if q_sample.S.shape != q_minus_sample.S.shape:
            raise ValueError('sample covariance dimensions do not match')
        return q_sample.S - q_minus_sample.S

    @staticmethod
    def estimate_R_via_q(q_sample: SampleCovariance, q_minus_sample: SampleCovariance, mu: float) -> np.ndarray:
        """
        Estimate R_jjk by subtracting the contaminants-only sample covariance from the regular one ("Via Q").

        :param q_sample: SampleCovariance, from N_Q regular observations
        :param q_minus_sample: SampleCovariance, from N_R contaminants observations
        :param mu: float, shrinkage factor in [0, 1]
        :return: np.ndarray, the regularized estimate, possibly indefinite

        :raises ValueError: if the dimensions do not match or mu is outside [0, 1]
        """

        difference = CovarianceEstimator.via_q_difference(q_sample, q_minus_sample)
        return CovarianceEstimator.shrink(difference, mu)

    @staticmethod
    def estimate_Q(regular_observations, eta: float) -> np.ndarray:
        """
        Estimate Q_jk from N_Q regular observations.

        :param regular_observations: list of complex M-vectors, or an M x N_Q array
        :param eta: float, shrinkage factor in [0, 1]
        :return: np.ndarray, the regularized estimate

        :raises ValueError: if there are no observations or eta is outside [0, 1]
        """

        sample = CovarianceEstimator.sample_covariance(regular_observations)
        return CovarianceEstimator.shrink(sample, eta)
