# File: channel_estimator.py
# Description: Linear channel estimation filters and their mean-squared error.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from mimo_covariance.channels.pilot_observer import PilotObservation
from mimo_covariance.services.matrix_service import MatrixService

from .filter_type import AcquisitionScheme, FilterType


@dataclass(frozen=True)
class FilterMatrix:
    """
    A deterministic M x M estimation matrix W, the channel estimate is W y.

    Attributes:
        W: np.ndarray, the filter
        kind: FilterType, filter category
        phi: np.ndarray, covariance R Q^-1 R of the MMSE estimate, None for other kinds
        eta: float, shrinkage factor of Q_hat, approximate MMSE only
        mu: float, shrinkage factor of R_hat, approximate MMSE only
        scheme: AcquisitionScheme, how R_hat was acquired, approximate MMSE only
    """

    W: np.ndarray
    kind: FilterType
    phi: Optional[np.ndarray] = None
    eta: Optional[float] = None
    mu: Optional[float] = None
    scheme: Optional[AcquisitionScheme] = None


class ChannelEstimator:
    """
    Builds the MMSE, approximate MMSE and LS filters and evaluates their exact MSE

        E{||h - W y||^2} = tr((I - W - W^H) R) + tr(W Q W^H)

    which holds for any W that is independent of the observation y.
    """

    IMAGINARY_TOLERANCE = 1e-10

    @staticmethod
    def mmse_filter(R_true: np.ndarray, Q_true: np.ndarray) -> FilterMatrix:
        """
        Build the MMSE filter W = R Q^-1 and the estimate covariance Phi = R Q^-1 R.

        :param R_true: np.ndarray, channel covariance R_jjk
        :param Q_true: np.ndarray, observation covariance Q_jk, positive definite
        :return: FilterMatrix, MMSE filter with phi set

        :raises SingularMatrixError: if Q is numerically singular
        """

        Q_inverse = MatrixService.hermitian_inverse(Q_true, context='true observation covariance')
        W = R_true @ Q_inverse
        phi = MatrixService.hermitian_part(W @ R_true)
        return FilterMatrix(W=W, kind=FilterType.FILTER_TYPE_MMSE, phi=phi)

    @staticmethod
    def approx_mmse_filter(R_hat: np.ndarray,
                           Q_hat: np.ndarray,
                           eta: Optional[float] = None,
                           mu: Optional[float] = None,
                           scheme: Optional[AcquisitionScheme] = None,
                           n_q: Optional[int] = None) -> FilterMatrix:
        """
        Build the approximate MMSE filter W = R_hat Q_hat^-1 from estimated covariance matrices.

        :param R_hat: np.ndarray, estimate of R_jjk, may be indefinite
        :param Q_hat: np.ndarray, estimate of Q_jk
        :param eta: float, shrinkage factor used for Q_hat, reported in errors
        :param mu: float, shrinkage factor used for R_hat
        :param scheme: AcquisitionScheme, how R_hat was acquired
        :param n_q: int, observations behind Q_hat, reported in errors
        :return: FilterMatrix, approximate MMSE filter

        :raises SingularMatrixError: if Q_hat has a condition number above 1e12
        """

        Q_inverse = MatrixService.hermitian_inverse(Q_hat, context=f'eta={eta}, N_Q={n_q}')
        return FilterMatrix(W=R_hat @ Q_inverse,
                            kind=FilterType.FILTER_TYPE_APPROX_MMSE,
                            eta=eta,
                            mu=mu,
                            scheme=scheme)

    @staticmethod
    def ls_filter(dimension: int) -> FilterMatrix:
        """
        Build the LS filter, the identity.

        :param dimension: int, number of antennas M
        :return: FilterMatrix, LS filter
        """

        return FilterMatrix(W=np.eye(dimension, dtype=complex), kind=FilterType.FILTER_TYPE_LS)

    @staticmethod
    def estimate_channel(filter_matrix: FilterMatrix, observation: Union[PilotObservation, np.ndarray]) -> np.ndarray:
        """
        Apply a filter to a pilot observation.

        :param filter_matrix: FilterMatrix, the filter W
        :param observation: PilotObservation or np.ndarray, an M-vector or an M x N array of observations
        :return: np.ndarray, the estimate W y

        :raises ValueError: if the dimensions do not match
        """

        y = observation.y if isinstance(observation, PilotObservation) else np.asarray(observation)
        if y.shape[0] != filter_matrix.W.shape[1]:
            raise ValueError('observation dimension does not match the filter')
        return filter_matrix.W @ y

    @staticmethod
    def analytic_mse(filter_matrix: FilterMatrix, R_true: np.ndarray, Q_true: np.ndarray) -> float:
        """
        Compute the exact MSE of a deterministic filter.

        :param filter_matrix: FilterMatrix, the filter W
        :param R_true: np.ndarray, channel covariance R_jjk
        :param Q_true: np.ndarray, observation covariance Q_jk
        :return: float, tr((I - W - W^H) R) + tr(W Q W^H)

        :raises ValueError: if the dimensions do not match
        :raises ArithmeticError: if the result has a non-negligible imaginary part
        """

        W = filter_matrix.W
        if W.shape != R_true.shape or W.shape != Q_true.shape:
            raise ValueError('filter and covariance dimensions do not match')

        identity = np.eye(W.shape[0])
        bias_term = MatrixService.trace_product(identity - W - W.conj().T, R_true)
        noise_term = MatrixService.trace_product(W @ Q_true, W.conj().T)
        mse = bias_term + noise_term

        scale = max(abs(mse), np.real(np.trace(R_true)), np.finfo(float).tiny)
        if abs(mse.imag) > ChannelEstimator.IMAGINARY_TOLERANCE * scale:
            raise ArithmeticError(f'MSE has imaginary part {mse.imag:.3e}')
        return float(mse.real)

    @staticmethod
    def normalized_mse(filter_matrix: FilterMatrix, R_true: np.ndarray, Q_true: np.ndarray) -> float:
        """
        Compute the MSE divided by tr(R_jjk).

        :param filter_matrix: FilterMatrix, the filter W
        :param R_true: np.ndarray, channel covariance R_jjk
        :param Q_true: np.ndarray, observation covariance Q_jk
        :return: float, normalized MSE, 1.0 for the zero filter

        :raises ValueError: if tr(R_jjk) is zero
        """

        trace = float(np.real(np.trace(R_true)))
        if trace == 0.0:
            raise ValueError('normalized MSE is undefined for tr(R) = 0')
        return ChannelEstimator.analytic_mse(filter_matrix, R_true, Q_true) / trace
