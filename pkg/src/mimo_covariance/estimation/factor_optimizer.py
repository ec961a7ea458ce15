# File: factor_optimizer.py
# Description: Grid search of the shrinkage factors that minimize the channel estimation MSE.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import logging

import numpy as np

from mimo_covariance.services.matrix_service import MatrixService, SingularMatrixError

from .covariance_acquisition import CovarianceAcquisition, CovarianceSamples, SamplingContext
from .covariance_estimator import CovarianceEstimator, RegularizationFactors

logger = logging.getLogger(__name__)


class FactorOptimizer:
    """
    Selects (eta, mu) by exhaustive grid search of the average exact MSE.

    The search is genie-aided: the MSE of each candidate filter is evaluated with the true
    R_jjk and Q_jk. For a fixed eta the filter is affine in mu,

        W(mu) = B + mu (A - B),  A = R_sample Q_hat^-1,  B = diag(R_sample) Q_hat^-1,

    so the MSE is a quadratic polynomial in mu and one inversion of Q_hat serves the whole mu grid.
    """

    DEFAULT_GRID_STEP = 0.05
    DEFAULT_N_AVG = 10

    @staticmethod
    def factor_grid(grid_step: float) -> np.ndarray:
        """
        Get the grid of candidate factors 0, step, 2 step, ..., 1.

        :param grid_step: float, grid step, must divide [0, 1]
        :return: np.ndarray, candidate factors in increasing order

        :raises ValueError: if the step does not divide [0, 1]
        """

        if grid_step <= 0.0 or grid_step > 1.0:
            raise ValueError('grid step must be within (0, 1]')

        n_steps = int(round(1.0 / grid_step))
        if abs(n_steps * grid_step - 1.0) > 1e-9:
            raise ValueError('grid step must divide [0, 1]')
        return np.linspace(0.0, 1.0, n_steps + 1)

    @staticmethod
    def mse_grid(samples: CovarianceSamples,
                 R_true: np.ndarray,
                 Q_true: np.ndarray,
                 grid: np.ndarray) -> np.ndarray:
        """
        Exact MSE of the approximate MMSE filter for every (eta, mu) on the grid.

        :param samples: CovarianceSamples, one covariance-estimation realization
        :param R_true: np.ndarray, true R_jjk
        :param Q_true: np.ndarray, true Q_jk
        :param grid: np.ndarray, candidate factors
        :return: np.ndarray of shape (len(grid), len(grid)), entry [a, b] is the MSE at
            eta = grid[a], mu = grid[b], inf where Q_hat is numerically singular
        """

        mse = np.full((grid.size, grid.size), np.inf)
        r_sample = samples.r_sample
        r_diagonal = np.diag(r_sample)
        trace_R = float(np.real(np.trace(R_true)))

        for eta_index, eta in enumerate(grid):
            Q_hat = CovarianceEstimator.shrink(samples.q_sample, float(eta))
            try:
                Q_inverse = MatrixService.hermitian_inverse(Q_hat)
            except SingularMatrixError:
                logger.debug('Skipping eta=%.3f: estimate of Q is singular (N_Q=%d).', eta, samples.q_sample.n_obs)
                continue

            B = r_diagonal[:, np.newaxis] * Q_inverse
            D = r_sample @ Q_inverse - B
            BQ = B @ Q_true
            DQ = D @ Q_true

            constant = (trace_R
                        - 2.0 * MatrixService.trace_product(B, R_true).real
                        + MatrixService.trace_product(BQ, B.conj().T).real)
            linear = (-2.0 * MatrixService.trace_product(D, R_true).real
                      + 2.0 * MatrixService.trace_product(DQ, B.conj().T).real)
            quadratic = MatrixService.trace_product(DQ, D.conj().T).real

            mse[eta_index] = constant + linear * grid + quadratic * grid ** 2

        return mse

    @staticmethod
    def optimize_factors(R_true: np.ndarray,
                         Q_true: np.ndarray,
                         context: SamplingContext,
                         rng: np.random.Generator,
                         grid_step: float = DEFAULT_GRID_STEP,
                         n_avg: int = DEFAULT_N_AVG) -> RegularizationFactors:
        """
        Find the factors minimizing the MSE averaged over independent covariance-estimation realizations.

        Ties are broken toward the smaller eta, then the smaller mu.

        :param R_true: np.ndarray, true R_jjk
        :param Q_true: np.ndarray, true Q_jk
        :param context: SamplingContext, UE and observation counts
        :param rng: np.random.Generator, source of the realizations
        :param grid_step: float, grid step for both factors
        :param n_avg: int, number of realizations N_avg
        :return: RegularizationFactors, the minimizing pair

        :raises ValueError: if n_avg is not positive or the grid step does not divide [0, 1]
        :raises SingularMatrixError: if Q_hat is singular for every candidate
        """

        if n_avg < 1:
            raise ValueError('n_avg must be at least 1')

        grid = FactorOptimizer.factor_grid(grid_step)
        total = np.zeros((grid.size, grid.size))
        for _ in range(n_avg):
            samples = CovarianceAcquisition.acquire(context, rng)
            total = total + FactorOptimizer.mse_grid(samples, R_true, Q_true, grid)
        average = total / n_avg

        if not np.any(np.isfinite(average)):
            raise SingularMatrixError(f'no invertible estimate of Q for any eta (N_Q={context.n_q})')

        # row-major argmin gives the smallest eta, then the smallest mu, among ties
        eta_index, mu_index = np.unravel_index(np.argmin(average), average.shape)
        factors = RegularizationFactors(eta=float(grid[eta_index]), mu=float(grid[mu_index]))

        logger.debug('UE %d, N_R=%d, %s: eta=%.2f, mu=%.2f, average MSE %.4e',
                     context.ue_index, context.n_r, context.scheme.value, factors.eta, factors.mu,
                     average[eta_index, mu_index])
        return factors
