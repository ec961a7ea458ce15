# File: validation.py
# Description: Brute-force Monte-Carlo checks of the closed-form expressions.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import logging

import numpy as np

from mimo_covariance.channels.channel_sampler import ChannelSampler
from mimo_covariance.channels.observation_kind import ObservationKind
from mimo_covariance.channels.pilot_observer import PilotObserver
from mimo_covariance.estimation.channel_estimator import ChannelEstimator, FilterMatrix
from mimo_covariance.estimation.covariance_estimator import CovarianceEstimator
from mimo_covariance.estimation.filter_type import FilterType
from mimo_covariance.performance.combiner import CombinerSpec, CombinerType
from mimo_covariance.performance.spectral_efficiency import SpectralEfficiency
from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.scenario.system_params import SystemParams
from mimo_covariance.services.matrix_service import MatrixService
from mimo_covariance.services.random_service import RandomService, StreamPurpose
from mimo_covariance.services.statistics_service import StatisticsService

from .experiment_config import ExperimentConfig
from .result_registry import ResultRegistry, ResultRow
from .runner import CENTER_BS, build_center_covariance_set

logger = logging.getLogger(__name__)


class Validation:
    """
    Compares every closed-form expression with an independent Monte-Carlo estimate on a small
    scenario (M = 8, K = 2, L = 2), and checks the exact identities on the configured scenario.

    Each check yields one row: value is the observed relative error and stderr holds the tolerance.
    """

    CHUNK = 100_000
    SIGMA_BOUND = 3.0

    FULL_SETTINGS = {'mse_draws': 1_000_000, 'mse_instances': 10, 'mse_tolerance': 0.01,
                     'moment_draws': 1_000_000,
                     'sinr_blocks': 200_000, 'sinr_tolerance': 0.02,
                     'observation_draws': 100_000, 'observation_tolerance': 0.05}
    QUICK_SETTINGS = {'mse_draws': 200_000, 'mse_instances': 3, 'mse_tolerance': 0.02,
                      'moment_draws': 200_000,
                      'sinr_blocks': 50_000, 'sinr_tolerance': 0.04,
                      'observation_draws': 100_000, 'observation_tolerance': 0.05}

    @staticmethod
    def small_covariance_set(spread_deg: float = 20.0) -> CovarianceSet:
        """
        Build the small two-cell scenario used by the Monte-Carlo checks.
        """

        params = SystemParams(M=8, K=2, L=2, spread_deg=spread_deg)
        return CovarianceSet.build_covariance_set(NetworkGeometry.build_geometry(params), params)

    @staticmethod
    def _random_filter(M: int, rng: np.random.Generator) -> FilterMatrix:
        W = RandomService.complex_normal(rng, (M, M)) / np.sqrt(M)
        return FilterMatrix(W=W, kind=FilterType.FILTER_TYPE_APPROX_MMSE)

    @staticmethod
    def random_covariance_pair(M: int, rho_tr: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """
        Draw a random channel covariance R = A A^H and an observation covariance Q = R + B B^H + I / rho_tr.

        :return: tuple (R, Q) with Q - R positive definite
        """

        A = RandomService.complex_normal(rng, (M, M)) / np.sqrt(M)
        B = RandomService.complex_normal(rng, (M, M)) / np.sqrt(M)
        R = MatrixService.hermitian_part(A @ A.conj().T)
        Q = R + MatrixService.hermitian_part(B @ B.conj().T) + np.eye(M) / rho_tr
        return R, Q

    @staticmethod
    def empirical_mse(filter_matrix: FilterMatrix, R: np.ndarray, Q: np.ndarray, n_draws: int,
                      rng: np.random.Generator) -> float:
        """
        Estimate E{||h - W y||^2} by brute force, with h ~ CN(0, R) and y = h + n, n ~ CN(0, Q - R).

        :param filter_matrix: FilterMatrix, the filter under test
        :param R: np.ndarray, covariance of the wanted channel
        :param Q: np.ndarray, covariance of the observation
        :param n_draws: int, number of independent draws
        :param rng: np.random.Generator, source of randomness
        :return: float, sample mean of the squared error
        """

        M = R.shape[0]
        channel_factor = MatrixService.psd_factor(R)
        disturbance_factor = MatrixService.psd_factor(Q - R)
        total = 0.0
        for chunk in StatisticsService.chunk_sizes(n_draws, Validation.CHUNK):
            h = channel_factor @ RandomService.complex_normal(rng, (M, chunk))
            y = h + disturbance_factor @ RandomService.complex_normal(rng, (M, chunk))
            error = h - ChannelEstimator.estimate_channel(filter_matrix, y)
            total += float(np.sum(np.abs(error) ** 2))
        return total / n_draws

    @staticmethod
    def check_analytic_mse(params: SystemParams, n_draws: int, n_instances: int,
                           rng: np.random.Generator) -> float:
        """
        Largest relative error between the analytic MSE and the brute-force MSE over random (W, R, Q) instances.
        """

        worst = 0.0
        for _ in range(n_instances):
            R, Q = Validation.random_covariance_pair(params.M, params.rho_tr, rng)
            filter_matrix = Validation._random_filter(params.M, rng)
            analytic = ChannelEstimator.analytic_mse(filter_matrix, R, Q)
            empirical = Validation.empirical_mse(filter_matrix, R, Q, n_draws, rng)
            worst = max(worst, StatisticsService.relative_error(empirical, analytic))
        return worst

    @staticmethod
    def check_mrc_moments(covset: CovarianceSet, n_draws: int, rng: np.random.Generator) -> list[tuple]:
        """
        Compare each closed-form MRC moment with its sample mean.

        :return: list of tuple (name, relative error, tolerance), the tolerance is 3 standard errors
        """

        params = covset.params
        j, k = CENTER_BS, 0
        neighbor = 1 if params.L > 1 else 0
        other_ue = 1 if params.K > 1 else 0
        W = Validation._random_filter(params.M, rng).W

        cases = {'moment_gain': None,
                 'moment_combiner_power': None,
                 'moment_same_pilot_own_cell': (j, k),
                 'moment_same_pilot_other_cell': (neighbor, k),
                 'moment_other_pilot': (j, other_ue)}
        samples = {name: [] for name in cases}

        for chunk in StatisticsService.chunk_sizes(n_draws, Validation.CHUNK):
            channels = ChannelSampler.draw_batch(covset, j, chunk, rng)
            noise = RandomService.complex_normal(rng, (params.M, chunk)) / np.sqrt(params.rho_tr)
            v = W @ (np.sum(channels[:, k], axis=0) + noise)
            samples['moment_gain'].append(np.sum(v.conj() * channels[j, k], axis=0))
            samples['moment_combiner_power'].append(np.sum(np.abs(v) ** 2, axis=0))
            for name, index in cases.items():
                if index is not None:
                    samples[name].append(np.abs(np.sum(v.conj() * channels[index], axis=0)) ** 2)

        results = []
        for name, index in cases.items():
            values = np.concatenate(samples[name])
            l, i = index if index is not None else (j, k)
            moments = SpectralEfficiency.mrc_moments(W, covset, j, k, l, i)
            reference = {'moment_gain': moments.gain,
                         'moment_combiner_power': moments.combiner_power}.get(name, moments.interference_power)
            mean = np.mean(values)
            stderr = np.std(values) / np.sqrt(values.size)
            scale = max(abs(reference), np.finfo(float).tiny)
            results.append((name, StatisticsService.relative_error(mean, reference),
                            Validation.SIGMA_BOUND * float(stderr) / scale))
        return results

    @staticmethod
    def check_fourth_moment(covset: CovarianceSet, n_draws: int, rng: np.random.Generator) -> tuple[float, float]:
        """
        Compare E{|h^H W h|^2} = |tr(W R)|^2 + tr(W R W^H R) with its sample mean.

        :return: tuple (relative error, tolerance of 3 standard errors)
        """

        R = covset.R(CENTER_BS, CENTER_BS, 0)
        W = Validation._random_filter(covset.params.M, rng).W
        closed_form = (abs(MatrixService.trace_product(W, R)) ** 2
                       + MatrixService.trace_product(W @ R, W.conj().T @ R).real)

        values = []
        for chunk in StatisticsService.chunk_sizes(n_draws, Validation.CHUNK):
            h = ChannelSampler.draw_batch(covset, CENTER_BS, chunk, rng, ue_indices=[0])[CENTER_BS, 0]
            values.append(np.abs(np.sum(h.conj() * (W @ h), axis=0)) ** 2)
        values = np.concatenate(values)

        stderr = np.std(values) / np.sqrt(values.size)
        return (StatisticsService.relative_error(np.mean(values), closed_form),
                Validation.SIGMA_BOUND * float(stderr) / closed_form)

    @staticmethod
    def check_mrc_closed_form(covset: CovarianceSet, n_blocks: int, rng: np.random.Generator) -> float:
        """
        Relative error between the closed-form MRC SINR and its Monte-Carlo estimate with the MMSE filter.
        """

        params = covset.params
        R, Q = covset.R(CENTER_BS, CENTER_BS, 0), covset.Q(CENTER_BS, 0)
        mmse = ChannelEstimator.mmse_filter(R, Q)
        _, closed_form = SpectralEfficiency.mrc_sinr_closed_form(mmse.W, covset, CENTER_BS, 0, params.rho_ul)
        combiner = CombinerSpec(kind=CombinerType.COMBINER_TYPE_MRC, filters=(mmse,))
        monte_carlo = SpectralEfficiency.uatf_sinr_monte_carlo(combiner, covset, CENTER_BS, 0, params.rho_ul,
                                                               n_blocks, rng)
        return StatisticsService.relative_error(monte_carlo, closed_form)

    @staticmethod
    def check_observation_covariance(covset: CovarianceSet, n_draws: int, rng: np.random.Generator) -> float:
        """
        Frobenius-relative error between the sample covariance of regular observations and Q.
        """

        observations = PilotObserver.observe_batch(ObservationKind.OBSERVATION_KIND_REGULAR, CENTER_BS, 0, covset,
                                                   n_draws, rng)
        sample = CovarianceEstimator.sample_covariance(observations).S
        Q = covset.Q(CENTER_BS, 0)
        return float(np.linalg.norm(sample - Q) / np.linalg.norm(Q))

    @staticmethod
    def check_observation_assembly(covset: CovarianceSet) -> float:
        """
        Largest relative residual of Q_jk = sum_l R_jlk + I / rho_tr over the UEs of the center cell.
        """

        params = covset.params
        worst = 0.0
        for k in range(params.K):
            assembled = sum(covset.R(CENTER_BS, l, k) for l in range(params.L)) + np.eye(params.M) / params.rho_tr
            Q = covset.Q(CENTER_BS, k)
            worst = max(worst, float(np.linalg.norm(Q - assembled) / np.linalg.norm(Q)))
        return worst

    @staticmethod
    def check_mmse_identity(covset: CovarianceSet) -> float:
        """
        Largest relative gap between the analytic MSE of the MMSE filter and tr(R - Phi).
        """

        worst = 0.0
        for k in range(covset.params.K):
            R, Q = covset.R(CENTER_BS, CENTER_BS, k), covset.Q(CENTER_BS, k)
            mmse = ChannelEstimator.mmse_filter(R, Q)
            reference = float(np.real(np.trace(R - mmse.phi)))
            worst = max(worst, StatisticsService.relative_error(ChannelEstimator.analytic_mse(mmse, R, Q), reference))
        return worst

    @staticmethod
    def check_shrink_endpoints(covset: CovarianceSet) -> float:
        """
        Largest absolute deviation of shrink(S, 1) from S and of shrink(S, 0) from diag(S).
        """

        S = covset.Q(CENTER_BS, 0)
        full = CovarianceEstimator.shrink(S, 1.0)
        diagonal = CovarianceEstimator.shrink(S, 0.0)
        return float(max(np.max(np.abs(full - S)), np.max(np.abs(diagonal - np.diag(np.diag(S))))))

    @staticmethod
    def run_validation(config: ExperimentConfig) -> list[ResultRow]:
        """
        Run every check and report pass or fail.

        :param config: ExperimentConfig, experiment configuration, quick mode relaxes sample counts
        :return: list[ResultRow], one 'validate' row per check
        """

        settings = Validation.QUICK_SETTINGS if config.quick else Validation.FULL_SETTINGS
        small = Validation.small_covariance_set(config.scenario.spread_deg)
        configured = build_center_covariance_set(config)

        def stream(index: int) -> np.random.Generator:
            return RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_VALIDATION, index)

        analytic_mse_error = Validation.check_analytic_mse(small.params, settings['mse_draws'],
                                                           settings['mse_instances'], stream(0))
        checks = [('analytic_mse', 'none', analytic_mse_error, settings['mse_tolerance'])]
        for name, error, tolerance in Validation.check_mrc_moments(small, settings['moment_draws'], stream(1)):
            checks.append((name, 'mrc', error, tolerance))
        error, tolerance = Validation.check_fourth_moment(small, settings['moment_draws'], stream(2))
        checks.append(('fourth_moment', 'none', error, tolerance))
        checks.append(('mrc_closed_form', 'mrc',
                       Validation.check_mrc_closed_form(small, settings['sinr_blocks'], stream(3)),
                       settings['sinr_tolerance']))
        checks.append(('observation_covariance', 'none',
                       Validation.check_observation_covariance(small, settings['observation_draws'], stream(4)),
                       settings['observation_tolerance']))
        checks.append(('observation_assembly', 'none', Validation.check_observation_assembly(configured), 1e-12))
        checks.append(('mmse_identity', 'none', Validation.check_mmse_identity(configured), 1e-10))
        checks.append(('shrink_endpoints', 'none', Validation.check_shrink_endpoints(configured), 0.0))

        registry = ResultRegistry()
        for name, combiner, error, tolerance in checks:
            status = 'pass' if error <= tolerance else 'fail'
            if status == 'fail':
                logger.warning('Check %s failed: relative error %.3e above tolerance %.3e.', name, error, tolerance)
            else:
                logger.info('Check %s passed: relative error %.3e (tolerance %.3e).', name, error, tolerance)
            registry.add_row(ResultRow('validate', name, combiner, 0, None, None, error, tolerance, config.seed,
                                       status=status))
        return registry.rows()
