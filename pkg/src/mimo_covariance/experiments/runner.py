# File: runner.py
# Description: Normalized MSE and sum spectral efficiency sweeps over the number of extra pilots.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import logging

import numpy as np

from mimo_covariance.estimation.channel_estimator import ChannelEstimator
from mimo_covariance.estimation.covariance_acquisition import CovarianceAcquisition, SamplingContext
from mimo_covariance.estimation.factor_optimizer import FactorOptimizer
from mimo_covariance.estimation.filter_type import AcquisitionScheme
from mimo_covariance.performance.combiner import CombinerSpec, CombinerType
from mimo_covariance.performance.spectral_efficiency import SpectralEfficiency
from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.network_geometry import NetworkGeometry
from mimo_covariance.services.random_service import RandomService, StreamPurpose
from mimo_covariance.services.statistics_service import StatisticsService

from .experiment_config import ExperimentConfig
from .result_registry import ResultRegistry, ResultRow
from .task_pool import TaskPool

logger = logging.getLogger(__name__)

CENTER_BS = 0

APPROX_ESTIMATORS = {
    'approx_viaq': AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q,
    'approx_rdirect': AcquisitionScheme.ACQUISITION_SCHEME_R_DIRECT,
}
SCHEME_INDEX = {
    AcquisitionScheme.ACQUISITION_SCHEME_VIA_Q: 0,
    AcquisitionScheme.ACQUISITION_SCHEME_R_DIRECT: 1,
}
BASELINE_INDEX = {'mmse': 0, 'ls': 1, 'mmse_perfect': 2}
SE_COMBINERS = (CombinerType.COMBINER_TYPE_MRC, CombinerType.COMBINER_TYPE_RZF)

# per-process state, set by the pool initializer
_WORKER_STATE = dict()


class ExperimentError(Exception):
    """
    Exception raised when a sweep task fails, the message carries the sweep point, the estimator
    and the outer realization.
    """
    pass


def _wrap_error(error: Exception, n_r, estimator: str, outer) -> ExperimentError:
    return ExperimentError(f'N_R={n_r}, estimator={estimator}, outer={outer}: '
                           f'{type(error).__name__}: {error}')


def build_center_covariance_set(config: ExperimentConfig) -> CovarianceSet:
    """
    Build the covariance matrices seen by the center BS.

    :param config: ExperimentConfig, experiment configuration
    :return: CovarianceSet, covariance set with the center BS as the only observing BS
    """

    geometry = NetworkGeometry.build_geometry(config.scenario)
    return CovarianceSet.build_covariance_set(geometry, config.scenario, observing_bs=(CENTER_BS,))


def _init_worker(config: ExperimentConfig) -> None:
    _WORKER_STATE['config'] = config
    _WORKER_STATE['covset'] = build_center_covariance_set(config)


def _factor_task(task: tuple):
    """
    Optimize the shrinkage factors of one UE at one sweep point.
    """

    point_index, n_r, ue_index, estimator = task
    config, covset = _WORKER_STATE['config'], _WORKER_STATE['covset']
    scheme = APPROX_ESTIMATORS[estimator]

    try:
        context = SamplingContext(covset=covset, bs_index=CENTER_BS, ue_index=ue_index,
                                  n_q=config.n_q(n_r), n_r=n_r, scheme=scheme)
        rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_FACTOR_SEARCH,
                                      point_index, ue_index, SCHEME_INDEX[scheme])
        return FactorOptimizer.optimize_factors(covset.R(CENTER_BS, CENTER_BS, ue_index), covset.Q(CENTER_BS, ue_index),
                                                context, rng, grid_step=config.grid_step, n_avg=config.n_avg)
    except Exception as error:
        raise _wrap_error(error, n_r, estimator, None) from error


def _approx_filters(covset: CovarianceSet, config: ExperimentConfig, n_r: int, estimator: str, factors: tuple,
                    rng: np.random.Generator) -> list:
    """
    Acquire one covariance-estimation realization for every UE of the center cell and build the filters.
    """

    scheme = APPROX_ESTIMATORS[estimator]
    filters = []
    for k in range(config.scenario.K):
        context = SamplingContext(covset=covset, bs_index=CENTER_BS, ue_index=k,
                                  n_q=config.n_q(n_r), n_r=n_r, scheme=scheme)
        samples = CovarianceAcquisition.acquire(context, rng)
        filters.append(CovarianceAcquisition.build_filter(samples, factors[k]))
    return filters


def _mse_outer_task(task: tuple) -> dict:
    """
    Average normalized MSE over the center-cell UEs in one outer realization.
    """

    point_index, n_r, outer, factors = task
    config, covset = _WORKER_STATE['config'], _WORKER_STATE['covset']
    rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_OUTER_REALIZATION, point_index, outer)

    values = dict()
    for estimator in APPROX_ESTIMATORS:
        try:
            filters = _approx_filters(covset, config, n_r, estimator, factors[estimator], rng)
            values[estimator] = float(np.mean([
                ChannelEstimator.normalized_mse(filters[k], covset.R(CENTER_BS, CENTER_BS, k), covset.Q(CENTER_BS, k))
                for k in range(config.scenario.K)]))
        except Exception as error:
            raise _wrap_error(error, n_r, estimator, outer) from error
    return values


def _sum_se(combiner_kind: CombinerType, filters: list, covset: CovarianceSet, config: ExperimentConfig, n_r: int,
            rng: np.random.Generator) -> float:
    """
    Sum SE of the center-cell UEs, closed form for MRC and Monte Carlo for RZF.
    """

    params = config.scenario
    if combiner_kind == CombinerType.COMBINER_TYPE_MRC:
        gammas = [SpectralEfficiency.mrc_sinr_closed_form(filters[k].W, covset, CENTER_BS, k, params.rho_ul)[1]
                  for k in range(params.K)]
    else:
        combiner = CombinerSpec(kind=combiner_kind, filters=tuple(filters))
        gammas = SpectralEfficiency.uatf_sinr_monte_carlo_cell(combiner, covset, CENTER_BS, params.rho_ul,
                                                               config.n_blocks, rng)
    return float(sum(SpectralEfficiency.uatf_se(gamma, params, n_r) for gamma in gammas))


def _se_task(task: tuple) -> dict:
    """
    Sum SE per combiner for one outer realization, of either the approximate estimators at a
    sweep point or one of the N_R-independent baselines.
    """

    config, covset = _WORKER_STATE['config'], _WORKER_STATE['covset']
    params = config.scenario

    if task[0] == 'baseline':
        _, estimator, outer = task
        values = dict()
        try:
            if estimator == 'mmse_perfect':
                for combiner_kind in SE_COMBINERS:
                    rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_BASELINE,
                                                  BASELINE_INDEX[estimator], outer, SE_COMBINERS.index(combiner_kind))
                    values[combiner_kind.value] = float(sum(SpectralEfficiency.perfect_cov_se_baseline_cell(
                        covset, CENTER_BS, combiner_kind, params.rho_ul, config.n_blocks, rng)))
                return values

            if estimator == 'mmse':
                filters = [ChannelEstimator.mmse_filter(covset.R(CENTER_BS, CENTER_BS, k), covset.Q(CENTER_BS, k))
                           for k in range(params.K)]
            else:
                filters = [ChannelEstimator.ls_filter(params.M)] * params.K

            rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_BASELINE,
                                          BASELINE_INDEX[estimator], outer)
            for combiner_kind in SE_COMBINERS:
                values[combiner_kind.value] = _sum_se(combiner_kind, filters, covset, config, 0, rng)
        except Exception as error:
            raise _wrap_error(error, 0, estimator, outer) from error
        return values

    _, point_index, n_r, outer, factors = task
    rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_OUTER_REALIZATION, point_index, outer)

    values = dict()
    for estimator, scheme in APPROX_ESTIMATORS.items():
        try:
            filters = _approx_filters(covset, config, n_r, estimator, factors[estimator], rng)
            mc_rng = RandomService.substream(config.seed, StreamPurpose.STREAM_PURPOSE_MONTE_CARLO,
                                             point_index, outer, SCHEME_INDEX[scheme])
            for combiner_kind in SE_COMBINERS:
                values[(estimator, combiner_kind.value)] = _sum_se(combiner_kind, filters, covset, config, n_r, mc_rng)
        except Exception as error:
            raise _wrap_error(error, n_r, estimator, outer) from error
    return values


class ExperimentRunner:
    """
    Runs the sweeps over N_R on the center cell.

    For every sweep point the shrinkage factors of each UE and acquisition scheme are optimized
    once, then applied in n_outer independent covariance-estimation realizations. The MMSE and LS
    estimators do not depend on N_R, so their rows are computed once and replicated at every point.
    """

    @staticmethod
    def _optimize_factors(config: ExperimentConfig, workers: int) -> dict:
        """
        Run the factor search for every sweep point, UE and acquisition scheme.

        :return: dict, (point_index, estimator) -> tuple of RegularizationFactors, one per UE
        """

        tasks = [(point_index, n_r, k, estimator)
                 for point_index, n_r in enumerate(config.sweep)
                 for estimator in APPROX_ESTIMATORS
                 for k in range(config.scenario.K)]
        results = TaskPool.run(_factor_task, tasks, workers=workers, initializer=_init_worker, initargs=(config,),
                               description='factor searches')

        factors = dict()
        for (point_index, _, k, estimator), result in zip(tasks, results):
            factors.setdefault((point_index, estimator), []).append(result)
        return {key: tuple(value) for key, value in factors.items()}

    @staticmethod
    def _factor_means(factors: tuple) -> tuple[float, float]:
        return float(np.mean([item.eta for item in factors])), float(np.mean([item.mu for item in factors]))

    @staticmethod
    def _outer_tasks(config: ExperimentConfig, factors: dict, prefix: tuple = ()) -> list:
        return [prefix + (point_index, n_r, outer, {estimator: factors[(point_index, estimator)]
                                                     for estimator in APPROX_ESTIMATORS})
                for point_index, n_r in enumerate(config.sweep)
                for outer in range(config.n_outer)]

    @staticmethod
    def run_mse_sweep(config: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
        """
        Normalized MSE of the MMSE, LS and both approximate MMSE estimators over the sweep.

        :param config: ExperimentConfig, experiment configuration
        :param workers: int, worker processes, 0 for one per CPU
        :return: list[ResultRow], 4 rows per sweep point in CSV order

        :raises ExperimentError: if a task fails, with the sweep point, estimator and outer realization
        """

        params = config.scenario
        logger.info('MSE sweep over N_R=%s with %d outer realizations.', list(config.sweep), config.n_outer)

        covset = build_center_covariance_set(config)
        mmse_values, ls_values = [], []
        for k in range(params.K):
            R, Q = covset.R(CENTER_BS, CENTER_BS, k), covset.Q(CENTER_BS, k)
            try:
                mmse_values.append(ChannelEstimator.normalized_mse(ChannelEstimator.mmse_filter(R, Q), R, Q))
            except Exception as error:
                raise _wrap_error(error, 0, 'mmse', None) from error
            ls_values.append(ChannelEstimator.normalized_mse(ChannelEstimator.ls_filter(params.M), R, Q))
        mmse_nmse, ls_nmse = float(np.mean(mmse_values)), float(np.mean(ls_values))
        logger.info('Normalized MSE of MMSE %.4e, of LS %.4e.', mmse_nmse, ls_nmse)

        factors = ExperimentRunner._optimize_factors(config, workers)
        tasks = ExperimentRunner._outer_tasks(config, factors)
        results = TaskPool.run(_mse_outer_task, tasks, workers=workers, initializer=_init_worker, initargs=(config,),
                               description='MSE realizations')

        registry = ResultRegistry()
        for point_index, n_r in enumerate(config.sweep):
            registry.add_row(ResultRow('nmse', 'mmse', 'none', n_r, None, None, mmse_nmse, 0.0, config.seed))
            registry.add_row(ResultRow('nmse', 'ls', 'none', n_r, None, None, ls_nmse, 0.0, config.seed))

            point_results = [result for task, result in zip(tasks, results) if task[0] == point_index]
            for estimator in APPROX_ESTIMATORS:
                mean, stderr = StatisticsService.mean_and_stderr([result[estimator] for result in point_results])
                eta, mu = ExperimentRunner._factor_means(factors[(point_index, estimator)])
                registry.add_row(ResultRow('nmse', estimator, 'none', n_r, eta, mu, mean, stderr, config.seed))
                logger.info('N_R=%d %s: normalized MSE %.4e +- %.1e (eta=%.2f, mu=%.2f).',
                            n_r, estimator, mean, stderr, eta, mu)

        return registry.rows()

    @staticmethod
    def run_se_sweep(config: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
        """
        Sum SE of the center cell with MRC and RZF for every estimator over the sweep.

        The MMSE and LS rows use no extra pilots in the pre-log. The 'mmse_perfect' rows hold the bound
        with MMSE estimates used for detection, with pre-log 1 - K / tau_c.

        :param config: ExperimentConfig, experiment configuration
        :param workers: int, worker processes, 0 for one per CPU
        :return: list[ResultRow], 10 rows per sweep point in CSV order

        :raises ExperimentError: if a task fails, with the sweep point, estimator and outer realization
        """

        logger.info('SE sweep over N_R=%s with %d outer realizations and %d blocks.',
                    list(config.sweep), config.n_outer, config.n_blocks)

        factors = ExperimentRunner._optimize_factors(config, workers)
        baseline_tasks = [('baseline', estimator, outer) for estimator in BASELINE_INDEX for outer in range(config.n_outer)]
        sweep_tasks = ExperimentRunner._outer_tasks(config, factors, prefix=('sweep',))
        results = TaskPool.run(_se_task, baseline_tasks + sweep_tasks, workers=workers, initializer=_init_worker,
                               initargs=(config,), description='SE realizations')
        baseline_results, sweep_results = results[:len(baseline_tasks)], results[len(baseline_tasks):]

        baseline_values = dict()
        for estimator in BASELINE_INDEX:
            outer_values = [result for task, result in zip(baseline_tasks, baseline_results) if task[1] == estimator]
            for combiner_kind in SE_COMBINERS:
                baseline_values[(estimator, combiner_kind.value)] = StatisticsService.mean_and_stderr(
                    [values[combiner_kind.value] for values in outer_values])
                logger.info('%s %s: sum SE %.4f bit/s/Hz.', estimator, combiner_kind.value,
                            baseline_values[(estimator, combiner_kind.value)][0])

        registry = ResultRegistry()
        for point_index, n_r in enumerate(config.sweep):
            for (estimator, combiner), (mean, stderr) in baseline_values.items():
                registry.add_row(ResultRow('sum_se', estimator, combiner, n_r, None, None, mean, stderr, config.seed))

            point_results = [result for task, result in zip(sweep_tasks, sweep_results) if task[1] == point_index]
            for estimator in APPROX_ESTIMATORS:
                eta, mu = ExperimentRunner._factor_means(factors[(point_index, estimator)])
                for combiner_kind in SE_COMBINERS:
                    mean, stderr = StatisticsService.mean_and_stderr(
                        [result[(estimator, combiner_kind.value)] for result in point_results])
                    registry.add_row(ResultRow('sum_se', estimator, combiner_kind.value, n_r, eta, mu, mean, stderr,
                                               config.seed))
                    logger.info('N_R=%d %s %s: sum SE %.4f +- %.1e bit/s/Hz.',
                                n_r, estimator, combiner_kind.value, mean, stderr)

        return registry.rows()
