# File: spectral_efficiency.py
# Description: Uplink spectral efficiency bounds for MRC and RZF combining.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from mimo_covariance.channels.channel_sampler import ChannelSampler
from mimo_covariance.estimation.channel_estimator import ChannelEstimator, FilterMatrix
from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.system_params import SystemParams
from mimo_covariance.services.matrix_service import MatrixService
from mimo_covariance.services.random_service import RandomService
from mimo_covariance.services.statistics_service import StatisticsService

from .combiner import Combiner, CombinerSpec, CombinerType

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MrcMoments:
    """
    The channel moments of the combining vector v = W y in closed form.

    Attributes:
        gain: complex, E{v^H h_jjk} = tr(W^H R_jjk)
        combiner_power: float, E{||v||^2} = tr(W Q_jk W^H)
        interference_power: float, E{|v^H h_jli|^2}
    """

    gain: complex
    combiner_power: float
    interference_power: float


@dataclass(frozen=True)
class SinrTerms:
    """
    Numerator and denominator terms of the closed-form MRC SINR.

    Attributes:
        signal: float, |tr(W^H R_jjk)|^2
        interference_sum: float, sum_{l, i} tr(W Q_jk W^H R_jli)
        coherent_contamination: float, sum_{l != j} |tr(W^H R_jlk)|^2
        noise_term: float, (1 / rho_ul) tr(W Q_jk W^H)
    """

    signal: float
    interference_sum: float
    coherent_contamination: float
    noise_term: float

    @property
    def sinr(self) -> float:
        denominator = self.interference_sum + self.coherent_contamination + self.noise_term
        if self.signal == 0.0 or denominator <= 0.0:
            return 0.0
        return self.signal / denominator


class SpectralEfficiency:
    """
    Spectral efficiency (SE) of UE k in cell j.

    The use-and-then-forget (UatF) bound holds for any channel estimator and any combiner:

        SE = (1 - K / tau_c - alpha) log2(1 + gamma)

        gamma = |E{v^H h_jjk}|^2 / (sum_{l, i} E{|v^H h_jli|^2} - |E{v^H h_jjk}|^2 + E{||v||^2} / rho_ul)

    with alpha = N_R K L / tau_s the share of extra pilots. All expectations are over channel
    realizations and conditional on the estimation filters. With MRC and a deterministic filter
    the expectations have closed forms; with RZF they are estimated by Monte Carlo.
    """

    REAL_TOLERANCE = 1e-10
    MIN_BLOCKS = 100
    CHUNK_ELEMENTS = 4_000_000

    @staticmethod
    def _real(value: complex, scale: float, name: str) -> float:
        """
        Return the real part of a quantity that is real in exact arithmetic.

        :raises ArithmeticError: if the imaginary part is not negligible
        """

        if abs(value.imag) > SpectralEfficiency.REAL_TOLERANCE * max(scale, abs(value), np.finfo(float).tiny):
            raise ArithmeticError(f'{name} has imaginary part {value.imag:.3e}')
        return float(value.real)

    @staticmethod
    def _check_indices(covset: CovarianceSet, bs_index: int, ue_index: int) -> None:
        """
        :raises IndexError: if BS j or UE k is not in the covariance set
        """
        if bs_index not in covset.observing_bs:
            raise IndexError(f'BS {bs_index} is not in the covariance set')
        if not 0 <= ue_index < covset.params.K:
            raise IndexError(f'UE {ue_index} is out of range')

    @staticmethod
    def mrc_moments(W: np.ndarray,
                    covset: CovarianceSet,
                    bs_index: int,
                    ue_index: int,
                    cell_index: int,
                    interferer_index: int) -> MrcMoments:
        """
        Compute the channel moments of v_jk = W y_jk in closed form.

        :param W: np.ndarray, deterministic estimation filter of UE k
        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param ue_index: int, UE k of cell j
        :param cell_index: int, cell l of the interfering UE
        :param interferer_index: int, UE i of cell l
        :return: MrcMoments, E{v^H h_jjk}, E{||v||^2} and E{|v^H h_jli|^2}

        :raises IndexError: if an index is out of range
        """

        SpectralEfficiency._check_indices(covset, bs_index, ue_index)
        if not 0 <= cell_index < covset.params.L or not 0 <= interferer_index < covset.params.K:
            raise IndexError(f'interferer (l, i) = ({cell_index}, {interferer_index}) is out of range')

        R_desired = covset.R(bs_index, bs_index, ue_index)
        R_interferer = covset.R(bs_index, cell_index, interferer_index)
        WQW = W @ covset.Q(bs_index, ue_index) @ W.conj().T

        gain = MatrixService.trace_product(W.conj().T, R_desired)
        combiner_power = np.trace(WQW)
        interference = MatrixService.trace_product(WQW, R_interferer)
        if interferer_index == ue_index:
            interference = interference + abs(MatrixService.trace_product(W.conj().T, R_interferer)) ** 2

        scale = abs(combiner_power)
        return MrcMoments(gain=gain,
                          combiner_power=SpectralEfficiency._real(combiner_power, scale, 'E{||v||^2}'),
                          interference_power=SpectralEfficiency._real(interference, abs(interference),
                                                                      'E{|v^H h|^2}'))

    @staticmethod
    def mrc_sinr_closed_form(W: np.ndarray,
                             covset: CovarianceSet,
                             bs_index: int,
                             ue_index: int,
                             rho_ul: float) -> tuple[SinrTerms, float]:
        """
        Compute the UatF SINR of MRC with a deterministic filter in closed form.

        :param W: np.ndarray, deterministic estimation filter of UE k
        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param ue_index: int, UE k of cell j
        :param rho_ul: float, normalized uplink data power
        :return: tuple (SinrTerms, gamma), gamma is 0.0 for the zero filter

        :raises IndexError: if an index is out of range
        """

        SpectralEfficiency._check_indices(covset, bs_index, ue_index)
        params = covset.params

        WQW = W @ covset.Q(bs_index, ue_index) @ W.conj().T
        power = SpectralEfficiency._real(np.trace(WQW), 0.0, 'tr(W Q W^H)')

        gains = [MatrixService.trace_product(W.conj().T, covset.R(bs_index, l, ue_index)) for l in range(params.L)]
        interference = MatrixService.trace_product(WQW, covset.interference_sum(bs_index))

        terms = SinrTerms(signal=abs(gains[bs_index]) ** 2,
                          interference_sum=SpectralEfficiency._real(interference, power, 'interference sum'),
                          coherent_contamination=float(sum(abs(gains[l]) ** 2 for l in range(params.L)
                                                           if l != bs_index)),
                          noise_term=power / rho_ul)
        return terms, terms.sinr

    @staticmethod
    def uatf_sinr_from_moments(gain: complex,
                               interference_power_sum: float,
                               combiner_power: float,
                               rho_ul: float) -> float:
        """
        Assemble the UatF SINR from the channel moments.

        The variance-like term sum E{|v^H h_jli|^2} - |E{v^H h_jjk}|^2 is clamped at zero when
        Monte-Carlo noise drives it negative.

        :param gain: complex, E{v^H h_jjk}
        :param interference_power_sum: float, sum over all (l, i) of E{|v^H h_jli|^2}
        :param combiner_power: float, E{||v||^2}
        :param rho_ul: float, normalized uplink data power
        :return: float, gamma, 0.0 if the gain is zero
        """

        signal = abs(gain) ** 2
        if signal == 0.0:
            return 0.0

        variance = interference_power_sum - signal
        if variance < 0.0:
            logger.warning('Clamping negative interference variance %.3e to zero.', variance)
            variance = 0.0

        denominator = variance + combiner_power / rho_ul
        if denominator <= 0.0:
            return 0.0
        return float(signal / denominator)

    @staticmethod
    def _chunk(params: SystemParams) -> int:
        return max(1, SpectralEfficiency.CHUNK_ELEMENTS // (params.L * params.K * params.M))

    @staticmethod
    def _combining_vectors(combiner: CombinerSpec,
                           channels: np.ndarray,
                           bs_index: int,
                           ue_indices: list,
                           rho_ul: float,
                           rng: np.random.Generator,
                           params: SystemParams) -> np.ndarray:
        """
        Regenerate the pilot observations of a chunk of blocks and build the combining vectors.

        :return: np.ndarray of shape (len(ue_indices), M, n_blocks)
        """

        n_blocks = channels.shape[-1]
        pilots = list(range(params.K)) if combiner.kind == CombinerType.COMBINER_TYPE_RZF else ue_indices

        estimates = dict()
        for i in pilots:
            noise = RandomService.complex_normal(rng, (params.M, n_blocks)) / np.sqrt(params.rho_tr)
            y = np.sum(channels[:, i], axis=0) + noise
            estimates[i] = ChannelEstimator.estimate_channel(combiner.filter_for(i), y)

        if combiner.kind == CombinerType.COMBINER_TYPE_MRC:
            return np.stack([estimates[k] for k in ue_indices])

        H_hat = np.stack([estimates[i] for i in range(params.K)], axis=-1)
        V = Combiner.rzf_combiner_batch(np.moveaxis(H_hat, 1, 0), rho_ul)
        return np.moveaxis(V, 0, -1)[:, ue_indices].transpose(1, 0, 2)

    @staticmethod
    def uatf_moments_monte_carlo(combiner: CombinerSpec,
                                 covset: CovarianceSet,
                                 bs_index: int,
                                 ue_indices: list,
                                 rho_ul: float,
                                 n_blocks: int,
                                 rng: np.random.Generator) -> list[tuple[complex, float, float]]:
        """
        Estimate the UatF channel moments by sample means over fresh coherence blocks.

        In every block the channels, the pilot observations, the channel estimates and the
        combining vectors are regenerated; the estimation filters stay fixed.

        :param combiner: CombinerSpec, combining scheme and filters
        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param ue_indices: list of int, the UEs k of cell j to evaluate
        :param rho_ul: float, normalized uplink data power
        :param n_blocks: int, number of coherence blocks, at least 100
        :param rng: np.random.Generator, source of randomness
        :return: list of tuple (E{v^H h_jjk}, sum_{l, i} E{|v^H h_jli|^2}, E{||v||^2}), one per UE

        :raises ValueError: if n_blocks is smaller than 100
        """

        if n_blocks < SpectralEfficiency.MIN_BLOCKS:
            raise ValueError(f'at least {SpectralEfficiency.MIN_BLOCKS} blocks are required')
        for k in ue_indices:
            SpectralEfficiency._check_indices(covset, bs_index, k)

        params = covset.params
        n_ues = len(ue_indices)
        gain_sum = np.zeros(n_ues, dtype=complex)
        interference_sum = np.zeros(n_ues)
        power_sum = np.zeros(n_ues)

        for chunk in StatisticsService.chunk_sizes(n_blocks, SpectralEfficiency._chunk(params)):
            channels = ChannelSampler.draw_batch(covset, bs_index, chunk, rng)
            V = SpectralEfficiency._combining_vectors(combiner, channels, bs_index, ue_indices, rho_ul, rng, params)

            # projections[u, l, i, n] = v_u^H h_li in block n
            projections = np.einsum('umn,limn->ulin', V.conj(), channels)
            for u, k in enumerate(ue_indices):
                gain_sum[u] += np.sum(projections[u, bs_index, k])
            interference_sum += np.sum(np.abs(projections) ** 2, axis=(1, 2, 3))
            power_sum += np.sum(np.abs(V) ** 2, axis=(1, 2))

        return [(gain_sum[u] / n_blocks, interference_sum[u] / n_blocks, power_sum[u] / n_blocks)
                for u in range(n_ues)]

    @staticmethod
    def uatf_sinr_monte_carlo(combiner: CombinerSpec,
                              covset: CovarianceSet,
                              bs_index: int,
                              ue_index: int,
                              rho_ul: float,
                              n_blocks: int,
                              rng: np.random.Generator) -> float:
        """
        Estimate the UatF SINR of UE k by Monte Carlo.

        :param combiner: CombinerSpec, combining scheme and filters fixed a priori
        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param ue_index: int, UE k of cell j
        :param rho_ul: float, normalized uplink data power
        :param n_blocks: int, number of coherence blocks, at least 100
        :param rng: np.random.Generator, source of randomness
        :return: float, estimate of gamma

        :raises ValueError: if n_blocks is smaller than 100
        """

        return SpectralEfficiency.uatf_sinr_monte_carlo_cell(combiner, covset, bs_index, rho_ul, n_blocks, rng,
                                                             ue_indices=[ue_index])[0]

    @staticmethod
    def uatf_sinr_monte_carlo_cell(combiner: CombinerSpec,
                                   covset: CovarianceSet,
                                   bs_index: int,
                                   rho_ul: float,
                                   n_blocks: int,
                                   rng: np.random.Generator,
                                   ue_indices: list = None) -> list[float]:
        """
        Estimate the UatF SINR of several UEs of cell j from the same blocks.

        :param combiner: CombinerSpec, combining scheme and filters fixed a priori
        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param rho_ul: float, normalized uplink data power
        :param n_blocks: int, number of coherence blocks, at least 100
        :param rng: np.random.Generator, source of randomness
        :param ue_indices: list of int, the UEs to evaluate, all UEs of the cell if None
        :return: list[float], estimates of gamma in the order of ue_indices
        """

        ues = list(range(covset.params.K)) if ue_indices is None else list(ue_indices)
        moments = SpectralEfficiency.uatf_moments_monte_carlo(combiner, covset, bs_index, ues, rho_ul, n_blocks, rng)
        return [SpectralEfficiency.uatf_sinr_from_moments(gain, interference, power, rho_ul)
                for gain, interference, power in moments]

    @staticmethod
    def prelog(params: SystemParams, n_r: int) -> float:
        """
        Compute the pre-log factor 1 - K / tau_c - N_R K L / tau_s.

        :param params: SystemParams, model constants
        :param n_r: int, extra pilots per UE N_R, 0 without covariance estimation
        :return: float, pre-log factor, clamped at 0 with a warning if the overhead exceeds 1
        """

        alpha = n_r * params.K * params.L / params.tau_s
        factor = 1.0 - params.K / params.tau_c - alpha
        if factor < 0.0:
            logger.warning('Pilot overhead exceeds the coherence block (N_R=%d); clamping pre-log to 0.', n_r)
            return 0.0
        return factor

    @staticmethod
    def uatf_se(gamma: float, params: SystemParams, n_r: int) -> float:
        """
        Compute the UatF spectral efficiency.

        :param gamma: float, SINR, nonnegative
        :param params: SystemParams, model constants
        :param n_r: int, extra pilots per UE N_R
        :return: float, SE in bit/s/Hz

        :raises ValueError: if gamma is negative
        """

        if gamma < 0.0:
            raise ValueError('SINR must be nonnegative')
        return SpectralEfficiency.prelog(params, n_r) * float(np.log2(1.0 + gamma))

    @staticmethod
    def perfect_cov_se_baseline(covset: CovarianceSet,
                                bs_index: int,
                                ue_index: int,
                                combiner_kind: CombinerType,
                                rho_ul: float,
                                n_blocks: int,
                                rng: np.random.Generator) -> float:
        """
        Estimate the SE bound that uses MMSE estimates for both combining and detection.

        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param ue_index: int, UE k of cell j
        :param combiner_kind: CombinerType, MRC or RZF
        :param rho_ul: float, normalized uplink data power
        :param n_blocks: int, number of coherence blocks, at least 100
        :param rng: np.random.Generator, source of randomness
        :return: float, SE in bit/s/Hz with pre-log 1 - K / tau_c

        :raises ValueError: if n_blocks is smaller than 100 or the combiner kind is unsupported
        """

        return SpectralEfficiency.perfect_cov_se_baseline_cell(covset, bs_index, combiner_kind, rho_ul, n_blocks,
                                                               rng, ue_indices=[ue_index])[0]

    @staticmethod
    def perfect_cov_se_baseline_cell(covset: CovarianceSet,
                                     bs_index: int,
                                     combiner_kind: CombinerType,
                                     rho_ul: float,
                                     n_blocks: int,
                                     rng: np.random.Generator,
                                     ue_indices: list = None) -> list[float]:
        """
        Estimate the perfect-covariance SE bound of several UEs of cell j from the same blocks.

        The instantaneous SINR is

            gamma = |v^H h_jjk|^2 / (v^H (sum_{(l, i) != (j, k)} h_jli h_jli^H + Z_j) v)

        with MMSE estimates h_jli = R_jli Q_ji^-1 y_ji and
        Z_j = sum_i (R_jji - Phi_jji) + sum_{l != j} sum_i R_jli + (1 / rho_ul) I.

        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, serving BS j
        :param combiner_kind: CombinerType, MRC or RZF
        :param rho_ul: float, normalized uplink data power
        :param n_blocks: int, number of coherence blocks, at least 100
        :param rng: np.random.Generator, source of randomness
        :param ue_indices: list of int, the UEs to evaluate, all UEs of the cell if None
        :return: list[float], SE in bit/s/Hz in the order of ue_indices
        """

        if n_blocks < SpectralEfficiency.MIN_BLOCKS:
            raise ValueError(f'at least {SpectralEfficiency.MIN_BLOCKS} blocks are required')
        if combiner_kind not in (CombinerType.COMBINER_TYPE_MRC, CombinerType.COMBINER_TYPE_RZF):
            raise ValueError(f'unsupported combiner kind: {combiner_kind}')

        params = covset.params
        j = bs_index
        ues = list(range(params.K)) if ue_indices is None else list(ue_indices)
        for k in ues:
            SpectralEfficiency._check_indices(covset, j, k)

        # estimator matrices A_li = R_jli Q_ji^-1 and the error covariance Z_j
        estimators = np.empty((params.L, params.K, params.M, params.M), dtype=complex)
        Z = np.eye(params.M) / rho_ul
        for i in range(params.K):
            Q_inverse = MatrixService.hermitian_inverse(covset.Q(j, i))
            for l in range(params.L):
                estimators[l, i] = covset.R(j, l, i) @ Q_inverse
                if l == j:
                    phi = estimators[l, i] @ covset.R(j, l, i)
                    Z = Z + covset.R(j, l, i) - phi
                else:
                    Z = Z + covset.R(j, l, i)
        Z = MatrixService.hermitian_part(Z)

        log_sum = np.zeros(len(ues))
        for chunk in StatisticsService.chunk_sizes(n_blocks, SpectralEfficiency._chunk(params)):
            channels = ChannelSampler.draw_batch(covset, j, chunk, rng)
            estimates = np.empty_like(channels)
            for i in range(params.K):
                noise = RandomService.complex_normal(rng, (params.M, chunk)) / np.sqrt(params.rho_tr)
                y = np.sum(channels[:, i], axis=0) + noise
                for l in range(params.L):
                    estimates[l, i] = estimators[l, i] @ y

            if combiner_kind == CombinerType.COMBINER_TYPE_MRC:
                V = estimates[j, ues]
            else:
                V = np.moveaxis(Combiner.rzf_combiner_batch(estimates[j].transpose(2, 1, 0), rho_ul), 0, -1)
                V = V.transpose(1, 0, 2)[ues]

            # projections[u, l, i, n] = v_u^H h_hat_li in block n
            projections = np.einsum('umn,limn->ulin', V.conj(), estimates)
            noise_power = np.real(np.einsum('umn,mp,upn->un', V.conj(), Z, V))
            total = np.sum(np.abs(projections) ** 2, axis=(1, 2))
            for u, k in enumerate(ues):
                signal = np.abs(projections[u, j, k]) ** 2
                denominator = total[u] - signal + noise_power[u]
                gamma = np.divide(signal, denominator, out=np.zeros_like(signal), where=denominator > 0.0)
                log_sum[u] += np.sum(np.log2(1.0 + gamma))

        factor = 1.0 - params.K / params.tau_c
        return [float(factor * log_sum[u] / n_blocks) for u in range(len(ues))]
