# File: pilot_observer.py
# Description: Pilot-phase observations after despreading.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.scenario.system_params import SystemParams
from mimo_covariance.services.random_service import RandomService

from .channel_sampler import ChannelDraw, ChannelSampler
from .observation_kind import ObservationKind


@dataclass(frozen=True)
class PilotObservation:
    """
    A despread pilot observation y of UE k at BS j.

    Attributes:
        y: np.ndarray, complex M-vector
        kind: ObservationKind, which UEs transmitted on the pilot
    """

    y: np.ndarray
    kind: ObservationKind


class PilotObserver:
    """
    Synthesizes the three kinds of pilot observations of UE k at BS j:

        regular:       y = h_jjk + sum_{l != j} h_jlk + n / sqrt(rho_tr)
        clean:         y = h_jjk + n / sqrt(rho_tr)
        contaminants:  y = sum_{l != j} h_jlk + n / sqrt(rho_tr)

    with n ~ CN(0, I). Extra pilots are orthogonal across the whole network, so clean
    observations carry no interference.
    """

    @staticmethod
    def _combine(kind: ObservationKind, desired: np.ndarray, contaminants: np.ndarray) -> np.ndarray:
        """
        Sum the channel terms present in an observation kind.

        :param kind: ObservationKind, observation category
        :param desired: np.ndarray, the desired UE channel term
        :param contaminants: np.ndarray, the sum of the contaminating channels
        :return: np.ndarray, the noise-free observation

        :raises ValueError: if the kind is not supported
        """

        if kind == ObservationKind.OBSERVATION_KIND_REGULAR:
            return desired + contaminants
        if kind == ObservationKind.OBSERVATION_KIND_CLEAN:
            return desired
        if kind == ObservationKind.OBSERVATION_KIND_CONTAMINANTS:
            return contaminants
        raise ValueError(f'unsupported observation kind: {kind}')

    @staticmethod
    def observe(kind: ObservationKind,
                bs_index: int,
                ue_index: int,
                draw: ChannelDraw,
                rng: np.random.Generator,
                params: SystemParams) -> PilotObservation:
        """
        Form one pilot observation from a channel draw, with freshly drawn noise.

        :param kind: ObservationKind, observation category
        :param bs_index: int, observing BS j, the draw must belong to it
        :param ue_index: int, pilot k
        :param draw: ChannelDraw, channels of the coherence block
        :param rng: np.random.Generator, source of the noise
        :param params: SystemParams, model constants
        :return: PilotObservation, the observation

        :raises ValueError: if the draw belongs to another BS
        """

        if draw.bs_index != bs_index:
            raise ValueError('channel draw belongs to another BS')

        desired = draw.h[(bs_index, ue_index)]
        contaminants = np.zeros(params.M, dtype=complex)
        for l in range(params.L):
            if l != bs_index:
                contaminants = contaminants + draw.h[(l, ue_index)]

        noise = RandomService.complex_normal(rng, (params.M,)) / np.sqrt(params.rho_tr)
        y = PilotObserver._combine(kind, desired, contaminants) + noise
        return PilotObservation(y=y, kind=kind)

    @staticmethod
    def observe_batch(kind: ObservationKind,
                      bs_index: int,
                      ue_index: int,
                      covset: CovarianceSet,
                      n_blocks: int,
                      rng: np.random.Generator) -> np.ndarray:
        """
        Form pilot observations in n independent coherence blocks.

        Each column has the distribution of one observe call on a fresh channel draw.

        :param kind: ObservationKind, observation category
        :param bs_index: int, observing BS j
        :param ue_index: int, pilot k
        :param covset: CovarianceSet, true covariance matrices
        :param n_blocks: int, number of observations
        :param rng: np.random.Generator, source of randomness
        :return: np.ndarray of shape (M, n_blocks), one observation per column
        """

        params = covset.params
        channels = ChannelSampler.draw_batch(covset, bs_index, n_blocks, rng, ue_indices=[ue_index])[:, 0]

        desired = channels[bs_index]
        contaminants = np.sum(np.delete(channels, bs_index, axis=0), axis=0)

        noise = RandomService.complex_normal(rng, (params.M, n_blocks)) / np.sqrt(params.rho_tr)
        return PilotObserver._combine(kind, desired, contaminants) + noise
