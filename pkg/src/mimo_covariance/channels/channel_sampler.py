# File: channel_sampler.py
# Description: Correlated Rayleigh fading channel realizations.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mimo_covariance.scenario.covariance_set import CovarianceSet
from mimo_covariance.services.matrix_service import MatrixService
from mimo_covariance.services.random_service import RandomService


@dataclass(frozen=True)
class ChannelDraw:
    """
    The channels of all UEs seen by one observing BS in one coherence block.

    Attributes:
        bs_index: int, observing BS j
        h: dict, maps (l, k) to the complex M-vector h_jlk
    """

    bs_index: int
    h: dict


class ChannelSampler:
    """
    Draws channel vectors h ~ CN(0, R) as F z with F F^H = R and z i.i.d. CN(0, I).
    """

    @staticmethod
    def sample_gaussian(covariance: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """
        Draw one zero-mean complex Gaussian vector with the given covariance.

        :param covariance: np.ndarray, M x M positive semidefinite matrix R
        :param rng: np.random.Generator, source of randomness
        :return: np.ndarray, complex M-vector

        :raises InvalidCovarianceError: if R is indefinite beyond the numerical tolerance
        """

        factor = MatrixService.psd_factor(covariance)
        return factor @ RandomService.complex_normal(rng, (covariance.shape[0],))

    @staticmethod
    def draw(covset: CovarianceSet, bs_index: int, rng: np.random.Generator) -> ChannelDraw:
        """
        Draw the channels from every UE in the network to BS j for one coherence block.

        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, observing BS j
        :param rng: np.random.Generator, source of randomness
        :return: ChannelDraw, independent channels h_jlk ~ CN(0, R_jlk)
        """

        params = covset.params
        h = dict()
        for l in range(params.L):
            for k in range(params.K):
                z = RandomService.complex_normal(rng, (params.M,))
                h[(l, k)] = covset.factor(bs_index, l, k) @ z
        return ChannelDraw(bs_index=bs_index, h=h)

    @staticmethod
    def draw_batch(covset: CovarianceSet,
                   bs_index: int,
                   n_blocks: int,
                   rng: np.random.Generator,
                   ue_indices: Optional[Sequence[int]] = None) -> np.ndarray:
        """
        Draw channels for many independent coherence blocks at once.

        :param covset: CovarianceSet, true covariance matrices
        :param bs_index: int, observing BS j
        :param n_blocks: int, number of coherence blocks
        :param rng: np.random.Generator, source of randomness
        :param ue_indices: sequence of int, the UEs k to draw in every cell, all UEs if None
        :return: np.ndarray of shape (L, len(ue_indices), M, n_blocks), column n of entry [l, i]
            is the channel of UE ue_indices[i] in cell l during block n

        :raises ValueError: if n_blocks is negative
        """

        if n_blocks < 0:
            raise ValueError('number of blocks must be nonnegative')

        params = covset.params
        ues = list(range(params.K)) if ue_indices is None else list(ue_indices)

        channels = np.empty((params.L, len(ues), params.M, n_blocks), dtype=complex)
        for l in range(params.L):
            for index, k in enumerate(ues):
                z = RandomService.complex_normal(rng, (params.M, n_blocks))
                channels[l, index] = covset.factor(bs_index, l, k) @ z
        return channels
