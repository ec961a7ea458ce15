# File: covariance_set.py
# Description: True channel and pilot-observation covariance matrices of a scenario.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from mimo_covariance.services.matrix_service import MatrixService

from .covariance_model import CovarianceModel
from .network_geometry import NetworkGeometry
from .system_params import SystemParams


class CovarianceSet:
    """
    The family of covariance matrices {R_jlk} and {Q_jk} of a scenario.

    R_jlk is the covariance of the channel from BS j to UE k in cell l. UE k uses pilot k in every
    cell, so the pilot observation of UE k at BS j has covariance

        Q_jk = sum_l R_jlk + (1 / rho_tr) I.

    The matrices are immutable once built and can be shared read-only between workers.
    Factorizations used to draw channels are computed on first use and cached.
    """

    def __init__(self, params: SystemParams, channel_covariances: dict, observing_bs: Iterable[int]) -> None:
        """
        Assemble the set from the channel covariance matrices.

        :param params: SystemParams, model constants
        :param channel_covariances: dict, maps (j, l, k) to the M x M matrix R_jlk
        :param observing_bs: iterable of int, the BSs j for which the matrices are present
        """

        self._params = params
        self._observing_bs = tuple(observing_bs)
        self._R = dict(channel_covariances)
        self._Q = dict()
        self._factors = dict()
        self._interference_sums = dict()

        noise = np.eye(params.M) / params.rho_tr
        for j in self._observing_bs:
            for k in range(params.K):
                total = np.zeros((params.M, params.M), dtype=complex)
                for l in range(params.L):
                    total = total + self._R[(j, l, k)]
                self._Q[(j, k)] = total + noise

        for matrix in list(self._R.values()) + list(self._Q.values()):
            matrix.setflags(write=False)

    @property
    def params(self) -> SystemParams:
        return self._params

    @property
    def observing_bs(self) -> tuple:
        return self._observing_bs

    def R(self, bs_index: int, cell_index: int, ue_index: int) -> np.ndarray:
        """
        Get the channel covariance matrix R_jlk.

        :param bs_index: int, observing BS j
        :param cell_index: int, cell l of the UE
        :param ue_index: int, UE k within cell l
        :return: np.ndarray, read-only M x M matrix

        :raises IndexError: if the index is not in the set
        """

        key = (bs_index, cell_index, ue_index)
        if key not in self._R:
            raise IndexError(f"No channel covariance for (j, l, k) = {key}.")
        return self._R[key]

    def Q(self, bs_index: int, ue_index: int) -> np.ndarray:
        """
        Get the pilot-observation covariance matrix Q_jk.

        :param bs_index: int, observing BS j
        :param ue_index: int, pilot k
        :return: np.ndarray, read-only M x M matrix

        :raises IndexError: if the index is not in the set
        """

        key = (bs_index, ue_index)
        if key not in self._Q:
            raise IndexError(f"No observation covariance for (j, k) = {key}.")
        return self._Q[key]

    def factor(self, bs_index: int, cell_index: int, ue_index: int) -> np.ndarray:
        """
        Get a factor F with F F^H = R_jlk, computed on first use.

        :param bs_index: int, observing BS j
        :param cell_index: int, cell l of the UE
        :param ue_index: int, UE k within cell l
        :return: np.ndarray, M x M factor

        :raises IndexError: if the index is not in the set
        """

        key = (bs_index, cell_index, ue_index)
        if key not in self._factors:
            self._factors[key] = MatrixService.psd_factor(self.R(*key))
        return self._factors[key]

    def interference_sum(self, bs_index: int) -> np.ndarray:
        """
        Get sum_l sum_i R_jli, the covariance of all UE signals received by BS j.

        :param bs_index: int, observing BS j
        :return: np.ndarray, M x M matrix
        """

        if bs_index not in self._interference_sums:
            total = np.zeros((self._params.M, self._params.M), dtype=complex)
            for l in range(self._params.L):
                for i in range(self._params.K):
                    total = total + self.R(bs_index, l, i)
            self._interference_sums[bs_index] = total
        return self._interference_sums[bs_index]

    def list_keys(self) -> list[tuple]:
        """
        Return the (j, l, k) keys of the channel covariance matrices.
        """
        return list(self._R.keys())

    def __len__(self):
        """
        Return the number of channel covariance matrices.
        """
        return len(self._R)

    def summary(self, bs_index: int = 0) -> dict:
        """
        Summarize the scenario as seen by one BS.

        :param bs_index: int, observing BS j
        :return: dict, per cell the mean large-scale gain in dB and the mean effective rank of R_jlk
        """

        cells = []
        for l in range(self._params.L):
            gains = [np.real(np.trace(self.R(bs_index, l, k))) / self._params.M for k in range(self._params.K)]
            ranks = [MatrixService.effective_rank(self.R(bs_index, l, k)) for k in range(self._params.K)]
            cells.append({
                'cell': l,
                'mean_gain_db': float(np.mean(10.0 * np.log10(gains))),
                'mean_effective_rank': float(np.mean(ranks)),
            })

        return {'bs': bs_index, 'M': self._params.M, 'cells': cells}

    @staticmethod
    def build_covariance_set(geometry: NetworkGeometry,
                             params: SystemParams,
                             observing_bs: Optional[Iterable[int]] = None) -> CovarianceSet:
        """
        Build R_jlk from the pathloss and the one-ring model, and Q_jk from the R_jlk.

        :param geometry: NetworkGeometry, layout consistent with params
        :param params: SystemParams, model constants
        :param observing_bs: iterable of int, the BSs j to build matrices for, all BSs if None
        :return: CovarianceSet, the assembled set

        :raises ValueError: if the geometry does not match params or an index is out of range
        """

        if geometry.num_cells != params.L or geometry.num_ues != params.K:
            raise ValueError('geometry does not match the system parameters')

        bs_indices = tuple(range(params.L)) if observing_bs is None else tuple(observing_bs)
        if any(j < 0 or j >= params.L for j in bs_indices):
            raise ValueError('observing BS index out of range')

        channel_covariances = dict()
        for j in bs_indices:
            for l in range(params.L):
                for k in range(params.K):
                    beta = CovarianceModel.large_scale_gain(geometry.distance(j, l, k), params)
                    azimuth = geometry.azimuth(j, l, k)
                    channel_covariances[(j, l, k)] = CovarianceModel.one_ring_covariance(beta, azimuth, params)

        return CovarianceSet(params, channel_covariances, bs_indices)
