# File: combiner.py
# Description: Receive combining vectors.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from mimo_covariance.estimation.channel_estimator import FilterMatrix


class CombinerType(Enum):
    """
    Enumeration for receive combining categories.

    Attributes:
        COMBINER_TYPE_NONE: no combining, used for channel estimation results
        COMBINER_TYPE_MRC: maximum-ratio combining, v = W y
        COMBINER_TYPE_RZF: regularized zero-forcing over the intra-cell channel estimates
    """

    COMBINER_TYPE_NONE = 'none'
    COMBINER_TYPE_MRC = 'mrc'
    COMBINER_TYPE_RZF = 'rzf'


@dataclass(frozen=True)
class CombinerSpec:
    """
    How BS j builds its combining vectors from the pilot observations of a block.

    Attributes:
        kind: CombinerType, MRC or RZF
        filters: tuple of FilterMatrix, the estimation filters of the serving-cell UEs.
            MRC takes either the filter of the UE under evaluation alone, or one filter per UE.
            RZF takes exactly one filter per UE of the serving cell.
    """

    kind: CombinerType
    filters: tuple

    def __post_init__(self) -> None:
        """
        :raises ValueError: if the combiner kind or the number of filters is invalid
        """
        if self.kind not in (CombinerType.COMBINER_TYPE_MRC, CombinerType.COMBINER_TYPE_RZF):
            raise ValueError(f'unsupported combiner kind: {self.kind}')
        if len(self.filters) == 0:
            raise ValueError('at least one filter is required')
        if not all(isinstance(item, FilterMatrix) for item in self.filters):
            raise ValueError('filters must be FilterMatrix instances')

    def filter_for(self, ue_index: int) -> FilterMatrix:
        """
        Get the estimation filter of a serving-cell UE.

        :param ue_index: int, UE k
        :return: FilterMatrix, the filter W_jk
        """

        if len(self.filters) == 1 and self.kind == CombinerType.COMBINER_TYPE_MRC:
            return self.filters[0]
        return self.filters[ue_index]


class Combiner:
    """
    Regularized zero-forcing combining

        v_k = (sum_i h_i h_i^H + (1 / rho_ul) I)^-1 h_k

    computed from the intra-cell channel estimates h_i.
    """

    @staticmethod
    def rzf_combiner(estimated_channels, rho_ul: float) -> np.ndarray:
        """
        Compute the RZF vectors of all UEs of a cell.

        :param estimated_channels: list of K complex M-vectors, or an M x K array of channel estimates
        :param rho_ul: float, normalized uplink data power
        :return: np.ndarray, M x K array, column k is v_k

        :raises ValueError: if rho_ul is not positive
        """

        if rho_ul <= 0.0:
            raise ValueError('rho_ul must be positive')

        if isinstance(estimated_channels, np.ndarray) and estimated_channels.ndim == 2:
            H = estimated_channels
        else:
            H = np.column_stack([np.asarray(h) for h in estimated_channels])

        gram = H @ H.conj().T + np.eye(H.shape[0]) / rho_ul
        return scipy.linalg.solve(gram, H, assume_a='pos')

    @staticmethod
    def rzf_combiner_batch(estimated_channels: np.ndarray, rho_ul: float) -> np.ndarray:
        """
        Compute the RZF vectors for many blocks at once.

        Uses (H H^H + s I)^-1 H = H (H^H H + s I)^-1, so only K x K systems are solved.

        :param estimated_channels: np.ndarray of shape (n_blocks, M, K), channel estimates per block
        :param rho_ul: float, normalized uplink data power
        :return: np.ndarray of shape (n_blocks, M, K), RZF vectors per block

        :raises ValueError: if rho_ul is not positive
        """

        if rho_ul <= 0.0:
            raise ValueError('rho_ul must be positive')

        H = estimated_channels
        H_conj = np.conj(np.swapaxes(H, -1, -2))
        gram = H_conj @ H + np.eye(H.shape[-1]) / rho_ul
        return np.conj(np.swapaxes(np.linalg.solve(gram, H_conj), -1, -2))
