# File: network_geometry.py
# Description: Planar layout of base stations and UEs.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system_params import SystemParams


@dataclass(frozen=True)
class NetworkGeometry:
    """
    Positions of the base stations (BSs) and UEs in the plane, in meters.

    Positions are stored as complex numbers x + iy. Cell 0 is the center cell, cells 1..L-1 are
    its neighbors. UE k has the same offset from its serving BS in every cell, so the UEs that
    share pilot k sit at corresponding positions.

    Attributes:
        bs_positions: np.ndarray of shape (L,), BS positions
        ue_positions: np.ndarray of shape (L, K), UE positions, row l belongs to cell l
    """

    bs_positions: np.ndarray
    ue_positions: np.ndarray

    @property
    def num_cells(self) -> int:
        return self.bs_positions.shape[0]

    @property
    def num_ues(self) -> int:
        return self.ue_positions.shape[1]

    def distance(self, bs_index: int, cell_index: int, ue_index: int) -> float:
        """
        Distance between BS j and UE k of cell l.

        :param bs_index: int, observing BS j
        :param cell_index: int, cell l of the UE
        :param ue_index: int, UE k within cell l
        :return: float, distance in meters
        """

        return float(abs(self.ue_positions[cell_index, ue_index] - self.bs_positions[bs_index]))

    def azimuth(self, bs_index: int, cell_index: int, ue_index: int) -> float:
        """
        Azimuth from BS j towards UE k of cell l, measured from the x-axis.

        :param bs_index: int, observing BS j
        :param cell_index: int, cell l of the UE
        :param ue_index: int, UE k within cell l
        :return: float, angle in radians in (-pi, pi]
        """

        return float(np.angle(self.ue_positions[cell_index, ue_index] - self.bs_positions[bs_index]))

    @staticmethod
    def build_geometry(params: SystemParams) -> NetworkGeometry:
        """
        Lay out the center BS at the origin and the neighbors on a ring around it.

        Neighbor n (cell n + 1) sits at distance inter_bs_distance and azimuth 60 n degrees.
        UE k of every cell sits at distance ue_ring_radius and azimuth 360 k / K degrees from its
        serving BS.

        :param params: SystemParams, model constants
        :return: NetworkGeometry, the layout
        """

        neighbor_angles = np.deg2rad(60.0 * np.arange(params.L - 1))
        neighbors = params.inter_bs_distance * np.exp(1j * neighbor_angles)
        bs_positions = np.concatenate(([0.0 + 0.0j], neighbors))

        ue_angles = 2.0 * np.pi * np.arange(params.K) / params.K
        ue_offsets = params.ue_ring_radius * np.exp(1j * ue_angles)
        ue_positions = bs_positions[:, np.newaxis] + ue_offsets[np.newaxis, :]

        return NetworkGeometry(bs_positions=bs_positions, ue_positions=ue_positions)
