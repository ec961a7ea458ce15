# File: covariance_model.py
# Description: Pathloss and one-ring spatial covariance model.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from typing import Optional

import numpy as np
import scipy.linalg
from scipy.special import roots_legendre

from .system_params import SystemParams


class CovarianceModel:
    """
    Large-scale fading and spatial correlation of a UE channel seen by a uniform linear array.

    The one-ring model spreads the multipath components uniformly over the angles
    [azimuth - Delta, azimuth + Delta], with Delta half of the angular spread. The covariance
    entry between antennas m and p is

        R[m, p] = beta / (2 Delta) * integral_{-Delta}^{Delta} exp(i 2 pi d (m - p) sin(azimuth + delta)) d delta

    which only depends on m - p, so R is Hermitian Toeplitz with diagonal beta.
    """

    QUADRATURE_ORDER = 200

    @staticmethod
    def large_scale_gain(distance_m: float, params: SystemParams) -> float:
        """
        Compute the large-scale gain of a link, which is its per-antenna SNR since the noise
        power is normalized to one.

        :param distance_m: float, distance between the BS and the UE in meters
        :param params: SystemParams, model constants with the pathloss coefficients
        :return: float, linear gain 10^((a - b log10(d)) / 10)

        :raises ValueError: if the distance is not positive
        """

        if distance_m <= 0.0:
            raise ValueError('distance must be positive')

        gain_db = params.pathloss_a - params.pathloss_b * np.log10(distance_m)
        return float(10.0 ** (gain_db / 10.0))

    @staticmethod
    def one_ring_covariance(beta: float,
                            azimuth_rad: float,
                            params: SystemParams,
                            quadrature_order: int = QUADRATURE_ORDER,
                            spread_deg: Optional[float] = None) -> np.ndarray:
        """
        Compute the one-ring covariance matrix of a UE.

        The integral is evaluated with Gauss-Legendre quadrature. SystemParams requires a positive
        spread; an explicit spread_deg of 0 gives the rank-one line-of-sight matrix beta a a^H.

        :param beta: float, large-scale gain
        :param azimuth_rad: float, azimuth from the BS to the UE in radians
        :param params: SystemParams, model constants with M, spread_deg and antenna_spacing
        :param quadrature_order: int, number of quadrature nodes
        :param spread_deg: float, angular spread in degrees overriding params.spread_deg, may be 0
        :return: np.ndarray, Hermitian Toeplitz M x M matrix

        :raises ValueError: if beta is not positive, the quadrature order is not positive or the spread is negative
        """

        if beta <= 0.0:
            raise ValueError('beta must be positive')
        if quadrature_order < 1:
            raise ValueError('quadrature order must be positive')
        spread_deg = params.spread_deg if spread_deg is None else spread_deg
        if spread_deg < 0.0:
            raise ValueError('spread_deg must be nonnegative')

        lags = np.arange(params.M)
        half_spread = np.deg2rad(spread_deg / 2.0)
        phase_scale = 2.0 * np.pi * params.antenna_spacing

        if half_spread == 0.0:
            first_column = beta * np.exp(1j * phase_scale * lags * np.sin(azimuth_rad))
        else:
            nodes, weights = roots_legendre(quadrature_order)
            angles = azimuth_rad + half_spread * nodes
            phases = np.exp(1j * phase_scale * np.outer(lags, np.sin(angles)))
            first_column = beta * 0.5 * (phases @ weights)

        first_column[0] = beta
        return scipy.linalg.toeplitz(first_column, first_column.conj())
