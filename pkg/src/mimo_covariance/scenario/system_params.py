# File: system_params.py
# Description: Scalar constants of the multicell uplink model.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class SystemParams:
    """
    All scalar model constants of the multicell massive MIMO uplink.

    Noise power is normalized to one, so rho_ul and rho_tr are SNR scalings and the
    large-scale gain of a link is directly its per-antenna SNR.

    Attributes:
        M: antennas per base station
        K: user equipments (UEs) per cell
        L: cells
        tau_c: channel uses per coherence block
        tau_s: coherence blocks per statistics window
        rho_ul: normalized uplink data power (linear)
        rho_tr: normalized total pilot power per UE (linear)
        spread_deg: full angular spread of the one-ring model in degrees
        antenna_spacing: element separation in wavelengths
        pathloss_a: SNR at 1 m in dB
        pathloss_b: pathloss exponent times 10
        inter_bs_distance: distance between neighboring base stations in meters
        ue_ring_radius: distance between a UE and its serving base station in meters
    """

    M: int = 100
    K: int = 10
    L: int = 7
    tau_c: int = 200
    tau_s: int = 25000
    rho_ul: float = 1.0
    rho_tr: float = 1.0
    spread_deg: float = 20.0
    antenna_spacing: float = 0.5
    pathloss_a: float = 78.7
    pathloss_b: float = 37.6
    inter_bs_distance: float = 300.0
    ue_ring_radius: float = 120.0

    def __post_init__(self) -> None:
        """
        Validate the constants.

        :raises ValueError: if a constant is outside its valid range
        """

        if self.M < 1:
            raise ValueError('M must be at least 1')
        if self.K < 1:
            raise ValueError('K must be at least 1')
        if self.L < 1:
            raise ValueError('L must be at least 1')
        if self.L > 7:
            raise ValueError('L must be at most 7 (center cell and six neighbors)')
        if self.tau_c <= self.K:
            raise ValueError('tau_c must be larger than K')
        if self.tau_s < 1:
            raise ValueError('tau_s must be at least 1')
        if self.rho_ul <= 0.0:
            raise ValueError('rho_ul must be positive')
        if self.rho_tr <= 0.0:
            raise ValueError('rho_tr must be positive')
        if self.spread_deg <= 0.0:
            raise ValueError('spread_deg must be positive')
        if self.antenna_spacing <= 0.0:
            raise ValueError('antenna_spacing must be positive')
        if self.inter_bs_distance <= 0.0:
            raise ValueError('inter_bs_distance must be positive')
        if self.ue_ring_radius <= 0.0:
            raise ValueError('ue_ring_radius must be positive')

    @classmethod
    def field_names(cls) -> list[str]:
        """
        List the names of the constants, which are also the configuration file keys.

        :return: list[str], field names in declaration order
        """

        return [field.name for field in fields(cls)]

    @classmethod
    def from_physical(cls,
                      bandwidth_system_hz: float,
                      time_system_s: float,
                      bandwidth_coherence_hz: float,
                      time_coherence_s: float,
                      **constants) -> SystemParams:
        """
        Build the constants from the physical coherence parameters.

        The coherence block holds tau_c = B_c T_c channel uses and the statistics window holds
        tau_s = B_s T_s / tau_c coherence blocks.

        :param bandwidth_system_hz: float, bandwidth over which the statistics are fixed
        :param time_system_s: float, time over which the statistics are fixed
        :param bandwidth_coherence_hz: float, coherence bandwidth
        :param time_coherence_s: float, coherence time
        :param constants: remaining SystemParams fields
        :return: SystemParams, constants with tau_c and tau_s filled in

        :raises ValueError: if a parameter is not positive or tau_c, tau_s are not integers
        """

        values = (bandwidth_system_hz, time_system_s, bandwidth_coherence_hz, time_coherence_s)
        if any(value <= 0.0 for value in values):
            raise ValueError('bandwidths and durations must be positive')

        tau_c = bandwidth_coherence_hz * time_coherence_s
        tau_s = bandwidth_system_hz * time_system_s / tau_c

        if abs(tau_c - round(tau_c)) > 1e-6 or abs(tau_s - round(tau_s)) > 1e-6:
            raise ValueError(f'coherence parameters give non-integral tau_c={tau_c}, tau_s={tau_s}')

        return cls(tau_c=int(round(tau_c)), tau_s=int(round(tau_s)), **constants)
