# File: filter_type.py
# Description: Channel estimation filter and covariance acquisition categories.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.


from enum import Enum


class FilterType(Enum):
    """
    Enumeration for channel estimation filter categories.

    Attributes:
        FILTER_TYPE_MMSE: R Q^-1 built from the true covariance matrices
        FILTER_TYPE_APPROX_MMSE: R_hat Q_hat^-1 built from estimated covariance matrices
        FILTER_TYPE_LS: the identity, no covariance information
    """

    FILTER_TYPE_MMSE = 'mmse'
    FILTER_TYPE_APPROX_MMSE = 'approx_mmse'
    FILTER_TYPE_LS = 'ls'


class AcquisitionScheme(Enum):
    """
    Enumeration for the schemes that acquire the estimate of R_jjk.

    Attributes:
        ACQUISITION_SCHEME_R_DIRECT: sample covariance of N_R clean observations of the desired UE
        ACQUISITION_SCHEME_VIA_Q: regular sample covariance minus the sample covariance of N_R
            contaminants-only observations
    """

    ACQUISITION_SCHEME_R_DIRECT = 'rdirect'
    ACQUISITION_SCHEME_VIA_Q = 'viaq'
