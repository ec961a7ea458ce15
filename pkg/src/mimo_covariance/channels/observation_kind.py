# File: observation_kind.py
# Description: Pilot observation categories.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.


from enum import Enum


class ObservationKind(Enum):
    """
    Enumeration for pilot observation categories.

    Attributes:
        OBSERVATION_KIND_REGULAR: desired UE and its pilot contaminators on the shared pilot
        OBSERVATION_KIND_CLEAN: desired UE alone on an extra pilot
        OBSERVATION_KIND_CONTAMINANTS: contaminators alone on the extra pilot of the desired UE
    """

    OBSERVATION_KIND_REGULAR = 'regular'
    OBSERVATION_KIND_CLEAN = 'clean'
    OBSERVATION_KIND_CONTAMINANTS = 'contaminants'
