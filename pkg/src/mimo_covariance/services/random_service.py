# File: random_service.py
# Description: Deterministic random number substreams.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from enum import Enum

import numpy as np


class StreamPurpose(Enum):
    """
    Purpose categories of random number substreams.

    The purpose is part of the substream key, so that streams used for different tasks with the
    same indices never overlap.
    """

    STREAM_PURPOSE_FACTOR_SEARCH = 1
    STREAM_PURPOSE_OUTER_REALIZATION = 2
    STREAM_PURPOSE_MONTE_CARLO = 3
    STREAM_PURPOSE_VALIDATION = 4
    STREAM_PURPOSE_BASELINE = 5


class RandomService:
    """
    A class to derive independent random generators from a master seed.

    Every generator is keyed by (seed, purpose, indices...), so a task running in any worker
    process draws exactly the same numbers as it would in a serial run.
    """

    @staticmethod
    def substream(seed: int, purpose: StreamPurpose, *indices: int) -> np.random.Generator:
        """
        Get the generator for a substream key.

        :param seed: int, master seed, a nonnegative 64-bit integer
        :param purpose: StreamPurpose, what the stream is used for
        :param indices: int, task indices such as the sweep point and the outer realization
        :return: np.random.Generator, generator owned by the caller

        :raises ValueError: if the seed or an index is negative
        """

        if seed < 0:
            raise ValueError('seed must be nonnegative')
        if any(index < 0 for index in indices):
            raise ValueError('substream indices must be nonnegative')

        sequence = np.random.SeedSequence(entropy=seed, spawn_key=(purpose.value, *indices))
        return np.random.Generator(np.random.PCG64(sequence))

    @staticmethod
    def complex_normal(rng: np.random.Generator, shape: tuple) -> np.ndarray:
        """
        Draw i.i.d. circularly-symmetric complex Gaussian samples with unit variance.

        :param rng: np.random.Generator, source of randomness
        :param shape: tuple, shape of the output
        :return: np.ndarray, complex128 samples with E{|z|^2} = 1
        """

        samples = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return np.sqrt(0.5) * samples
