# File: statistics_service.py
# Description: Sample statistics for Monte-Carlo estimates.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import numpy as np


class StatisticsService:
    """
    A class for sample means, standard errors and relative errors of Monte-Carlo estimates.
    """

    @staticmethod
    def mean_and_stderr(values) -> tuple[float, float]:
        """
        Compute the arithmetic mean and its standard error.

        :param values: sequence of float, independent realizations
        :return: tuple (mean, standard error), the standard error is 0.0 for a single value

        :raises ValueError: if no values are given
        """

        samples = np.asarray(values, dtype=float)
        if samples.size == 0:
            raise ValueError('at least one value is required')

        mean = float(np.mean(samples))
        if samples.size == 1:
            return mean, 0.0
        stderr = float(np.std(samples, ddof=1) / np.sqrt(samples.size))
        return mean, stderr

    @staticmethod
    def relative_error(estimate: complex, reference: complex) -> float:
        """
        Compute |estimate - reference| / |reference|.

        :param estimate: complex, estimated value
        :param reference: complex, exact value
        :return: float, relative error, the absolute error if the reference is zero
        """

        scale = abs(reference)
        error = abs(estimate - reference)
        if scale == 0.0:
            return float(error)
        return float(error / scale)

    @staticmethod
    def chunk_sizes(total: int, chunk: int) -> list[int]:
        """
        Split a number of draws into chunks, so that large Monte-Carlo runs fit in memory.

        :param total: int, total number of draws
        :param chunk: int, largest chunk
        :return: list[int], chunk sizes summing to total

        :raises ValueError: if total is negative or chunk is not positive
        """

        if total < 0:
            raise ValueError('total must be nonnegative')
        if chunk <= 0:
            raise ValueError('chunk must be positive')

        sizes = [chunk] * (total // chunk)
        if total % chunk:
            sizes.append(total % chunk)
        return sizes
