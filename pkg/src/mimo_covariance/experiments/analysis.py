# File: analysis.py
# Description: Summaries of sweep results against the MMSE reference.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from typing import Optional, Union

from .result_registry import ResultRegistry, ResultRow

Results = Union[list[ResultRow], ResultRegistry]


class ResultAnalysis:
    """
    Compares the sum SE of an estimator with a reference estimator, usually MMSE.

    Every method takes either the rows of an SE sweep or a ResultRegistry, for example one
    loaded from a result CSV.
    """

    @staticmethod
    def _registry(results: Results) -> ResultRegistry:
        if isinstance(results, ResultRegistry):
            return results
        registry = ResultRegistry()
        registry.add_rows(results)
        return registry

    @staticmethod
    def _value(registry: ResultRegistry, estimator: str, combiner: str, n_r: int) -> float:
        """
        :raises KeyError: if no sum SE row matches
        """
        key = ('sum_se', estimator, combiner, n_r)
        if not registry.is_key_present(key):
            raise KeyError(f"No sum SE row for estimator '{estimator}', combiner '{combiner}', N_R={n_r}.")
        return registry.get_row(key).value

    @staticmethod
    def _sweep(registry: ResultRegistry, estimator: Optional[str] = None, combiner: Optional[str] = None) -> list[int]:
        return sorted({n_r for experiment, row_estimator, row_combiner, n_r in registry.list_keys()
                       if experiment == 'sum_se'
                       and estimator in (None, row_estimator) and combiner in (None, row_combiner)})

    @staticmethod
    def se_ratio(rows: Results, estimator: str, combiner: str, n_r: int, reference: str = 'mmse') -> float:
        """
        Get SE(estimator) / SE(reference) at one sweep point.

        :param rows: list of ResultRow or ResultRegistry, output of the SE sweep
        :param estimator: str, estimator of the numerator
        :param combiner: str, 'mrc' or 'rzf'
        :param n_r: int, sweep point
        :param reference: str, estimator of the denominator
        :return: float, the ratio

        :raises KeyError: if a row is missing
        :raises ValueError: if the reference SE is zero
        """

        registry = ResultAnalysis._registry(rows)
        denominator = ResultAnalysis._value(registry, reference, combiner, n_r)
        if denominator == 0.0:
            raise ValueError('reference SE is zero')
        return ResultAnalysis._value(registry, estimator, combiner, n_r) / denominator

    @staticmethod
    def crossing_n_r(rows: Results, estimator: str, combiner: str, fraction: float,
                     reference: str = 'mmse') -> Optional[float]:
        """
        Find the smallest N_R where SE(estimator) reaches a fraction of SE(reference).

        Linear interpolation in N_R is used between the two sweep points around the crossing.

        :param rows: list of ResultRow or ResultRegistry, output of the SE sweep
        :param estimator: str, estimator under test
        :param combiner: str, 'mrc' or 'rzf'
        :param fraction: float, target share of the reference SE, for example 0.95
        :param reference: str, reference estimator
        :return: float, the interpolated N_R, None if the target is never reached

        :raises ValueError: if the fraction is not positive
        """

        if fraction <= 0.0:
            raise ValueError('fraction must be positive')

        registry = ResultAnalysis._registry(rows)
        previous = None
        for n_r in ResultAnalysis._sweep(registry, estimator, combiner):
            ratio = ResultAnalysis.se_ratio(registry, estimator, combiner, n_r, reference)
            if ratio >= fraction:
                if previous is None:
                    return float(n_r)
                previous_n_r, previous_ratio = previous
                weight = (fraction - previous_ratio) / (ratio - previous_ratio)
                return float(previous_n_r + weight * (n_r - previous_n_r))
            previous = (n_r, ratio)
        return None

    @staticmethod
    def report(rows: Results, fraction: float = 0.95) -> dict:
        """
        Summarize an SE sweep: LS and approximate MMSE ratios at every sweep point, the crossings
        of the given fraction of the MMSE SE, and SE(mmse) / SE(mmse_perfect) when the
        perfect-covariance rows are present.

        :param rows: list of ResultRow or ResultRegistry, output of the SE sweep
        :param fraction: float, target share of the MMSE SE
        :return: dict, per combiner the ratios and crossings
        """

        registry = ResultAnalysis._registry(rows)
        summary = dict()
        sweep = ResultAnalysis._sweep(registry)
        for combiner in ('mrc', 'rzf'):
            entry = {'ls_ratio': None, 'perfect_ratio': None, 'ratios': dict(), 'crossings': dict()}
            if sweep:
                entry['ls_ratio'] = ResultAnalysis.se_ratio(registry, 'ls', combiner, sweep[0])
                if registry.is_key_present(('sum_se', 'mmse_perfect', combiner, sweep[0])):
                    entry['perfect_ratio'] = ResultAnalysis.se_ratio(registry, 'mmse', combiner, sweep[0],
                                                                     reference='mmse_perfect')
            for estimator in ('approx_viaq', 'approx_rdirect'):
                entry['ratios'][estimator] = [ResultAnalysis.se_ratio(registry, estimator, combiner, n_r)
                                              for n_r in sweep]
                entry['crossings'][estimator] = ResultAnalysis.crossing_n_r(registry, estimator, combiner, fraction)
            summary[combiner] = entry
        return summary
