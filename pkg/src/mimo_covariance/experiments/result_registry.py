# File: result_registry.py
# Description: Registry of experiment results with CSV persistence.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Optional

CSV_HEADER = ['experiment', 'estimator', 'combiner', 'n_r', 'eta', 'mu', 'value', 'stderr', 'seed']
STATUS_COLUMN = 'status'

EXPERIMENTS = ('nmse', 'sum_se', 'validate')
ESTIMATOR_ORDER = ('mmse', 'ls', 'approx_viaq', 'approx_rdirect', 'mmse_perfect')
COMBINER_ORDER = ('none', 'mrc', 'rzf')


@dataclass(frozen=True)
class ResultRow:
    """
    One result of an experiment.

    Attributes:
        experiment: str, 'nmse', 'sum_se' or 'validate'
        estimator: str, channel estimator, or the oracle name for validation rows
        combiner: str, 'none', 'mrc' or 'rzf'
        n_r: int, extra pilots per UE at the sweep point, 0 for validation rows
        eta: float, selected shrinkage factor of Q_hat averaged over UEs, None if not applicable
        mu: float, selected shrinkage factor of R_hat averaged over UEs, None if not applicable
        value: float, normalized MSE, sum SE in bit/s/Hz, or observed relative error
        stderr: float, standard error across outer realizations, or the tolerance of an oracle
        seed: int, master seed
        status: str, 'pass' or 'fail' for validation rows, None otherwise
    """

    experiment: str
    estimator: str
    combiner: str
    n_r: int
    eta: Optional[float]
    mu: Optional[float]
    value: float
    stderr: float
    seed: int
    status: Optional[str] = None

    def __post_init__(self) -> None:
        """
        :raises ValueError: if the row is malformed
        """
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f'unknown experiment: {self.experiment}')
        if self.combiner not in COMBINER_ORDER:
            raise ValueError(f'unknown combiner: {self.combiner}')
        if not math.isfinite(self.value):
            raise ValueError(f'value must be finite, got {self.value}')
        if not self.stderr >= 0.0:
            raise ValueError('stderr must be nonnegative')
        if self.status not in (None, 'pass', 'fail'):
            raise ValueError(f'unknown status: {self.status}')

    @property
    def key(self) -> tuple:
        return self.experiment, self.estimator, self.combiner, self.n_r

    def sort_key(self) -> tuple:
        """
        Get the position of the row in a CSV file: sweep point, then estimator, then combiner.

        Estimators outside the known list, such as oracle names, keep their insertion order.
        """

        estimator_rank = ESTIMATOR_ORDER.index(self.estimator) if self.estimator in ESTIMATOR_ORDER \
            else len(ESTIMATOR_ORDER)
        return EXPERIMENTS.index(self.experiment), self.n_r, estimator_rank, COMBINER_ORDER.index(self.combiner)


def _format_number(value: Optional[float]) -> str:
    if value is None:
        return ''
    return f'{value:.9g}'


def _parse_number(text: str) -> Optional[float]:
    if text == '':
        return None
    return float(text)


class ResultRegistry:
    """
    Registry of result rows identified by (experiment, estimator, combiner, N_R).
    """

    def __init__(self, file_path: Optional[str] = None) -> None:
        """
        Initializes the registry as an empty dictionary.

        :param file_path: str, optional CSV file to load
        """

        self._registry = dict()

        if file_path is not None:
            self.load_csv(file_path)

    def clear(self) -> None:
        """
        Clears the registry.
        """
        self._registry.clear()

    def is_key_present(self, key: tuple) -> bool:
        """
        Determine if a row with the given key is present.

        :param key: tuple, (experiment, estimator, combiner, n_r)
        :return: bool, True if the key is present
        """
        return key in self._registry

    def get_row(self, key: tuple) -> ResultRow:
        """
        Retrieve the row with the given key.

        :param key: tuple, (experiment, estimator, combiner, n_r)
        :return: ResultRow, the row
        :raises KeyError: if the key is not present
        """
        if key not in self._registry:
            raise KeyError(f"Result key '{key}' not found in registry.")
        return self._registry[key]

    def add_row(self, row: ResultRow) -> None:
        """
        Add a new row.

        :param row: ResultRow, the row to add

        :raises KeyError: if a row with the same key already exists
        """
        if row.key in self._registry:
            raise KeyError(f"Result key '{row.key}' already exists in registry.")
        self._registry[row.key] = row

    def add_rows(self, rows) -> None:
        """
        Add several rows.

        :param rows: iterable of ResultRow
        """
        for row in rows:
            self.add_row(row)

    def list_keys(self) -> list[tuple]:
        """
        Return all keys in CSV order.
        """
        return [row.key for row in self.rows()]

    def rows(self) -> list[ResultRow]:
        """
        Return all rows in CSV order.
        """
        return sorted(self._registry.values(), key=ResultRow.sort_key)

    def __len__(self):
        """
        Return the number of rows in the registry.
        """
        return len(self._registry)

    def save_csv(self, file_path: str) -> None:
        """
        Save the rows to a CSV file.

        Values are written with 9 significant digits. A trailing status column is added only if a
        row carries a validation status.

        :param file_path: str, path to the output CSV file

        :raises OSError: if the file cannot be written, the message names the path
        """

        rows = self.rows()
        with_status = any(row.status is not None for row in rows)
        header = CSV_HEADER + [STATUS_COLUMN] if with_status else CSV_HEADER

        directory = os.path.dirname(file_path)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(file_path, 'w', encoding='utf-8', newline='') as file_handle:
                writer = csv.writer(file_handle, lineterminator='\n')
                writer.writerow(header)
                for row in rows:
                    record = [row.experiment, row.estimator, row.combiner, str(row.n_r),
                              _format_number(row.eta), _format_number(row.mu),
                              _format_number(row.value), _format_number(row.stderr), str(row.seed)]
                    if with_status:
                        record.append(row.status or '')
                    writer.writerow(record)
        except OSError as error:
            raise OSError(f"Cannot write results to '{file_path}': {error}") from error

    def load_csv(self, file_path: str) -> None:
        """
        Load rows from a CSV file written by save_csv.

        :param file_path: str, path to the input CSV file

        :raises FileNotFoundError: if the file does not exist
        :raises ValueError: if the header is not recognized
        """

        self.clear()

        if not os.path.isfile(file_path):
            raise FileNotFoundError(f"File '{file_path}' not found.")

        with open(file_path, 'r', encoding='utf-8', newline='') as file_handle:
            reader = csv.DictReader(file_handle)
            if reader.fieldnames is None or reader.fieldnames[:len(CSV_HEADER)] != CSV_HEADER:
                raise ValueError(f"File '{file_path}' does not have the result header.")

            for record in reader:
                self.add_row(ResultRow(experiment=record['experiment'],
                                       estimator=record['estimator'],
                                       combiner=record['combiner'],
                                       n_r=int(record['n_r']),
                                       eta=_parse_number(record['eta']),
                                       mu=_parse_number(record['mu']),
                                       value=float(record['value']),
                                       stderr=float(record['stderr']),
                                       seed=int(record['seed']),
                                       status=record.get(STATUS_COLUMN) or None))
