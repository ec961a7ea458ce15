# File: task_pool.py
# Description: Process pool for independent sweep tasks with ordered results.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional

from tqdm import tqdm

logger = logging.getLogger(__name__)


class TaskPool:
    """
    Runs independent tasks serially or in worker processes.

    Results always come back in task order, so aggregation never depends on completion time.
    Each worker runs the initializer once, which is where per-process state such as the
    covariance set is built.
    """

    @staticmethod
    def resolve_workers(workers: int) -> int:
        """
        Get the number of worker processes.

        :param workers: int, requested workers, 0 for one per CPU
        :return: int, at least 1

        :raises ValueError: if workers is negative
        """

        if workers < 0:
            raise ValueError('workers must be nonnegative')
        if workers == 0:
            return os.cpu_count() or 1
        return workers

    @staticmethod
    def run(function: Callable,
            tasks: list,
            workers: int = 1,
            initializer: Optional[Callable] = None,
            initargs: tuple = (),
            description: str = 'tasks') -> list:
        """
        Apply a function to every task.

        :param function: callable, module-level function taking one task
        :param tasks: list, task descriptions, picklable
        :param workers: int, worker processes, 0 for one per CPU, 1 to run in this process
        :param initializer: callable, run once per process before its first task
        :param initargs: tuple, arguments of the initializer
        :param description: str, label of the progress bar
        :return: list, results in task order
        """

        n_workers = min(TaskPool.resolve_workers(workers), max(len(tasks), 1))
        show_progress = logging.getLogger('mimo_covariance').getEffectiveLevel() <= logging.INFO
        logger.info('Running %d %s on %d worker(s).', len(tasks), description, n_workers)

        with tqdm(total=len(tasks), desc=description, file=sys.stderr, disable=not show_progress) as progress:
            if n_workers == 1:
                if initializer is not None:
                    initializer(*initargs)
                results = []
                for task in tasks:
                    results.append(function(task))
                    progress.update(1)
                return results

            with ProcessPoolExecutor(max_workers=n_workers, initializer=initializer, initargs=initargs) as executor:
                results = []
                for result in executor.map(function, tasks):
                    results.append(result)
                    progress.update(1)
                return results
