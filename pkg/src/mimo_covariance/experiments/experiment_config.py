# File: experiment_config.py
# Description: Configuration of the MSE and spectral efficiency sweeps.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from mimo_covariance.scenario.system_params import SystemParams


class ConfigError(Exception):
    """
    Exception raised when an experiment configuration is invalid.
    """
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a sweep needs besides the code.

    Attributes:
        scenario: SystemParams, model constants
        sweep: tuple of int, extra pilots per UE N_R at every sweep point
        nq_multiplier: int, N_Q = nq_multiplier * N_R
        n_outer: int, covariance-estimation realizations per sweep point
        n_blocks: int, Monte-Carlo coherence blocks for SE expectations
        grid_step: float, step of the (eta, mu) grid
        n_avg: int, realizations averaged by the factor search
        seed: int, master seed, nonnegative 64-bit integer
        output_path: str, CSV destination
        quick: bool, reduced sample counts and relaxed validation tolerances
    """

    scenario: SystemParams = field(default_factory=SystemParams)
    sweep: tuple = (10, 25, 50, 100, 250, 500)
    nq_multiplier: int = 10
    n_outer: int = 20
    n_blocks: int = 500
    grid_step: float = 0.05
    n_avg: int = 10
    seed: int = 0
    output_path: str = 'results.csv'
    quick: bool = False

    QUICK_N_OUTER = 4
    QUICK_N_BLOCKS = 200
    QUICK_N_AVG = 3
    MIN_BLOCKS = 100

    def __post_init__(self) -> None:
        """
        :raises ConfigError: if a value is invalid
        """

        object.__setattr__(self, 'sweep', tuple(int(n_r) for n_r in self.sweep))

        if len(self.sweep) == 0:
            raise ConfigError('sweep must contain at least one N_R value')
        if any(n_r < 1 for n_r in self.sweep):
            raise ConfigError('every N_R in the sweep must be at least 1')
        if len(set(self.sweep)) != len(self.sweep):
            raise ConfigError('sweep contains duplicate N_R values')
        if self.nq_multiplier < 1:
            raise ConfigError('nq_multiplier must be at least 1')
        if self.n_outer < 1:
            raise ConfigError('n_outer must be at least 1')
        if self.n_blocks < self.MIN_BLOCKS:
            raise ConfigError(f'n_blocks must be at least {self.MIN_BLOCKS}')
        if self.n_avg < 1:
            raise ConfigError('n_avg must be at least 1')
        if not 0.0 < self.grid_step <= 1.0:
            raise ConfigError('grid_step must be within (0, 1]')
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError('seed must be a nonnegative 64-bit integer')

        for n_r in self.sweep:
            if self.alpha(n_r) > 1.0:
                raise ConfigError(f'N_R={n_r} needs more extra pilots than the statistics window holds '
                                  f'(N_R K L > tau_s)')

    def alpha(self, n_r: int) -> float:
        """
        Get the share of channel uses spent on extra pilots, N_R K L / tau_s.
        """
        return n_r * self.scenario.K * self.scenario.L / self.scenario.tau_s

    def n_q(self, n_r: int) -> int:
        """
        Get the number of regular observations N_Q behind the estimate of Q at a sweep point.
        """
        return self.nq_multiplier * n_r

    def with_overrides(self, **overrides) -> ExperimentConfig:
        """
        Get a copy with some fields replaced, None values are ignored.

        :param overrides: field values, for example seed or output_path from the command line
        :return: ExperimentConfig, the updated configuration

        :raises ConfigError: if a field is unknown or a value is invalid
        """

        values = {name: value for name, value in overrides.items() if value is not None}
        unknown = set(values) - {item.name for item in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(f'unknown configuration keys: {sorted(unknown)}')
        return dataclasses.replace(self, **values)

    def quick_mode(self) -> ExperimentConfig:
        """
        Get the reduced configuration used for smoke runs.
        """
        return dataclasses.replace(self,
                                   n_outer=min(self.n_outer, self.QUICK_N_OUTER),
                                   n_blocks=min(self.n_blocks, self.QUICK_N_BLOCKS),
                                   n_avg=min(self.n_avg, self.QUICK_N_AVG),
                                   quick=True)

    def to_dict(self) -> dict:
        """
        Get the configuration as a flat dictionary with the keys of the configuration file.
        """

        values = dataclasses.asdict(self.scenario)
        for item in dataclasses.fields(self):
            if item.name not in ('scenario', 'quick'):
                values[item.name] = getattr(self, item.name)
        values['sweep'] = list(self.sweep)
        return values

    @staticmethod
    def config_keys() -> list[str]:
        """
        Get every key accepted in a configuration file.
        """

        experiment_keys = [item.name for item in dataclasses.fields(ExperimentConfig)
                           if item.name not in ('scenario', 'quick')]
        return SystemParams.field_names() + experiment_keys

    @staticmethod
    def from_dict(values: dict) -> ExperimentConfig:
        """
        Build a configuration from a flat dictionary, missing keys take their defaults.

        :param values: dict, keys of SystemParams and ExperimentConfig
        :return: ExperimentConfig, the validated configuration

        :raises ConfigError: if a key is unknown or a value is invalid
        """

        if not isinstance(values, dict):
            raise ConfigError('configuration must be a JSON object')

        unknown = set(values) - set(ExperimentConfig.config_keys())
        if unknown:
            raise ConfigError(f'unknown configuration keys: {sorted(unknown)}')

        scenario_keys = set(SystemParams.field_names())
        scenario_values = {key: value for key, value in values.items() if key in scenario_keys}
        experiment_values = {key: value for key, value in values.items() if key not in scenario_keys}

        try:
            scenario = SystemParams(**scenario_values)
        except (TypeError, ValueError) as error:
            raise ConfigError(f'invalid scenario: {error}') from error

        try:
            return ExperimentConfig(scenario=scenario, **experiment_values)
        except (TypeError, ValueError) as error:
            raise ConfigError(f'invalid experiment settings: {error}') from error

    @staticmethod
    def load_config(file_path: Optional[str]) -> ExperimentConfig:
        """
        Load a configuration from a flat JSON file.

        :param file_path: str, path to the JSON file, None for the defaults
        :return: ExperimentConfig, the validated configuration

        :raises FileNotFoundError: if the file does not exist
        :raises ConfigError: if the file is not valid JSON, a key is unknown or a value is invalid
        """

        if file_path is None:
            return ExperimentConfig()

        if not os.path.isfile(file_path):
            raise FileNotFoundError(f"File '{file_path}' not found.")

        with open(file_path, 'r', encoding='utf-8') as file_handle:
            try:
                values = json.load(file_handle)
            except json.JSONDecodeError as error:
                raise ConfigError(f"File '{file_path}' is not valid JSON: {error}") from error

        return ExperimentConfig.from_dict(values)

    def save_config(self, file_path: str) -> None:
        """
        Save the configuration to a flat JSON file.

        :param file_path: str, path to the output JSON file
        """

        with open(file_path, 'w', encoding='utf-8') as file_handle:
            json.dump(self.to_dict(), file_handle, indent=4)
