# File: cli.py
# Description: Command line entry point of the sweeps and the validation checks.
#
# Copyright (c) 2025 Jason Stuber
# Licensed under the MIT License. See the LICENSE file for more details.

import argparse
import logging
import sys
from typing import Optional

from mimo_covariance import __version__

from .analysis import ResultAnalysis
from .experiment_config import ConfigError, ExperimentConfig
from .result_registry import ResultRegistry
from .runner import ExperimentError, ExperimentRunner, build_center_covariance_set
from .validation import Validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_EXPERIMENT_ERROR = 3


def _setup_logging(level: str) -> None:
    """
    Send the package log to stderr, stdout is never written.
    """

    package_logger = logging.getLogger('mimo_covariance')
    package_logger.setLevel(level)
    if not package_logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(asctime)s [%(levelname)s] %(name)s: %(message)s'))
        package_logger.addHandler(handler)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='mimo-covariance',
                                     description='Massive MIMO uplink with estimated covariance matrices.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='flat JSON configuration file', default=None)
    common.add_argument('--seed', help='master seed, overrides the configuration', type=int, default=None)
    common.add_argument('--out', help='CSV output path, overrides the configuration', default=None)
    common.add_argument('--workers', help='worker processes, 0 for one per CPU', type=int, default=1)
    common.add_argument('--quick', help='reduced sample counts for smoke runs', action='store_true')
    common.add_argument('--log-level', help='log level (default: INFO)', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('mse-sweep', parents=[common], help='normalized MSE over the N_R sweep')
    subparsers.add_parser('se-sweep', parents=[common], help='sum spectral efficiency over the N_R sweep')
    subparsers.add_parser('validate', parents=[common], help='closed forms against Monte Carlo')

    report = subparsers.add_parser('report', help='summarize an SE sweep CSV against MMSE')
    report.add_argument('results', help='CSV written by se-sweep')
    report.add_argument('--fraction', help='target share of the MMSE SE (default: 0.95)', type=float, default=0.95)
    report.add_argument('--log-level', help='log level (default: INFO)', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    return parser


def _log_report(rows, fraction: float) -> None:
    for combiner, entry in ResultAnalysis.report(rows, fraction).items():
        logger.info('%s: SE(ls)/SE(mmse) %.3f, SE(mmse)/SE(mmse_perfect) %s, %.0f%% crossing %s.', combiner,
                    entry['ls_ratio'], entry['perfect_ratio'], 100.0 * fraction, entry['crossings'])


def run_report(args: argparse.Namespace) -> int:
    """
    Load a result CSV and log its summary.
    """

    try:
        registry = ResultRegistry(args.results)
        _log_report(registry, args.fraction)
    except (FileNotFoundError, KeyError, ValueError) as error:
        logger.error('Cannot report on %s: %s', args.results, error)
        return EXIT_CONFIG_ERROR
    return EXIT_OK


def load_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Build the configuration from the file and the command line overrides.

    :raises FileNotFoundError: if the configuration file does not exist
    :raises ConfigError: if the configuration is invalid
    """

    config = ExperimentConfig.load_config(args.config)
    config = config.with_overrides(seed=args.seed, output_path=args.out)
    if args.quick:
        config = config.quick_mode()
    return config


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.log_level)

    if args.command == 'report':
        return run_report(args)

    try:
        config = load_experiment_config(args)
    except (ConfigError, FileNotFoundError) as error:
        logger.error('Invalid configuration: %s', error)
        return EXIT_CONFIG_ERROR

    logger.info('Configuration: %s', config.to_dict())
    if args.command != 'validate':
        for cell in build_center_covariance_set(config).summary()['cells']:
            logger.info('Cell %d: mean gain %.1f dB, mean effective rank %.1f.',
                        cell['cell'], cell['mean_gain_db'], cell['mean_effective_rank'])

    try:
        if args.command == 'mse-sweep':
            rows = ExperimentRunner.run_mse_sweep(config, workers=args.workers)
        elif args.command == 'se-sweep':
            rows = ExperimentRunner.run_se_sweep(config, workers=args.workers)
            _log_report(rows, 0.95)
        else:
            rows = Validation.run_validation(config)
    except ExperimentError as error:
        logger.error('Experiment failed: %s', error)
        return EXIT_EXPERIMENT_ERROR

    registry = ResultRegistry()
    registry.add_rows(rows)
    registry.save_csv(config.output_path)
    logger.info('Wrote %d rows to %s.', len(registry), config.output_path)

    if any(row.status == 'fail' for row in rows):
        return EXIT_VALIDATION_FAILED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
