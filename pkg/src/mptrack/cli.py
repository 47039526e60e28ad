#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

"""
The ``mptrack`` command: simulate a scenario, track its frames, score the
estimates and run Monte Carlo sweeps. Every command is driven by an optional
JSON config file; command-line flags override it and every setting that
differs from the defaults is echoed to the run log.
"""

from argparse import ArgumentParser
from json import dumps, loads
from logging import FileHandler, INFO, getLogger
from os import makedirs, path
import sys

from numpy.random import default_rng

from .common import ClutterMode, LogUtils
from .config import RunConfig
from .evaluation import evaluate_run, run_monte_carlo
from .exception import (
    ConfigException, DataFormatException, IllegalArgumentException,
    MpTrackException)
from .measurement import MeasurementFrame, ScanTruth
from .scenarios import build_scenario, simulate
from .track import ComponentEstimate, TrackEstimate
from .tracker import Tracker
from .version import __version__

FRAMES_FILE = 'frames.jsonl'
TRUTH_FILE = 'truth.jsonl'
TRACKS_FILE = 'tracks.jsonl'
COMPONENTS_FILE = 'components.jsonl'
METRICS_FILE = 'metrics.csv'
SUMMARY_FILE = 'summary.json'
LOG_FILE = 'convergence.log'
EXIT_ERROR = 2


def write_jsonl(file_path, records):
    with open(file_path, 'w') as f:
        for record in records:
            f.write(dumps(record, sort_keys=True) + '\n')


def read_jsonl(file_path, from_dict):
    """
    Reads a JSON-lines file, one record per non-blank line.

    :param file_path: the file.
    :type file_path: str
    :param from_dict: builds an object from a decoded record.
    :type from_dict: callable
    :returns: the objects in file order.
    :rtype: list
    :raises DataFormatException: raises the exception if a line is not valid
        JSON or not a valid record.
    """
    items = []
    with open(file_path) as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = loads(line)
            except ValueError as e:
                raise DataFormatException(
                    file_path + ':' + str(number) + ' is not valid JSON: ' +
                    str(e), e)
            try:
                items.append(from_dict(record))
            except DataFormatException as e:
                raise DataFormatException(
                    file_path + ':' + str(number) + ': ' + str(e), e)
    return items


def _build_parser():
    parser = ArgumentParser(
        prog='mptrack',
        description='Multitarget tracking in nonuniform clutter by message ' +
        'passing.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    def common(command):
        command.add_argument('--config', help='JSON run configuration')
        command.add_argument('--out', help='output directory')

    def ablations(command):
        command.add_argument(
            '--first-iteration', action='store_true',
            help='stop after the first closed-loop iteration')
        command.add_argument(
            '--kinematics-only', action='store_true',
            help='leave the detection strengths out of association and of ' +
            'the SNR and CNR estimates')
        clutter = command.add_mutually_exclusive_group()
        clutter.add_argument(
            '--no-clutter-estimation', action='store_true',
            help='model all clutter as the uniform background')
        clutter.add_argument(
            '--known-clutter', action='store_true',
            help='pin the clutter beliefs to the simulated clutter')

    simulate_cmd = commands.add_parser(
        'simulate', help='simulate frames and truth of a scenario')
    common(simulate_cmd)
    simulate_cmd.add_argument('--seed', type=int, help='random seed')

    track_cmd = commands.add_parser('track', help='track a frames file')
    common(track_cmd)
    ablations(track_cmd)
    track_cmd.add_argument('--frames', required=True,
                           help='JSON-lines frames file')
    track_cmd.add_argument('--truth',
                           help='JSON-lines truth file, for --known-clutter')
    track_cmd.add_argument(
        '--dump-association', metavar='DIR',
        help='write association evidence and marginals as CSV to DIR')

    evaluate_cmd = commands.add_parser(
        'evaluate', help='score track and component estimates')
    evaluate_cmd.add_argument('--out', help='output directory')
    evaluate_cmd.add_argument('--truth', required=True,
                              help='JSON-lines truth file')
    evaluate_cmd.add_argument('--tracks', required=True,
                              help='JSON-lines track estimates')
    evaluate_cmd.add_argument('--components', required=True,
                              help='JSON-lines component estimates')
    evaluate_cmd.add_argument(
        '--interval', type=int, nargs=2, metavar=('FIRST', 'LAST'),
        help='restrict the summary to scans FIRST..LAST')

    sweep_cmd = commands.add_parser(
        'sweep', help='run and score Monte Carlo runs of a scenario')
    common(sweep_cmd)
    ablations(sweep_cmd)
    sweep_cmd.add_argument('--seed', type=int, help='base random seed')
    sweep_cmd.add_argument('--runs', type=int, help='number of runs')
    sweep_cmd.add_argument('--threads', type=int,
                           help='maximum number of worker threads')
    sweep_cmd.add_argument(
        '--interval', type=int, nargs=2, metavar=('FIRST', 'LAST'),
        help='restrict the summary to scans FIRST..LAST')
    return parser


def _load_config(args):
    """
    Reads the config file, if any, and applies the command-line overrides.
    """
    if getattr(args, 'config', None) is not None:
        config = RunConfig.from_file(args.config)
    else:
        config = RunConfig()
    try:
        if getattr(args, 'seed', None) is not None:
            config.set_seed(args.seed)
        if getattr(args, 'runs', None) is not None:
            config.set_runs(args.runs)
        if getattr(args, 'threads', None) is not None:
            config.set_threads(args.threads)
        if getattr(args, 'out', None) is not None:
            config.set_output(args.out)
        tracker_config = config.get_tracker_config()
        if getattr(args, 'first_iteration', False):
            tracker_config.get_window_config().set_mp_max_iterations(1)
        if getattr(args, 'kinematics_only', False):
            tracker_config.set_use_strength(False)
        if getattr(args, 'no_clutter_estimation', False):
            tracker_config.set_clutter_mode(ClutterMode.UNIFORM_ONLY)
        if getattr(args, 'known_clutter', False):
            tracker_config.set_clutter_mode(ClutterMode.KNOWN)
    except IllegalArgumentException as e:
        raise ConfigException('Invalid command-line setting: ' + str(e), e)
    return config


def _open_output(directory):
    """
    Creates the output directory and a run logger writing convergence.log in
    it.
    """
    if not path.isdir(directory):
        makedirs(directory)
    logger = getLogger('mptrack.' + path.abspath(directory))
    logger.setLevel(INFO)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.addHandler(FileHandler(path.join(directory, LOG_FILE), mode='w'))
    return logger


def _close_output(logger):
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def _log_overrides(logutils, config):
    for key, value in config.get_overrides().items():
        logutils.log_info('Override ' + key + ' = ' + dumps(value))


def cmd_simulate(args, config, logutils):
    """
    Simulates the frames and the truth of the configured scenario and writes
    them as JSON-lines.
    """
    scenario = build_scenario(config.get_scenario())
    sensor = config.get_tracker_config().get_sensor()
    frames, truths = simulate(scenario, sensor, default_rng(config.get_seed()))
    output = config.get_output()
    write_jsonl(path.join(output, FRAMES_FILE),
                [frame.to_dict() for frame in frames])
    write_jsonl(path.join(output, TRUTH_FILE),
                [truth.to_dict() for truth in truths])
    logutils.log_info('Simulated ' + scenario.get_name() + ': ' +
                      str(len(frames)) + ' scans, seed ' +
                      str(config.get_seed()))
    print('seed ' + str(config.get_seed()))


def cmd_track(args, config, logutils):
    """
    Tracks a frames file and writes the track and component estimates as
    JSON-lines.
    """
    tracker_config = config.get_tracker_config()
    tracker_config.set_logger(logutils.get_logger())
    frames = read_jsonl(args.frames, MeasurementFrame.from_dict)
    tracker = Tracker(tracker_config)
    if tracker_config.get_clutter_mode() == ClutterMode.KNOWN:
        if args.truth is None:
            raise ConfigException('--known-clutter requires --truth.')
        truths = read_jsonl(args.truth, ScanTruth.from_dict)
        tracker.set_known_clutter(
            dict((t.get_scan(), t.get_clutter()) for t in truths))
    if args.dump_association is not None:
        if not path.isdir(args.dump_association):
            makedirs(args.dump_association)
        tracker.set_dump_directory(args.dump_association)
    tracks, components = tracker.run(frames)
    output = config.get_output()
    write_jsonl(path.join(output, TRACKS_FILE),
                [estimate.to_dict() for estimate in tracks])
    write_jsonl(path.join(output, COMPONENTS_FILE),
                [estimate.to_dict() for estimate in components])
    logutils.log_info('Tracked ' + str(len(frames)) + ' scans: ' +
                      str(len(set(t.track_id for t in tracks))) + ' tracks')


def _write_report(report, output, interval):
    report.write_csv(path.join(output, METRICS_FILE))
    first, last = interval if interval is not None else (None, None)
    report.write_json(path.join(output, SUMMARY_FILE), first, last)


def cmd_evaluate(args, config, logutils):
    """
    Scores track and component estimates against the truth and writes the
    per-scan metrics and the summary.
    """
    truths = read_jsonl(args.truth, ScanTruth.from_dict)
    tracks = read_jsonl(args.tracks, TrackEstimate.from_dict)
    components = read_jsonl(args.components, ComponentEstimate.from_dict)
    report = evaluate_run(truths, tracks, components)
    _write_report(report, config.get_output(), args.interval)
    logutils.log_info('Evaluated ' + str(len(truths)) + ' scans')


def cmd_sweep(args, config, logutils):
    """
    Runs the Monte Carlo sweep of the configuration and writes the merged
    per-scan metrics and summary.
    """
    config.get_tracker_config().set_logger(logutils.get_logger())
    report = run_monte_carlo(config, logutils.get_logger())
    _write_report(report, config.get_output(), args.interval)
    logutils.log_info('Sweep of ' + str(report.get_runs()) + ' runs done')


_COMMANDS = {'simulate': cmd_simulate,
             'track': cmd_track,
             'evaluate': cmd_evaluate,
             'sweep': cmd_sweep}


def main(argv=None):
    """
    The console entry point.

    :param argv: the arguments, sys.argv[1:] when None.
    :type argv: list(str)
    :returns: 0 on success, 2 on any configuration, data or I/O error.
    :rtype: int
    """
    args = _build_parser().parse_args(argv)
    logger = None
    try:
        config = _load_config(args)
        logger = _open_output(config.get_output())
        logutils = LogUtils(logger)
        logutils.log_info('mptrack ' + __version__ + ' ' + args.command)
        _log_overrides(logutils, config)
        _COMMANDS[args.command](args, config, logutils)
    except (MpTrackException, IllegalArgumentException, IOError,
            OSError) as e:
        sys.stderr.write('mptrack ' + args.command + ': ' + str(e) + '\n')
        if logger is not None:
            LogUtils(logger).log_error(str(e))
        return EXIT_ERROR
    finally:
        if logger is not None:
            _close_output(logger)
    return 0


if __name__ == '__main__':
    sys.exit(main())
