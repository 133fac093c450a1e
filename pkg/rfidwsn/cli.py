#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: cli
   :synopsis: The rfidwsn command.

Subcommands::

   rfidwsn simulate --poll-delay 2 --runtime 60 --scenario always.txt
   rfidwsn simulate --scenario always.txt --with-validator [--realtime 0.01]
   rfidwsn registry enroll AABBCCDD --name Bolivar --authorized yes
   rfidwsn registry revoke|authorize|remove AABBCCDD
   rfidwsn registry list
   rfidwsn validate --duration 60 --interval 2
   rfidwsn report --grid "2,5;30,60,3600" --hop-latency 1.3 --csv

Every value not given on the command line comes from the environment
(``RFIDWSN_LOG``, ``RFIDWSN_REGISTRY``), then from the settings file given
by ``--config`` or ``RFIDWSN_CONFIG``, then from the built-in defaults.

The exit status is 0 on success, 1 when the run failed and 2 for a usage
or configuration error. Diagnostics go to standard error.
"""

import argparse
import logging
import os
import sys
from datetime import datetime

from texttable import Texttable

from rfidwsn import __version__
from rfidwsn import accesslog, framing, metrics, network, nodes, pipeline, reader, registry
from rfidwsn import validator
from rfidwsn.config import ConfigException, ConfigInvalid, Settings

logger = logging.getLogger(__name__)

PROG = 'rfidwsn'
START_FORMAT = '%Y-%m-%d %H:%M:%S'
DEFAULT_GRID = '2,5;30,60,300'
DEFAULT_GRID_TAG = 'AABBCCDD'

DOMAIN_ERRORS = (framing.FrameException, network.NetworkException, reader.ReaderException,
                 accesslog.AccessLogException, registry.RegistryException,
                 metrics.MetricsException, OSError)


def _or(value, getter, section, name):
    return getter(section, name) if value is None else value


def _existing_dir(filename, what):
    directory = os.path.dirname(os.path.abspath(filename))
    if not os.path.isdir(directory):
        raise ConfigInvalid('%s directory does not exist: %s' % (what, directory))
    return filename


def log_path(args, settings):
    return _existing_dir(args.log or settings.get('paths', 'log'), 'log')


def registry_path(args, settings):
    return _existing_dir(args.registry or settings.get('paths', 'registry'), 'registry')


def load_schedule(filename):
    try:
        return reader.FieldSchedule.load(filename)
    except FileNotFoundError:
        raise ConfigInvalid('scenario file not found: %s' % filename)
    except OSError as e:
        raise ConfigInvalid('cannot read scenario file %s: %s' % (filename, e.strerror))


def parse_start(text):
    try:
        return datetime.strptime(text, START_FORMAT)
    except ValueError:
        raise ConfigInvalid('start time must look like "YYYY-MM-DD HH:MM:SS", got %r' % text)


def sim_config(args, settings):
    """A SimConfig from the flags, falling back on the settings"""
    address = settings.get('network', 'polling_address')
    try:
        polling_address = network.NodeAddress.parse(address)
    except ValueError as e:
        raise ConfigInvalid(str(e))
    start_time = datetime.now().replace(microsecond=0)
    if args.start:
        start_time = parse_start(args.start)

    config = network.SimConfig(
        poll_delay=_or(args.poll_delay, settings.get_float, 'network', 'poll_delay'),
        runtime=_or(args.runtime, settings.get_float, 'network', 'runtime'),
        validation_delay=_or(args.interval, settings.get_float,
                             'validator', 'interval'),
        hop_latency=_or(args.hop_latency, settings.get_float, 'network', 'hop_latency'),
        jitter_max=_or(args.jitter_max, settings.get_float, 'network', 'jitter_max'),
        seed=_or(args.seed, settings.get_int, 'network', 'seed'),
        start_time=start_time,
        realtime_factor=args.realtime,
        polling_address=polling_address,
        slave_addr=settings.get_int('reader', 'slave_addr'),
        frame_size=settings.get_int('reader', 'frame_size'),
        no_tag_status=settings.get_int('reader', 'no_tag_status'),
        tag_type=settings.get_int('reader', 'tag_type'))
    return config.validate()


def parse_grid(text):
    """'2,5;30,60' -> ([2.0, 5.0], [30.0, 60.0])"""
    parts = text.split(';')
    if len(parts) != 2:
        raise ConfigInvalid('grid must look like "delay,delay;runtime,runtime", got %r' % text)
    try:
        delays, runtimes = [[float(v) for v in part.split(',') if v.strip()] for part in parts]
    except ValueError:
        raise ConfigInvalid('grid values must be numbers, got %r' % text)
    if not delays or not runtimes:
        raise ConfigInvalid('grid needs at least one delay and one runtime, got %r' % text)
    for value in delays + runtimes:
        if not value > 0:
            raise ConfigInvalid('grid values must be positive, got %r' % value)
    return delays, runtimes


def cmd_simulate(args, settings):
    config = sim_config(args, settings)
    schedule = load_schedule(args.scenario)
    log = accesslog.AccessLog(log_path(args, settings))
    echo = sys.stdout if args.echo else None

    if args.with_validator:
        tags = registry.TagRegistry(registry_path(args, settings))
        if config.realtime_factor is not None:
            run = pipeline.ThreadedRun(config, schedule, log, tags, echo=echo)
        else:
            run = pipeline.CoSimulation(config, schedule, log, tags, echo=echo)
        report, params = run.run()
        sim = run.sim
    else:
        sim = nodes.Simulation(config, schedule, log=log, echo=echo)
        report, params = sim.run(), None

    if args.trace:
        for event in sim.network.trace:
            print(event)
    print(report)
    if params is not None:
        print(params.summary())
    return 0


def print_records(records):
    table = Texttable()
    table.set_cols_dtype(['t', 't', 't'])
    table.header(['Tag ID', 'Is Authorized', 'First Name'])
    for record in records:
        table.add_row([record.tag_id, record.authorized_text, record.first_name])
    print(table.draw())


def cmd_registry(args, settings):
    tags = registry.TagRegistry(registry_path(args, settings))
    if args.action == 'enroll':
        record = tags.enroll(registry.TagRecord(args.tag, args.authorized == 'yes', args.name))
        print('enrolled %s' % record.tag_id)
    elif args.action == 'revoke':
        tags.set_authorized(args.tag, False)
    elif args.action == 'authorize':
        tags.set_authorized(args.tag, True)
    elif args.action == 'remove':
        tags.remove(args.tag)
    else:
        print_records(tags.list())
    return 0


def cmd_validate(args, settings):
    params = validator.ValidationRun(
        duration=_or(args.duration, settings.get_float, 'validator', 'duration'),
        scan_interval=_or(args.interval, settings.get_float, 'validator', 'interval'))
    params.validate()
    log = accesslog.AccessLog(log_path(args, settings))
    tags = registry.TagRegistry(registry_path(args, settings))
    validator.run(params, log, tags)
    print(params.summary())
    return 0


def cmd_report(args, settings):
    delays, runtimes = parse_grid(args.grid)
    if args.scenario:
        schedule = load_schedule(args.scenario)
    else:
        schedule = reader.FieldSchedule.always(DEFAULT_GRID_TAG, max(runtimes))
    base = network.SimConfig(
        hop_latency=_or(args.hop_latency, settings.get_float, 'network', 'hop_latency'),
        jitter_max=_or(args.jitter_max, settings.get_float, 'network', 'jitter_max'),
        seed=_or(args.seed, settings.get_int, 'network', 'seed'))
    results = metrics.run_grid(delays, runtimes, schedule, base)
    sys.stdout.write(metrics.report(results, csv_format=args.csv))
    return 0


def _add_jitter_flags(parser):
    parser.add_argument('--jitter-max', type=float, metavar='S',
                        help='upper bound of the uniform per-hop jitter')
    parser.add_argument('--hop-latency', type=float, metavar='S',
                        help='fixed per-hop latency')
    parser.add_argument('--seed', type=int, help='seed of the jitter generator')


def build_parser():
    parser = argparse.ArgumentParser(
        prog=PROG, description='RFID reader on a wireless sensor network: '
                               'access control simulation.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', metavar='FILE', help='settings file')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for run summaries and verdicts, -vv for every message')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    p = commands.add_parser('simulate', help='run Node Control')
    p.add_argument('--poll-delay', type=float, metavar='S')
    p.add_argument('--runtime', type=float, metavar='S')
    p.add_argument('--scenario', required=True, metavar='FILE',
                   help='field schedule: "<tag-hex> <t_start> <t_end>" per line')
    _add_jitter_flags(p)
    p.add_argument('--log', metavar='FILE')
    p.add_argument('--start', metavar='"YYYY-MM-DD HH:MM:SS"',
                   help='wall-clock time of t=0 (default: now)')
    p.add_argument('--echo', action='store_true', help='echo every reader answer')
    p.add_argument('--trace', action='store_true', help='print every message delivery')
    p.add_argument('--with-validator', action='store_true',
                   help='run Database Control alongside')
    p.add_argument('--registry', metavar='FILE')
    p.add_argument('--interval', type=float, metavar='S', help='validation interval')
    p.add_argument('--realtime', type=float, metavar='FACTOR',
                   help='run on the wall clock, FACTOR real seconds per simulated second')
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser('registry', help='manage the tag registry')
    p.add_argument('--registry', metavar='FILE')
    actions = p.add_subparsers(dest='action', metavar='ACTION')
    actions.required = True
    enroll = actions.add_parser('enroll', help='add a tag')
    enroll.add_argument('tag')
    enroll.add_argument('--name', required=True)
    enroll.add_argument('--authorized', choices=('yes', 'no'), default='no')
    for action, text in (('revoke', 'deny access to a tag'),
                         ('authorize', 'grant access to a tag'),
                         ('remove', 'delete a tag')):
        actions.add_parser(action, help=text).add_argument('tag')
    actions.add_parser('list', help='show every tag')
    p.set_defaults(func=cmd_registry)

    p = commands.add_parser('validate', help='run Database Control')
    p.add_argument('--duration', type=float, metavar='S')
    p.add_argument('--interval', type=float, metavar='S')
    p.add_argument('--log', metavar='FILE')
    p.add_argument('--registry', metavar='FILE')
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser('report', help='detection error over a grid of runs')
    p.add_argument('--grid', default=DEFAULT_GRID, metavar='"DELAYS;RUNTIMES"')
    p.add_argument('--scenario', metavar='FILE',
                   help='field schedule (default: one tag always present)')
    _add_jitter_flags(p)
    p.add_argument('--csv', action='store_true')
    p.set_defaults(func=cmd_report)
    return parser


def setup_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')


def error(message):
    sys.stderr.write('%s: error: %s\n' % (PROG, message))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    setup_logging(args.verbose)
    try:
        settings = Settings.load(args.config)
        return args.func(args, settings)
    except ConfigException as e:
        error(e)
        return 2
    except DOMAIN_ERRORS as e:
        logger.debug('%s failed', args.command, exc_info=True)
        error(e)
        return 1


if __name__ == '__main__':
    sys.exit(main())
