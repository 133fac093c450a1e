#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: pipeline
   :synopsis: Node Control and Database Control running side by side.

The two programs only share the log file and the registry file. They can
run together in two ways:

* :func:`run_cosimulation`: both on one simpy virtual clock; the validator
  starts at an offset in ``[0, interval)`` drawn from the seed, as if the two
  programs had been started by hand one after the other;
* :func:`run_threaded`: the simulator on a wall clock scaled by
  ``realtime_factor`` and the validator in its own thread, sleeping on the
  same scaled time.

Either way the validator keeps running for one interval after the
simulator stops, so every detection ends up with a verdict.

Example
-------

.. code-block:: python

   from rfidwsn import accesslog, network, pipeline, reader, registry

   config = network.SimConfig(poll_delay=2, runtime=60, seed=3)
   schedule = reader.FieldSchedule.always('AABBCCDD', 60)
   report, params = pipeline.run_cosimulation(
       config, schedule, accesslog.AccessLog('rfid.log'),
       registry.TagRegistry('tags.tsv'))
   print(report)
   print(params.summary())
"""

import logging
import random
import threading
import time
from dataclasses import replace

from rfidwsn.nodes import Simulation
from rfidwsn.validator import ValidationRun, Validator

logger = logging.getLogger(__name__)


def validation_offset(seed, interval):
    """Start delay of the validator for a seeded run, in [0, interval)"""
    return random.Random(seed).random() * interval


def _validation_run(config, interval):
    interval = config.validation_delay if interval is None else interval
    return ValidationRun(duration=config.runtime + interval, scan_interval=interval).validate()


class CoSimulation(object):
    """Both programs as processes on one virtual clock."""

    def __init__(self, config, schedule, log, registry, interval=None, echo=None):
        self.params = _validation_run(config, interval)
        self.sim = Simulation(config, schedule, log=log, echo=echo)
        self.validator = Validator(log, registry)
        self.offset = validation_offset(config.seed, self.params.scan_interval)

    def run(self):
        env = self.sim.env
        self.sim.start()
        env.process(self.validator.process(env, self.params, self.offset))
        logger.debug('validator starts %.3fs after the simulator', self.offset)
        env.run()

        report = self.sim.report()
        logger.info('co-simulation: %s; %s', report, self.params.summary())
        return report, self.params


def run_cosimulation(config, schedule, log, registry, interval=None, echo=None):
    """
    Run both programs on one virtual clock; returns the SimReport and the
    ValidationRun counters.
    """
    return CoSimulation(config, schedule, log, registry, interval=interval, echo=echo).run()


class ThreadedRun(object):
    """
    The simulator in the calling thread on a RealtimeEnvironment, the
    validator in a thread of its own.
    """

    def __init__(self, config, schedule, log, registry, interval=None, echo=None):
        factor = config.realtime_factor or 1.0
        self.config = replace(config, realtime_factor=factor)
        self.factor = factor
        self.params = _validation_run(self.config, interval)
        self.sim = Simulation(self.config, schedule, log=log, echo=echo)
        self.validator = Validator(log, registry, clock=self.clock, sleep=self.sleep)
        self.log = log
        self.errors = []
        self.validator_thread = threading.Thread(target=self.validator_loop,
                                                 name='validator')
        self.validator_thread.daemon = True

    def clock(self):
        return time.monotonic() / self.factor

    def sleep(self, seconds):
        time.sleep(seconds * self.factor)

    def validator_loop(self):
        try:
            self.validator.run(self.params)
        except Exception as e:
            logger.exception('validator thread failed')
            self.errors.append(e)

    def run(self):
        self.validator_thread.start()
        report = self.sim.run()
        self.validator_thread.join()
        if self.errors:
            raise self.errors[0]
        if self.log.scan_unchecked():
            # the simulator started a little after the validator
            self.validator.run_pass(self.params)
        logger.info('threaded run: %s; %s', report, self.params.summary())
        return report, self.params


def run_threaded(config, schedule, log, registry, interval=None, echo=None):
    """Run both programs in wall-clock time scaled by config.realtime_factor"""
    return ThreadedRun(config, schedule, log, registry, interval=interval, echo=echo).run()
