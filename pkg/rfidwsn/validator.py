#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: validator
   :synopsis: Database Control: give every logged detection a verdict.

The validator works on the log file and the registry file only. Every scan
interval it looks for log entries without a verdict, looks each tag up in
the registry and annotates the entry with:

* ``Y``  - the tag is enrolled and authorized (access granted),
* ``N``  - the tag is enrolled but not authorized (access denied),
* ``NF`` - the tag is not in the registry.

Entries appended while a pass is running are left for the next pass.

Example
-------

.. code-block:: python

   from rfidwsn import accesslog, registry, validator

   params = validator.ValidationRun(duration=60, scan_interval=2)
   validator.run(params, accesslog.AccessLog('rfid.log'),
                 registry.TagRegistry('tags.tsv'))
   print(params.summary())   # scanned=30 Y=30 N=0 NF=0
"""

import logging
import time
from dataclasses import dataclass

from rfidwsn.accesslog import DENIED, GRANTED, NOT_FOUND, format_timestamp
from rfidwsn.config import ConfigInvalid

logger = logging.getLogger(__name__)

EPSILON = 1e-9


@dataclass
class ValidationRun(object):
    duration: float
    scan_interval: float = 2.0
    scanned: int = 0
    granted: int = 0
    denied: int = 0
    not_found: int = 0
    passes: int = 0

    def validate(self):
        if not self.duration > 0 or not self.scan_interval > 0:
            raise ConfigInvalid('duration and scan interval must be positive, got %r and %r'
                                % (self.duration, self.scan_interval))
        if self.duration < self.scan_interval:
            raise ConfigInvalid('duration %r is shorter than the scan interval %r'
                                % (self.duration, self.scan_interval))
        return self

    def pass_times(self, start=0.0):
        """Pass k is due at start + k * scan_interval, for as long as that is before duration"""
        k = 0
        while k * self.scan_interval < self.duration - EPSILON:
            yield start + k * self.scan_interval
            k += 1

    def record(self, verdict):
        self.scanned += 1
        if verdict == GRANTED:
            self.granted += 1
        elif verdict == DENIED:
            self.denied += 1
        else:
            self.not_found += 1

    def summary(self):
        return 'scanned=%d Y=%d N=%d NF=%d' % (
            self.scanned, self.granted, self.denied, self.not_found)


def verdict_for(record):
    if record is None:
        return NOT_FOUND
    return GRANTED if record.is_authorized else DENIED


def decide(tag, registry):
    """Y, N or NF for tag against the registry"""
    return verdict_for(registry.lookup(str(tag)))


def validate_once(log, registry):
    """
    Annotate every unchecked entry of log; returns the (index, verdict)
    pairs written, in log order. All lookups happen before the log is
    touched, so a registry failure leaves it as it was.
    """
    unchecked = log.scan_unchecked()
    annotations = []
    for index, entry in unchecked:
        record = registry.lookup(entry.tag_hex)
        verdict = verdict_for(record)
        annotations.append((index, verdict))
        if verdict == GRANTED:
            logger.info('%s access granted for %s (%s)',
                        format_timestamp(entry.timestamp), entry.tag_hex, record.first_name)
        elif verdict == DENIED:
            logger.info('%s access denied for %s (%s)',
                        format_timestamp(entry.timestamp), entry.tag_hex, record.first_name)
        else:
            logger.info('%s tag %s not found', format_timestamp(entry.timestamp), entry.tag_hex)
    log.annotate_many(annotations)
    return annotations


class Validator(object):
    """
    Runs validate_once on a schedule. clock and sleep default to wall time;
    pass scaled or fake ones to run faster than real time.
    """

    def __init__(self, log, registry, clock=time.monotonic, sleep=time.sleep):
        self.log = log
        self.registry = registry
        self.clock = clock
        self.sleep = sleep

    def run_pass(self, params):
        annotations = validate_once(self.log, self.registry)
        for index, verdict in annotations:
            params.record(verdict)
        params.passes += 1
        return annotations

    def run(self, params):
        params.validate()
        for due in params.pass_times(self.clock()):
            wait = due - self.clock()
            if wait > 0:
                self.sleep(wait)
            self.run_pass(params)
        logger.info('validation finished after %d passes: %s', params.passes, params.summary())
        return params

    def process(self, env, params, offset=0.0):
        """The same schedule as a simpy process, starting offset seconds from now"""
        params.validate()
        for due in params.pass_times(env.now + offset):
            wait = due - env.now
            if wait > 0:
                yield env.timeout(wait)
            self.run_pass(params)


def run(params, log, registry):
    """Validate log against registry for params.duration seconds of wall time"""
    return Validator(log, registry).run(params)
