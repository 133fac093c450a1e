#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: metrics
   :synopsis: Theoretical against experimental detection counts.

A run that polls every ``poll_delay`` seconds for ``runtime`` seconds with a
tag always on the field should log ``floor(runtime / poll_delay)``
detections. The percentage error of a run is::

   |experimental - theoretical| / theoretical * 100

rounded to two decimals.

Example
-------

.. code-block:: python

   from rfidwsn import metrics, network, reader

   schedule = reader.FieldSchedule.always('AABBCCDD', 3600)
   base = network.SimConfig(hop_latency=1.3, jitter_max=0.05, seed=7)
   results = metrics.run_grid([2, 5], [30, 60, 3600], schedule, base)
   print(metrics.report(results))
"""

import csv
import io
import logging
from dataclasses import dataclass, replace

from texttable import Texttable

from rfidwsn.config import ConfigInvalid
from rfidwsn.network import SimConfig, poll_count
from rfidwsn.nodes import Simulation

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['poll_delay_s', 'runtime_s', 'theoretical', 'experimental', 'percent_error']
TEXT_COLUMNS = ['poll delay (s)', 'runtime (s)', 'theoretical', 'experimental', 'error %']


class MetricsException(Exception):
    pass


class ZeroTheoretical(MetricsException):
    pass


def theoretical_detections(runtime, poll_delay):
    if not runtime > 0:
        raise ConfigInvalid('runtime must be positive, got %r' % runtime)
    return poll_count(runtime, poll_delay)


def percent_error(experimental, theoretical):
    if theoretical <= 0:
        raise ZeroTheoretical('no detections expected, percentage error is undefined')
    return round(abs(experimental - theoretical) * 100.0 / theoretical, 2)


@dataclass(frozen=True)
class RunResult(object):
    poll_delay: float
    runtime: float
    theoretical: int
    experimental: int
    percent_error: float

    @classmethod
    def measure(cls, poll_delay, runtime, experimental):
        theoretical = theoretical_detections(runtime, poll_delay)
        return cls(poll_delay, runtime, theoretical, experimental,
                   percent_error(experimental, theoretical))

    def row(self):
        return ['%g' % self.poll_delay, '%g' % self.runtime, '%d' % self.theoretical,
                '%d' % self.experimental, '%.2f' % self.percent_error]


def max_error(results):
    """The result with the largest error; the first one on ties"""
    return max(results, key=lambda r: r.percent_error) if results else None


def mean_error(results):
    if not results:
        return None
    return round(sum(r.percent_error for r in results) / len(results), 2)


def report(results, csv_format=False):
    """
    Format results as a text table followed by the max and mean error
    lines, or as CSV. No results gives the header alone.
    """
    results = list(results)
    if csv_format:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for result in results:
            writer.writerow(result.row())
        return out.getvalue()

    table = Texttable()
    table.set_cols_dtype(['t'] * len(TEXT_COLUMNS))
    table.set_cols_align(['r'] * len(TEXT_COLUMNS))
    table.header(TEXT_COLUMNS)
    for result in results:
        table.add_row(result.row())
    lines = [table.draw()]
    if results:
        worst = max_error(results)
        lines.append('max error: %.2f%% at poll_delay=%g runtime=%g'
                     % (worst.percent_error, worst.poll_delay, worst.runtime))
        lines.append('mean error: %.2f%%' % mean_error(results))
    return '\n'.join(lines) + '\n'


def run_grid(delays, runtimes, schedule, base=None):
    """
    Simulate every (poll delay, runtime) pair with the settings of base
    and measure it. Each run gets the same seed, so the grid is
    reproducible.
    """
    base = SimConfig() if base is None else base
    results = []
    for poll_delay in delays:
        for runtime in runtimes:
            config = replace(base, poll_delay=poll_delay, runtime=runtime)
            sim_report = Simulation(config, schedule).run()
            result = RunResult.measure(poll_delay, runtime, sim_report.detections)
            logger.info('poll_delay=%g runtime=%g: %d of %d detected (%.2f%%)',
                        poll_delay, runtime, result.experimental, result.theoretical,
                        result.percent_error)
            results.append(result)
    return results
