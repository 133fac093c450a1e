#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: nodes
   :synopsis: The Polling, Bridge, PC and RFID node scripts.

Node Control is a chain of four nodes on the virtual network:

1. the Polling node calls ``ping`` on the Bridge once every poll delay;
2. the Bridge calls ``selectTag`` on the PC;
3. the PC builds the select tag frame and calls ``sendReceiveCommand`` on the
   RFID node, asking for the answer to come back to ``receiveResult``;
4. the RFID node writes the frame to the reader over I2C, reads the answer
   back from ``slave_addr | 1`` and returns it as hex;
5. the PC scans the hex, and when a tag was on the field logs it with the
   time of detection.

The RPC names are the ones the node firmware exposes.

Example
-------

.. code-block:: python

   from rfidwsn import accesslog, network, nodes, reader

   config = network.SimConfig(poll_delay=2, runtime=60)
   schedule = reader.FieldSchedule.always('AABBCCDD', 60)
   report = nodes.run(config, schedule, accesslog.AccessLog('rfid.log'))
   print(report)   # polls=30 detections=30 no_tag=0 losses=0 dropped=0
"""

import logging
from dataclasses import dataclass
from datetime import timedelta

from rfidwsn import framing
from rfidwsn.accesslog import format_timestamp
from rfidwsn.network import (BRIDGE_ADDR, DEFAULT_START_TIME, PC_ADDR, RFID_ADDR,
                             Network, poll_count)
from rfidwsn.reader import SM130

logger = logging.getLogger(__name__)


class Node(object):
    """A script running on one node; rpc_names maps RPC names to methods."""
    rpc_names = {}

    def __init__(self, network, address):
        self.network = network
        self.address = address
        self.registration = network.register_node(
            address, dict((name, getattr(self, method))
                          for name, method in self.rpc_names.items()))

    @property
    def now(self):
        return self.network.now

    def rpc(self, dest, function, *args):
        return self.network.rpc(dest, function, args, src=self.address)

    def rpc_with_callback(self, dest, callback, remote_fn, *args):
        return self.network.rpc_with_callback(dest, callback, remote_fn, args,
                                              src=self.address)


class PollingNode(Node):
    def __init__(self, network, address, poll_delay, runtime, bridge=BRIDGE_ADDR):
        Node.__init__(self, network, address)
        self.poll_delay = poll_delay
        self.runtime = runtime
        self.bridge = bridge
        self.polls = 0
        self.process = None

    def start(self):
        self.process = self.network.env.process(self._poll_loop())
        return self.process

    def _poll_loop(self):
        env = self.network.env
        start = env.now
        for k in range(poll_count(self.runtime, self.poll_delay)):
            # poll k is due at start + k * poll_delay; never accumulate
            wait = start + k * self.poll_delay - env.now
            if wait > 0:
                yield env.timeout(wait)
            self.poll()
            # go back to sleep until the next poll

    def poll(self):
        self.polls += 1
        self.rpc(self.bridge, 'ping')


class BridgeNode(Node):
    rpc_names = {'ping': 'ping'}

    def __init__(self, network, address=BRIDGE_ADDR, pc=PC_ADDR):
        Node.__init__(self, network, address)
        self.pc = pc

    def ping(self):
        self.rpc(self.pc, 'selectTag')


class PCNode(Node):
    rpc_names = {'selectTag': 'select_tag', 'receiveResult': 'receive_result'}

    def __init__(self, network, address=PC_ADDR, rfid=RFID_ADDR, slave_addr=0x42,
                 log=None, start_time=DEFAULT_START_TIME, echo=None, legacy_scan=True,
                 callback='receiveResult'):
        Node.__init__(self, network, address)
        self.rfid = rfid
        self.slave_addr = slave_addr
        self.log = log
        self.start_time = start_time
        self.echo = echo
        self.legacy_scan = legacy_scan
        self.callback = callback
        self.current_cmd = None
        self.frames_sent = []

        self.responses = 0
        self.detections = 0
        self.no_tag = 0
        self.empty = 0
        self.errors = 0

    def timestamp(self):
        return (self.start_time + timedelta(seconds=self.now)).replace(microsecond=0)

    def select_tag(self):
        i2c_frame = framing.encode_write_payload(self.slave_addr, framing.SELECT_TAG)
        self.current_cmd = 'selectTag'
        self.frames_sent.append(i2c_frame)
        self.send_command(i2c_frame, 'selectTag')

    def send_command(self, i2c_frame, cmd_sent):
        self.rpc_with_callback(self.rfid, self.callback, 'sendReceiveCommand',
                               self.slave_addr, i2c_frame, cmd_sent)

    def _scan(self, data):
        if self.legacy_scan:
            return framing.legacy_hex_scan(data)
        return framing.decode_response(framing.from_hex(data))

    def receive_result(self, data):
        """Handle the hex answer of the RFID node; True when a tag was logged"""
        self.responses += 1
        if self.current_cmd != 'selectTag':
            return False
        detected_at = self.timestamp()
        if self.echo is not None:
            self.echo.write('%s %s\n' % (format_timestamp(detected_at), data))

        try:
            response = self._scan(data or '')
            if not isinstance(response, framing.TagResponse):
                self.no_tag += 1
                return False
            tag = framing.extract_tag(response)
        except framing.Empty:
            logger.warning('t=%.3f empty answer from the reader', self.now)
            self.empty += 1
            return False
        except framing.FrameError as e:
            logger.warning('t=%.3f unusable answer %r: %s', self.now, data, e)
            self.errors += 1
            return False

        self.detections += 1
        if self.log is not None:
            self.log.append_detection(detected_at, tag)
        logger.info('%s tag %s on the field', format_timestamp(detected_at), tag)
        return True


class RFIDNode(Node):
    rpc_names = {'sendReceiveCommand': 'send_receive_command'}

    def __init__(self, network, device, address=RFID_ADDR, frame_size=12):
        Node.__init__(self, network, address)
        self.device = device
        self.frame_size = frame_size
        # the reader board carries its own pull-ups
        self.device.i2c_init(False)

    def send_receive_command(self, slave_addr, i2c_frame, cmd_sent):
        bytes_returned = self.device.i2c_write(i2c_frame, 1, True)
        if not bytes_returned:
            logger.warning('%s: reader did not take the %s frame', self.address, cmd_sent)
        return_addr = slave_addr | 1
        data_returned = self.device.i2c_read(return_addr, self.frame_size, 4, True)
        return framing.to_hex(data_returned)


@dataclass
class SimReport(object):
    polls: int = 0
    detections: int = 0
    no_tag: int = 0
    empty: int = 0
    errors: int = 0
    dropped: int = 0

    @property
    def losses(self):
        """Polls that did not end in a usable answer at the PC"""
        return self.polls - self.detections - self.no_tag

    def __str__(self):
        return 'polls=%d detections=%d no_tag=%d losses=%d dropped=%d' % (
            self.polls, self.detections, self.no_tag, self.losses, self.dropped)


class Simulation(object):
    """The four nodes and the reader, wired on one network."""

    def __init__(self, config, schedule, log=None, echo=None, env=None):
        config.validate()
        self.config = config
        self.schedule = schedule
        self.network = Network(config.environment() if env is None else env,
                               config.jitter())
        self.device = SM130(schedule, clock=lambda: self.network.now,
                            slave_addr=config.slave_addr,
                            read_buffer_size=config.frame_size,
                            no_tag_status=config.no_tag_status,
                            tag_type=config.tag_type)
        self.rfid = RFIDNode(self.network, self.device, frame_size=config.frame_size)
        self.pc = PCNode(self.network, slave_addr=config.slave_addr, log=log,
                         start_time=config.start_time, echo=echo,
                         legacy_scan=config.legacy_scan)
        self.bridge = BridgeNode(self.network)
        self.polling = PollingNode(self.network, config.polling_address,
                                   config.poll_delay, config.runtime)

    @property
    def env(self):
        return self.network.env

    def start(self):
        """Start polling at the current time; the run ends at runtime"""
        self.network.deadline = self.env.now + self.config.runtime
        return self.polling.start()

    def report(self):
        return SimReport(polls=self.polling.polls,
                         detections=self.pc.detections,
                         no_tag=self.pc.no_tag,
                         empty=self.pc.empty,
                         errors=self.pc.errors,
                         dropped=len(self.network.dropped))

    def run(self):
        self.start()
        self.network.run(self.network.deadline)
        report = self.report()
        logger.info('run of %ss at %ss poll delay: %s',
                    self.config.runtime, self.config.poll_delay, report)
        return report


def run(config, schedule, log=None, echo=None):
    """Run Node Control for config.runtime seconds and report the counts"""
    return Simulation(config, schedule, log=log, echo=echo).run()
