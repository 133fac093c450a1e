#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: network
   :synopsis: Discrete-event virtual network with 3-byte addressing and RPC.

Nodes register a table of named handlers under a 3-byte address. An RPC is a
message scheduled for delivery one hop later on a simpy clock; when it fires
the named handler runs with the message arguments. An RPC with callback runs
the remote function and sends its return value back to a named handler on
the caller, one more hop later.

Example
-------

.. code-block:: python

   from rfidwsn import network

   net = network.Network()
   net.register_node(network.BRIDGE_ADDR, {'ping': lambda: print('pong')})
   net.rpc(network.BRIDGE_ADDR, 'ping')
   while net.step() is not network.IDLE:
      pass

Events at the same virtual time fire in the order they were scheduled. Each
delivery is recorded in :attr:`Network.trace` and logged at DEBUG as::

   t=<seconds> <src>-><dst> <function>
"""

import logging
import math
import random
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime
from typing import Optional, Tuple

import simpy

from rfidwsn.config import ConfigInvalid

logger = logging.getLogger(__name__)

DEFAULT_START_TIME = datetime(2010, 7, 15, 14, 0, 0)


class NetworkException(Exception):
    pass


class NetworkError(NetworkException):
    pass


class DuplicateAddress(NetworkError):
    pass


class UnknownAddress(NetworkError):
    pass


class UnknownFunction(NetworkError):
    pass


class _Idle(object):
    def __repr__(self):
        return 'IDLE'


IDLE = _Idle()


@dataclass(frozen=True, order=True)
class NodeAddress(object):
    """A 3-byte node address, written AA:BB:CC"""
    raw: bytes

    def __post_init__(self):
        object.__setattr__(self, 'raw', bytes(self.raw))
        if len(self.raw) != 3:
            raise ValueError('node address must be 3 bytes, got %d' % len(self.raw))

    @classmethod
    def parse(cls, text):
        parts = text.strip().split(':')
        try:
            values = [int(part, 16) for part in parts if len(part) == 2]
        except ValueError:
            values = []
        if len(parts) != 3 or len(values) != 3:
            raise ValueError('node address must look like AA:BB:CC, got %r' % text)
        return cls(bytes(bytearray(values)))

    def __str__(self):
        return ':'.join('%02X' % b for b in bytearray(self.raw))


POLLING_ADDR = NodeAddress(b'\x00\xC0\xDE')
BRIDGE_ADDR = NodeAddress(b'\x00\x14\x62')
PC_ADDR = NodeAddress(b'\x00\x00\x01')
RFID_ADDR = NodeAddress(b'\x00\x55\x4B')


@dataclass(frozen=True)
class ReplyTo(object):
    address: NodeAddress
    callback: str


@dataclass(frozen=True)
class RpcMessage(object):
    msg_id: str
    src: Optional[NodeAddress]
    dest: NodeAddress
    function: str
    args: Tuple = ()
    reply_to: Optional[ReplyTo] = None


@dataclass(frozen=True)
class Receipt(object):
    msg_id: str
    deliver_at: float


@dataclass(frozen=True)
class TraceEvent(object):
    t: float
    src: Optional[NodeAddress]
    dest: NodeAddress
    function: str

    def __str__(self):
        return 't=%.3f %s->%s %s' % (self.t, self.src or '--', self.dest, self.function)


class JitterModel(object):
    """
    Per-hop delay: a fixed latency plus a uniform draw from [0, jitter_max],
    from a seeded generator so runs are reproducible.
    """

    def __init__(self, hop_latency=0.0, jitter_max=0.0, seed=0):
        self.hop_latency = hop_latency
        self.jitter_max = jitter_max
        self.rng = random.Random(seed)

    def delay(self):
        if self.jitter_max:
            return self.hop_latency + self.rng.uniform(0, self.jitter_max)
        return self.hop_latency


def poll_count(runtime, poll_delay):
    """Polls that fit in a run: one per whole poll_delay interval"""
    if poll_delay <= 0:
        raise ConfigInvalid('poll delay must be positive, got %r' % poll_delay)
    return int(math.floor(runtime / poll_delay + 1e-9))


@dataclass
class SimConfig(object):
    poll_delay: float = 2.0
    runtime: float = 60.0
    validation_delay: float = 2.0
    hop_latency: float = 0.0
    jitter_max: float = 0.0
    seed: int = 0
    start_time: datetime = DEFAULT_START_TIME
    realtime_factor: Optional[float] = None
    polling_address: NodeAddress = POLLING_ADDR
    slave_addr: int = 0x42
    frame_size: int = 12
    no_tag_status: int = 0x4E
    tag_type: int = 0x02
    legacy_scan: bool = True

    def validate(self):
        for name in ('poll_delay', 'runtime', 'validation_delay'):
            if not getattr(self, name) > 0:
                raise ConfigInvalid('%s must be positive, got %r' % (name, getattr(self, name)))
        if self.poll_delay > self.runtime:
            raise ConfigInvalid('poll delay %r exceeds runtime %r' % (self.poll_delay, self.runtime))
        if self.hop_latency < 0 or self.jitter_max < 0:
            raise ConfigInvalid('hop latency and jitter must not be negative')
        if self.realtime_factor is not None and not self.realtime_factor > 0:
            raise ConfigInvalid('realtime factor must be positive, got %r' % self.realtime_factor)
        if self.slave_addr & 1 or not 0 <= self.slave_addr <= 0xFF:
            raise ConfigInvalid('slave address 0x%02X is not an even byte' % self.slave_addr)
        if self.frame_size < 3:
            raise ConfigInvalid('frame size %r cannot hold a frame' % self.frame_size)
        if self.polling_address in (BRIDGE_ADDR, PC_ADDR, RFID_ADDR):
            raise ConfigInvalid('polling address %s is taken' % self.polling_address)
        return self

    def jitter(self):
        return JitterModel(self.hop_latency, self.jitter_max, self.seed)

    def environment(self):
        """A virtual clock, or a wall clock scaled by realtime_factor"""
        if self.realtime_factor is None:
            return simpy.Environment()
        return simpy.RealtimeEnvironment(factor=self.realtime_factor, strict=False)


class Registration(object):
    def __init__(self, network, address):
        self.network = network
        self.address = address

    def unregister(self):
        self.network.unregister_node(self.address)


class Network(object):
    def __init__(self, env=None, jitter=None):
        self.env = simpy.Environment() if env is None else env
        self.jitter = JitterModel() if jitter is None else jitter
        self.deadline = None     # deliveries at or after this time are discarded
        self.trace = []
        self.dropped = []        # (message, exception) pairs
        self.late = 0
        self._nodes = {}

        # message ids, unique across networks
        self.msg_id_base = str(uuid.uuid4())
        self._seqlock = threading.Lock()
        self._seq = 0

    @property
    def now(self):
        return self.env.now

    def next_seq(self):
        """Return the next number in the sequence, used for message ids"""
        with self._seqlock:
            seq = self._seq
            self._seq += 1
            return seq

    def get_msg_id(self):
        return '%s-%08x' % (self.msg_id_base, self.next_seq())

    def register_node(self, addr, handlers):
        """
        Make the handlers (a name -> callable table) reachable at addr.
        """
        if addr in self._nodes:
            raise DuplicateAddress('address %s is already registered' % addr)
        self._nodes[addr] = dict(handlers)
        logger.debug('node %s registered: %s', addr, ', '.join(sorted(handlers)))
        return Registration(self, addr)

    def unregister_node(self, addr):
        self._nodes.pop(addr, None)

    def is_registered(self, addr):
        return addr in self._nodes

    def send(self, message):
        if message.dest not in self._nodes:
            raise UnknownAddress('no node at %s' % message.dest)
        delay = self.jitter.delay()
        event = self.env.timeout(delay, value=message)
        event.callbacks.append(self._deliver)
        return Receipt(message.msg_id, self.env.now + delay)

    def rpc(self, dest, function, args=(), src=None):
        """Fire-and-forget call of function on the node at dest"""
        return self.send(RpcMessage(self.get_msg_id(), src, dest, function, tuple(args)))

    def rpc_with_callback(self, dest, callback, remote_fn, args=(), src=None):
        """
        Call remote_fn on dest; its return value is sent back to src as
        rpc(src, callback, [result]).
        """
        if src is None:
            raise ValueError('an rpc with callback needs the caller address')
        return self.send(RpcMessage(self.get_msg_id(), src, dest, remote_fn,
                                    tuple(args), ReplyTo(src, callback)))

    def _drop(self, message, error):
        logger.warning('dropped %s from %s: %s', message.function, message.src or '--', error)
        self.dropped.append((message, error))

    def _deliver(self, event):
        message = event.value
        if self.deadline is not None and self.env.now >= self.deadline:
            self.late += 1
            return

        trace = TraceEvent(self.env.now, message.src, message.dest, message.function)
        self.trace.append(trace)
        logger.debug('%s', trace)

        handlers = self._nodes.get(message.dest)
        if handlers is None:
            self._drop(message, UnknownAddress('no node at %s' % message.dest))
            return
        handler = handlers.get(message.function)
        if handler is None:
            self._drop(message, UnknownFunction('%s has no function %r'
                                                % (message.dest, message.function)))
            return

        result = handler(*message.args)
        if message.reply_to is not None:
            reply_to = message.reply_to
            if reply_to.address not in self._nodes:
                self._drop(message, UnknownAddress('no node at %s' % reply_to.address))
                return
            self.send(RpcMessage(self.get_msg_id(), message.dest, reply_to.address,
                                 reply_to.callback, (result,)))

    def step(self):
        """
        Execute the next scheduled event; return the time it fired at, or
        IDLE when nothing is scheduled.
        """
        t = self.env.peek()
        if t == float('inf'):
            return IDLE
        self.env.step()
        return t

    def run(self, until):
        """Advance the clock to until; events at until itself do not fire"""
        self.env.run(until=until)
