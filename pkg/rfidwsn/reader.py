#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: reader
   :synopsis: An emulated SM130 reader on a virtual I2C bus.

The reader answers select tag commands from a :class:`FieldSchedule`, a list
of intervals during which a given tag sits on the antenna field. Transfers
follow the I2C conventions of the node firmware: writes go to the even slave
address, reads to ``slave_addr | 1``, and a read returns exactly the number
of bytes asked for, front padded with 0x00.

Example
-------

.. code-block:: python

   from rfidwsn import framing, reader

   schedule = reader.FieldSchedule.parse('AABBCCDD 0 60\\n')
   now = [0.0]
   sm130 = reader.SM130(schedule, clock=lambda: now[0])
   sm130.i2c_init(False)

   sm130.i2c_write(framing.encode_write_payload(0x42, framing.SELECT_TAG), 1, True)
   raw = sm130.i2c_read(0x43, 12, 4, True)
   # b'\\x00\\x00\\x00\\x00\\x06\\x83\\x02\\xaa\\xbb\\xcc\\xdd\\x99'

Scenario files hold one ``<tag-hex> <t_start> <t_end>`` entry per line,
``#`` starts a comment. Times are non-negative decimal seconds; an entry
covers ``t_start <= t < t_end``.
"""

import logging
import re
from dataclasses import dataclass

from rfidwsn import framing
from rfidwsn.config import ParseError

logger = logging.getLogger(__name__)

DEFAULT_SLAVE_ADDR = 0x42
DEFAULT_FRAME_SIZE = 12   # length + command + tagType + 7 byte serial + csum

# results reported by get_i2c_result()
I2C_OFF = 0
I2C_SUCCESS = 1
I2C_NO_ACK = 5

re_seconds = re.compile(r'^\d+(?:\.\d+)?$')


class ReaderException(Exception):
    pass


class ReaderError(ReaderException):
    pass


class ScheduleError(ReaderError):
    pass


class OverlapError(ReaderError):
    pass


@dataclass(frozen=True)
class FieldEntry(object):
    tag: framing.TagId
    t_start: float
    t_end: float

    def __post_init__(self):
        if self.t_start < 0:
            raise ScheduleError('negative start time %r for %s' % (self.t_start, self.tag))
        if not self.t_start < self.t_end:
            raise ScheduleError('empty interval [%r, %r) for %s'
                                % (self.t_start, self.t_end, self.tag))

    def contains(self, t):
        return self.t_start <= t < self.t_end


def first_overlap(entries):
    """
    Index of the first entry, in start order, that begins before the one
    ahead of it has left the field; None when no two entries overlap.
    """
    for i in range(1, len(entries)):
        if entries[i].t_start < entries[i - 1].t_end:
            return i
    return None


def overlap_message(previous, entry):
    return '%s enters the field at t=%s while %s is on it until t=%s' % (
        entry.tag, entry.t_start, previous.tag, previous.t_end)


class FieldSchedule(object):
    """Which tag occupies the reader's field, and when."""

    def __init__(self, entries=()):
        self.entries = sorted(entries, key=lambda entry: entry.t_start)
        i = first_overlap(self.entries)
        if i is not None:
            raise OverlapError(overlap_message(self.entries[i - 1], self.entries[i]))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def always(cls, tag, until):
        """A single tag present from 0 to until"""
        if not isinstance(tag, framing.TagId):
            tag = framing.TagId.parse(tag)
        return cls([FieldEntry(tag, 0.0, float(until))])

    @classmethod
    def parse(cls, text):
        entries, numbers = [], []
        for number, line in enumerate(text.splitlines(), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ParseError(number, 'expected "<tag-hex> <t_start> <t_end>"')
            tag, start, end = fields
            if not (re_seconds.match(start) and re_seconds.match(end)):
                raise ParseError(number, 'times must be non-negative decimal seconds')
            try:
                entries.append(FieldEntry(framing.TagId.parse(tag), float(start), float(end)))
            except (framing.FrameError, ScheduleError) as e:
                raise ParseError(number, str(e))
            numbers.append(number)
        order = sorted(range(len(entries)), key=lambda k: entries[k].t_start)
        i = first_overlap([entries[k] for k in order])
        if i is not None:
            previous, entry = entries[order[i - 1]], entries[order[i]]
            raise ParseError(numbers[order[i]], overlap_message(previous, entry))
        return cls(entries)

    @classmethod
    def load(cls, filename):
        with open(filename, encoding='utf-8') as f:
            return cls.parse(f.read())

    def presence(self, times):
        """The tags present at each of the given instants, absent ones skipped"""
        return [tag for tag in (field_state(self, t) for t in times) if tag is not None]


def field_state(schedule, t):
    """
    Return the TagId on the field at time t, or None when the field is empty.
    Raises OverlapError when more than one entry covers t.
    """
    found = [entry for entry in schedule if entry.contains(t)]
    if len(found) > 1:
        raise OverlapError('%d tags on the field at t=%s: %s'
                           % (len(found), t, ', '.join(str(e.tag) for e in found)))
    return found[0].tag if found else None


class SM130(object):
    """
    The reader as seen from the RFID node's I2C pins.

    A write carrying a valid select tag frame computes the answer from the
    field at the current virtual time and keeps it until the next read. A
    second write before the read replaces the pending answer.
    """

    def __init__(self, schedule, clock, slave_addr=DEFAULT_SLAVE_ADDR,
                 read_buffer_size=DEFAULT_FRAME_SIZE,
                 no_tag_status=framing.NO_TAG_STATUS,
                 tag_type=framing.TAG_TYPE_MIFARE_1K):
        if slave_addr & 1 or not 0 <= slave_addr <= 0xFF:
            raise framing.OddWriteAddress('slave address 0x%02X is not an even byte' % slave_addr)
        self.schedule = schedule
        self.clock = clock
        self.slave_addr = slave_addr
        self.read_buffer_size = read_buffer_size
        self.no_tag_status = no_tag_status
        self.tag_type = tag_type
        self.pending_response = b''
        self.pullups = None
        self.ignore_first_ack = None
        self.ack_attempts = 0
        self._result = I2C_OFF

    @property
    def read_addr(self):
        return self.slave_addr | 1

    def i2c_init(self, enable_pullups=False):
        """Set up the bus; transfers fail until this is called"""
        self.pullups = bool(enable_pullups)
        self._result = I2C_SUCCESS

    def get_i2c_result(self):
        """Status of the last transfer"""
        return self._result

    def _ack(self, addr_byte, expected, retries):
        # the emulated bus never flakes: a retry only repeats the outcome
        acked = addr_byte == expected
        self.ack_attempts += 1 if acked else max(1, retries)
        return acked

    def i2c_write(self, payload, retries=1, ignore_first_ack=True):
        """
        Send payload ([address] + command frame); returns the number of bytes
        sent, 0 when the address is not acknowledged.
        """
        payload = bytes(payload)
        if not payload:
            raise ValueError('empty I2C payload')
        if self.pullups is None:
            logger.warning('i2c_write before i2c_init')
            self._result = I2C_OFF
            return 0
        self.ignore_first_ack = ignore_first_ack
        if not self._ack(payload[0], self.slave_addr, retries):
            logger.warning('no ack for write address 0x%02X after %d tries',
                           payload[0], max(1, retries))
            self._result = I2C_NO_ACK
            return 0

        self._result = I2C_SUCCESS
        logger.debug('i2c write %s', framing.to_hex(payload))
        try:
            frame = framing.decode_command(payload[1:])
        except framing.FrameError as e:
            logger.warning('bad command frame %s: %s', framing.to_hex(payload[1:]), e)
            self.pending_response = b''
            return len(payload)

        if frame.command == framing.CMD_SELECT_TAG:
            self.pending_response = self._select_tag()
        else:
            logger.debug('command 0x%02X has no emulated answer', frame.command)
            self.pending_response = b''
        return len(payload)

    def _select_tag(self):
        tag = field_state(self.schedule, self.clock())
        if tag is None:
            payload = bytes(bytearray([self.no_tag_status]))
        else:
            payload = bytes(bytearray([self.tag_type])) + tag.serial
        length = 1 + len(payload)
        csum = framing.checksum(length, framing.CMD_SELECT_TAG, payload)
        return framing.ResponseFrame(length, framing.CMD_SELECT_TAG, payload, csum).encode()

    def i2c_read(self, addr_byte, num_to_read, retries=1, ignore_first_ack=True):
        """
        Read num_to_read bytes from the read address. The pending answer is
        front padded with 0x00 (or cut to num_to_read) and consumed; with
        nothing pending the read is all zeros. Returns b'' without an ack.
        """
        if self.pullups is None:
            logger.warning('i2c_read before i2c_init')
            self._result = I2C_OFF
            return b''
        self.ignore_first_ack = ignore_first_ack
        if not self._ack(addr_byte, self.read_addr, retries):
            logger.warning('no ack for read address 0x%02X after %d tries',
                           addr_byte, max(1, retries))
            self._result = I2C_NO_ACK
            return b''

        self._result = I2C_SUCCESS
        frame, self.pending_response = self.pending_response, b''
        if len(frame) >= num_to_read:
            data = frame[:num_to_read]
        else:
            data = bytes(num_to_read - len(frame)) + frame
        logger.debug('i2c read %s', framing.to_hex(data))
        return data
