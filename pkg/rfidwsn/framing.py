#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: framing
   :synopsis: SM130 I2C command and response frames.

This module encodes and decodes the frames exchanged with an SM130 Mifare
reader over I2C. Every frame, in both directions, has the layout::

   Length | Command | Data (N bytes) | CSUM

where Length counts the command byte and the data bytes, and CSUM is the sum
of Length, Command and Data modulo 256. The reader answers a select tag
command either with a two byte frame (no tag in the field) or with a frame
carrying the tag type followed by a 4 or 7 byte serial.

Example
-------

.. code-block:: python

   from rfidwsn import framing

   payload = framing.encode_write_payload(0x42, framing.SELECT_TAG)
   # b'\\x42\\x01\\x83\\x84'

   response = framing.decode_response(bytes.fromhex('0000068302AABBCCDD99'))
   if isinstance(response, framing.TagResponse):
      print(framing.extract_tag(response))   # AABBCCDD

Hex transcriptions (two uppercase hex characters per byte, no separators)
are what the RFID node hands back to the PC and what ends up in the log.
"""

import binascii
import re
from dataclasses import dataclass

CMD_RESET = 0x80
CMD_FIRMWARE = 0x81
CMD_SELECT_TAG = 0x83

NO_TAG_STATUS = 0x4E        # 'N'
TAG_TYPE_MIFARE_1K = 0x02

MAX_DATA_LENGTH = 16
MAX_FRAME_LENGTH = MAX_DATA_LENGTH + 1   # largest value of the length byte
SERIAL_LENGTHS = (4, 7)

re_hex = re.compile(r'^(?:[0-9A-Fa-f]{2})*$')
re_tag = re.compile(r'^(?:[0-9A-F]{8}|[0-9A-F]{14})$')


class FrameException(Exception):
    pass


class FrameError(FrameException):
    pass


class DataTooLong(FrameError):
    pass


class OddWriteAddress(FrameError):
    pass


class BadChecksum(FrameError):
    pass


class Truncated(FrameError):
    pass


class Empty(FrameError):
    pass


class BadSerialLength(FrameError):
    pass


class BadHex(FrameError):
    pass


def checksum(length, command, data=b''):
    """Return (length + command + sum(data)) mod 256"""
    return (length + command + sum(bytearray(data))) & 0xFF


def to_hex(data):
    """Transcribe bytes as uppercase hex, two characters per byte"""
    return binascii.hexlify(bytes(data)).decode('ascii').upper()


def from_hex(text):
    """Inverse of to_hex; accepts either case"""
    if not re_hex.match(text):
        raise BadHex('not an even-length hex transcription: %r' % text)
    return binascii.unhexlify(text)


def _byte(value, what):
    if not 0 <= value <= 0xFF:
        raise ValueError('%s must be a byte, got %r' % (what, value))
    return value


@dataclass(frozen=True)
class CommandFrame(object):
    """A command for the reader: opcode plus up to 16 data bytes."""
    command: int
    data: bytes = b''

    def __post_init__(self):
        _byte(self.command, 'command')
        object.__setattr__(self, 'data', bytes(self.data))

    @property
    def length(self):
        return 1 + len(self.data)

    @property
    def csum(self):
        return checksum(self.length, self.command, self.data)

    def encode(self):
        return encode_command(self)


SELECT_TAG = CommandFrame(CMD_SELECT_TAG)


@dataclass(frozen=True)
class ResponseFrame(object):
    """A decoded frame as read back from the reader."""
    length: int
    command: int
    payload: bytes
    csum: int

    def encode(self):
        return bytes(bytearray([self.length, self.command])) + self.payload + \
            bytes(bytearray([self.csum]))


class NoTag(ResponseFrame):
    """A length 2 answer: no tag on the field, payload is a status byte."""

    @property
    def status(self):
        return self.payload[0]


class TagResponse(ResponseFrame):
    """A select tag answer carrying [tagType, serial...]."""

    @property
    def tag_type(self):
        return self.payload[0]

    @property
    def serial(self):
        return self.payload[1:]


@dataclass(frozen=True)
class TagId(object):
    """
    The serial of a tag. Its text form (uppercase hex, no separators) is the
    key used by the log and the registry.
    """
    serial: bytes

    def __post_init__(self):
        object.__setattr__(self, 'serial', bytes(self.serial))
        if len(self.serial) not in SERIAL_LENGTHS:
            raise BadSerialLength(
                'tag serial must be 4 or 7 bytes, got %d' % len(self.serial))

    @classmethod
    def parse(cls, text):
        """Build a TagId from its hex form, normalising case"""
        text = text.strip().upper()
        if not re_tag.match(text):
            raise BadSerialLength(
                'tag id must be 8 or 14 hex characters, got %r' % text)
        return cls(binascii.unhexlify(text))

    @property
    def hex(self):
        return to_hex(self.serial)

    def __str__(self):
        return self.hex


def normalize_tag(text):
    """Canonical text form of a tag id given in any case"""
    return TagId.parse(text).hex


def encode_command(frame):
    """
    Return the bytes [length, command, data..., csum] of a command frame.
    Raises DataTooLong for more than 16 data bytes.
    """
    if len(frame.data) > MAX_DATA_LENGTH:
        raise DataTooLong('command data is %d bytes, at most %d allowed'
                          % (len(frame.data), MAX_DATA_LENGTH))
    head = bytes(bytearray([frame.length, frame.command]))
    return head + frame.data + bytes(bytearray([frame.csum]))


def encode_write_payload(slave_addr, frame):
    """
    Prefix an encoded command with the reader's I2C write address, which
    must be even (the read address is slave_addr | 1).
    """
    _byte(slave_addr, 'slave address')
    if slave_addr & 1:
        raise OddWriteAddress('write address 0x%02X is odd' % slave_addr)
    return bytes(bytearray([slave_addr])) + encode_command(frame)


def _split_frame(raw, start):
    length = raw[start]
    if length > MAX_FRAME_LENGTH:
        raise DataTooLong('length byte 0x%02X exceeds 0x%02X'
                          % (length, MAX_FRAME_LENGTH))
    end = start + length + 2
    if length < 1 or end > len(raw):
        raise Truncated('frame wants %d bytes, %d available'
                        % (length + 2, len(raw) - start))
    command = raw[start + 1]
    payload = raw[start + 2:end - 1]
    csum = raw[end - 1]
    expected = checksum(length, command, payload)
    if csum != expected:
        raise BadChecksum('csum 0x%02X, expected 0x%02X' % (csum, expected))
    return length, command, payload, csum


def decode_response(raw):
    """
    Decode a (possibly zero padded) response read from the reader.

    Leading 0x00 bytes are skipped and bytes after the frame are ignored.
    Returns a NoTag for a length 2 frame, a TagResponse for anything longer
    and a plain ResponseFrame for a bare command echo.
    """
    raw = bytes(raw)
    start = 0
    while start < len(raw) and raw[start] == 0:
        start += 1
    if start == len(raw):
        raise Empty('response holds no frame (%d padding bytes)' % len(raw))

    length, command, payload, csum = _split_frame(raw, start)
    if length == 2:
        cls = NoTag
    elif length > 2:
        cls = TagResponse
    else:
        cls = ResponseFrame
    return cls(length, command, payload, csum)


def decode_command(raw):
    """Decode an unpadded command frame, as the reader sees it after the address"""
    raw = bytes(raw)
    if not raw:
        raise Empty('no command bytes')
    length, command, payload, csum = _split_frame(raw, 0)
    return CommandFrame(command, payload)


def extract_tag(resp):
    """Trim length, command and tagType from a tag response, keep the serial"""
    if not isinstance(resp, TagResponse):
        raise TypeError('expected a TagResponse, got %r' % (resp,))
    return TagId(resp.serial)


def legacy_hex_scan(hex_text):
    """
    Character-level scan of a hex transcribed response.

    Skips leading '0' characters, reads the frame size from the single digit
    it lands on, copies the frame region and decodes it. The skip also eats
    the high nibble of the length byte, which is put back before decoding.
    Only frames with a length byte of 0x01-0x09 can be read this way.
    """
    text = hex_text.strip()
    from_hex(text)  # validates the transcription

    i = 0
    while i < len(text) and text[i] == '0':
        i += 1
    if i == len(text):
        raise Empty('response holds no frame (%d padding characters)' % len(text))
    if text[i] not in '123456789':
        raise BadHex('size digit %r at position %d cannot be read by the legacy scan'
                     % (text[i], i))
    package_size = int(text[i])

    # length, command, data and CSUM, less the '0' already consumed
    wanted = (package_size + 2) * 2 - 1
    if i + wanted > len(text):
        raise Truncated('frame wants %d characters, %d available'
                        % (wanted + 1, len(text) - i + 1))
    clean_data = '0' + text[i:i + wanted]
    return decode_response(from_hex(clean_data))
