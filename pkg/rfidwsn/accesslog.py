#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: accesslog
   :synopsis: The append-then-annotate detection log.

Node Control appends one line per detected tag; Database Control later adds
a verdict to each line. The file is UTF-8 text with LF line endings, one
entry per line::

   DD-MM-YYYY HH:MM:SS<TAB><TAGHEX>[<TAB><VERDICT>]

where the verdict is ``Y`` (found and authorized), ``N`` (found, not
authorized) or ``NF`` (not found in the registry).

Appends are plain appends; annotations rewrite the file into a temporary
and rename it over the log, so a reader always sees whole lines. Writers
take an exclusive lock on ``<log>.lock`` first; readers never lock.

Example
-------

.. code-block:: python

   from datetime import datetime
   from rfidwsn import accesslog

   log = accesslog.AccessLog('rfid.log')
   index = log.append_detection(datetime(2010, 7, 15, 14, 3, 9), 'AABBCCDD')
   for index, entry in log.scan_unchecked():
      log.annotate_verdict(index, accesslog.GRANTED)
"""

import fcntl
import logging
import os
import re
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Optional

from rfidwsn import framing

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = '%d-%m-%Y %H:%M:%S'

GRANTED = 'Y'
DENIED = 'N'
NOT_FOUND = 'NF'
VERDICTS = (GRANTED, DENIED, NOT_FOUND)

re_timestamp = re.compile(r'^\d{2}-\d{2}-\d{4} \d{2}:\d{2}:\d{2}$')


class AccessLogException(Exception):
    pass


class StorageError(AccessLogException):
    pass


class InvalidTag(StorageError):
    pass


class ParseError(AccessLogException):
    def __init__(self, line, strerror):
        AccessLogException.__init__(self, line, strerror)
        self.line = line
        self.strerror = strerror

    def __str__(self):
        return 'line %s: %s' % (self.line, self.strerror)


class AlreadyVerified(AccessLogException):
    pass


class NoSuchEntry(AccessLogException):
    pass


def format_timestamp(t):
    return t.strftime(TIMESTAMP_FORMAT)


@dataclass(frozen=True)
class LogEntry(object):
    timestamp: datetime
    tag_hex: str
    verdict: Optional[str] = None

    def __post_init__(self):
        if not framing.re_tag.match(self.tag_hex):
            raise InvalidTag('tag must be 8 or 14 uppercase hex characters, got %r'
                             % self.tag_hex)
        if self.verdict is not None and self.verdict not in VERDICTS:
            raise ValueError('verdict must be one of %s, got %r'
                             % ('/'.join(VERDICTS), self.verdict))

    @property
    def verified(self):
        return self.verdict is not None

    def render(self):
        fields = [format_timestamp(self.timestamp), self.tag_hex]
        if self.verdict is not None:
            fields.append(self.verdict)
        return '\t'.join(fields) + '\n'


def parse_line(line, number):
    fields = line.split('\t')
    if len(fields) not in (2, 3):
        raise ParseError(number, 'expected 2 or 3 tab separated fields, got %d' % len(fields))
    if not re_timestamp.match(fields[0]):
        raise ParseError(number, 'bad timestamp %r' % fields[0])
    try:
        timestamp = datetime.strptime(fields[0], TIMESTAMP_FORMAT)
    except ValueError:
        raise ParseError(number, 'bad timestamp %r' % fields[0])
    verdict = fields[2] if len(fields) == 3 else None
    if verdict is not None and verdict not in VERDICTS:
        raise ParseError(number, 'bad verdict %r' % verdict)
    try:
        return LogEntry(timestamp, fields[1], verdict)
    except InvalidTag as e:
        raise ParseError(number, str(e))


def parse(text):
    """Parse a whole log; the inverse of render()"""
    if not text:
        return []
    lines = text.split('\n')
    if lines[-1] != '':
        raise ParseError(len(lines), 'unterminated line')
    return [parse_line(line, number) for number, line in enumerate(lines[:-1], 1)]


def render(entries):
    return ''.join(entry.render() for entry in entries)


def atomic_write(filename, text):
    """Replace filename with text through a temporary file and a rename"""
    directory = os.path.dirname(os.path.abspath(filename))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.%s.' % os.path.basename(filename))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, filename)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class AccessLog(object):
    """
    The detection log file. One appender and one annotator may work on the
    same file at a time, from any process; readers may come and go freely.
    """

    def __init__(self, filename):
        self.filename = filename
        self.lock_filename = filename + '.lock'
        self._count = None

    @contextmanager
    def _locked(self):
        with open(self.lock_filename, 'a') as lock:
            fcntl.flock(lock.fileno(), fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(lock.fileno(), fcntl.LOCK_UN)

    def read(self):
        """The complete lines of the log; a partly written last line is left out"""
        try:
            with open(self.filename, encoding='utf-8', newline='') as f:
                text = f.read()
        except FileNotFoundError:
            return ''
        if text and not text.endswith('\n'):
            logger.debug('ignoring unterminated tail of %s', self.filename)
            text = text[:text.rfind('\n') + 1]
        return text

    def entries(self):
        return parse(self.read())

    def __len__(self):
        return self.read().count('\n')

    def _drop_torn_tail(self):
        # an interrupted append leaves an unterminated last line
        try:
            f = open(self.filename, 'r+b')
        except FileNotFoundError:
            return
        with f:
            data = f.read()
            if data and not data.endswith(b'\n'):
                logger.warning('dropping unterminated tail of %s', self.filename)
                f.truncate(data.rfind(b'\n') + 1)

    def append_detection(self, t, tag):
        """Append a detection of tag at t; returns the 0-based entry index"""
        tag_hex = tag.hex if isinstance(tag, framing.TagId) else str(tag).upper()
        try:
            line = LogEntry(t.replace(microsecond=0), tag_hex).render()
        except InvalidTag as e:
            raise InvalidTag('cannot log detection: %s' % e)
        try:
            with self._locked():
                self._drop_torn_tail()
                if self._count is None:
                    self._count = len(self)
                with open(self.filename, 'a', encoding='utf-8', newline='') as f:
                    f.write(line)
                    f.flush()
                index = self._count
                self._count += 1
        except OSError as e:
            raise StorageError('cannot append to %s: %s' % (self.filename, e))
        logger.debug('logged %s as entry %d', tag_hex, index)
        return index

    def scan_unchecked(self):
        """(index, entry) for every entry still without a verdict, in order"""
        return [(i, entry) for i, entry in enumerate(self.entries()) if not entry.verified]

    def annotate_verdict(self, index, verdict):
        """Give entry index its verdict; returns the updated entry"""
        return self.annotate_many([(index, verdict)])[0]

    def annotate_many(self, annotations):
        """
        Apply several (index, verdict) annotations in one atomic rewrite.
        Nothing is written unless every annotation is valid.
        """
        annotations = list(annotations)
        for index, verdict in annotations:
            if verdict not in VERDICTS:
                raise ValueError('verdict must be one of %s, got %r'
                                 % ('/'.join(VERDICTS), verdict))
        if not annotations:
            return []

        with self._locked():
            entries = parse(self.read())
            seen = set()
            updated = []
            for index, verdict in annotations:
                if not 0 <= index < len(entries):
                    raise NoSuchEntry('no entry %r in a log of %d' % (index, len(entries)))
                if entries[index].verified or index in seen:
                    raise AlreadyVerified('entry %d already has a verdict' % index)
                seen.add(index)
                entries[index] = replace(entries[index], verdict=verdict)
                updated.append(entries[index])
            try:
                atomic_write(self.filename, render(entries))
            except OSError as e:
                raise StorageError('cannot rewrite %s: %s' % (self.filename, e))
        return updated
