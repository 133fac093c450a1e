#!/usr/bin/env python
# vim: set expandtab shiftwidth=4:
"""
.. module:: registry
   :synopsis: The tag database: Tag ID, Is Authorized, First Name.

The registry is a tab separated text file, one record per line, sorted by
tag id::

   AABBCCDD<TAB>Yes<TAB>Bolivar

Tag ids are normalised to uppercase hex wherever they enter. Every change
rewrites the whole file through a temporary and a rename, so readers only
ever see complete snapshots.

Example
-------

.. code-block:: python

   from rfidwsn import registry

   tags = registry.TagRegistry('tags.tsv')
   tags.enroll(registry.TagRecord('aabbccdd', True, 'Bolivar'))
   record = tags.lookup('AABBCCDD')
   if record is not None and record.is_authorized:
      print('%s may enter' % record.first_name)
"""

import logging
import os
from dataclasses import dataclass, replace

from rfidwsn import framing
from rfidwsn.accesslog import atomic_write

logger = logging.getLogger(__name__)

YES = 'Yes'
NO = 'No'


class RegistryException(Exception):
    pass


class RegistryError(RegistryException):
    pass


class DuplicateKey(RegistryError):
    pass


class NotFound(RegistryError):
    pass


class InvalidRecord(RegistryError):
    pass


def _normalize(tag_id):
    try:
        return framing.normalize_tag(str(tag_id))
    except framing.FrameError as e:
        raise InvalidRecord(str(e))


@dataclass(frozen=True)
class TagRecord(object):
    tag_id: str
    is_authorized: bool
    first_name: str

    def __post_init__(self):
        object.__setattr__(self, 'tag_id', _normalize(self.tag_id))
        object.__setattr__(self, 'is_authorized', bool(self.is_authorized))
        if '\t' in self.first_name or '\n' in self.first_name or '\r' in self.first_name:
            raise InvalidRecord('first name may not contain tabs or line breaks: %r'
                                % self.first_name)

    @property
    def authorized_text(self):
        return YES if self.is_authorized else NO

    def render(self):
        return '%s\t%s\t%s\n' % (self.tag_id, self.authorized_text, self.first_name)

    @classmethod
    def parse(cls, line, number=None):
        fields = line.rstrip('\n').split('\t')
        if len(fields) != 3 or fields[1] not in (YES, NO):
            raise InvalidRecord('line %s: expected "TAGID<TAB>Yes|No<TAB>FIRSTNAME"' % number)
        return cls(fields[0], fields[1] == YES, fields[2])


def parse(text):
    return [TagRecord.parse(line, number)
            for number, line in enumerate(text.splitlines(), 1) if line]


def render(records):
    return ''.join(record.render() for record in sorted(records, key=lambda r: r.tag_id))


class TagRegistry(object):
    """
    A file backed table of TagRecords keyed by tag id. A single writer at a
    time; any number of readers. The file is read again whenever it changed
    on disk since the last look.
    """

    def __init__(self, filename):
        self.filename = filename
        self._records = {}
        self._stamp = None
        self.refresh()

    def _file_stamp(self):
        try:
            st = os.stat(self.filename)
        except FileNotFoundError:
            return None
        return (st.st_mtime_ns, st.st_size, st.st_ino)

    def refresh(self):
        """Reload the file if it changed since it was last read"""
        stamp = self._file_stamp()
        if stamp is not None and stamp == self._stamp:
            return
        records = {}
        if stamp is not None:
            with open(self.filename, encoding='utf-8', newline='') as f:
                for record in parse(f.read()):
                    if record.tag_id in records:
                        raise DuplicateKey('%s appears twice in %s'
                                           % (record.tag_id, self.filename))
                    records[record.tag_id] = record
        self._records = records
        self._stamp = stamp

    def _save(self):
        atomic_write(self.filename, render(self._records.values()))
        self._stamp = self._file_stamp()

    def enroll(self, record):
        self.refresh()
        if record.tag_id in self._records:
            raise DuplicateKey('%s is already enrolled' % record.tag_id)
        self._records[record.tag_id] = record
        self._save()
        logger.info('enrolled %s (%s, authorized=%s)',
                    record.tag_id, record.first_name, record.authorized_text)
        return record

    def lookup(self, tag_id):
        """
        The record for tag_id, or None when it is not enrolled. An id that
        is not a tag serial at all is never enrolled either.
        """
        self.refresh()
        try:
            key = _normalize(tag_id)
        except InvalidRecord as e:
            logger.debug('lookup of %r: %s', tag_id, e)
            return None
        return self._records.get(key)

    def set_authorized(self, tag_id, flag):
        self.refresh()
        key = _normalize(tag_id)
        if key not in self._records:
            raise NotFound('%s is not enrolled' % key)
        record = replace(self._records[key], is_authorized=flag)
        if record != self._records[key]:
            self._records[key] = record
            self._save()
            logger.info('%s authorized=%s', key, record.authorized_text)
        return record

    def remove(self, tag_id):
        self.refresh()
        key = _normalize(tag_id)
        if key not in self._records:
            raise NotFound('%s is not enrolled' % key)
        record = self._records.pop(key)
        self._save()
        logger.info('removed %s', key)
        return record

    def list(self):
        """All records, ordered by tag id"""
        self.refresh()
        return [self._records[key] for key in sorted(self._records)]

    def __len__(self):
        return len(self.list())
