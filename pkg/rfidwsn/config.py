#!/usr/bin/env python
# vim: set expandtab:
"""
.. module:: config
   :synopsis: Parse rfidwsn settings files and resolve effective settings.

This module parses the settings file shared by the rfidwsn commands and
resolves each setting from, in order of precedence, the environment, the
settings file and the built-in defaults. Command-line flags are applied on
top by :mod:`rfidwsn.cli`.

A settings file looks like this::

   ; lab bench setup
   [network]
   poll_delay = 5
   hop_latency = 0.2

   [reader]
   slave_addr = 0x42

   [paths]
   log = /var/lib/rfidwsn/rfid.log

Example
----------

.. code-block:: python

   import rfidwsn.config
   import sys

   try:
      settings = rfidwsn.config.Settings.load('rfidwsn.conf')
   except rfidwsn.config.ParseError as e:
      print("Parse Error line: %s: %s" % (e.line, e.strerror))
      sys.exit(1)

   print(settings.get_float('network', 'poll_delay'))

"""

import os


class ConfigException(Exception):
    pass


class ParseError(ConfigException):
    def __init__(self, line, strerror):
        ConfigException.__init__(self, line, strerror)
        self.line = line
        self.strerror = strerror

    def __str__(self):
        return 'line %s: %s' % (self.line, self.strerror)


class ConfigInvalid(ConfigException):
    """A setting or parameter is outside its allowed range."""
    pass


DEFAULTS = {
    'network': {
        'poll_delay': '2',
        'runtime': '60',
        'hop_latency': '0',
        'jitter_max': '0',
        'seed': '0',
        'polling_address': '00:C0:DE',
    },
    'reader': {
        'slave_addr': '0x42',
        'frame_size': '12',
        'no_tag_status': '0x4E',
        'tag_type': '0x02',
    },
    'validator': {
        'interval': '2',
        'duration': '60',
    },
    'paths': {
        'log': 'rfid.log',
        'registry': 'tags.tsv',
    },
}

# settings that may be overridden from the environment
ENVIRONMENT = {
    ('paths', 'log'): 'RFIDWSN_LOG',
    ('paths', 'registry'): 'RFIDWSN_REGISTRY',
}
CONFIG_ENV = 'RFIDWSN_CONFIG'


def strip_comment(text):
    """Return text without its ';' comment, stripped"""
    return text.split(';', 1)[0].strip()


class Section(object):
    """One [name] block; a name may be assigned more than once."""

    def __init__(self, name, number):
        self.name = name
        self.number = number
        self.assignments = []

    def __repr__(self):
        return '<Section [%s] line %d>' % (self.name, self.number)

    def assign(self, name, value, number):
        self.assignments.append((name, value, number))

    def get(self, name, default=None):
        # last assignment wins
        for key, value, _ in reversed(self.assignments):
            if key == name:
                return value
        return default


class Config(object):
    """A parsed settings file; sections keep file order."""

    def __init__(self, filename):
        self.filename = filename
        self.sections = []
        with open(self.filename, encoding='utf-8') as f:
            self.parse(f)

    def parse(self, lines):
        section = None
        for number, raw in enumerate(lines, 1):
            line = strip_comment(raw)
            if not line:
                continue
            if line.startswith('['):
                if not line.endswith(']'):
                    raise ParseError(number, "Missing ']' in section definition")
                section = Section(line[1:-1].strip(), number)
                self.sections.append(section)
                continue
            if '=' not in line:
                if line.endswith(']'):
                    raise ParseError(number, "Section name missing '['")
                raise ParseError(number, "Setting must be in name = value pairs")
            if section is None:
                raise ParseError(number, "Setting outside of any section")
            name, value = (part.strip() for part in line.split('=', 1))
            if not name:
                raise ParseError(number, "Setting name is empty")
            section.assign(name, value, number)

    def get(self, section, name, default=None):
        """Return the value of name in section, or default"""
        value = default
        for block in self.sections:
            if block.name == section:
                value = block.get(name, value)
        return value


class Settings(object):
    """
    Effective settings: environment, then settings file, then defaults.
    """

    def __init__(self, config=None, environ=None):
        self.config = config
        self.environ = os.environ if environ is None else environ

    @classmethod
    def load(cls, filename=None, environ=None):
        """
        Load settings from filename, or from the file named by
        RFIDWSN_CONFIG. No file at all means built-in defaults only.
        """
        environ = os.environ if environ is None else environ
        if filename is None:
            filename = environ.get(CONFIG_ENV) or None
        if filename is None:
            return cls(None, environ)
        if not os.path.isfile(filename):
            raise ConfigInvalid('settings file not found: %s' % filename)
        return cls(Config(filename), environ)

    def get(self, section, name):
        env_name = ENVIRONMENT.get((section, name))
        if env_name and self.environ.get(env_name):
            return self.environ[env_name]
        default = DEFAULTS.get(section, {}).get(name)
        if self.config is not None:
            return self.config.get(section, name, default)
        return default

    def get_float(self, section, name):
        value = self.get(section, name)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigInvalid('%s.%s is not a number: %r' % (section, name, value))

    def get_int(self, section, name):
        value = self.get(section, name)
        try:
            return int(value, 0)
        except (TypeError, ValueError):
            raise ConfigInvalid('%s.%s is not an integer: %r' % (section, name, value))
