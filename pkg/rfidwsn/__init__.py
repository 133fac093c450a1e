""" rfidwsn - An RFID reader on a wireless sensor network, in simulation.

The rfidwsn project includes several python modules that together reproduce
an RFID access control system built from a polling sensor network and an
SM130 reader on an I2C bus:

framing   - SM130 I2C command and response frames
reader    - an emulated SM130 on a virtual I2C bus, driven by a field schedule
network   - discrete-event virtual network with 3-byte addressing and RPC
nodes     - the Polling, Bridge, PC and RFID node scripts
accesslog - the append-then-annotate detection log
registry  - the tag database (Tag ID, Is Authorized, First Name)
validator - the Database Control loop that annotates the log
metrics   - theoretical vs experimental detection counts
pipeline  - Node Control and Database Control run together
config    - settings file parsing
cli       - the rfidwsn command

"""

__all__ = ['accesslog', 'cli', 'config', 'framing', 'metrics', 'network',
           'nodes', 'pipeline', 'reader', 'registry', 'validator']
__version__ = '0.1.0'
