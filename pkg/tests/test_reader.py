import os
import tempfile
from unittest import TestCase

from rfidwsn import framing, reader
from rfidwsn.config import ParseError

TAG = framing.TagId.parse('AABBCCDD')
TAG_RESPONSE = bytes.fromhex('00000000068302AABBCCDD99')
NO_TAG_RESPONSE = bytes.fromhex('000000000000000002834ED3')


class Clock(object):
    def __init__(self, t=0.0):
        self.t = t

    def __call__(self):
        return self.t


def make_device(schedule=None, t=1.0):
    clock = Clock(t)
    if schedule is None:
        schedule = reader.FieldSchedule.always(TAG, 60)
    device = reader.SM130(schedule, clock)
    device.i2c_init(False)
    return device, clock


class TestSchedule(TestCase):
    def test_parse(self):
        schedule = reader.FieldSchedule.parse(
            '# tag   start end\n'
            'aabbccdd 0 10\n'
            '\n'
            '04112233445566 10 20.5   # second visitor\n')
        self.assertEqual(len(schedule), 2)
        self.assertEqual(reader.field_state(schedule, 0), TAG)
        self.assertEqual(reader.field_state(schedule, 9.999), TAG)
        self.assertEqual(reader.field_state(schedule, 10).hex, '04112233445566')
        self.assertIsNone(reader.field_state(schedule, 20.5))

    def test_parse_errors(self):
        for text, line in (('AABBCCDD 0\n', 1),
                           ('AABBCCDD 0 10\nAABBCCDD -1 10\n', 2),
                           ('AABBCC 0 10\n', 1),
                           ('AABBCCDD 5 5\n', 1),
                           ('AABBCCDD 0 ten\n', 1)):
            with self.assertRaises(ParseError) as cm:
                reader.FieldSchedule.parse(text)
            self.assertEqual(cm.exception.line, line)

    def test_overlap(self):
        for text, line in (('AABBCCDD 0 10\n11223344 5 15\n', 2),
                           ('AABBCCDD 0 60\n11223344 30 40\n', 2),
                           ('11223344 30 40\nAABBCCDD 0 60\n', 1),
                           ('AABBCCDD 0 10\nDEADBEEF 20 30\n11223344 25 26\n', 3)):
            with self.assertRaises(ParseError) as cm:
                reader.FieldSchedule.parse(text)
            self.assertEqual(cm.exception.line, line)

    def test_back_to_back_is_not_an_overlap(self):
        schedule = reader.FieldSchedule.parse('11223344 10 20\nAABBCCDD 0 10\n')
        self.assertEqual([str(e.tag) for e in schedule], ['AABBCCDD', '11223344'])
        self.assertEqual(reader.field_state(schedule, 10).hex, '11223344')

    def test_overlapping_entries(self):
        other = framing.TagId.parse('11223344')
        entries = [reader.FieldEntry(TAG, 0, 10), reader.FieldEntry(other, 5, 15)]
        self.assertRaises(reader.OverlapError, reader.FieldSchedule, entries)
        self.assertRaises(reader.OverlapError, reader.field_state, entries, 5)

    def test_empty_schedule(self):
        self.assertIsNone(reader.field_state(reader.FieldSchedule(), 3))

    def test_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            filename = os.path.join(tmp, 'scenario.txt')
            with open(filename, 'w') as f:
                f.write('AABBCCDD 0 86400\n')
            schedule = reader.FieldSchedule.load(filename)
        self.assertEqual(schedule.presence([0, 100, 86400]), [TAG, TAG])

    def test_always(self):
        schedule = reader.FieldSchedule.always('aabbccdd', 30)
        self.assertEqual(reader.field_state(schedule, 29.9), TAG)
        self.assertIsNone(reader.field_state(schedule, 30))


class TestSM130(TestCase):
    def test_select_tag_with_tag(self):
        device, clock = make_device()
        self.assertEqual(device.i2c_write(b'\x42\x01\x83\x84'), 4)
        self.assertEqual(device.get_i2c_result(), reader.I2C_SUCCESS)
        self.assertEqual(device.i2c_read(0x43, 12, 4, True), TAG_RESPONSE)

    def test_select_tag_without_tag(self):
        device, clock = make_device(reader.FieldSchedule())
        device.i2c_write(b'\x42\x01\x83\x84')
        self.assertEqual(device.i2c_read(0x43, 12), NO_TAG_RESPONSE)

    def test_field_read_at_write_time(self):
        device, clock = make_device(reader.FieldSchedule.parse('AABBCCDD 0 2\n'), t=1.5)
        device.i2c_write(b'\x42\x01\x83\x84')
        clock.t = 3.0
        self.assertEqual(device.i2c_read(0x43, 12), TAG_RESPONSE)

    def test_read_consumes_answer(self):
        device, clock = make_device()
        device.i2c_write(b'\x42\x01\x83\x84')
        device.i2c_read(0x43, 12)
        self.assertEqual(device.i2c_read(0x43, 12), bytes(12))

    def test_short_read_truncates(self):
        device, clock = make_device()
        device.i2c_write(b'\x42\x01\x83\x84')
        self.assertEqual(device.i2c_read(0x43, 4), TAG_RESPONSE[4:8])

    def test_second_write_replaces_answer(self):
        device, clock = make_device(reader.FieldSchedule.parse('AABBCCDD 0 2\n'), t=1)
        device.i2c_write(b'\x42\x01\x83\x84')
        clock.t = 5
        device.i2c_write(b'\x42\x01\x83\x84')
        self.assertEqual(device.i2c_read(0x43, 12), NO_TAG_RESPONSE)

    def test_other_commands_have_no_answer(self):
        device, clock = make_device()
        device.i2c_write(b'\x42\x01\x83\x84')
        self.assertEqual(device.i2c_write(b'\x42\x01\x81\x82'), 4)
        self.assertEqual(device.i2c_read(0x43, 12), bytes(12))

    def test_bad_frame_is_taken_but_ignored(self):
        device, clock = make_device()
        device.i2c_write(b'\x42\x01\x83\x84')
        self.assertEqual(device.i2c_write(b'\x42\x01\x83\x85'), 4)
        self.assertEqual(device.get_i2c_result(), reader.I2C_SUCCESS)
        self.assertEqual(device.i2c_read(0x43, 12), bytes(12))

    def test_wrong_write_address(self):
        device, clock = make_device()
        self.assertEqual(device.i2c_write(b'\x40\x01\x83\x84'), 0)
        self.assertEqual(device.get_i2c_result(), reader.I2C_NO_ACK)

    def test_before_init(self):
        device = reader.SM130(reader.FieldSchedule.always(TAG, 60), Clock())
        self.assertEqual(device.get_i2c_result(), reader.I2C_OFF)
        self.assertEqual(device.i2c_write(b'\x42\x01\x83\x84'), 0)
        self.assertEqual(device.i2c_read(0x43, 12), b'')
        device.i2c_init(True)
        self.assertTrue(device.pullups)
        self.assertEqual(device.i2c_write(b'\x42\x01\x83\x84'), 4)

    def test_odd_slave_address(self):
        self.assertRaises(framing.OddWriteAddress, reader.SM130,
                          reader.FieldSchedule(), Clock(), slave_addr=0x43)

    def test_read_address_gating(self):
        """ every read address byte but slave_addr | 1 goes unacknowledged """
        acked = []
        for addr in range(256):
            device, clock = make_device()
            device.i2c_write(b'\x42\x01\x83\x84')
            data = device.i2c_read(addr, 12, 4, True)
            if device.get_i2c_result() == reader.I2C_SUCCESS:
                self.assertEqual(data, TAG_RESPONSE)
                acked.append(addr)
            else:
                self.assertEqual(device.get_i2c_result(), reader.I2C_NO_ACK)
                self.assertEqual(data, b'')
        self.assertEqual(acked, [0x43])

