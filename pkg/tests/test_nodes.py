import io
import os
import tempfile
from dataclasses import replace
from datetime import datetime
from unittest import TestCase

from rfidwsn import accesslog, network, nodes, reader
from rfidwsn.network import BRIDGE_ADDR, PC_ADDR, POLLING_ADDR, RFID_ADDR

TAG = 'AABBCCDD'


class SimulationTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.log = accesslog.AccessLog(os.path.join(self._tmp.name, 'rfid.log'))

    def tearDown(self):
        self._tmp.cleanup()


class TestDetectionCount(SimulationTestCase):
    def test_always_present(self):
        config = network.SimConfig(poll_delay=2, runtime=60)
        report = nodes.run(config, reader.FieldSchedule.always(TAG, 60), self.log)
        self.assertEqual((report.polls, report.detections, report.losses), (30, 30, 0))
        entries = self.log.entries()
        self.assertEqual(len(entries), 30)
        self.assertEqual(set(e.tag_hex for e in entries), set([TAG]))
        self.assertFalse(any(e.verified for e in entries))
        self.assertEqual(str(report), 'polls=30 detections=30 no_tag=0 losses=0 dropped=0')

    def test_grid(self):
        for poll_delay in (2, 5):
            for runtime in (30, 60, 300):
                config = network.SimConfig(poll_delay=poll_delay, runtime=runtime)
                report = nodes.run(config, reader.FieldSchedule.always(TAG, runtime))
                self.assertEqual(report.detections, runtime // poll_delay)

    def test_partial_interval(self):
        config = network.SimConfig(poll_delay=2, runtime=7)
        report = nodes.run(config, reader.FieldSchedule.always(TAG, 7))
        self.assertEqual(report.polls, 3)

    def test_short_run(self):
        config = network.SimConfig(poll_delay=5, runtime=30)
        self.assertEqual(nodes.run(config, reader.FieldSchedule.always(TAG, 30)).detections, 6)

    def test_never_in_field(self):
        config = network.SimConfig(poll_delay=2, runtime=60)
        report = nodes.run(config, reader.FieldSchedule(), self.log)
        self.assertEqual((report.polls, report.detections, report.no_tag), (30, 0, 30))
        self.assertEqual(len(self.log), 0)

    def test_field_fidelity(self):
        schedule = reader.FieldSchedule.parse('AABBCCDD 0 10\n11223344 20 31\n')
        config = network.SimConfig(poll_delay=2, runtime=40)
        nodes.run(config, schedule, self.log)
        times = [(e.timestamp - network.DEFAULT_START_TIME).total_seconds()
                 for e in self.log.entries()]
        self.assertEqual(times, [0, 2, 4, 6, 8, 20, 22, 24, 26, 28, 30])
        self.assertEqual([e.tag_hex for e in self.log.entries()],
                         [TAG] * 5 + ['11223344'] * 6)

    def test_timestamps(self):
        config = network.SimConfig(poll_delay=2, runtime=4, start_time=datetime(2010, 7, 15, 14, 3, 9))
        nodes.run(config, reader.FieldSchedule.always(TAG, 4), self.log)
        with open(self.log.filename) as f:
            self.assertEqual(f.read(), '15-07-2010 14:03:09\tAABBCCDD\n'
                                       '15-07-2010 14:03:11\tAABBCCDD\n')


class TestMessageFlow(SimulationTestCase):
    def test_select_tag_payload(self):
        sim = nodes.Simulation(network.SimConfig(poll_delay=2, runtime=6),
                               reader.FieldSchedule.always(TAG, 6))
        sim.run()
        self.assertEqual(sim.pc.frames_sent, [b'\x42\x01\x83\x84'] * 3)

    def test_hop_order(self):
        config = network.SimConfig(poll_delay=2, runtime=2, hop_latency=0.1)
        sim = nodes.Simulation(config, reader.FieldSchedule.always(TAG, 2))
        sim.run()
        self.assertEqual([(e.src, e.dest, e.function) for e in sim.network.trace],
                         [(POLLING_ADDR, BRIDGE_ADDR, 'ping'),
                          (BRIDGE_ADDR, PC_ADDR, 'selectTag'),
                          (PC_ADDR, RFID_ADDR, 'sendReceiveCommand'),
                          (RFID_ADDR, PC_ADDR, 'receiveResult')])
        times = [round(e.t, 6) for e in sim.network.trace]
        self.assertEqual(times, [0.1, 0.2, 0.3, 0.4])

    def test_causality(self):
        config = network.SimConfig(poll_delay=2, runtime=60, hop_latency=0.2,
                                   jitter_max=0.3, seed=9)
        sim = nodes.Simulation(config, reader.FieldSchedule.always(TAG, 60))
        sim.run()
        times = [e.t for e in sim.network.trace]
        self.assertEqual(times, sorted(times))
        for event in sim.network.trace:
            self.assertTrue(event.t < 60)

    def test_misconfigured_callback(self):
        """ a PC asking for an answer at a function it does not have
        loses every detection """
        sim = nodes.Simulation(network.SimConfig(poll_delay=2, runtime=20),
                               reader.FieldSchedule.always(TAG, 20), log=self.log)
        sim.pc.callback = 'receiveResults'
        report = sim.run()
        self.assertEqual(report.detections, 0)
        self.assertEqual(report.dropped, 10)
        self.assertEqual(report.losses, 10)
        self.assertEqual(len(self.log), 0)

    def test_late_answers_are_losses(self):
        config = network.SimConfig(poll_delay=5, runtime=30, hop_latency=1.3)
        report = nodes.run(config, reader.FieldSchedule.always(TAG, 30))
        self.assertEqual((report.polls, report.detections, report.losses), (6, 5, 1))

    def test_deterministic(self):
        config = network.SimConfig(poll_delay=2, runtime=60, hop_latency=0.4,
                                   jitter_max=0.5, seed=3)
        schedule = reader.FieldSchedule.always(TAG, 60)
        runs = []
        for _ in range(2):
            sim = nodes.Simulation(config, schedule)
            report = sim.run()
            runs.append((report, [str(e) for e in sim.network.trace]))
        self.assertEqual(runs[0], runs[1])
        sim = nodes.Simulation(replace(config, seed=4), schedule)
        sim.run()
        self.assertNotEqual(runs[0][1], [str(e) for e in sim.network.trace])

    def test_echo(self):
        echo = io.StringIO()
        config = network.SimConfig(poll_delay=2, runtime=2)
        nodes.run(config, reader.FieldSchedule.always(TAG, 2), echo=echo)
        self.assertEqual(echo.getvalue(), '15-07-2010 14:00:00 00000000068302AABBCCDD99\n')

    def test_strict_scan(self):
        config = network.SimConfig(poll_delay=2, runtime=10, legacy_scan=False)
        report = nodes.run(config, reader.FieldSchedule.parse('AABBCCDD 0 5\n'))
        self.assertEqual((report.detections, report.no_tag), (3, 2))


class TestPCNode(SimulationTestCase):
    def setUp(self):
        SimulationTestCase.setUp(self)
        self.net = network.Network()
        self.pc = nodes.PCNode(self.net, log=self.log)
        self.pc.current_cmd = 'selectTag'

    def test_empty_answer(self):
        self.assertFalse(self.pc.receive_result('0' * 24))
        self.assertFalse(self.pc.receive_result(''))
        self.assertEqual(self.pc.empty, 2)

    def test_bad_answer(self):
        self.assertFalse(self.pc.receive_result('0000068302AABBCCDD98'))
        self.assertEqual(self.pc.errors, 1)
        self.assertEqual(len(self.log), 0)

    def test_other_command(self):
        self.pc.current_cmd = 'firmware'
        self.assertFalse(self.pc.receive_result('0000068302AABBCCDD99'))
        self.assertEqual(self.pc.detections, 0)

    def test_detection(self):
        self.assertTrue(self.pc.receive_result('0000068302AABBCCDD99'))
        self.assertEqual([e.tag_hex for e in self.log.entries()], [TAG])
