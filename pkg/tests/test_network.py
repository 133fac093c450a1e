from unittest import TestCase

from rfidwsn import network
from rfidwsn.config import ConfigInvalid
from rfidwsn.network import BRIDGE_ADDR, PC_ADDR, POLLING_ADDR, RFID_ADDR


class Recorder(object):
    def __init__(self, net, name):
        self.net = net
        self.name = name
        self.calls = []

    def __call__(self, *args):
        self.calls.append((self.net.now, self.name, args))
        return '%s-result' % self.name


class TestAddresses(TestCase):
    def test_parse(self):
        self.assertEqual(network.NodeAddress.parse('00:c0:de'), POLLING_ADDR)
        self.assertEqual(str(BRIDGE_ADDR), '00:14:62')
        self.assertEqual(str(RFID_ADDR), '00:55:4B')

    def test_bad(self):
        for text in ('00:C0', '00:C0:DE:01', 'GG:00:00', '0:C0:DE', ''):
            self.assertRaises(ValueError, network.NodeAddress.parse, text)
        self.assertRaises(ValueError, network.NodeAddress, b'\x00\x01')


class TestRegistration(TestCase):
    def test_duplicate(self):
        net = network.Network()
        net.register_node(PC_ADDR, {})
        self.assertRaises(network.DuplicateAddress, net.register_node, PC_ADDR, {})

    def test_unregister(self):
        net = network.Network()
        registration = net.register_node(PC_ADDR, {})
        self.assertTrue(net.is_registered(PC_ADDR))
        registration.unregister()
        self.assertFalse(net.is_registered(PC_ADDR))
        net.register_node(PC_ADDR, {})

    def test_unknown_address(self):
        net = network.Network()
        self.assertRaises(network.UnknownAddress, net.rpc, BRIDGE_ADDR, 'ping')

    def test_unknown_function_is_dropped(self):
        net = network.Network()
        net.register_node(BRIDGE_ADDR, {'ping': Recorder(net, 'ping')})
        net.rpc(BRIDGE_ADDR, 'pong')
        while net.step() is not network.IDLE:
            pass
        self.assertEqual(len(net.dropped), 1)
        message, error = net.dropped[0]
        self.assertEqual(message.function, 'pong')
        self.assertIsInstance(error, network.UnknownFunction)


class TestDelivery(TestCase):
    def test_rpc(self):
        net = network.Network()
        ping = Recorder(net, 'ping')
        net.register_node(BRIDGE_ADDR, {'ping': ping})
        receipt = net.rpc(BRIDGE_ADDR, 'ping', (1, 2), src=POLLING_ADDR)
        self.assertEqual(receipt.deliver_at, 0)
        self.assertEqual(ping.calls, [])
        self.assertEqual(net.step(), 0)
        self.assertEqual(ping.calls, [(0, 'ping', (1, 2))])
        self.assertIs(net.step(), network.IDLE)

    def test_same_time_fifo(self):
        net = network.Network()
        order = []
        net.register_node(BRIDGE_ADDR, {'a': lambda: order.append('a'),
                                        'b': lambda: order.append('b'),
                                        'c': lambda: order.append('c')})
        for name in 'bca':
            net.rpc(BRIDGE_ADDR, name)
        while net.step() is not network.IDLE:
            pass
        self.assertEqual(order, ['b', 'c', 'a'])

    def test_clock_monotonic(self):
        net = network.Network(jitter=network.JitterModel(0.5, 0.3, seed=4))
        net.register_node(BRIDGE_ADDR, {'ping': Recorder(net, 'ping')})
        for _ in range(50):
            net.rpc(BRIDGE_ADDR, 'ping')
        times = []
        while True:
            t = net.step()
            if t is network.IDLE:
                break
            times.append(t)
        self.assertEqual(len(times), 50)
        self.assertEqual(times, sorted(times))
        for t in times:
            self.assertTrue(0.5 <= t <= 0.8)

    def test_rpc_with_callback(self):
        net = network.Network(jitter=network.JitterModel(hop_latency=1.0))
        remote = Recorder(net, 'sendReceiveCommand')
        results = []
        net.register_node(RFID_ADDR, {'sendReceiveCommand': remote})
        net.register_node(PC_ADDR, {'receiveResult': lambda data: results.append((net.now, data))})
        net.rpc_with_callback(RFID_ADDR, 'receiveResult', 'sendReceiveCommand',
                              (0x42, b'\x01\x83\x84', 'selectTag'), src=PC_ADDR)
        net.run(10)
        self.assertEqual(remote.calls, [(1.0, 'sendReceiveCommand', (0x42, b'\x01\x83\x84', 'selectTag'))])
        self.assertEqual(results, [(2.0, 'sendReceiveCommand-result')])
        self.assertEqual([str(event) for event in net.trace],
                         ['t=1.000 00:00:01->00:55:4B sendReceiveCommand',
                          't=2.000 00:55:4B->00:00:01 receiveResult'])

    def test_callback_needs_caller(self):
        net = network.Network()
        net.register_node(RFID_ADDR, {})
        self.assertRaises(ValueError, net.rpc_with_callback, RFID_ADDR, 'cb', 'fn')

    def test_deadline(self):
        net = network.Network(jitter=network.JitterModel(hop_latency=1.0))
        ping = Recorder(net, 'ping')
        net.register_node(BRIDGE_ADDR, {'ping': ping})
        net.deadline = 1.0
        net.rpc(BRIDGE_ADDR, 'ping')
        while net.step() is not network.IDLE:
            pass
        self.assertEqual(ping.calls, [])
        self.assertEqual(net.late, 1)

    def test_run_until(self):
        net = network.Network(jitter=network.JitterModel(hop_latency=2.0))
        ping = Recorder(net, 'ping')
        net.register_node(BRIDGE_ADDR, {'ping': ping})
        net.rpc(BRIDGE_ADDR, 'ping')
        net.run(2.0)
        self.assertEqual(ping.calls, [])
        self.assertEqual(net.now, 2.0)


class TestJitter(TestCase):
    def test_seeded(self):
        a = network.JitterModel(0.1, 0.5, seed=11)
        b = network.JitterModel(0.1, 0.5, seed=11)
        self.assertEqual([a.delay() for _ in range(20)], [b.delay() for _ in range(20)])

    def test_zero(self):
        self.assertEqual(network.JitterModel().delay(), 0)


class TestSimConfig(TestCase):
    def test_poll_count(self):
        self.assertEqual(network.poll_count(60, 2), 30)
        self.assertEqual(network.poll_count(7, 2), 3)
        self.assertEqual(network.poll_count(0.3, 0.1), 3)
        self.assertRaises(ConfigInvalid, network.poll_count, 60, 0)

    def test_validate(self):
        network.SimConfig().validate()
        for changes in ({'poll_delay': 0}, {'runtime': -1}, {'poll_delay': 5, 'runtime': 4},
                        {'jitter_max': -0.1}, {'slave_addr': 0x43}, {'frame_size': 2},
                        {'realtime_factor': 0}, {'polling_address': PC_ADDR}):
            self.assertRaises(ConfigInvalid, network.SimConfig(**changes).validate)
