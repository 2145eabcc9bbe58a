"""
Tests for composite blocks, barrier schedules and larger topologies.
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from spinnet.common.errors import ConfigurationError, PreconditionError
from spinnet.core.spin import KET_1, KET_PLUS, SpinNetwork
from spinnet.protocols.modular_network import (
    ARBITRARY_DT,
    ARBITRARY_T_MAX,
    DEFAULT_BLOCK_DT,
    WHEEL_DT,
    WHEEL_T_MAX,
    BarrierPhase,
    BarrierSchedule,
    arbitrary_network,
    barrier_leakage_by_factor,
    block_times,
    composite_network,
    default_barrier_schedule,
    first_qualifying_time,
    format_network,
    load_network,
    network_transport_scan,
    parse_network,
    phase_one_leakage,
    simulate_barrier_composite,
    simulate_naive_composite,
    wheel_network,
)
from spinnet.protocols.transport_chain import TransportResult, time_grid
from spinnet.resources.parameters import REFERENCE_H, REFERENCE_J


class TestBarrierSchedule(unittest.TestCase):
    """Test cases for barrier schedules."""

    def test_boundaries(self):
        """Test phase start times and total duration."""
        schedule = BarrierSchedule(
            phases=(BarrierPhase(duration=1.0, site=4, field=5.0), BarrierPhase(duration=0.5))
        )
        self.assertEqual(schedule.total_duration, 1.5)
        np.testing.assert_allclose(schedule.boundaries(), [0.0, 1.0, 1.5])
        self.assertEqual(schedule.with_field(9.0).phases[0].field, 9.0)
        self.assertEqual(schedule.phases[0].field, 5.0)

    def test_validation(self):
        """Test empty schedules and non-positive durations."""
        with self.assertRaises(ValidationError):
            BarrierSchedule(phases=())
        with self.assertRaises(ValidationError):
            BarrierPhase(duration=0.0)

    def test_schedule_must_cover_grid(self):
        """Test times past the end of the schedule are rejected."""
        schedule = BarrierSchedule(phases=(BarrierPhase(duration=0.1, site=4, field=1.0),))
        with self.assertRaises(PreconditionError):
            simulate_barrier_composite(schedule, KET_1, [0.0, 0.2], 1.0, 1.0)

    def test_empty_barrier_matches_naive(self):
        """Test a schedule without barrier fields reproduces the naive evolution."""
        schedule = BarrierSchedule(phases=(BarrierPhase(duration=0.3), BarrierPhase(duration=0.4)))
        grid = np.linspace(0.0, 0.7, 15)
        naive = simulate_naive_composite(2.0, 5.0, KET_PLUS, grid)
        piecewise = simulate_barrier_composite(schedule, KET_PLUS, grid, 2.0, 5.0)
        for site in range(1, 7):
            np.testing.assert_allclose(piecewise.fidelities[site], naive.fidelities[site], atol=1e-10)
        np.testing.assert_allclose(piecewise.populations, naive.populations, atol=1e-10)


class TestComposite(unittest.TestCase):
    """Test cases for the chain plus router composite."""

    @classmethod
    def setUpClass(cls):
        cls.schedule = default_barrier_schedule(REFERENCE_J, REFERENCE_H)

    def test_composite_network(self):
        """Test fields and the shared site 3."""
        network = composite_network(1.0, 2.0)
        self.assertEqual(network.fields, (2.0, 0.0, 2.0, 0.0, -2.0, 2.0))
        self.assertEqual(network.n, 6)
        self.assertIn((3, 4, 1.0), network.edges)

    def test_block_times(self):
        """Test the isolated block times fall in their search windows."""
        chain_time, router_time = block_times(REFERENCE_J, REFERENCE_H, dt=1e-3)
        self.assertTrue(0.5 <= chain_time <= 1.5)
        self.assertTrue(0.0 < router_time <= 1.5)

    def test_default_schedule(self):
        """Test barriers sit on spin 4 then spin 2 with strength 10h."""
        first, second = self.schedule.phases
        self.assertEqual((first.site, second.site), (4, 2))
        self.assertAlmostEqual(first.field, 10 * REFERENCE_H)

    def test_barrier_improves_delivery(self):
        """Test the switched barrier beats naive fusion at spin 6 by at least 0.1."""
        grid = time_grid(self.schedule.total_duration, DEFAULT_BLOCK_DT)
        naive = simulate_naive_composite(REFERENCE_J, REFERENCE_H, KET_1, grid)
        barrier = simulate_barrier_composite(self.schedule, KET_1, grid, REFERENCE_J, REFERENCE_H)
        _, naive_peak = naive.peak()
        _, barrier_peak = barrier.peak()
        self.assertGreaterEqual(barrier_peak, 0.97)
        self.assertGreaterEqual(barrier_peak - naive_peak, 0.1)
        self.assertLess(phase_one_leakage(barrier, self.schedule), 0.05)

    def test_stronger_barrier_leaks_less(self):
        """Test phase-one leakage falls as the barrier grows."""
        leakage = dict(barrier_leakage_by_factor(REFERENCE_J, REFERENCE_H, (5.0, 20.0), dt=1e-3))
        self.assertLess(leakage[20.0], leakage[5.0])
        self.assertLess(leakage[20.0], 0.05)


class TestTopologies(unittest.TestCase):
    """Test cases for wheel and tree networks and transport scans."""

    def test_wheel(self):
        """Test spokes and a closed rim."""
        wheel = wheel_network(4, J=2.0)
        self.assertEqual(wheel.n, 5)
        edges = {frozenset(e[:2]) for e in wheel.edges}
        self.assertEqual(len(edges), 8)
        self.assertIn(frozenset((5, 2)), edges)
        with self.assertRaises(PreconditionError):
            wheel_network(2)

    def test_arbitrary(self):
        """Test the nine-spin tree."""
        tree = arbitrary_network()
        self.assertEqual(tree.n, 9)
        self.assertEqual(len(tree.edges), 8)

    def test_scan_sets_end_fields_only(self):
        """Test transport with fields on the two end sites reaches its target."""
        wheel = wheel_network(4)
        result = network_transport_scan(wheel, 2, 4, 1.0, 1.0, time_grid(20.0, 0.01))
        self.assertEqual(result.fidelities.shape, result.times.shape)
        self.assertAlmostEqual(float(result.fidelities[0]), 0.0)
        with self.assertRaises(PreconditionError):
            network_transport_scan(wheel, 2, 2, 1.0, 1.0, [0.0])
        with self.assertRaises(PreconditionError):
            network_transport_scan(wheel, 1, 9, 1.0, 1.0, [0.0])

    def test_first_qualifying_time(self):
        """Test the earliest time above threshold."""
        result = TransportResult(np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.1, 0.7, 0.85, 0.9]))
        self.assertEqual(first_qualifying_time(result, 0.8), 2.0)
        self.assertIsNone(first_qualifying_time(result, 0.95))

    def test_wheel_and_tree_transport(self):
        """Test the wheel delivers 2 to 5 above 0.8 and the tree qualifies only later."""
        wheel = network_transport_scan(
            wheel_network(6), 2, 5, REFERENCE_H, REFERENCE_J, time_grid(WHEEL_T_MAX, WHEEL_DT)
        )
        wheel_time = first_qualifying_time(wheel)
        self.assertIsNotNone(wheel_time)
        tree = network_transport_scan(
            arbitrary_network(),
            1,
            9,
            REFERENCE_H,
            REFERENCE_J,
            time_grid(ARBITRARY_T_MAX, ARBITRARY_DT),
        )
        tree_time = first_qualifying_time(tree)
        self.assertIsNotNone(tree_time)
        self.assertGreater(tree_time, wheel_time)


class TestNetworkFiles(unittest.TestCase):
    """Test cases for the edge-list network format."""

    def test_parse(self):
        """Test edges, fields, comments and the sites directive."""
        text = """
        # three spins
        1 2 1.5   # first edge
        2 3 2.0
        field 1 10
        sites 4
        """
        network = parse_network(text)
        self.assertEqual(network.n, 4)
        self.assertEqual(network.edges, ((1, 2, 1.5), (2, 3, 2.0)))
        self.assertEqual(network.fields, (10.0, 0.0, 0.0, 0.0))

    def test_format_is_parseable(self):
        """Test written networks read back identically."""
        network = SpinNetwork(n=3, edges=((1, 2, 0.25), (2, 3, 1.0)), fields=(1.0, 0.0, -2.0))
        self.assertEqual(parse_network(format_network(network)), network)

    def test_errors(self):
        """Test malformed lines and invalid graphs."""
        with self.assertRaisesRegex(ConfigurationError, "line 2"):
            parse_network("1 2 1.0\n1 two 1.0\n")
        with self.assertRaises(ConfigurationError):
            parse_network("0 1 1.0\n")
        with self.assertRaises(ConfigurationError):
            parse_network("1 2 1.0\nsites 1\n")
        with self.assertRaises(ConfigurationError):
            parse_network("1 2 1.0\n2 1 3.0\n")

    def test_load(self):
        """Test loading from disk and a missing file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "chain.net"
            path.write_text("1 2 1.0\n", encoding="utf-8")
            self.assertEqual(load_network(path).n, 2)
            with self.assertRaises(ConfigurationError):
                load_network(Path(tmp) / "missing.net")


if __name__ == "__main__":
    unittest.main()
