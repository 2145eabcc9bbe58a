"""
Tests for time evolution and subspace reduction.
"""

import unittest

import numpy as np
from scipy.linalg import expm

from spinnet.common.errors import NumericalError, PreconditionError
from spinnet.core.evolution import (
    Schedule,
    SpectralPropagator,
    SubspaceBasis,
    bits_basis,
    evolve,
    excitation_basis,
    propagator,
    restrict,
    schedule_propagator,
    sector_leakage,
    site_basis,
)
from spinnet.core.hamiltonians import DOUBLE_QUANTUM, XY, build_coupling, build_total
from spinnet.core.spin import KET_1, SpinNetwork, basis_state, site_state


def _random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


class TestPropagator(unittest.TestCase):
    """Test cases for the spectral propagator."""

    def test_matches_matrix_exponential(self):
        """Test exp(-iHt) against scipy's matrix exponential."""
        h = _random_hermitian(8, seed=1)
        for t in (0.1, 1.7, 12.0):
            np.testing.assert_allclose(propagator(h, t), expm(-1j * h * t), atol=1e-10)

    def test_zero_time_is_identity(self):
        """Test t = 0 gives the identity."""
        np.testing.assert_allclose(propagator(_random_hermitian(4, seed=2), 0.0), np.eye(4))

    def test_rejects_non_hermitian(self):
        """Test non-Hermitian generators are rejected."""
        with self.assertRaises(PreconditionError):
            propagator(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex), 1.0)
        with self.assertRaises(PreconditionError):
            propagator(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex), 0.0)

    def test_trajectory_and_amplitudes(self):
        """Test the batched trajectory agrees with single-time evolution."""
        h = _random_hermitian(6, seed=3)
        prop = SpectralPropagator(h)
        state = np.zeros(6, dtype=complex)
        state[0] = 1.0
        target = np.zeros(6, dtype=complex)
        target[4] = 1.0
        times = np.array([0.0, 0.5, 2.0])
        states = prop.trajectory(state, times)
        for k, t in enumerate(times):
            np.testing.assert_allclose(states[k], prop.evolve(state, t), atol=1e-12)
            np.testing.assert_allclose(states[k], expm(-1j * h * t) @ state, atol=1e-10)
        np.testing.assert_allclose(prop.amplitudes(state, target, times), states[:, 4], atol=1e-12)
        with self.assertRaises(PreconditionError):
            prop.trajectory(np.ones(3, dtype=complex), times)

    def test_energy_conserved_within_segment(self):
        """Test <H> stays constant while H is held fixed, segment by segment."""
        network = SpinNetwork(
            n=4,
            edges=((1, 2, 2.0), (2, 3, -1.5), (3, 4, 0.7), (1, 4, 1.1)),
            fields=(3.0, 0.0, -1.0, 2.5),
        )
        rng = np.random.default_rng(9)
        state = rng.normal(size=16) + 1j * rng.normal(size=16)
        state /= np.linalg.norm(state)
        times = np.linspace(0.0, 4.0, 41)
        for kind in (DOUBLE_QUANTUM, XY):
            h = build_total(network, kind)
            states = SpectralPropagator(h).trajectory(state, times)
            energies = np.einsum("ti,ij,tj->t", states.conj(), h, states)
            np.testing.assert_allclose(energies.imag, 0.0, atol=1e-10)
            np.testing.assert_allclose(energies.real, energies[0].real, atol=1e-10)
            state = states[-1]

    def test_unitary_at_long_times(self):
        """Test propagators stay unitary for large t."""
        u = SpectralPropagator(_random_hermitian(5, seed=4) * 100).at(1e3)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-9)


class TestSchedule(unittest.TestCase):
    """Test cases for piecewise-constant schedules."""

    def setUp(self):
        self.h1 = _random_hermitian(4, seed=5)
        self.h2 = _random_hermitian(4, seed=6)

    def test_time_ordering(self):
        """Test later segments multiply on the left."""
        schedule = Schedule().then(self.h1, 0.3).then(self.h2, 0.8)
        expected = expm(-1j * self.h2 * 0.8) @ expm(-1j * self.h1 * 0.3)
        np.testing.assert_allclose(schedule_propagator(schedule), expected, atol=1e-10)
        self.assertAlmostEqual(schedule.total_time, 1.1)
        self.assertEqual(schedule.dim, 4)

    def test_evolve_matches_propagator(self):
        """Test state evolution equals the schedule unitary applied to the state."""
        schedule = Schedule.from_pairs([(self.h1, 0.2), (self.h2, 0.0), (self.h1, 1.0)])
        start = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        np.testing.assert_allclose(
            evolve(schedule, start), schedule_propagator(schedule) @ start, atol=1e-10
        )

    def test_invalid_schedules(self):
        """Test negative durations, mixed dimensions and empty schedules."""
        with self.assertRaises(PreconditionError):
            Schedule.from_pairs([(self.h1, -1.0)])
        with self.assertRaises(PreconditionError):
            Schedule.from_pairs([(self.h1, 1.0), (np.eye(2, dtype=complex), 1.0)])
        with self.assertRaises(PreconditionError):
            schedule_propagator(Schedule())


class TestSubspaces(unittest.TestCase):
    """Test cases for excitation-sector reduction."""

    def setUp(self):
        self.network = SpinNetwork(n=4, edges=((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)), fields=(1, 0, 0, 1))

    def test_bases(self):
        """Test sector dimensions and orderings."""
        self.assertEqual(excitation_basis(6, 3).dim, 20)
        self.assertEqual(excitation_basis(3, [0, 1]).indices, (0, 1, 2, 4))
        self.assertEqual(site_basis(3, vacuum=True).indices, (0, 4, 2, 1))
        self.assertEqual(site_basis(3, sites=[3, 1]).indices, (1, 4))
        self.assertEqual(bits_basis(["01", "10"]).indices, (1, 2))
        with self.assertRaises(PreconditionError):
            SubspaceBasis(4, (1, 1))

    def test_project_embed_leakage(self):
        """Test moving states between the parent space and a subspace."""
        basis = site_basis(2, vacuum=True)
        state = np.array([0.6, 0.0, 0.8, 0.0], dtype=complex)
        np.testing.assert_allclose(basis.embed(basis.project(state)), state)
        self.assertAlmostEqual(basis.leakage(basis_state("11")), 1.0)
        self.assertAlmostEqual(sector_leakage(np.stack([state, basis_state("11")]), basis), 1.0)

    def test_restricted_evolution_matches_full(self):
        """Test single-excitation dynamics agree with the full space."""
        h = build_total(self.network, XY)
        basis = site_basis(4, vacuum=True)
        reduced = SpectralPropagator(restrict(h, basis))
        start = site_state(4, 1, KET_1)
        t = 1.3
        full = SpectralPropagator(h).evolve(start, t)
        np.testing.assert_allclose(basis.embed(reduced.evolve(basis.project(start), t)), full, atol=1e-10)
        self.assertLess(basis.leakage(full), 1e-20)

    def test_restrict_rejects_non_invariant_subspace(self):
        """Test the DQ coupling leaves the single-flip sector."""
        h = build_coupling(self.network, DOUBLE_QUANTUM)
        with self.assertRaises(NumericalError) as context:
            restrict(h, excitation_basis(4, 1))
        self.assertEqual(context.exception.check, "subspace invariance")

    def test_restrict_rejects_wrong_shape(self):
        """Test operator and basis dimensions must match."""
        with self.assertRaises(PreconditionError):
            restrict(np.eye(4, dtype=complex), excitation_basis(3, 1))


if __name__ == "__main__":
    unittest.main()
