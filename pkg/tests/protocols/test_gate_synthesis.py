"""
Tests for CNOT synthesis on the six-spin architecture.
"""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pytest

from spinnet.common.errors import PreconditionError
from spinnet.protocols.gate_synthesis import (
    REFERENCE_PARAMETERS,
    REFERENCE_TOLERANCE,
    GateParameters,
    GateSearchProblem,
    LogicalEncoding,
    cnot_cost,
    initial_population,
    optimize_cnot,
    phase_aligned_cost,
    resolve_sign_convention,
    search_bounds,
    verify_cnot,
)
from spinnet.resources.parameters import CNOT_REFERENCE_COST, CNOT_REFERENCE_OVERLAP

IDLE = GateParameters(J=1.0, h=(0.0,) * 6, t=0.0)
# The reference optimum realizes the CNOT up to a global phase close to pi.
REFERENCE_LITERAL_COST = 1.9887


def random_parameters(rng: np.random.Generator) -> GateParameters:
    low = [-50.0] + [-200.0] * 6 + [0.0]
    high = [50.0] + [200.0] * 6 + [5.0]
    return GateParameters.from_vector(rng.uniform(low, high))


class TestProblem(unittest.TestCase):
    """Test cases for the encoding and the sector operators."""

    def test_encoding(self):
        """Test |0>_L = |01> and |1>_L = |10>."""
        encoding = LogicalEncoding()
        self.assertEqual(encoding.encode("010"), "011001")
        self.assertEqual(encoding.encode("110"), "101001")
        with self.assertRaises(PreconditionError):
            encoding.encode("012")

    def test_truth_table_rows(self):
        """Test the truth table lives in the 20-state three-excitation sector."""
        problem = GateSearchProblem()
        self.assertEqual(problem.basis.dim, 20)
        self.assertEqual(problem.inputs, ("010101", "011001", "100101", "101001"))
        self.assertEqual(problem.outputs, ("010101", "011010", "100110", "101001"))
        self.assertEqual(len(set(problem.input_rows.tolist())), 4)

    def test_unitary(self):
        """Test the sector propagator is unitary."""
        u = GateSearchProblem().unitary(REFERENCE_PARAMETERS)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(20), atol=1e-9)

    def test_invalid_sign(self):
        """Test coupling signs other than +1 and -1."""
        with self.assertRaises(PreconditionError):
            GateSearchProblem(coupling_sign=2)

    def test_parameter_vectors(self):
        """Test the parameter vector layout (J, h1..h6, t)."""
        vector = REFERENCE_PARAMETERS.to_vector()
        self.assertEqual(vector.shape, (8,))
        self.assertEqual(vector[0], REFERENCE_PARAMETERS.J)
        self.assertEqual(vector[-1], REFERENCE_PARAMETERS.t)
        with self.assertRaises(PreconditionError):
            GateParameters.from_vector(vector[:7])


class TestCost(unittest.TestCase):
    """Test cases for the cost and overlap measures."""

    def test_identity_evolution(self):
        """Test t = 0 leaves the two unchanged rows correct and the others wrong."""
        self.assertAlmostEqual(cnot_cost(IDLE), 0.5)
        self.assertAlmostEqual(verify_cnot(IDLE), 0.5)

    def test_cost_bounds(self):
        """Test cost and overlap stay within their ranges."""
        for params in (REFERENCE_PARAMETERS, IDLE):
            cost = cnot_cost(params)
            self.assertGreaterEqual(cost, 0.0)
            self.assertLessEqual(cost, 2.0)
            self.assertLessEqual(verify_cnot(params), 1.0)

    def test_sign_conventions_related(self):
        """Test negating the fields maps one sign convention onto the other."""
        params = GateParameters(J=1.3, h=(0.2, -0.5, 0.9, 0.0, 1.1, -0.7), t=2.5)
        flipped = GateParameters(J=params.J, h=tuple(-x for x in params.h), t=params.t)
        plus = GateSearchProblem(coupling_sign=1)
        minus = GateSearchProblem(coupling_sign=-1)
        self.assertAlmostEqual(verify_cnot(params, plus), verify_cnot(flipped, minus))
        self.assertAlmostEqual(cnot_cost(params, plus), cnot_cost(flipped, minus))

    def test_reference_optimum(self):
        """Test the reference optimum is a CNOT up to a global phase near pi."""
        resolution = resolve_sign_convention()
        self.assertIn(resolution.sign, (1, -1))
        self.assertEqual(set(resolution.costs), {1, -1})
        self.assertTrue(resolution.matches_reference)
        tolerance = REFERENCE_TOLERANCE
        self.assertAlmostEqual(resolution.phase_aligned_cost, CNOT_REFERENCE_COST, delta=tolerance)
        self.assertAlmostEqual(resolution.overlap, CNOT_REFERENCE_OVERLAP, delta=tolerance)
        for sign in (1, -1):
            self.assertAlmostEqual(resolution.costs[sign], REFERENCE_LITERAL_COST, delta=tolerance)

    def test_reference_overlaps_share_phase(self):
        """Test the four truth-table overlaps all sit close to -1."""
        diagonal = np.diag(GateSearchProblem().overlaps(REFERENCE_PARAMETERS))
        np.testing.assert_allclose(diagonal.real, -1.0, atol=0.06)
        self.assertAlmostEqual(
            phase_aligned_cost(REFERENCE_PARAMETERS), 1.0 - abs(diagonal.sum()) / 4, places=12
        )

    def test_phase_aligned_below_literal(self):
        """Test removing the global phase never raises the cost."""
        rng = np.random.default_rng(17)
        self.assertAlmostEqual(phase_aligned_cost(IDLE), 0.5)
        for _ in range(20):
            params = random_parameters(rng)
            aligned = phase_aligned_cost(params)
            self.assertGreaterEqual(aligned, 0.0)
            self.assertLessEqual(aligned, cnot_cost(params) + 1e-12)

    def test_uniform_field_shift(self):
        """Test adding one offset to all six fields leaves cost and overlap unchanged."""
        rng = np.random.default_rng(5)
        for params in (REFERENCE_PARAMETERS, random_parameters(rng), random_parameters(rng)):
            for offset in (37.5, -410.0):
                fields = tuple(x + offset for x in params.h)
                shifted = GateParameters(J=params.J, h=fields, t=params.t)
                self.assertAlmostEqual(cnot_cost(shifted), cnot_cost(params), places=9)
                self.assertAlmostEqual(
                    phase_aligned_cost(shifted), phase_aligned_cost(params), places=9
                )
                self.assertAlmostEqual(verify_cnot(shifted), verify_cnot(params), places=9)


class TestOptimizer(unittest.TestCase):
    """Test cases for the differential-evolution search."""

    def test_initial_population(self):
        """Test seeded uniform samples inside the bounds."""
        bounds = np.array(search_bounds())
        init = initial_population(seed=3, population=8)
        self.assertEqual(init.shape, (8, 8))
        self.assertTrue(np.all(init >= bounds[:, 0]) and np.all(init <= bounds[:, 1]))
        np.testing.assert_array_equal(init, initial_population(seed=3, population=8))
        seeded = initial_population(seed=3, population=8, include_reference=True)
        np.testing.assert_allclose(seeded[0], REFERENCE_PARAMETERS.to_vector())

    def test_single_generation_budget(self):
        """Test a budget of one population evaluates the initial samples only."""
        result = optimize_cnot(seed=1, budget=8, population=8, include_reference=True)
        self.assertEqual(result.evaluations, 8)
        self.assertLessEqual(result.cost, cnot_cost(REFERENCE_PARAMETERS) + 1e-12)
        self.assertEqual(result.history, [result.cost])

    def test_deterministic_and_monotone(self):
        """Test equal seeds give equal runs and the best cost never rises."""
        first = optimize_cnot(seed=5, budget=40, population=8)
        second = optimize_cnot(seed=5, budget=40, population=8, threads=2)
        self.assertEqual(first.evaluations, 40)
        self.assertAlmostEqual(first.cost, second.cost, places=12)
        self.assertTrue(all(b <= a + 1e-15 for a, b in zip(first.history, first.history[1:])))
        self.assertAlmostEqual(cnot_cost(first.params), first.cost, places=10)

    @pytest.mark.slow
    def test_restarts_beat_initial_samples(self):
        """Test full-length searches end no worse than their best initial sample."""
        for seed in (0, 1):
            init = initial_population(seed, population=16)
            start = min(cnot_cost(GateParameters.from_vector(v)) for v in init)
            result = optimize_cnot(seed=seed, budget=16 * 200, population=16, threads=2)
            self.assertLessEqual(len(result.history), 199)
            self.assertLessEqual(result.cost, start)

    @pytest.mark.slow
    def test_restarts_reach_low_cost(self):
        """Test ten restarts of 2e4 evaluations find a gate with cost below 0.05."""
        best = min(
            optimize_cnot(seed=seed, budget=20000, threads=2, objective="phase_aligned").cost
            for seed in range(10)
        )
        self.assertLess(best, 0.05)

    def test_phase_aligned_objective(self):
        """Test the seeded reference optimum scores its phase-aligned cost."""
        result = optimize_cnot(
            seed=1, budget=8, population=8, include_reference=True, objective="phase_aligned"
        )
        self.assertEqual(result.objective, "phase_aligned")
        self.assertEqual(result.to_payload()["objective"], "phase_aligned")
        self.assertLessEqual(result.cost, phase_aligned_cost(REFERENCE_PARAMETERS) + 1e-12)
        self.assertLess(result.cost, CNOT_REFERENCE_COST + REFERENCE_TOLERANCE)
        self.assertAlmostEqual(phase_aligned_cost(result.params), result.cost, places=10)

    def test_budget_below_population(self):
        """Test budgets smaller than one population."""
        with self.assertRaises(PreconditionError):
            optimize_cnot(seed=1, budget=4, population=8)
        with self.assertRaises(PreconditionError):
            optimize_cnot(seed=1, budget=8, population=8, objective="fidelity")

    def test_artifact(self):
        """Test the run record written to disk."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            result = optimize_cnot(seed=2, budget=8, population=8, artifact=path)
            document = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(document["seed"], 2)
        self.assertAlmostEqual(document["cost"], result.cost)
        self.assertEqual(len(document["bounds"]), 8)


if __name__ == "__main__":
    unittest.main()
