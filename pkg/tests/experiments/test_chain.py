"""
Tests for the chain experiments.
"""

import unittest

from spinnet.experiments.chain import (
    ChainBlochExperiment,
    ChainExperiment,
    ChainRobustnessExperiment,
)
from tests.experiments.utils.test_experiments import TestExperiments


class TestChainExperiments(TestExperiments):
    """Test cases for chain transport, Bloch and robustness experiments."""

    def test_transport_csv(self):
        """Test the transport table on a coarse grid."""
        (path,) = self.run_experiment(ChainExperiment, scan="0:1.1:0.01")
        rows = self.assert_csv(path, ["t", "fid_1state", "fid_plusstate"], rows=111)
        self.assertEqual(float(rows[0][1]), 0.0)
        self.assertGreater(max(float(r[1]) for r in rows), 0.99)

    def test_transport_longer_chain(self):
        """Test chains beyond three spins skip the resonance scan."""
        (path,) = self.run_experiment(ChainExperiment, n=5, scan="0:0.5:0.1")
        self.assert_csv(path, ["t", "fid_1state", "fid_plusstate"], rows=6)

    def test_bloch_json(self):
        """Test the Bloch statistics artifact."""
        (path,) = self.run_experiment(ChainBlochExperiment, n_theta=6, n_phi=6)
        self.assertEqual(path.name, "chain-bloch.json")
        document = self.load_json(path)
        self.assertGreater(document["mean"], 0.99)
        self.assertLessEqual(document["min"], document["max"])

    def test_robustness_csv(self):
        """Test one block of rows per perturbed parameter."""
        (path,) = self.run_experiment(
            ChainRobustnessExperiment, parameters=["h2", "J12"], points=3, threads=2
        )
        rows = self.assert_csv(path, ["parameter", "value", "fidelity"], rows=6)
        self.assertEqual([r[0] for r in rows], ["h2"] * 3 + ["J12"] * 3)


if __name__ == "__main__":
    unittest.main()
