"""
Tests for the experiment base class and run configuration.
"""

import argparse
import os
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
from pydantic import ValidationError

from spinnet.common.errors import ConfigurationError
from spinnet.experiments.base import (
    DEFAULT_SEED,
    BaseExperiment,
    RunConfig,
    input_qubit,
    parse_scan,
)
from spinnet.experiments.chain import ChainExperiment, ChainRobustnessExperiment
from spinnet.experiments.star import StarExperiment
from tests.experiments.utils.test_experiments import TestExperiments


class TestRunConfig(unittest.TestCase):
    """Test cases for RunConfig."""

    def test_unknown_experiment(self):
        """Test experiments must be registered."""
        with self.assertRaises(ValidationError):
            RunConfig(experiment="teleport")

    def test_threads_positive(self):
        """Test thread counts below one are rejected."""
        with self.assertRaises(ValidationError):
            RunConfig(experiment="chain", threads=0)

    @patch.dict(
        os.environ,
        {"SPINNET_OUTPUT_DIR": "/tmp/spinnet-env", "SPINNET_SEED": "7", "SPINNET_THREADS": "3"},
    )
    def test_from_environment(self):
        """Test environment defaults and explicit overrides."""
        config = RunConfig.from_environment("chain")
        self.assertEqual(config.output, Path("/tmp/spinnet-env"))
        self.assertEqual((config.seed, config.threads), (7, 3))
        self.assertEqual(RunConfig.from_environment("chain", seed=9).seed, 9)

    @patch.dict(os.environ, {}, clear=True)
    def test_from_environment_defaults(self):
        """Test built-in defaults without environment variables."""
        config = RunConfig.from_environment("chain")
        self.assertEqual(config.seed, DEFAULT_SEED)
        self.assertEqual(config.output, Path("results"))


class TestHelpers(unittest.TestCase):
    """Test cases for the parameter helpers."""

    def test_parse_scan(self):
        """Test start:stop:step grids and malformed text."""
        np.testing.assert_allclose(parse_scan("0:1:0.5"), [0.0, 0.5, 1.0])
        for text in ("0:1", "a:b:c", "0:1:0", "1:0:0.1"):
            with self.assertRaises(ConfigurationError, msg=text):
                parse_scan(text)

    def test_input_qubit(self):
        """Test unknown input names become configuration errors."""
        self.assertEqual(input_qubit("plus").shape, (2,))
        with self.assertRaises(ConfigurationError):
            input_qubit("up")


class TestBaseExperiment(TestExperiments):
    """Test cases for BaseExperiment."""

    def test_cannot_instantiate_abstract_base(self):
        """Test BaseExperiment is abstract."""
        with self.assertRaises(TypeError):
            BaseExperiment(RunConfig(experiment="chain"))

    def test_invalid_parameters(self):
        """Test validation failures and unknown keys become ConfigurationError."""
        with self.assertRaises(ConfigurationError):
            self.make_experiment(ChainExperiment, n=2)
        with self.assertRaises(ConfigurationError):
            self.make_experiment(ChainExperiment, shots=10)

    def test_defaults_applied(self):
        """Test unset parameters take their defaults."""
        experiment = self.make_experiment(ChainExperiment)
        self.assertEqual(experiment.params.n, 3)
        self.assertEqual(experiment.params.scan, "0:2:1e-4")

    def test_metadata(self):
        """Test metadata records version, resolved parameters and seed."""
        experiment = self.make_experiment(ChainExperiment, seed=4, threads=2, n=4)
        metadata = experiment.metadata()
        self.assertEqual(metadata["seed"], 4)
        self.assertEqual(metadata["config"]["experiment"], "chain")
        self.assertEqual(metadata["config"]["params"]["n"], 4)
        self.assertEqual(metadata["config"]["threads"], 2)
        self.assertIn("tool_version", metadata)

    def test_add_arguments(self):
        """Test one flag per parameter with None defaults."""
        parser = argparse.ArgumentParser()
        StarExperiment.add_arguments(parser)
        args = parser.parse_args(["--L", "2", "--t", "0.1", "0.2", "--frame", "toggling", "--random-times"])
        self.assertEqual(args.L, 2)
        self.assertEqual(args.t, [0.1, 0.2])
        self.assertEqual(args.frame, "toggling")
        self.assertTrue(args.random_times)
        self.assertIsNone(args.N)
        with self.assertRaises(SystemExit):
            parser.parse_args(["--metric", "trace"])

    def test_literal_list_arguments(self):
        """Test list flags restricted to a set of names."""
        parser = argparse.ArgumentParser()
        ChainRobustnessExperiment.add_arguments(parser)
        self.assertEqual(parser.parse_args(["--parameters", "h1", "J12"]).parameters, ["h1", "J12"])
        with self.assertRaises(SystemExit):
            parser.parse_args(["--parameters", "h3"])


if __name__ == "__main__":
    unittest.main()
