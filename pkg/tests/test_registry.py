"""
Tests for the experiment registry.
"""

import unittest
from unittest.mock import MagicMock

from spinnet import registry
from spinnet.experiments.base import BaseExperiment

EXPECTED_EXPERIMENTS = {
    "star",
    "star-time-robustness",
    "chain",
    "chain-bloch",
    "chain-robustness",
    "router4",
    "router5",
    "modular",
    "network",
    "cnot",
    "cnot-optimize",
}


class TestRegistry(unittest.TestCase):
    """Test cases for the experiment registry."""

    def setUp(self):
        """Set up test fixtures before each test method."""
        registry.AVAILABLE_EXPERIMENTS.clear()

    def tearDown(self):
        """Restore the discovered experiments after each test method."""
        registry.AVAILABLE_EXPERIMENTS = {}
        registry.discover_experiments()

    def test_discover_experiments(self):
        """Test that discover_experiments registers every experiment exactly once."""
        registry.discover_experiments()

        self.assertEqual(set(registry.AVAILABLE_EXPERIMENTS), EXPECTED_EXPERIMENTS)
        for name, experiment_class in registry.AVAILABLE_EXPERIMENTS.items():
            self.assertTrue(issubclass(experiment_class, BaseExperiment))
            self.assertEqual(experiment_class.name, name)

    def test_base_is_not_registered(self):
        """Test that the abstract base is skipped."""
        registry.discover_experiments()

        self.assertNotIn(BaseExperiment, registry.AVAILABLE_EXPERIMENTS.values())

    def test_registered_in_defining_module(self):
        """Test each experiment is registered from the module that defines it."""
        registry.discover_experiments()

        for experiment_class in registry.AVAILABLE_EXPERIMENTS.values():
            self.assertTrue(experiment_class.__module__.startswith("spinnet.experiments."))
            self.assertNotEqual(experiment_class.__module__, "spinnet.experiments.base")

    def test_get_experiment_names(self):
        """Test that get_experiment_names returns the registered names."""
        registry.AVAILABLE_EXPERIMENTS = {
            "test1": MagicMock(),
            "test2": MagicMock(),
        }

        self.assertEqual(registry.get_experiment_names(), ["test1", "test2"])

    def test_get_experiment_names_lazy_discovery(self):
        """Test that get_experiment_names discovers experiments when none are registered."""
        names = registry.get_experiment_names()

        self.assertEqual(set(names), EXPECTED_EXPERIMENTS)

    def test_every_experiment_has_help(self):
        """Test that every subcommand carries a help line and a Params model."""
        for experiment_class in registry.get_available_experiments().values():
            self.assertTrue(experiment_class.help)
            self.assertTrue(hasattr(experiment_class.Params, "model_fields"))


if __name__ == "__main__":
    unittest.main()
