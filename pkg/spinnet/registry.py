"""
Subcommand lookup for the spinnet CLI.

Every `*Experiment` class defined in a module of `spinnet.experiments` is one
subcommand, keyed by its `name` attribute. Modules are imported on first use,
so `import spinnet` stays free of experiment imports.
"""

from __future__ import annotations

import importlib
import os
import pkgutil
from typing import TYPE_CHECKING

from spinnet.common.logging import get_logger

if TYPE_CHECKING:
    from spinnet.experiments.base import BaseExperiment

logger = get_logger(__name__)

# Subcommand name -> experiment class, filled by discover_experiments
AVAILABLE_EXPERIMENTS: dict[str, type[BaseExperiment]] = {}


def discover_experiments() -> None:
    """Import every experiment module and register the *Experiment classes it defines.

    A class imported into a module from elsewhere is skipped there. Two classes
    with the same `name` keep the one imported last.
    """
    experiments_path = os.path.join(os.path.dirname(__file__), "experiments")

    for _, name, is_pkg in pkgutil.iter_modules([experiments_path]):
        if is_pkg or name == "base":
            continue
        module = importlib.import_module(f"spinnet.experiments.{name}")
        for attr_name in dir(module):
            if not attr_name.endswith("Experiment") or attr_name == "BaseExperiment":
                continue
            experiment_class = getattr(module, attr_name)
            # Imported names are registered by the module that defines them
            if experiment_class.__module__ != module.__name__:
                continue
            AVAILABLE_EXPERIMENTS[experiment_class.name] = experiment_class
            logger.debug("Discovered experiment: %s", experiment_class.name)


def get_available_experiments() -> dict[str, type[BaseExperiment]]:
    """Registered experiments, running discovery on the first call.

    Returns:
        Dict mapping subcommand names to experiment classes
    """
    if not AVAILABLE_EXPERIMENTS:
        logger.debug("No experiments discovered yet, performing lazy discovery")
        discover_experiments()
    return AVAILABLE_EXPERIMENTS


def get_experiment_names() -> list[str]:
    """Subcommand names in registration order.

    Returns:
        List of subcommand names
    """
    return list(get_available_experiments().keys())
