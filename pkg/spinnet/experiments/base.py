"""
Base experiment for spinnet

This module provides the base class for all experiments and the
resolved run configuration they receive from the CLI.
"""

import argparse
import os
import types
import typing
from abc import ABC, abstractmethod
from collections.abc import Sequence
from pathlib import Path
from typing import Any, ClassVar, Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from spinnet import __version__
from spinnet.common.errors import ConfigurationError, PreconditionError
from spinnet.common.logging import get_logger
from spinnet.common.utils import write_csv, write_json
from spinnet.core.spin import PureState, resolve_qubit
from spinnet.protocols.transport_chain import time_grid

logger = get_logger(__name__)

DEFAULT_OUTPUT_DIR = "results"
DEFAULT_SEED = 12345
DEFAULT_THREADS = 1

InputName = Literal["zero", "one", "plus", "minus"]


class RunConfig(BaseModel):
    """Fully resolved configuration of one CLI run."""

    model_config = ConfigDict(frozen=True)

    experiment: str
    params: dict[str, Any] = Field(default_factory=dict)
    output: Path = Field(default=Path(DEFAULT_OUTPUT_DIR))
    seed: int = DEFAULT_SEED
    threads: int = Field(default=DEFAULT_THREADS, ge=1)

    @field_validator("experiment")
    @classmethod
    def _registered(cls, value: str) -> str:
        from spinnet import registry

        names = registry.get_experiment_names()
        if value not in names:
            raise ValueError(f"unknown experiment {value!r}; expected one of {sorted(names)}")
        return value

    @classmethod
    def from_environment(cls, experiment: str, **overrides: Any) -> "RunConfig":
        """Config with output, seed and threads taken from the environment."""
        values: dict[str, Any] = {
            "output": os.environ.get("SPINNET_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
            "seed": int(os.environ.get("SPINNET_SEED", DEFAULT_SEED)),
            "threads": int(os.environ.get("SPINNET_THREADS", DEFAULT_THREADS)),
        }
        values.update(overrides)
        return cls(experiment=experiment, **values)


class ExperimentParams(BaseModel):
    """Base for experiment parameter models; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)


def parse_scan(text: str) -> npt.NDArray[np.float64]:
    """Time grid from ``start:stop:step``.

    Raises:
        ConfigurationError: If the text is not three numbers or the grid is empty
    """
    parts = text.split(":")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigurationError(f"scan must be 'start:stop:step', got {text!r}") from exc
    try:
        return time_grid(stop, step, start)
    except PreconditionError as exc:
        raise ConfigurationError(f"invalid scan {text!r}: {exc}") from exc


def input_qubit(name: str) -> PureState:
    try:
        return resolve_qubit(name)
    except PreconditionError as exc:
        raise ConfigurationError(str(exc)) from exc


def _unwrap_optional(annotation: Any) -> Any:
    if typing.get_origin(annotation) in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return annotation


def _argument_options(annotation: Any) -> dict[str, Any]:
    """argparse keyword arguments for a pydantic field annotation."""
    annotation = _unwrap_optional(annotation)
    origin = typing.get_origin(annotation)
    if annotation is bool:
        return {"action": argparse.BooleanOptionalAction}
    if origin is Literal:
        choices = typing.get_args(annotation)
        return {"choices": list(choices), "type": type(choices[0])}
    if origin in (list, tuple, Sequence):
        item = typing.get_args(annotation)[0] if typing.get_args(annotation) else str
        return {"nargs": "+", **_argument_options(item)}
    if annotation in (int, float, str):
        return {"type": annotation}
    return {"type": str}


class BaseExperiment(ABC):
    """Base class for all spinnet experiments.

    Subclasses set ``name`` (the CLI subcommand), ``help`` and a pydantic
    ``Params`` model whose fields become the subcommand's flags.
    """

    name: ClassVar[str]
    help: ClassVar[str]
    epilog: ClassVar[str | None] = None
    Params: ClassVar[type[ExperimentParams]]

    def __init__(self, config: RunConfig):
        """Initialize the experiment.

        Args:
            config: Resolved run configuration

        Raises:
            ConfigurationError: If the parameters fail validation
        """
        self.config = config
        try:
            self.params: Any = self.Params(**config.params)
        except ValidationError as exc:
            raise ConfigurationError(f"invalid parameters for {self.name}: {exc}") from exc
        self.outputs: list[Path] = []  # List to track written files

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Add one flag per ``Params`` field, defaulting to None so unset flags can be dropped.

        A field may list extra flag spellings under ``json_schema_extra={"cli_aliases": [...]}``.

        Args:
            parser: The subcommand parser
        """
        group = parser.add_argument_group(f"{cls.name} parameters")
        for field_name, info in cls.Params.model_fields.items():
            options = _argument_options(info.annotation)
            default = info.get_default(call_default_factory=True)
            help_text = f"{info.description or field_name} (default: {default})"
            extra = info.json_schema_extra if isinstance(info.json_schema_extra, dict) else {}
            aliases = [str(alias) for alias in extra.get("cli_aliases", ())]  # type: ignore[union-attr]
            group.add_argument(
                f"--{field_name.replace('_', '-')}",
                *aliases,
                dest=field_name,
                default=None,
                help=help_text,
                **options,
            )

    @abstractmethod
    def execute(self) -> None:
        """Compute the experiment and write its result files."""

    def run(self) -> list[Path]:
        """Run the experiment and return the written files."""
        logger.info("Running %s with %s", self.name, self.params.model_dump())
        self.execute()
        for path in self.outputs:
            logger.info("Output: %s", path)
        return self.outputs

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def threads(self) -> int:
        return self.config.threads

    def metadata(self) -> dict[str, Any]:
        """Tool version, resolved configuration and seed."""
        return {
            "tool_version": __version__,
            "config": {
                "experiment": self.config.experiment,
                "params": self.params.model_dump(mode="json"),
                "threads": self.config.threads,
            },
            "seed": self.config.seed,
        }

    def _write_csv(self, header: Sequence[str], rows: Any, suffix: str = "") -> Path:
        """Write ``{name}{suffix}.csv`` into the output directory and track it."""
        path = write_csv(self.config.output / f"{self.name}{suffix}.csv", header, rows, self.metadata())
        self.outputs.append(path)
        return path

    def _write_json(self, payload: dict[str, Any], suffix: str = "") -> Path:
        """Write ``{name}{suffix}.json`` into the output directory and track it."""
        path = write_json(self.config.output / f"{self.name}{suffix}.json", payload, self.metadata())
        self.outputs.append(path)
        return path
