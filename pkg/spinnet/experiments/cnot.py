"""
CNOT synthesis experiments for spinnet

This module provides evaluation of a given CNOT parameter set and the
differential-evolution search for new ones.
"""

from typing import Any, Literal

from pydantic import Field

from spinnet.common.errors import ConfigurationError
from spinnet.common.logging import get_logger
from spinnet.experiments.base import BaseExperiment, ExperimentParams
from spinnet.protocols.gate_synthesis import (
    POPULATION_SIZE,
    REFERENCE_PARAMETERS,
    GateParameters,
    GateSearchProblem,
    Objective,
    cnot_cost,
    optimize_cnot,
    phase_aligned_cost,
    resolve_sign_convention,
    verify_cnot,
)
from spinnet.resources.parameters import CNOT_REFERENCE_COST, CNOT_REFERENCE_OVERLAP

logger = get_logger(__name__)

CouplingSign = Literal["auto", "plus", "minus"]
_SIGNS = {"plus": 1, "minus": -1}


class CnotParams(ExperimentParams):
    verify_reference_optimum: bool = Field(
        default=False,
        description="Evaluate the published optimum instead of --J/--h/--t",
        json_schema_extra={"cli_aliases": ["--verify-paper-optimum"]},
    )
    J: float | None = Field(default=None, description="Uniform coupling, rad/s")
    h: list[float] | None = Field(default=None, description="Six site fields, rad/s")
    t: float | None = Field(default=None, ge=0, description="Evolution time, s")
    coupling_sign: CouplingSign = Field(
        default="auto", description="XY coupling sign; auto picks the lower phase-aligned cost"
    )


class CnotExperiment(BaseExperiment):
    """Cost and overlap of one parameter set on the six-spin architecture."""

    name = "cnot"
    help = "Evaluate CNOT cost and overlap for a parameter set"
    Params = CnotParams

    def _parameters(self) -> GateParameters:
        params: CnotParams = self.params
        if params.verify_reference_optimum:
            return REFERENCE_PARAMETERS
        if params.J is None or params.h is None or params.t is None:
            raise ConfigurationError("give --J, --h and --t, or --verify-reference-optimum")
        if len(params.h) != 6:
            raise ConfigurationError(f"--h needs 6 values, got {len(params.h)}")
        return GateParameters(J=params.J, h=tuple(params.h), t=params.t)  # type: ignore[arg-type]

    def execute(self) -> None:
        params: CnotParams = self.params
        gate = self._parameters()
        payload: dict[str, Any] = {"params": gate.model_dump()}
        if params.coupling_sign == "auto":
            resolution = resolve_sign_convention(gate)
            payload.update(
                coupling_sign=resolution.sign,
                cost=resolution.cost,
                phase_aligned_cost=resolution.phase_aligned_cost,
                overlap=resolution.overlap,
                costs_by_sign={str(s): c for s, c in resolution.costs.items()},
                phase_aligned_costs_by_sign={
                    str(s): c for s, c in resolution.phase_aligned_costs.items()
                },
            )
        else:
            problem = GateSearchProblem(coupling_sign=_SIGNS[params.coupling_sign])  # type: ignore[arg-type]
            payload.update(
                coupling_sign=problem.coupling_sign,
                cost=cnot_cost(gate, problem),
                phase_aligned_cost=phase_aligned_cost(gate, problem),
                overlap=verify_cnot(gate, problem),
            )
        if params.verify_reference_optimum:
            payload.update(reference_cost=CNOT_REFERENCE_COST, reference_overlap=CNOT_REFERENCE_OVERLAP)
        logger.info(
            "CNOT cost %.6f (phase-aligned %.6f), overlap %.6f",
            payload["cost"],
            payload["phase_aligned_cost"],
            payload["overlap"],
        )
        self._write_json(payload)


class CnotOptimizeParams(ExperimentParams):
    budget: int = Field(default=60000, ge=5, description="Cost evaluations per run")
    population: int = Field(default=POPULATION_SIZE, ge=5, description="Population size")
    restarts: int = Field(default=1, ge=1, description="Independent runs with seeds seed, seed+1, ...")
    include_reference: bool = Field(
        default=False, description="Seed the population with the published optimum"
    )
    coupling_sign: Literal["plus", "minus"] = Field(default="plus", description="XY coupling sign")
    objective: Objective = Field(
        default="literal", description="Cost to minimize; phase_aligned ignores the global phase"
    )


class CnotOptimizeExperiment(BaseExperiment):
    """Differential-evolution search for CNOT parameters."""

    name = "cnot-optimize"
    help = "Search CNOT parameters with differential evolution"
    Params = CnotOptimizeParams

    def execute(self) -> None:
        params: CnotOptimizeParams = self.params
        if params.budget < params.population:
            raise ConfigurationError(
                f"budget {params.budget} is smaller than the population {params.population}"
            )
        problem = GateSearchProblem(coupling_sign=_SIGNS[params.coupling_sign])  # type: ignore[arg-type]
        runs = []
        for restart in range(params.restarts):
            outcome = optimize_cnot(
                seed=self.seed + restart,
                budget=params.budget,
                population=params.population,
                include_reference=params.include_reference,
                problem=problem,
                threads=self.threads,
                objective=params.objective,
            )
            runs.append(outcome.to_payload())
        best = min(runs, key=lambda run: run["cost"])
        logger.info("Best cost over %d runs: %.6g", len(runs), best["cost"])
        self._write_json({"best": best, "runs": runs})
