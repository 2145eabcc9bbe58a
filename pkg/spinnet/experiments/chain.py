"""
Chain transport experiments for spinnet
"""

from pydantic import Field

from spinnet.common.errors import PreconditionError
from spinnet.common.logging import get_logger
from spinnet.core.spin import KET_1, KET_PLUS
from spinnet.experiments.base import BaseExperiment, ExperimentParams, InputName, input_qubit, parse_scan
from spinnet.protocols.transport_chain import (
    DEFAULT_SWEEP_POINTS,
    DEFAULT_TRANSPORT_TIME,
    ChainSpec,
    RobustnessParameter,
    bloch_sweep,
    default_sweep_values,
    resonance_time_scan,
    robustness_sweep,
    transport_series,
)
from spinnet.resources.parameters import REFERENCE_H, REFERENCE_J

logger = get_logger(__name__)


class ChainParams(ExperimentParams):
    h: float = Field(default=REFERENCE_H, description="End-site field, rad/s")
    J: float = Field(default=REFERENCE_J, description="Uniform coupling, rad/s")
    n: int = Field(default=3, ge=3, le=14, description="Chain length")
    scan: str = Field(default="0:2:1e-4", description="Time grid start:stop:step")
    z_phase: bool = Field(default=False, description="Optimize a Z rotation on the output site")


class ChainExperiment(BaseExperiment):
    """Transport fidelity of |1> and |+> from site 1 to site n over time."""

    name = "chain"
    help = "End-to-end chain transport fidelity for |1> and |+>"
    Params = ChainParams

    def execute(self) -> None:
        params: ChainParams = self.params
        spec = ChainSpec(n=params.n, J=params.J, h=params.h)
        grid = parse_scan(params.scan)
        one = transport_series(spec, KET_1, grid, z_phase=params.z_phase)
        plus = transport_series(spec, KET_PLUS, grid, z_phase=params.z_phase)
        if spec.n == 3 and grid.size > 1:
            try:
                candidates = resonance_time_scan(
                    params.h, params.J, float(grid[-1]), float(grid[1] - grid[0])
                )
                logger.info("Resonance candidates: %s", candidates)
            except PreconditionError as exc:
                logger.warning("Skipping resonance scan: %s", exc)
        logger.info("Best |1> transport %.6f at t=%.6g", one.best()[1], one.best()[0])
        rows = zip(grid, one.fidelities, plus.fidelities)
        self._write_csv(["t", "fid_1state", "fid_plusstate"], rows)


class ChainBlochParams(ExperimentParams):
    h: float = Field(default=REFERENCE_H, description="End-site field, rad/s")
    J: float = Field(default=REFERENCE_J, description="Uniform coupling, rad/s")
    n: int = Field(default=3, ge=3, le=14, description="Chain length")
    t: float = Field(default=DEFAULT_TRANSPORT_TIME, ge=0, description="Transport time, s")
    n_theta: int = Field(default=100, ge=2, description="Polar grid points")
    n_phi: int = Field(default=100, ge=2, description="Azimuthal grid points")
    phi_offset: float = Field(default=0.0, description="Shift of the azimuthal grid, rad")


class ChainBlochExperiment(BaseExperiment):
    """Transport fidelity statistics over Bloch-sphere inputs."""

    name = "chain-bloch"
    help = "Chain transport fidelity statistics over a Bloch-sphere grid"
    Params = ChainBlochParams

    def execute(self) -> None:
        params: ChainBlochParams = self.params
        spec = ChainSpec(n=params.n, J=params.J, h=params.h)
        stats = bloch_sweep(spec, params.t, params.n_theta, params.n_phi, params.phi_offset)
        logger.info("Bloch sweep mean %.5f std %.5f", stats.mean, stats.std)
        self._write_json(stats.model_dump())


class ChainRobustnessParams(ExperimentParams):
    h: float = Field(default=REFERENCE_H, description="End-site field, rad/s")
    J: float = Field(default=REFERENCE_J, description="Uniform coupling, rad/s")
    parameters: list[RobustnessParameter] = Field(
        default=["h1", "h2", "J12"], description="Parameters to perturb one at a time"
    )
    input: InputName = Field(default="one", description="Input qubit on site 1")
    t: float = Field(default=DEFAULT_TRANSPORT_TIME, ge=0, description="Transport time, s")
    points: int = Field(default=DEFAULT_SWEEP_POINTS, ge=2, description="Values per sweep")


class ChainRobustnessExperiment(BaseExperiment):
    """Transport fidelity with h1, h2 or J12 perturbed around nominal."""

    name = "chain-robustness"
    help = "Chain transport fidelity under single-parameter perturbations"
    Params = ChainRobustnessParams

    def execute(self) -> None:
        params: ChainRobustnessParams = self.params
        spec = ChainSpec(J=params.J, h=params.h)
        qubit = input_qubit(params.input)
        rows = []
        for parameter in params.parameters:
            values = default_sweep_values(spec, parameter, params.points)
            series = robustness_sweep(spec, parameter, values, qubit, params.t, self.threads)
            worst = min(f for _, f in series)
            logger.info("%s sweep: minimum fidelity %.4f", parameter, worst)
            rows.extend((parameter, value, fidelity) for value, fidelity in series)
        self._write_csv(["parameter", "value", "fidelity"], rows)
