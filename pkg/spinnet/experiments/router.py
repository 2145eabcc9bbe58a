"""
Router experiments for spinnet
"""

import numpy as np
from pydantic import Field
from scipy.signal import find_peaks

from spinnet.common.logging import get_logger
from spinnet.experiments.base import BaseExperiment, ExperimentParams, InputName, input_qubit, parse_scan
from spinnet.protocols.router import Method, RouterSpec, routing_time, simulate_router
from spinnet.resources.parameters import REFERENCE_G, REFERENCE_H, REFERENCE_J

logger = get_logger(__name__)

# Local maxima below this are not worth reporting.
PEAK_HEIGHT = 0.5


class Router4Params(ExperimentParams):
    J: float = Field(default=REFERENCE_J, description="Coupling, rad/s")
    h: float = Field(default=REFERENCE_H, description="Field magnitude, rad/s")
    switched: bool = Field(default=False, description="Flip the input field to route to site 4")
    input: InputName = Field(default="one", description="Input qubit on site 1")
    scan: str = Field(default="0:2:1e-4", description="Time grid start:stop:step")
    method: Method = Field(default="subspace", description="Evolve the excitation sector or the full space")
    z_phase: bool = Field(default=False, description="Optimize a Z rotation on each port")


class Router4Experiment(BaseExperiment):
    """Port fidelities of the four-spin router over time."""

    name = "router4"
    help = "Four-spin router: fidelity at sites 3 and 4"
    Params = Router4Params

    def execute(self) -> None:
        params: Router4Params = self.params
        spec = RouterSpec(variant="four", J=params.J, h=params.h, switched=params.switched)
        grid = parse_scan(params.scan)
        result = simulate_router(spec, input_qubit(params.input), grid, params.method, params.z_phase)
        for port in spec.ports:
            peaks, _ = find_peaks(result.ports[port], height=PEAK_HEIGHT)
            logger.info(
                "Site %d peaks at t=%s", port, np.round(grid[peaks][:5], 4).tolist()
            )
        t, best = result.peak(spec.target_port)
        logger.info("Target site %d: best fidelity %.6f at t=%.6g", spec.target_port, best, t)
        rows = zip(grid, result.ports[3], result.ports[4])
        self._write_csv(["t", "fid_site3", "fid_site4"], rows)


class Router5Params(ExperimentParams):
    G: float = Field(default=REFERENCE_G, description="Gate coupling, rad/s")
    J: float = Field(default=REFERENCE_J, description="Non-gate coupling, rad/s")
    switched: bool = Field(default=False, description="Route to O2 instead of O1")
    input: InputName = Field(default="plus", description="Input qubit on site 1")
    scan: str = Field(default="0:0.2:1e-4", description="Time grid start:stop:step")
    method: Method = Field(default="subspace", description="Evolve the excitation sector or the full space")
    z_phase: bool = Field(default=False, description="Optimize a Z rotation on each port")


class Router5Experiment(BaseExperiment):
    """Port fidelities of the five-spin gated router and its routing time."""

    name = "router5"
    help = "Five-spin router: fidelity at O1 (site 4) and O2 (site 5)"
    Params = Router5Params

    def execute(self) -> None:
        params: Router5Params = self.params
        spec = RouterSpec(variant="five", J=params.J, G=params.G, switched=params.switched)
        timing = routing_time(params.G, params.J)
        logger.info(
            "Routing time %.6g s (m1=%d, m2=%d)", timing.tau_min, timing.m1, timing.m2
        )
        qubit = input_qubit(params.input)
        at_tau = simulate_router(spec, qubit, [timing.tau_min], params.method, params.z_phase)
        for port in spec.ports:
            logger.info("Fidelity at site %d and tau_min: %.6f", port, at_tau.ports[port][0])
        grid = parse_scan(params.scan)
        result = simulate_router(spec, qubit, grid, params.method, params.z_phase)
        rows = zip(grid, result.ports[4], result.ports[5])
        self._write_csv(["t", "fid_O1", "fid_O2"], rows)
