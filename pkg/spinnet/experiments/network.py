"""
Network topology experiment for spinnet
"""

from pathlib import Path
from typing import Literal

from pydantic import Field

from spinnet.common.errors import ConfigurationError
from spinnet.common.logging import get_logger
from spinnet.experiments.base import BaseExperiment, ExperimentParams, InputName, input_qubit, parse_scan
from spinnet.protocols.modular_network import (
    ARBITRARY_DT,
    ARBITRARY_T_MAX,
    DEFAULT_NETWORK_THRESHOLD,
    WHEEL_DT,
    WHEEL_T_MAX,
    arbitrary_network,
    first_qualifying_time,
    load_network,
    network_transport_scan,
    wheel_network,
)
from spinnet.resources.networks import NETWORK_FILE_GRAMMAR
from spinnet.resources.parameters import REFERENCE_H, REFERENCE_J

logger = get_logger(__name__)


class NetworkParams(ExperimentParams):
    topology: Literal["wheel", "arbitrary", "file"] = Field(default="wheel", description="Network layout")
    network_file: str | None = Field(default=None, description="Edge-list file for --topology file")
    n_peripheral: int = Field(default=6, ge=3, le=13, description="Ring spins of the wheel")
    input_site: int = Field(default=1, ge=1, description="Sending site")
    output_site: int | None = Field(default=None, ge=1, description="Receiving site (default: last site)")
    input: InputName = Field(default="one", description="Input qubit")
    h: float = Field(default=REFERENCE_H, description="Field on the two end sites, rad/s")
    J: float = Field(default=REFERENCE_J, description="Uniform coupling, rad/s")
    scan: str | None = Field(default=None, description="Time grid start:stop:step (default per topology)")
    threshold: float = Field(default=DEFAULT_NETWORK_THRESHOLD, gt=0, le=1, description="Qualifying fidelity")


class NetworkExperiment(BaseExperiment):
    """End-to-end transport on a wheel, the nine-spin tree or a network file."""

    name = "network"
    help = "Transport between two sites of a larger network"
    epilog = NETWORK_FILE_GRAMMAR
    Params = NetworkParams

    def execute(self) -> None:
        params: NetworkParams = self.params
        if params.topology == "wheel":
            network = wheel_network(params.n_peripheral)
            default_scan = f"0:{WHEEL_T_MAX}:{WHEEL_DT}"
        elif params.topology == "arbitrary":
            network = arbitrary_network()
            default_scan = f"0:{ARBITRARY_T_MAX}:{ARBITRARY_DT}"
        else:
            if not params.network_file:
                raise ConfigurationError("--topology file needs --network-file")
            network = load_network(Path(params.network_file))
            default_scan = f"0:{WHEEL_T_MAX}:{WHEEL_DT}"
        output_site = params.output_site or network.n
        if max(params.input_site, output_site) > network.n:
            raise ConfigurationError(f"sites must lie in 1..{network.n}")
        grid = parse_scan(params.scan or default_scan)
        result = network_transport_scan(
            network, params.input_site, output_site, params.h, params.J, grid, input_qubit(params.input)
        )
        t_best, best = result.best()
        logger.info("Best fidelity %.4f at t=%.6g", best, t_best)
        first = first_qualifying_time(result, params.threshold)
        if first is None:
            logger.warning("Fidelity never exceeds %.2f on this grid", params.threshold)
        else:
            logger.info("Fidelity first exceeds %.2f at t=%.6g", params.threshold, first)
        self._write_csv(["t", "fidelity"], zip(result.times, result.fidelities))
