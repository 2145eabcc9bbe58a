"""
Field-switched spin routers

Two layouts route a qubit from an input spin to one of two output ports:

- ``four``: input 1 on hub 2 with outputs 3 and 4, XY couplings ``+J`` and
  output fields ``+h``/``-h``. The sign of the input field picks the port.
- ``five``: input 1, gate pair 2-3 with coupling ``G``, outputs 4 and 5 on
  site 3, Hamiltonian ``sum h_i S_i^z - sum J_lm (S^x S^x + S^y S^y)``.
  The sign of ``h_1`` picks the port.

The five-spin energy-matching conditions are stated in the one-hole basis
(|01111>, |10111>, ...). Simulations run in the single-flip sector, which is
the bit complement of that basis; on this tree graph the two sector
Hamiltonians differ by a global sign and a sublattice gauge, so port
populations agree.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spinnet.common.errors import PreconditionError, require
from spinnet.common.logging import get_logger
from spinnet.core.evolution import SpectralPropagator, bits_basis, propagator, restrict
from spinnet.core.hamiltonians import XY, XY_NEGATIVE, HamiltonianKind, build_total
from spinnet.core.spin import Operator, PureState, SpinNetwork, site_state
from spinnet.protocols.transport_chain import qubit_transfer_fidelities

logger = get_logger(__name__)

DEFAULT_MAX_M1 = 1000
ADMISSIBLE_COUNT = 5
RATIO_TOL = 1e-9

Variant = Literal["four", "five"]
OutputPort = Literal["O1", "O2"]
Method = Literal["subspace", "full"]

ROUTER5_EDGES = ((1, 2), (2, 3), (3, 4), (3, 5))
ROUTER4_EDGES = ((1, 2), (2, 3), (2, 4))
# One-hole basis of the five-spin router: input, gate pair, O1, O2.
HOLE_BASIS = ("01111", "10111", "11011", "11101", "11110")
PORTS: dict[str, tuple[int, int]] = {"four": (3, 4), "five": (4, 5)}


class Router5Parameters(BaseModel):
    """Per-site fields and the couplings (J12, J23, J34, J35) of the five-spin router."""

    model_config = ConfigDict(frozen=True)

    fields: tuple[float, float, float, float, float]
    couplings: tuple[float, float, float, float]

    def network(self) -> SpinNetwork:
        edges = tuple((i, j, c) for (i, j), c in zip(ROUTER5_EDGES, self.couplings))
        return SpinNetwork(n=5, edges=edges, fields=self.fields)


class RouterSpec(BaseModel):
    """One router configuration; ``switched`` routes to the second port."""

    model_config = ConfigDict(frozen=True)

    variant: Variant
    J: float = Field(description="Non-gate coupling, rad/s")
    G: float | None = Field(default=None, description="Gate coupling, rad/s (five only)")
    h: float | None = Field(default=None, description="Field magnitude, rad/s (four only)")
    switched: bool = False

    @model_validator(mode="after")
    def _check_variant(self) -> "RouterSpec":
        if self.J == 0:
            raise ValueError("J must be nonzero")
        if self.variant == "five" and not self.G:
            raise ValueError("the five-spin router needs a nonzero G")
        if self.variant == "four" and not self.h:
            raise ValueError("the four-spin router needs a nonzero h")
        return self

    @property
    def kind(self) -> HamiltonianKind:
        return XY_NEGATIVE if self.variant == "five" else XY

    @property
    def ports(self) -> tuple[int, int]:
        return PORTS[self.variant]

    @property
    def target_port(self) -> int:
        return route_target(self.variant, self.switched)

    def network(self) -> SpinNetwork:
        if self.variant == "five":
            assert self.G is not None
            return router5_parameters(self.G, self.J, "O2" if self.switched else "O1").network()
        assert self.h is not None
        return router4_network(self.J, self.h, self.switched)


@dataclass(frozen=True, eq=False)
class RouterResult:
    """Per-port fidelity series against the input qubit."""

    times: npt.NDArray[np.float64]
    ports: dict[int, npt.NDArray[np.float64]]

    def peak(self, port: int) -> tuple[float, float]:
        index = int(np.argmax(self.ports[port]))
        return float(self.times[index]), float(self.ports[port][index])


@dataclass(frozen=True)
class RoutingTime:
    """Smallest routing time and the admissible ``m1`` values."""

    tau_min: float
    m1: int
    m2: int
    admissible: tuple[int, ...]


def route_target(variant: Variant, switched: bool) -> int:
    """Output site the router delivers to."""
    first, second = PORTS[variant]
    return second if switched else first


def router4_network(J: float, h: float, switched: bool = False) -> SpinNetwork:
    """Four-spin router: outputs at ``+h`` (site 3) and ``-h`` (site 4), input at ``+/-h``."""
    fields = (-h if switched else h, 0.0, h, -h)
    return SpinNetwork(n=4, edges=tuple((i, j, J) for i, j in ROUTER4_EDGES), fields=fields)


def router5_parameters(G: float, J: float, target: OutputPort = "O1") -> Router5Parameters:
    """Transport parameters for routing to ``target``; only ``h_1`` differs between rows."""
    if target not in ("O1", "O2"):
        raise PreconditionError(f"unknown output port {target!r}; expected O1 or O2")
    h1 = -G / 2 if target == "O1" else G / 2
    return Router5Parameters(fields=(h1, 0.0, 0.0, -G / 2, G / 2), couplings=(J, G, J, J))


def effective_eigenvalues(params: Router5Parameters) -> tuple[float, float, float, float, float]:
    """Diagonal energies ``(E_I, E_+, E_-, E_O1, E_O2)`` after the gate-pair basis change.

    Raises:
        PreconditionError: If ``h_2 != h_3``
    """
    h1, h2, h3, h4, h5 = params.fields
    require(math.isclose(h2, h3, rel_tol=0, abs_tol=1e-12), f"requires h2 == h3, got {h2} and {h3}")
    j23 = params.couplings[1]
    return (
        0.5 * (h1 - h2 - h3 - h4 - h5),
        0.5 * (-h1 - h4 - h5 - j23),
        0.5 * (-h1 - h4 - h5 + j23),
        0.5 * (-h1 - h2 - h3 + h4 - h5),
        0.5 * (-h1 - h2 - h3 - h4 + h5),
    )


def hole_hamiltonian(params: Router5Parameters) -> Operator:
    """Five-spin Hamiltonian restricted to the one-hole basis."""
    return restrict(build_total(params.network(), XY_NEGATIVE), bits_basis(HOLE_BASIS))


def gate_pair_rotation() -> npt.NDArray[np.float64]:
    """Columns I, (|10>+|01>)/sqrt2, (|10>-|01>)/sqrt2, O1, O2 over the one-hole basis."""
    r = 1.0 / math.sqrt(2.0)
    v = np.eye(5)
    v[1:3, 1:3] = [[r, -r], [r, r]]
    return v


def basis_change_check(params: Router5Parameters) -> Operator:
    """One-hole Hamiltonian conjugated by the gate-pair rotation, ``V^dagger H V``."""
    v = gate_pair_rotation()
    return v.T @ hole_hamiltonian(params) @ v


def transformed_matrix(params: Router5Parameters) -> npt.NDArray[np.float64]:
    """Closed form of :func:`basis_change_check`."""
    h1, h2, h3, h4, h5 = params.fields
    j12, j23, j34, j35 = params.couplings
    r = 1.0 / (2.0 * math.sqrt(2.0))
    e_plus = 0.5 * (-h1 - h4 - h5) - 0.5 * j23
    e_minus = 0.5 * (-h1 - h4 - h5) + 0.5 * j23
    e_i = 0.5 * (h1 - h2 - h3 - h4 - h5)
    e_o1 = 0.5 * (-h1 - h2 - h3 + h4 - h5)
    e_o2 = 0.5 * (-h1 - h2 - h3 - h4 + h5)
    detuning = 0.5 * (h3 - h2)
    return np.array(
        [
            [e_i, -r * j12, r * j12, 0.0, 0.0],
            [-r * j12, e_plus, detuning, -r * j34, -r * j35],
            [r * j12, detuning, e_minus, -r * j34, -r * j35],
            [0.0, -r * j34, -r * j34, e_o1, 0.0],
            [0.0, -r * j35, -r * j35, 0.0, e_o2],
        ]
    )


def routing_time(G: float, J: float, max_m1: int = DEFAULT_MAX_M1) -> RoutingTime:
    """``tau = 8 m1 pi / (G + 2J)`` for the smallest ``m1`` making
    ``m2 = m1 (G - 2J)/(G + 2J)`` an integer.

    Raises:
        PreconditionError: If ``G + 2J == 0`` or no ``m1 <= max_m1`` is admissible
    """
    denominator = G + 2 * J
    require(denominator != 0, "routing time needs G + 2J != 0")
    ratio = (G - 2 * J) / denominator
    for m1 in range(1, max_m1 + 1):
        m2 = ratio * m1
        if abs(m2 - round(m2)) < RATIO_TOL * max(1.0, abs(m2)):
            tau = 8 * m1 * math.pi / denominator
            admissible = tuple(m1 * k for k in range(1, ADMISSIBLE_COUNT + 1))
            logger.debug("Routing time %.6g s at m1=%d, m2=%d", tau, m1, round(m2))
            return RoutingTime(tau_min=abs(tau), m1=m1, m2=int(round(m2)), admissible=admissible)
    raise PreconditionError(
        f"no admissible m1 up to {max_m1} for (G - 2J)/(G + 2J) = {ratio:.12g}"
    )


def reduced_hamiltonian(G: float, J: float) -> npt.NDArray[np.float64]:
    """Resonant 3-level model input, gate state, output with eigenvalues
    ``-G/4`` and ``-G/4 -/+ J/2``."""
    x = G / 4
    y = J / (2 * math.sqrt(2.0))
    return np.array([[-x, -y, 0.0], [-y, -x, -y], [0.0, -y, -x]])


def reduced_propagator(G: float, J: float, t: float) -> Operator:
    return propagator(reduced_hamiltonian(G, J).astype(complex), t)


def _port_target(n: int, port: int, qubit: PureState) -> PureState:
    return site_state(n, port, qubit)


def simulate_router(
    spec: RouterSpec,
    qubit: PureState,
    times: npt.ArrayLike,
    method: Method = "subspace",
    z_phase: bool = False,
) -> RouterResult:
    """Fidelity of ``qubit`` at each output port over ``times``.

    Args:
        spec: Router configuration
        qubit: Input state prepared on site 1, others in ``|0>``
        times: Time grid in seconds
        method: ``subspace`` evolves the vacuum plus single-flip sector, ``full``
            the whole ``2**n`` space
        z_phase: Apply the best Z rotation on each port before comparing
    """
    grid = np.asarray(times, dtype=float)
    network = spec.network()
    qubit = np.asarray(qubit, dtype=complex)
    ports: dict[int, npt.NDArray[np.float64]] = {}
    if method == "subspace":
        for port in spec.ports:
            ports[port] = qubit_transfer_fidelities(
                network, 1, port, qubit, grid, kind=spec.kind, z_phase=z_phase
            )
    elif method == "full":
        prop = SpectralPropagator(build_total(network, spec.kind))
        states = prop.trajectory(site_state(network.n, 1, qubit), grid)
        for port in spec.ports:
            if z_phase:
                flipped = 1 << (network.n - port)
                overlap = np.abs(np.conj(qubit[0]) * states[:, 0]) + np.abs(
                    np.conj(qubit[1]) * states[:, flipped]
                )
            else:
                overlap = np.abs(states @ np.conj(_port_target(network.n, port, qubit)))
            ports[port] = np.minimum(overlap, 1.0)
    else:
        raise PreconditionError(f"unknown method {method!r}; expected subspace or full")
    logger.debug("Simulated %s router (%s) over %d times", spec.variant, method, grid.size)
    return RouterResult(grid, ports)
