"""
Composite blocks and transport on larger topologies

A 3-spin chain fused to a 4-spin router leaks into the router while the chain
is still transferring. A strong field on the spin next to the block in use
detunes it and acts as a barrier; switching the barrier from spin 4 to spin 2
once the chain has delivered lets the router take over.

The module also builds wheel and tree topologies, reads and writes network
files, and scans end-to-end transport with fields on the two end sites only.
"""

import re
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from spinnet.common.errors import ConfigurationError, PreconditionError, require
from spinnet.common.logging import get_logger
from spinnet.common.utils import format_number
from spinnet.core.evolution import SpectralPropagator, restrict, site_basis
from spinnet.core.hamiltonians import XY, build_total
from spinnet.core.spin import KET_1, PureState, SpinNetwork
from spinnet.protocols.router import RouterSpec, simulate_router
from spinnet.protocols.transport_chain import (
    ChainSpec,
    TransportResult,
    qubit_transfer_fidelities,
    time_grid,
    transport_series,
)
from spinnet.resources.networks import ARBITRARY_TOPOLOGY_EDGES, COMPOSITE_EDGES

logger = get_logger(__name__)

COMPOSITE_SITES = 6
COMPOSITE_TARGET = 6
DEFAULT_BARRIER_FACTOR = 10.0
BARRIER_FACTORS = (5.0, 10.0, 20.0)
CHAIN_TIME_WINDOW = (0.5, 1.5)
ROUTER_TIME_WINDOW = (0.0, 1.5)
DEFAULT_BLOCK_DT = 1e-4
DEFAULT_NETWORK_THRESHOLD = 0.8
WHEEL_T_MAX = 5.0
WHEEL_DT = 1e-3
ARBITRARY_T_MAX = 1000.0
ARBITRARY_DT = 0.05


class BarrierPhase(BaseModel):
    """One interval with an optional extra field on a single site."""

    model_config = ConfigDict(frozen=True)

    duration: float = Field(gt=0, description="Phase length in seconds")
    site: int | None = Field(default=None, ge=1, description="Barrier site, or none")
    field: float = Field(default=0.0, description="Barrier field added to the site, rad/s")


class BarrierSchedule(BaseModel):
    """Ordered barrier phases."""

    model_config = ConfigDict(frozen=True)

    phases: tuple[BarrierPhase, ...]

    @model_validator(mode="after")
    def _check_phases(self) -> "BarrierSchedule":
        if not self.phases:
            raise ValueError("a barrier schedule needs at least one phase")
        return self

    @property
    def total_duration(self) -> float:
        return sum(p.duration for p in self.phases)

    def boundaries(self) -> list[float]:
        """Start time of every phase followed by the end of the last one."""
        return [0.0] + list(np.cumsum([p.duration for p in self.phases]))

    def with_field(self, field: float) -> "BarrierSchedule":
        return BarrierSchedule(
            phases=tuple(p.model_copy(update={"field": field}) for p in self.phases)
        )


@dataclass(frozen=True, eq=False)
class CompositeResult:
    """Per-site fidelity of the input qubit and single-excitation populations."""

    times: npt.NDArray[np.float64]
    fidelities: dict[int, npt.NDArray[np.float64]]
    populations: npt.NDArray[np.float64]

    def peak(self, site: int = COMPOSITE_TARGET) -> tuple[float, float]:
        index = int(np.argmax(self.fidelities[site]))
        return float(self.times[index]), float(self.fidelities[site][index])

    def max_population(self, sites: Sequence[int], until: float | None = None) -> float:
        """Largest population on ``sites`` over times up to ``until``."""
        mask = np.ones(self.times.size, dtype=bool) if until is None else self.times <= until
        columns = [s - 1 for s in sites]
        return float(np.max(self.populations[np.ix_(mask, columns)])) if mask.any() else 0.0


def composite_network(J: float, h: float) -> SpinNetwork:
    """Chain 1-2-3 sharing site 3 with a router on hub 4; site 6 is the resonant output."""
    fields = (h, 0.0, h, 0.0, -h, h)
    return SpinNetwork(
        n=COMPOSITE_SITES, edges=tuple((i, j, J) for i, j in COMPOSITE_EDGES), fields=fields
    )


def _composite_result(
    n: int, qubit: PureState, times: npt.NDArray[np.float64], states: npt.NDArray[np.complex128]
) -> CompositeResult:
    fidelities = {}
    for site in range(1, n + 1):
        target = np.zeros(n + 1, dtype=complex)
        target[0], target[site] = qubit[0], qubit[1]
        fidelities[site] = np.minimum(np.abs(states @ np.conj(target)), 1.0)
    return CompositeResult(times, fidelities, np.abs(states[:, 1:]) ** 2)


def _start_vector(n: int, qubit: PureState) -> PureState:
    start = np.zeros(n + 1, dtype=complex)
    start[0], start[1] = qubit[0], qubit[1]
    return start


def simulate_naive_composite(
    J: float, h: float, qubit: PureState, times: npt.ArrayLike, network: SpinNetwork | None = None
) -> CompositeResult:
    """Six-spin evolution of the fused blocks with no barrier fields."""
    grid = np.asarray(times, dtype=float)
    network = composite_network(J, h) if network is None else network
    qubit = np.asarray(qubit, dtype=complex)
    prop = SpectralPropagator(restrict(build_total(network, XY), site_basis(network.n, vacuum=True)))
    states = prop.trajectory(_start_vector(network.n, qubit), grid)
    return _composite_result(network.n, qubit, grid, states)


def simulate_barrier_composite(
    schedule: BarrierSchedule,
    qubit: PureState,
    times: npt.ArrayLike,
    J: float,
    h: float,
) -> CompositeResult:
    """Piecewise evolution with each phase's barrier field added to the composite.

    Raises:
        PreconditionError: If the schedule ends before the last time or names an
            invalid site
    """
    grid = np.asarray(times, dtype=float)
    base = composite_network(J, h)
    if grid.size and grid.max() > schedule.total_duration + 1e-12:
        raise PreconditionError(
            f"schedule covers {schedule.total_duration:.6g} s, times reach {grid.max():.6g} s"
        )
    basis = site_basis(base.n, vacuum=True)
    qubit = np.asarray(qubit, dtype=complex)
    state = _start_vector(base.n, qubit)
    states = np.zeros((grid.size, basis.dim), dtype=complex)
    bounds = schedule.boundaries()
    for index, phase in enumerate(schedule.phases):
        network = base
        if phase.site is not None:
            require(phase.site <= base.n, f"barrier site {phase.site} outside 1..{base.n}")
            network = base.with_field(phase.site, base.fields[phase.site - 1] + phase.field)
        prop = SpectralPropagator(restrict(build_total(network, XY), basis))
        start, end = bounds[index], bounds[index + 1]
        last = index == len(schedule.phases) - 1
        mask = (grid >= start) & ((grid <= end) if last else (grid < end))
        if mask.any():
            states[mask] = prop.trajectory(state, grid[mask] - start)
        state = prop.evolve(state, phase.duration)
    logger.debug("Barrier composite over %d phases, %d time points", len(schedule.phases), grid.size)
    return _composite_result(base.n, qubit, grid, states)


def block_times(J: float, h: float, dt: float = DEFAULT_BLOCK_DT) -> tuple[float, float]:
    """Optimal times of the isolated chain and router blocks for a ``|1>`` input."""
    low, high = CHAIN_TIME_WINDOW
    chain = transport_series(ChainSpec(J=J, h=h), KET_1, time_grid(high, dt, low))
    router_times = time_grid(ROUTER_TIME_WINDOW[1], dt, dt)
    router = simulate_router(RouterSpec(variant="four", J=J, h=h), KET_1, router_times)
    chain_time, _ = chain.best()
    router_time, _ = router.peak(3)
    return chain_time, router_time


def default_barrier_schedule(
    J: float, h: float, factor: float = DEFAULT_BARRIER_FACTOR, dt: float = DEFAULT_BLOCK_DT
) -> BarrierSchedule:
    """Barrier ``factor * h`` on spin 4 for the chain time, then on spin 2 for the router time."""
    chain_time, router_time = block_times(J, h, dt)
    logger.info("Block times: chain %.6g s, router %.6g s", chain_time, router_time)
    barrier = factor * h
    return BarrierSchedule(
        phases=(
            BarrierPhase(duration=chain_time, site=4, field=barrier),
            BarrierPhase(duration=router_time, site=2, field=barrier),
        )
    )


def phase_one_leakage(result: CompositeResult, schedule: BarrierSchedule) -> float:
    """Largest population on the router outputs (sites 5 and 6) during the first phase."""
    return result.max_population((5, 6), until=schedule.phases[0].duration)


def wheel_network(n_peripheral: int, J: float = 1.0) -> SpinNetwork:
    """Hub 1 joined to ring sites 2..n+1, ring closed cyclically; uniform couplings."""
    require(n_peripheral >= 3, f"a wheel needs at least 3 peripheral spins, got {n_peripheral}")
    ring = list(range(2, n_peripheral + 2))
    spokes = [(1, k, J) for k in ring]
    rim = [(ring[k], ring[(k + 1) % n_peripheral], J) for k in range(n_peripheral)]
    return SpinNetwork(n=n_peripheral + 1, edges=tuple(spokes + rim))


def arbitrary_network(J: float = 1.0) -> SpinNetwork:
    """Nine-spin tree for long-range transport from site 1 to site 9."""
    return SpinNetwork(n=9, edges=tuple((i, j, J) for i, j in ARBITRARY_TOPOLOGY_EDGES))


def network_transport_scan(
    network: SpinNetwork,
    input_site: int,
    output_site: int,
    h: float,
    J: float,
    times: npt.ArrayLike,
    qubit: PureState = KET_1,
) -> TransportResult:
    """Transport fidelity with couplings set to ``J`` and field ``h`` on the end sites only.

    Raises:
        PreconditionError: If the two sites coincide
    """
    if input_site == output_site:
        raise PreconditionError("input and output sites must differ")
    fields = [0.0] * network.n
    for site in (input_site, output_site):
        require(1 <= site <= network.n, f"site {site} outside 1..{network.n}")
        fields[site - 1] = h
    prepared = network.with_uniform_coupling(J).with_fields(fields)
    grid = np.asarray(times, dtype=float)
    fidelities = qubit_transfer_fidelities(prepared, input_site, output_site, qubit, grid)
    return TransportResult(grid, fidelities)


def first_qualifying_time(result: TransportResult, threshold: float = DEFAULT_NETWORK_THRESHOLD) -> float | None:
    """Earliest time whose fidelity exceeds ``threshold``."""
    hits = np.flatnonzero(result.fidelities > threshold)
    return float(result.times[hits[0]]) if hits.size else None


_COMMENT = re.compile(r"#.*$")


def parse_network(text: str) -> SpinNetwork:
    """Read the edge-list network format.

    Raises:
        ConfigurationError: On a malformed line or an invalid resulting network
    """
    edges: list[tuple[int, int, float]] = []
    fields: dict[int, float] = {}
    declared: int | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        parts = _COMMENT.sub("", raw).split()
        if not parts:
            continue
        try:
            if parts[0] == "field" and len(parts) == 3:
                fields[int(parts[1])] = float(parts[2])
            elif parts[0] == "sites" and len(parts) == 2:
                declared = int(parts[1])
            elif len(parts) == 3:
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
            else:
                raise ValueError("expected 'i j coupling', 'field i value' or 'sites n'")
        except ValueError as exc:
            raise ConfigurationError(f"network line {number}: {exc}: {raw.strip()!r}") from exc
    mentioned = [s for e in edges for s in e[:2]] + list(fields)
    n = declared if declared is not None else max(mentioned, default=0)
    if any(s < 1 for s in mentioned) or n < max(mentioned, default=0):
        raise ConfigurationError(f"network sites must lie in 1..{n}")
    try:
        return SpinNetwork(
            n=n,
            edges=tuple(edges),
            fields=tuple(fields.get(site, 0.0) for site in range(1, n + 1)),
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid network: {exc}") from exc


def format_network(network: SpinNetwork) -> str:
    """Write a network in the format read by :func:`parse_network`."""
    lines = [f"sites {network.n}"]
    lines += [f"{i} {j} {format_number(c)}" for i, j, c in network.edges]
    lines += [
        f"field {site} {format_number(value)}"
        for site, value in enumerate(network.fields, start=1)
        if value
    ]
    return "\n".join(lines) + "\n"


def load_network(path: Path) -> SpinNetwork:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read network file {path}: {exc}") from exc
    return parse_network(text)


def barrier_leakage_by_factor(
    J: float, h: float, factors: Sequence[float] = BARRIER_FACTORS, dt: float = DEFAULT_BLOCK_DT
) -> list[tuple[float, float]]:
    """Phase-one router leakage for each barrier magnitude ``factor * h``."""
    template = default_barrier_schedule(J, h, 1.0, dt)
    grid = time_grid(template.phases[0].duration, dt)
    leakage = []
    for factor in factors:
        schedule = template.with_field(factor * h)
        result = simulate_barrier_composite(schedule, KET_1, grid, J, h)
        leakage.append((float(factor), phase_one_leakage(result, schedule)))
    return leakage

