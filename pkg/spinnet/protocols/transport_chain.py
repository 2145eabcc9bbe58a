"""
Resonant state transfer along a spin chain

A uniformly coupled XY chain with equal fields ``h`` on both end sites moves an
excitation from site 1 to site n at times where the two nonzero eigenphases of
the single-excitation Hamiltonian are both odd multiples of pi.

Dynamics run in the vacuum plus single-excitation sector, which is invariant
under every XY Hamiltonian; :func:`restrict` verifies this on each build.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator

from spinnet.common.errors import PreconditionError, require
from spinnet.common.logging import get_logger
from spinnet.common.utils import parallel_map
from spinnet.core.evolution import SpectralPropagator, SubspaceBasis, restrict, site_basis
from spinnet.core.hamiltonians import XY, HamiltonianKind, build_total
from spinnet.core.spin import KET_1, PureState, SpinNetwork

logger = get_logger(__name__)

DEFAULT_SCAN_DT = 1e-4
DEFAULT_SCAN_T_MAX = 2.0
DEFAULT_RESONANCE_EPSILON = 1e-3
DEFAULT_TRANSPORT_TIME = 1.005
DEFAULT_ROBUSTNESS_SPAN = 0.2
# The site-2 field has nominal value 0, so its sweep is scaled by h instead.
DEFAULT_H2_SPAN = 0.1
DEFAULT_SWEEP_POINTS = 201

RobustnessParameter = Literal["h1", "h2", "J12"]


class ChainSpec(BaseModel):
    """Uniform XY chain with field ``h`` on sites 1 and n."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=3, ge=3, description="Chain length")
    J: float = Field(description="Uniform coupling, rad/s")
    h: float = Field(description="End-site field, rad/s")

    @field_validator("J")
    @classmethod
    def _nonzero_coupling(cls, value: float) -> float:
        if value == 0 or not math.isfinite(value):
            raise ValueError("J must be finite and nonzero")
        return value

    def network(self) -> SpinNetwork:
        fields = [0.0] * self.n
        fields[0] = fields[-1] = self.h
        edges = tuple((k, k + 1, self.J) for k in range(1, self.n))
        return SpinNetwork(n=self.n, edges=edges, fields=tuple(fields))


@dataclass(frozen=True, eq=False)
class TransportResult:
    """Fidelity of the target site state over a time grid."""

    times: npt.NDArray[np.float64]
    fidelities: npt.NDArray[np.float64]

    def best(self) -> tuple[float, float]:
        """(t, fidelity) at the first maximum of the series."""
        index = int(np.argmax(self.fidelities))
        return float(self.times[index]), float(self.fidelities[index])


@dataclass(frozen=True, eq=False)
class ChainEigensystem:
    """Closed-form single-excitation eigensystem of the 3-spin chain.

    Vectors are the unnormalized columns in the basis (|001>, |010>, |100>) and
    ``coefficients`` expand ``|100>`` in them.
    """

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: npt.NDArray[np.float64]
    coefficients: npt.NDArray[np.float64]
    vacuum_energy: float


def time_grid(t_max: float, dt: float, t_min: float = 0.0) -> npt.NDArray[np.float64]:
    """``t_min + k*dt`` for every k with the time not beyond ``t_max``."""
    require(dt > 0, f"dt must be positive, got {dt}")
    require(t_max >= t_min, f"t_max {t_max} lies before t_min {t_min}")
    steps = int(math.floor((t_max - t_min) / dt + 1e-9))
    return t_min + np.arange(steps + 1) * dt


def sector_propagator(
    network: SpinNetwork, kind: HamiltonianKind = XY
) -> tuple[SubspaceBasis, SpectralPropagator]:
    """Spectral propagator on the vacuum plus single-excitation sector.

    Sector index 0 is the vacuum and index k is site k flipped.
    """
    basis = site_basis(network.n, vacuum=True)
    h = restrict(build_total(network, kind), basis)
    logger.debug("Sector Hamiltonian of dimension %d for %d spins", basis.dim, network.n)
    return basis, SpectralPropagator(h)


def _sector_qubit(n: int, site: int, qubit: PureState) -> PureState:
    vector = np.zeros(n + 1, dtype=complex)
    vector[0] = qubit[0]
    vector[site] = qubit[1]
    return vector


def qubit_transfer_fidelities(
    network: SpinNetwork,
    source: int,
    target: int,
    qubit: PureState,
    times: npt.ArrayLike,
    kind: HamiltonianKind = XY,
    z_phase: bool = False,
) -> npt.NDArray[np.float64]:
    """Fidelity of ``qubit`` on ``target`` after preparing it on ``source``.

    Every other spin starts in ``|0>``; the fidelity is the full-state overlap with
    the target product state. With ``z_phase`` a Z rotation on the target site is
    chosen per time point to maximize the overlap.
    """
    for site in (source, target):
        require(1 <= site <= network.n, f"site {site} outside 1..{network.n}")
    qubit = np.asarray(qubit, dtype=complex)
    _, prop = sector_propagator(network, kind)
    states = prop.trajectory(_sector_qubit(network.n, source, qubit), times)
    if z_phase:
        overlap = np.abs(np.conj(qubit[0]) * states[:, 0]) + np.abs(
            np.conj(qubit[1]) * states[:, target]
        )
    else:
        overlap = np.abs(states @ np.conj(_sector_qubit(network.n, target, qubit)))
    return np.minimum(overlap, 1.0)


def restricted_chain_matrix(h: float, J: float) -> npt.NDArray[np.float64]:
    """3-spin chain Hamiltonian in the basis (|001>, |010>, |100>)."""
    return np.array([[0.0, J / 2, 0.0], [J / 2, h, J / 2], [0.0, J / 2, 0.0]])


def chain3_eigensystem(h: float, J: float) -> ChainEigensystem:
    """Closed-form eigenvalues ``{0, (h -/+ sqrt(h^2 + 2J^2))/2}``, eigenvectors and
    expansion coefficients of ``|100>``.

    Raises:
        PreconditionError: If ``J`` is zero
    """
    require(J != 0, "the 3-spin eigensystem needs J != 0")
    s = math.sqrt(h * h + 2 * J * J)
    eigenvalues = np.array([0.0, (h - s) / 2, (h + s) / 2])
    eigenvectors = np.array(
        [
            [-1.0, 1.0, 1.0],
            [0.0, (h - s) / J, (h + s) / J],
            [1.0, 1.0, 1.0],
        ]
    )
    coefficients = np.array([0.5, (h + s) / (4 * s), (s - h) / (4 * s)])
    return ChainEigensystem(eigenvalues, eigenvectors, coefficients, vacuum_energy=h)


def resonance_time_scan(
    h: float,
    J: float,
    t_max: float = DEFAULT_SCAN_T_MAX,
    dt: float = DEFAULT_SCAN_DT,
    epsilon: float = DEFAULT_RESONANCE_EPSILON,
) -> list[float]:
    """Times where ``cos(l2 t)`` and ``cos(l3 t)`` are both below ``-1 + epsilon``.

    Consecutive qualifying grid points form one window; each window reports the
    point where the larger of the two cosines is smallest.

    Raises:
        PreconditionError: If ``dt`` exceeds ``pi / (10 |l3|)``
    """
    if J == 0:
        logger.info("J = 0 decouples the end sites; no resonance candidates")
        return []
    eig = chain3_eigensystem(h, J)
    fast = float(np.max(np.abs(eig.eigenvalues)))
    if dt > math.pi / (10 * fast):
        raise PreconditionError(
            f"dt={dt} does not resolve the fast frequency {fast:.4g} rad/s "
            f"(need dt <= {math.pi / (10 * fast):.3g})"
        )
    times = time_grid(t_max, dt)
    worst = np.maximum(np.cos(eig.eigenvalues[1] * times), np.cos(eig.eigenvalues[2] * times))
    hits = np.flatnonzero(worst < -1.0 + epsilon)
    if hits.size == 0:
        return []
    windows = np.split(hits, np.flatnonzero(np.diff(hits) > 1) + 1)
    candidates = [float(times[w[np.argmin(worst[w])]]) for w in windows]
    logger.debug("Resonance scan found %d candidate(s) up to t=%g", len(candidates), t_max)
    return candidates


def transport_series(
    spec: ChainSpec, qubit: PureState, times: npt.ArrayLike, z_phase: bool = False
) -> TransportResult:
    """Site 1 to site n transport fidelity over ``times``."""
    grid = np.asarray(times, dtype=float)
    fidelities = qubit_transfer_fidelities(
        spec.network(), 1, spec.n, qubit, grid, z_phase=z_phase
    )
    return TransportResult(grid, fidelities)


def transport_fidelity(
    spec: ChainSpec, qubit: PureState, t: float, z_phase: bool = False
) -> float:
    """Site 1 to site n transport fidelity at one time."""
    return float(transport_series(spec, qubit, [t], z_phase=z_phase).fidelities[0])


class BlochStatistics(BaseModel):
    """Summary of transport fidelity over a grid of Bloch-sphere inputs."""

    model_config = ConfigDict(frozen=True)

    mean: float
    std: float
    min: float
    max: float


def bloch_grid(
    n_theta: int, n_phi: int, phi_offset: float = 0.0
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Uniform grids ``theta`` in [0, pi] and ``phi`` in [0, 2 pi) shifted by ``phi_offset``."""
    require(n_theta >= 2 and n_phi >= 2, "Bloch grids need at least 2 points per axis")
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = phi_offset + np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    return theta, phi


def bloch_fidelities(
    spec: ChainSpec, t: float, n_theta: int = 100, n_phi: int = 100, phi_offset: float = 0.0
) -> npt.NDArray[np.float64]:
    """Transport fidelity for every grid input, shape ``(n_theta, n_phi)``.

    The evolution is linear in the input qubit, so one 2x2 block of the sector
    propagator covers the whole grid.
    """
    theta, phi = bloch_grid(n_theta, n_phi, phi_offset)
    _, prop = sector_propagator(spec.network())
    u = prop.at(t)
    block = u[np.ix_([0, spec.n], [0, 1])]
    a = np.repeat(np.cos(theta / 2)[:, None], phi.size, axis=1).astype(complex)
    b = np.exp(1j * phi)[None, :] * np.sin(theta / 2)[:, None]
    q = np.stack([a, b], axis=-1)
    overlap = np.einsum("...i,ij,...j->...", np.conj(q), block, q)
    return np.minimum(np.abs(overlap), 1.0)


def bloch_sweep(
    spec: ChainSpec, t: float, n_theta: int = 100, n_phi: int = 100, phi_offset: float = 0.0
) -> BlochStatistics:
    """Fidelity statistics over a uniform ``theta`` x ``phi`` grid of inputs."""
    values = bloch_fidelities(spec, t, n_theta, n_phi, phi_offset)
    return BlochStatistics(
        mean=float(values.mean()),
        std=float(values.std()),
        min=float(values.min()),
        max=float(values.max()),
    )


def perturbed_network(spec: ChainSpec, parameter: RobustnessParameter, value: float) -> SpinNetwork:
    """Chain network with one parameter replaced."""
    network = spec.network()
    if parameter == "h1":
        return network.with_field(1, value)
    if parameter == "h2":
        return network.with_field(2, value)
    if parameter == "J12":
        return network.with_coupling(1, 2, value)
    raise PreconditionError(f"unknown robustness parameter {parameter!r}; expected h1, h2 or J12")


def nominal_value(spec: ChainSpec, parameter: RobustnessParameter) -> float:
    nominal = {"h1": spec.h, "h2": 0.0, "J12": spec.J}
    if parameter not in nominal:
        raise PreconditionError(
            f"unknown robustness parameter {parameter!r}; expected h1, h2 or J12"
        )
    return nominal[parameter]


def default_sweep_values(
    spec: ChainSpec, parameter: RobustnessParameter, points: int = DEFAULT_SWEEP_POINTS
) -> npt.NDArray[np.float64]:
    """Symmetric sweep around the nominal value.

    h1 and J12 span +/-20% of nominal; h2 spans +/-0.1 h around zero.
    """
    nominal = nominal_value(spec, parameter)
    span = DEFAULT_H2_SPAN * abs(spec.h) if parameter == "h2" else DEFAULT_ROBUSTNESS_SPAN * abs(nominal)
    return nominal + np.linspace(-span, span, points)


def robustness_sweep(
    spec: ChainSpec,
    parameter: RobustnessParameter,
    values: Sequence[float],
    qubit: PureState = KET_1,
    t: float = DEFAULT_TRANSPORT_TIME,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Transport fidelity at ``t`` with one parameter set to each of ``values``."""
    nominal_value(spec, parameter)

    def point(value: float) -> tuple[float, float]:
        network = perturbed_network(spec, parameter, value)
        fidelity = qubit_transfer_fidelities(network, 1, spec.n, qubit, [t])[0]
        return float(value), float(fidelity)

    return parallel_map(point, [float(v) for v in values], threads)
