"""
Filtered Hamiltonian engineering of a star topology

A network evolves alternately under a stage-dependent Zeeman Hamiltonian
(period ``tau``) and a double-quantum (DQ) Hamiltonian (``t_i / N`` per
stage). With the stage frequencies tuned so that the filter function vanishes
for peripheral-peripheral pairs, the zero-order average Hamiltonian keeps
only the radial couplings of the central spin.

Conventions: the central spin is site 1. ``U_Z^(i) = exp(-i tau H_Z^(i))``
and one cycle applies ``U_DQ(t_i/N) U_Z^(i)`` for i = 1..L in time order.
"""

import math
from collections.abc import Sequence
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spinnet.common.errors import PreconditionError, require
from spinnet.common.logging import get_logger
from spinnet.common.utils import parallel_map
from spinnet.core.evolution import Schedule, propagator, schedule_propagator
from spinnet.core.hamiltonians import DOUBLE_QUANTUM, build_coupling, build_zeeman, pair_operator
from spinnet.core.spin import (
    Operator,
    PureState,
    SpinNetwork,
    assert_unitary,
    basis_state,
    gate_fidelity,
    state_fidelity,
    sz_diagonal,
)

logger = get_logger(__name__)

DEFAULT_TAU = 1.0
DEFAULT_STAR_SIZE = 5
DEFAULT_RADIAL_COUPLING = 20.0
PERIPHERAL_COUPLING_RANGE = (0.5, 1.5)
RANDOM_TIME_UPPER = 0.1
ROBUSTNESS_CYCLE = 8
CONDITION_TOL = 1e-9
SEQUENCE_UNITARY_TOL = 1e-9

Metric = Literal["gate", "state"]
Frame = Literal["lab", "toggling"]


class FilteredSequenceSpec(BaseModel):
    """Stage frequencies and DQ durations of an L-stage filtered sequence."""

    model_config = ConfigDict(frozen=True)

    L: int = Field(ge=1, description="Stages per cycle")
    N: int = Field(ge=1, description="Number of cycles")
    tau: float = Field(default=DEFAULT_TAU, gt=0, description="Zeeman period in seconds")
    omega: tuple[float, ...] = Field(description="Peripheral frequency per stage, rad/s")
    Omega: tuple[float, ...] = Field(description="Central frequency per stage, rad/s")
    time_array: tuple[float, ...] = Field(description="Total DQ time per stage, seconds")

    @model_validator(mode="after")
    def _check_lengths(self) -> "FilteredSequenceSpec":
        for name in ("omega", "Omega", "time_array"):
            if len(getattr(self, name)) != self.L:
                raise ValueError(f"{name} must have length L={self.L}")
        if any(t < 0 or not math.isfinite(t) for t in self.time_array):
            raise ValueError("time_array entries must be finite and >= 0")
        return self

    @classmethod
    def with_defaults(
        cls, L: int, N: int, time_array: Sequence[float], tau: float = DEFAULT_TAU
    ) -> "FilteredSequenceSpec":
        """Sequence using :func:`default_parameters` for the stage frequencies."""
        omega, Omega = default_parameters(L)
        return cls(
            L=L,
            N=N,
            tau=tau,
            omega=tuple(omega),
            Omega=tuple(Omega),
            time_array=tuple(float(t) for t in time_array),
        )

    def with_time_array(self, time_array: Sequence[float]) -> "FilteredSequenceSpec":
        return self.model_copy(update={"time_array": tuple(float(t) for t in time_array)})

    @property
    def cycle_dq_time(self) -> float:
        """DQ time elapsed per cycle, ``sum(t_i) / N``."""
        return sum(self.time_array) / self.N


class StarNetwork(SpinNetwork):
    """Spin network whose site 1 is the central spin; sites 2..n are peripheral."""

    @model_validator(mode="after")
    def _check_star(self) -> "StarNetwork":
        if self.n < 3:
            raise ValueError(f"a star needs at least 3 spins, got {self.n}")
        return self

    def radial_edges(self) -> set[frozenset[int]]:
        return {frozenset((i, j)) for i, j, _ in self.edges if 1 in (i, j)}

    def radial_subgraph(self) -> SpinNetwork:
        return self.subgraph(self.radial_edges())


def random_star(
    n: int = DEFAULT_STAR_SIZE,
    b_radial: float = DEFAULT_RADIAL_COUPLING,
    seed: int | None = None,
    couplings: bool = True,
) -> StarNetwork:
    """All-to-all star: radial couplings ``b_radial``, peripheral pairs drawn uniformly
    from ``PERIPHERAL_COUPLING_RANGE * b_radial``.

    With ``couplings=False`` every coupling is zero.
    """
    rng = np.random.default_rng(seed)
    low, high = PERIPHERAL_COUPLING_RANGE
    edges = [(1, j, b_radial if couplings else 0.0) for j in range(2, n + 1)]
    for j in range(2, n + 1):
        for k in range(j + 1, n + 1):
            value = float(rng.uniform(low, high)) * b_radial
            edges.append((j, k, value if couplings else 0.0))
    return StarNetwork(n=n, edges=tuple(edges))


def random_time_array(L: int, seed: int | None = None, upper: float = RANDOM_TIME_UPPER) -> list[float]:
    """Stage durations drawn uniformly from ``(0, upper]``."""
    rng = np.random.default_rng(seed)
    return [float(upper - rng.uniform(0.0, upper)) for _ in range(L)]


def filter_function(N: int, x: npt.ArrayLike) -> complex | npt.NDArray[np.complex128]:
    """``F_N(x) = (1 - e^{iNx}) / (1 - e^{ix})``, equal to ``N`` where x is a multiple of 2 pi.

    Near the removable singularity the geometric sum is evaluated directly.
    """
    values = np.atleast_1d(np.asarray(x, dtype=float))
    offset = np.remainder(values, 2.0 * math.pi)
    near = np.minimum(offset, 2.0 * math.pi - offset) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (1.0 - np.exp(1j * N * values)) / (1.0 - np.exp(1j * values))
    result = closed.astype(complex)
    if np.any(near):
        k = np.arange(N)
        result[near] = np.exp(1j * np.outer(values[near], k)).sum(axis=1)
    if np.ndim(x) == 0:
        return complex(result[0])
    return result


def default_parameters(L: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Uniform stage frequencies ``omega = (2L+1)/(2L) pi`` and ``Omega = -omega``."""
    require(L >= 1, f"L must be at least 1, got {L}")
    omega = np.full(L, (2 * L + 1) / (2 * L) * math.pi)
    return omega, -omega


class ConditionReport(BaseModel):
    """Residuals of the decoupling conditions, each modulo its period."""

    model_config = ConfigDict(frozen=True)

    peripheral_residual: float
    central_residuals: tuple[float, ...]
    tolerance: float = CONDITION_TOL

    @property
    def passed(self) -> bool:
        return self.peripheral_residual < self.tolerance and all(
            r < self.tolerance for r in self.central_residuals
        )


def _distance_to_lattice(x: float, offset: float, period: float) -> float:
    shifted = x - offset
    return abs(shifted - period * round(shifted / period))


def check_conditions(spec: FilteredSequenceSpec, tolerance: float = CONDITION_TOL) -> ConditionReport:
    """Check ``2 tau sum(omega) = (2l+1) pi`` and ``(Omega_i + omega_i) tau = 2 m_i pi``."""
    peripheral = _distance_to_lattice(2.0 * spec.tau * sum(spec.omega), math.pi, 2.0 * math.pi)
    central = tuple(
        _distance_to_lattice((big + small) * spec.tau, 0.0, 2.0 * math.pi)
        for big, small in zip(spec.Omega, spec.omega)
    )
    return ConditionReport(
        peripheral_residual=peripheral, central_residuals=central, tolerance=tolerance
    )


def stage_fields(spec: FilteredSequenceSpec, n: int, stage: int) -> npt.NDArray[np.float64]:
    """Per-site Zeeman frequencies during stage ``stage`` (1-based)."""
    fields = np.full(n, spec.omega[stage - 1])
    fields[0] = spec.Omega[stage - 1]
    return fields


def _toggled_dq(network: SpinNetwork, angles: npt.NDArray[np.float64]) -> Operator:
    """``sum b/2 (S+S+ e^{i(a_l + a_m)} + S-S- e^{-i(a_l + a_m)})`` for per-site angles."""
    h = np.zeros((network.dim, network.dim), dtype=complex)
    for i, j, coupling in network.edges:
        if not coupling:
            continue
        phase = np.exp(1j * (angles[i - 1] + angles[j - 1]))
        raising = pair_operator(network.n, i, j, "plus", "plus")
        h += 0.5 * coupling * (phase * raising + np.conj(phase) * raising.conj().T)
    return h


def toggling_frame_hamiltonian(
    network: SpinNetwork, stage_fields: npt.ArrayLike, tau: float
) -> Operator:
    """DQ Hamiltonian seen in the frame of ``U_Z = exp(-i tau sum_j f_j S_j^z)``.

    Satisfies ``U_Z^dagger U_DQ(t) U_Z = exp(-i t H_m)`` for every t.
    """
    fields = np.asarray(stage_fields, dtype=float)
    require(fields.shape == (network.n,), f"expected {network.n} stage fields")
    return _toggled_dq(network, fields * tau)


def zeeman_propagator(network_n: int, fields: npt.ArrayLike, duration: float) -> Operator:
    """Diagonal ``exp(-i duration sum_j f_j S_j^z)``."""
    diagonal = np.zeros(2**network_n)
    for site, value in enumerate(np.asarray(fields, dtype=float), start=1):
        diagonal += value * sz_diagonal(network_n, site)
    return np.diag(np.exp(-1j * duration * diagonal))


def cycle_schedule(spec: FilteredSequenceSpec, network: SpinNetwork) -> Schedule:
    """One cycle as alternating Zeeman and DQ segments."""
    h_dq = build_coupling(network, DOUBLE_QUANTUM)
    schedule = Schedule()
    for stage in range(1, spec.L + 1):
        h_z = build_zeeman(network.with_fields(stage_fields(spec, network.n, stage)))
        schedule = schedule.then(h_z, spec.tau).then(h_dq, spec.time_array[stage - 1] / spec.N)
    return schedule


def sequence_propagators(spec: FilteredSequenceSpec, network: SpinNetwork) -> list[Operator]:
    """Propagators after cycles 1..N by direct schedule evolution.

    Raises:
        NumericalError: If any propagator departs from unitarity by more than 1e-9
    """
    one_cycle = schedule_propagator(cycle_schedule(spec, network))
    result = []
    current = np.eye(network.dim, dtype=complex)
    for _ in range(spec.N):
        current = one_cycle @ current
        assert_unitary(current, SEQUENCE_UNITARY_TOL)
        result.append(current)
    return result


def sequence_propagator(spec: FilteredSequenceSpec, network: SpinNetwork, cycles: int) -> Operator:
    """Propagator after ``cycles`` repetitions of the sequence."""
    require(1 <= cycles <= spec.N, f"cycles must lie in 1..{spec.N}, got {cycles}")
    one_cycle = schedule_propagator(cycle_schedule(spec, network))
    total = np.linalg.matrix_power(one_cycle, cycles)
    assert_unitary(total, SEQUENCE_UNITARY_TOL)
    return total


def net_zeeman_rotation(spec: FilteredSequenceSpec, network: SpinNetwork, cycles: int) -> Operator:
    """Product of every Zeeman period applied during ``cycles`` cycles."""
    total = sum(stage_fields(spec, network.n, stage) for stage in range(1, spec.L + 1))
    return zeeman_propagator(network.n, total, cycles * spec.tau)


def accumulated_zeeman_counts(L: int, N: int) -> npt.NDArray[np.int64]:
    """How many times each stage's Zeeman period precedes every DQ block.

    Entry ``[c, k, i]`` (0-based) counts stage ``i+1`` periods applied before the
    DQ block of stage ``k+1`` in cycle ``c+1``, walking the sequence in time order.
    """
    counts = np.zeros((N, L, L), dtype=np.int64)
    applied = np.zeros(L, dtype=np.int64)
    for cycle in range(N):
        for stage in range(L):
            applied[stage] += 1
            counts[cycle, stage] = applied
    return counts


def multiplicative_terms(L: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Integer coefficients of the first-cycle phase for each stage series.

    Returns:
        ``(central_peripheral, peripheral_peripheral)``. Row k of the first has the
        coefficients of ``(Omega_1..Omega_L, omega_1..omega_L)``: one for stages
        up to k. Row k of the second has the ``omega`` coefficients: two for stages
        up to k.
    """
    lower = np.tril(np.ones((L, L), dtype=np.int64))
    return np.hstack([lower, lower]), 2 * lower


def _block_angles(spec: FilteredSequenceSpec, n: int, counts: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    stage_sum = sum(c * stage_fields(spec, n, s + 1) for s, c in enumerate(counts))
    return spec.tau * stage_sum


def toggling_frame_propagator(
    spec: FilteredSequenceSpec, network: SpinNetwork, cycles: int
) -> Operator:
    """Product of ``exp(-i t_k/N H_m)`` with accumulated Zeeman angles, in time order."""
    require(1 <= cycles <= spec.N, f"cycles must lie in 1..{spec.N}, got {cycles}")
    counts = accumulated_zeeman_counts(spec.L, cycles)
    total = np.eye(network.dim, dtype=complex)
    for cycle in range(cycles):
        for stage in range(spec.L):
            h_m = _toggled_dq(network, _block_angles(spec, network.n, counts[cycle, stage]))
            total = propagator(h_m, spec.time_array[stage] / spec.N) @ total
    return total


def rewritten_propagator(spec: FilteredSequenceSpec, network: SpinNetwork, cycles: int) -> Operator:
    """Net Zeeman rotation times the toggling-frame product; equals the direct product."""
    return net_zeeman_rotation(spec, network, cycles) @ toggling_frame_propagator(
        spec, network, cycles
    )


def series_sums(
    spec: FilteredSequenceSpec, closed_form: bool = True
) -> dict[str, npt.NDArray[np.complex128]]:
    """Geometric series multiplying each stage's central-peripheral and
    peripheral-peripheral terms in the average Hamiltonian.

    With ``closed_form`` the sums are a multiplicative term times the filter
    function; otherwise they are summed cycle by cycle.
    """
    omega = np.asarray(spec.omega)
    central = np.asarray(spec.Omega) + omega
    if closed_form:
        cp_terms, pp_terms = multiplicative_terms(spec.L)
        both = np.concatenate([np.asarray(spec.Omega), omega])
        cp_filter = filter_function(spec.N, spec.tau * central.sum())
        pp_filter = filter_function(spec.N, 2.0 * spec.tau * omega.sum())
        return {
            "cp": np.exp(1j * spec.tau * (cp_terms @ both)) * cp_filter,
            "pp": np.exp(1j * spec.tau * (pp_terms @ omega)) * pp_filter,
        }
    counts = accumulated_zeeman_counts(spec.L, spec.N)
    return {
        "cp": np.exp(1j * spec.tau * (counts @ central)).sum(axis=0),
        "pp": np.exp(2j * spec.tau * (counts @ omega)).sum(axis=0),
    }


def average_hamiltonian(
    spec: FilteredSequenceSpec, network: SpinNetwork, cycles: int | None = None
) -> Operator:
    """Zero-order average of the toggling-frame Hamiltonians over ``cycles`` cycles."""
    cycles = spec.N if cycles is None else cycles
    require(1 <= cycles <= spec.N, f"cycles must lie in 1..{spec.N}, got {cycles}")
    total_time = cycles * spec.cycle_dq_time
    require(total_time > 0, "average Hamiltonian needs a nonzero DQ time")
    counts = accumulated_zeeman_counts(spec.L, cycles)
    h = np.zeros((network.dim, network.dim), dtype=complex)
    for cycle in range(cycles):
        for stage in range(spec.L):
            weight = spec.time_array[stage] / spec.N
            if weight:
                angles = _block_angles(spec, network.n, counts[cycle, stage])
                h += weight * _toggled_dq(network, angles)
    return h / total_time


def radial_hamiltonian(network: StarNetwork) -> Operator:
    """``H_0 = sum_j b_1j (S_1^x S_j^x - S_1^y S_j^y)``."""
    return build_coupling(network.radial_subgraph(), DOUBLE_QUANTUM)


def star_target(network: StarNetwork, elapsed_dq_time: float) -> Operator:
    """Target propagator ``exp(-i H_0 T)`` for elapsed DQ time ``T``."""
    return propagator(radial_hamiltonian(network), elapsed_dq_time)


def central_flip_state(n: int) -> PureState:
    """Central spin flipped, peripheral spins in ``|0>``."""
    return basis_state("1" + "0" * (n - 1))


def fidelity_profile(
    spec: FilteredSequenceSpec,
    network: StarNetwork,
    metric: Metric = "gate",
    frame: Frame = "lab",
    initial_state: PureState | None = None,
) -> list[tuple[int, float]]:
    """Fidelity of the sequence against the star target after each cycle.

    Args:
        spec: Sequence parameters
        network: Star network (site 1 central)
        metric: ``gate`` for ``|Tr(U_target^dagger U)|/d`` or ``state`` for the overlap of
            evolved states started from ``initial_state`` (default: central spin flipped)
        frame: ``lab`` compares the raw propagator; ``toggling`` first removes the net
            Zeeman rotation accumulated by the sequence

    Returns:
        List of (cycle, fidelity) for cycle = 1..N
    """
    if metric not in ("gate", "state"):
        raise PreconditionError(f"unknown metric {metric!r}")
    if frame not in ("lab", "toggling"):
        raise PreconditionError(f"unknown frame {frame!r}")
    h0 = radial_hamiltonian(network)
    psi0 = central_flip_state(network.n) if initial_state is None else initial_state
    profile = []
    for cycle, u in enumerate(sequence_propagators(spec, network), start=1):
        if frame == "toggling":
            u = net_zeeman_rotation(spec, network, cycle).conj().T @ u
        target = propagator(h0, cycle * spec.cycle_dq_time)
        if metric == "gate":
            value = gate_fidelity(target, u)
        else:
            value = state_fidelity(target @ psi0, u @ psi0)
        profile.append((cycle, value))
    logger.debug("Computed %s/%s fidelity profile over %d cycles", metric, frame, spec.N)
    return profile


def peak_cycles(profile: Sequence[tuple[int, float]], start: float = 1.0) -> list[int]:
    """Cycles whose fidelity is a strict local maximum.

    The cycle-0 fidelity ``start`` is the left neighbour of the first point; the
    last point only needs to exceed its left neighbour.
    """
    values = np.array([start] + [f for _, f in profile] + [-np.inf])
    middle = values[1:-1]
    mask = (middle > values[:-2]) & (middle > values[2:])
    return [profile[i][0] for i in np.flatnonzero(mask)]


def time_robustness(
    spec_template: FilteredSequenceSpec,
    network: StarNetwork,
    t_values: Sequence[float],
    cycle: int = ROBUSTNESS_CYCLE,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Gate fidelity at ``cycle`` for uniform time arrays ``[t, ..., t]``."""
    require(cycle <= spec_template.N, f"cycle {cycle} exceeds N={spec_template.N}")
    h0 = radial_hamiltonian(network)

    def point(t: float) -> tuple[float, float]:
        spec = spec_template.with_time_array([t] * spec_template.L)
        u = sequence_propagator(spec, network, cycle)
        return float(t), gate_fidelity(propagator(h0, cycle * spec.cycle_dq_time), u)

    return parallel_map(point, list(t_values), threads)
