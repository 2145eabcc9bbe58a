"""
Time evolution for spinnet

Exact piecewise-constant evolution through Hermitian eigendecomposition, plus
excitation-subspace reduction for Hamiltonians that conserve total S^z.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from spinnet.common.errors import NumericalError, PreconditionError
from spinnet.common.logging import get_logger
from spinnet.core.spin import HERMITIAN_TOL, Operator, PureState, hermiticity_residual

logger = get_logger(__name__)

INVARIANCE_TOL = 1e-10


def _hermitian_scale(h: Operator) -> float:
    return max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0


def _require_hermitian(h: Operator) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise PreconditionError(f"expected a square operator, got shape {h.shape}")
    residual = hermiticity_residual(h) / _hermitian_scale(h)
    if residual > HERMITIAN_TOL:
        raise PreconditionError(f"operator is not Hermitian (relative residual {residual:.2e})")


class SpectralPropagator:
    """Propagator ``exp(-iHt)`` for one Hamiltonian at many times.

    The eigendecomposition is computed once; every call afterwards costs a
    matrix-vector product per time.
    """

    def __init__(self, h: Operator):
        _require_hermitian(h)
        self.dim = h.shape[0]
        self.energies, self.vectors = np.linalg.eigh(h)

    def at(self, t: float) -> Operator:
        phases = np.exp(-1j * self.energies * t)
        return (self.vectors * phases) @ self.vectors.conj().T

    def evolve(self, state: PureState, t: float) -> PureState:
        coefficients = self.vectors.conj().T @ state
        return self.vectors @ (np.exp(-1j * self.energies * t) * coefficients)

    def trajectory(self, state: PureState, times: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """States at every time, shape ``(len(times), dim)``."""
        if state.shape != (self.dim,):
            raise PreconditionError(f"state of shape {state.shape} does not match dim {self.dim}")
        coefficients = self.vectors.conj().T @ state
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * coefficients) @ self.vectors.T

    def amplitudes(
        self, state: PureState, target: PureState, times: npt.ArrayLike
    ) -> npt.NDArray[np.complex128]:
        """``<target|exp(-iHt)|state>`` for every time."""
        coefficients = self.vectors.conj().T @ state
        weights = (target.conj() @ self.vectors) * coefficients
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return phases @ weights


def propagator(h: Operator, t: float) -> Operator:
    """``exp(-i h t)`` via Hermitian eigendecomposition.

    Raises:
        PreconditionError: If ``h`` is not Hermitian
    """
    if t == 0:
        _require_hermitian(h)
        return np.eye(h.shape[0], dtype=complex)
    return SpectralPropagator(h).at(t)


@dataclass(frozen=True, eq=False)
class Segment:
    hamiltonian: Operator
    duration: float


@dataclass(frozen=True, eq=False)
class Schedule:
    """Ordered piecewise-constant evolution segments."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        dims = {seg.hamiltonian.shape for seg in self.segments}
        if len(dims) > 1:
            raise PreconditionError(f"segment dimensions differ: {sorted(dims)}")
        for seg in self.segments:
            if not math.isfinite(seg.duration) or seg.duration < 0:
                raise PreconditionError(f"invalid segment duration {seg.duration}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Operator, float]]) -> "Schedule":
        return cls(tuple(Segment(h, float(t)) for h, t in pairs))

    @property
    def total_time(self) -> float:
        return sum(seg.duration for seg in self.segments)

    @property
    def dim(self) -> int | None:
        return self.segments[0].hamiltonian.shape[0] if self.segments else None

    def then(self, hamiltonian: Operator, duration: float) -> "Schedule":
        return Schedule(self.segments + (Segment(hamiltonian, float(duration)),))


def evolve(schedule: Schedule, start: PureState) -> PureState:
    """Apply every segment propagator in time order.

    Raises:
        PreconditionError: If the state and segment dimensions differ
    """
    if schedule.dim is not None and start.shape != (schedule.dim,):
        raise PreconditionError(f"state of shape {start.shape} does not match dim {schedule.dim}")
    state = np.asarray(start, dtype=complex)
    for seg in schedule.segments:
        if seg.duration:
            state = SpectralPropagator(seg.hamiltonian).evolve(state, seg.duration)
    return state


def schedule_propagator(schedule: Schedule) -> Operator:
    """Total unitary of a schedule, later segments multiplied on the left."""
    if schedule.dim is None:
        raise PreconditionError("empty schedule has no dimension")
    total = np.eye(schedule.dim, dtype=complex)
    for seg in schedule.segments:
        if seg.duration:
            total = propagator(seg.hamiltonian, seg.duration) @ total
    return total


@dataclass(frozen=True)
class SubspaceBasis:
    """Ordered computational basis indices spanning a subspace."""

    parent_dim: int
    indices: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(set(self.indices)) != len(self.indices):
            raise PreconditionError("subspace indices must be distinct")
        if any(not 0 <= i < self.parent_dim for i in self.indices):
            raise PreconditionError(f"subspace index outside 0..{self.parent_dim - 1}")

    @property
    def dim(self) -> int:
        return len(self.indices)

    def complement(self) -> npt.NDArray[np.int64]:
        mask = np.ones(self.parent_dim, dtype=bool)
        mask[list(self.indices)] = False
        return np.flatnonzero(mask)

    def project(self, state: PureState) -> PureState:
        """Components of a parent-space state in this basis."""
        return np.asarray(state)[list(self.indices)]

    def embed(self, vector: PureState) -> PureState:
        """Lift a subspace vector back into the parent space."""
        if vector.shape != (self.dim,):
            raise PreconditionError(f"vector of shape {vector.shape} does not match dim {self.dim}")
        state = np.zeros(self.parent_dim, dtype=complex)
        state[list(self.indices)] = vector
        return state

    def leakage(self, state: PureState) -> float:
        """Population outside the subspace."""
        outside = np.asarray(state)[self.complement()]
        return float(np.sum(np.abs(outside) ** 2))


def excitation_basis(n: int, counts: int | Sequence[int]) -> SubspaceBasis:
    """Basis of all states with the given number(s) of flipped spins, ascending index."""
    wanted = {counts} if isinstance(counts, int) else set(counts)
    indices = sorted(i for i in range(2**n) if int(i).bit_count() in wanted)
    return SubspaceBasis(2**n, tuple(indices))


def site_basis(n: int, sites: Sequence[int] | None = None, vacuum: bool = False) -> SubspaceBasis:
    """Single-flip states ordered by site, optionally preceded by the vacuum.

    Site ``k`` flipped is the basis index ``2**(n - k)``.
    """
    chosen = list(sites) if sites is not None else list(range(1, n + 1))
    indices = ([0] if vacuum else []) + [1 << (n - k) for k in chosen]
    return SubspaceBasis(2**n, tuple(indices))


def bits_basis(words: Sequence[str]) -> SubspaceBasis:
    """Basis listed by bit strings, leftmost character is site 1."""
    n = len(words[0])
    return SubspaceBasis(2**n, tuple(int(w, 2) for w in words))


def restrict(h: Operator, basis: SubspaceBasis, tol: float = INVARIANCE_TOL) -> Operator:
    """Sub-block of ``h`` in the given basis order.

    Raises:
        NumericalError: If ``h`` couples the subspace to its complement beyond ``tol``
            (relative to the largest entry of ``h``)
    """
    if h.shape != (basis.parent_dim, basis.parent_dim):
        raise PreconditionError(f"operator of shape {h.shape} does not match {basis.parent_dim}")
    rows = list(basis.indices)
    complement = basis.complement()
    if complement.size and rows:
        coupling = float(np.max(np.abs(h[np.ix_(complement, rows)])))
        residual = coupling / _hermitian_scale(h)
        if residual > tol:
            raise NumericalError(
                f"subspace is not invariant (coupling {coupling:.3e} to the complement)",
                check="subspace invariance",
                residual=residual,
                tolerance=tol,
            )
    return np.array(h[np.ix_(rows, rows)], dtype=complex)


def sector_leakage(states: npt.NDArray[np.complex128], basis: SubspaceBasis) -> float:
    """Largest population outside ``basis`` over a trajectory of parent-space states."""
    complement = basis.complement()
    if complement.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(np.atleast_2d(states)[:, complement]) ** 2, axis=1)))

