"""
Spin operator algebra for spinnet

This module provides the dense operator conventions shared by every other
module: spin-1/2 operators with hbar = 1, ``s^z = diag(+1/2, -1/2)``, basis
state ``|0>`` is the m = +1/2 eigenstate and site 1 is the leftmost (most
significant) tensor factor. It also defines the ``SpinNetwork`` graph type.
"""

import math
from functools import lru_cache, reduce
from typing import Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spinnet.common.errors import PreconditionError, check_residual, require
from spinnet.common.logging import get_logger

logger = get_logger(__name__)

Operator = npt.NDArray[np.complex128]
PureState = npt.NDArray[np.complex128]
Axis = Literal["x", "y", "z", "plus", "minus"]

MAX_SITES = 14
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
GATE_UNITARY_TOL = 1e-8

SINGLE_SPIN: dict[str, npt.NDArray[np.complex128]] = {
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex),
    "plus": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    "minus": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
}

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)

NAMED_QUBITS = {"zero": KET_0, "one": KET_1, "plus": KET_PLUS, "minus": KET_MINUS}


class SpinNetwork(BaseModel):
    """Undirected weighted graph of ``n`` spins with per-site Zeeman fields.

    Sites are 1-based. Couplings and fields are angular frequencies in rad/s.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1, le=MAX_SITES, description="Number of spins")
    edges: tuple[tuple[int, int, float], ...] = Field(
        default=(), description="Couplings as (i, j, strength) with i != j"
    )
    fields: tuple[float, ...] = Field(default=(), description="Zeeman frequency per site")

    @model_validator(mode="before")
    @classmethod
    def _default_fields(cls, data: object) -> object:
        if isinstance(data, dict) and not data.get("fields") and isinstance(data.get("n"), int):
            data = {**data, "fields": (0.0,) * data["n"]}
        return data

    @model_validator(mode="after")
    def _check_graph(self) -> "SpinNetwork":
        if len(self.fields) != self.n:
            raise ValueError(f"expected {self.n} fields, got {len(self.fields)}")
        if not all(math.isfinite(value) for value in self.fields):
            raise ValueError("fields must be finite")
        seen: set[frozenset[int]] = set()
        for i, j, coupling in self.edges:
            if i == j:
                raise ValueError(f"self-loop on site {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge ({i}, {j}) outside sites 1..{self.n}")
            if not math.isfinite(coupling):
                raise ValueError(f"coupling on ({i}, {j}) must be finite")
            key = frozenset((i, j))
            if key in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add(key)
        return self

    @property
    def dim(self) -> int:
        return 2**self.n

    def with_fields(self, fields: "npt.ArrayLike") -> "SpinNetwork":
        """Return a copy with the Zeeman fields replaced."""
        values = tuple(float(v) for v in np.asarray(fields, dtype=float).ravel())
        return SpinNetwork(n=self.n, edges=self.edges, fields=values)

    def with_field(self, site: int, value: float) -> "SpinNetwork":
        """Return a copy with a single site's field replaced."""
        require(1 <= site <= self.n, f"site {site} outside 1..{self.n}")
        fields = list(self.fields)
        fields[site - 1] = float(value)
        return self.with_fields(fields)

    def with_uniform_coupling(self, coupling: float) -> "SpinNetwork":
        """Return a copy with every edge set to ``coupling``."""
        return SpinNetwork(
            n=self.n,
            edges=tuple((i, j, float(coupling)) for i, j, _ in self.edges),
            fields=self.fields,
        )

    def with_coupling(self, i: int, j: int, coupling: float) -> "SpinNetwork":
        """Return a copy with the (i, j) coupling replaced."""
        key = frozenset((i, j))
        edges = []
        found = False
        for a, b, value in self.edges:
            if frozenset((a, b)) == key:
                edges.append((a, b, float(coupling)))
                found = True
            else:
                edges.append((a, b, value))
        require(found, f"no edge between sites {i} and {j}")
        return SpinNetwork(n=self.n, edges=tuple(edges), fields=self.fields)

    def subgraph(self, keep: "set[frozenset[int]]") -> "SpinNetwork":
        """Return a copy keeping only the listed unordered edges."""
        edges = tuple(e for e in self.edges if frozenset(e[:2]) in keep)
        return SpinNetwork(n=self.n, edges=edges, fields=self.fields)

    def adjacency(self) -> npt.NDArray[np.float64]:
        """Symmetric coupling matrix, 0-based."""
        matrix = np.zeros((self.n, self.n))
        for i, j, coupling in self.edges:
            matrix[i - 1, j - 1] = matrix[j - 1, i - 1] = coupling
        return matrix


def _check_site_count(n: int) -> None:
    if n < 1:
        raise PreconditionError(f"site count must be positive, got {n}")
    if n > MAX_SITES:
        raise PreconditionError(f"n={n} exceeds the dense limit of {MAX_SITES} sites")


@lru_cache(maxsize=256)
def _site_operator(n: int, site: int, axis: str) -> Operator:
    factors = [np.eye(2, dtype=complex)] * n
    factors[site - 1] = SINGLE_SPIN[axis]
    op = reduce(np.kron, factors)
    op.setflags(write=False)
    return op


def spin_operator(n: int, site: int, axis: Axis) -> Operator:
    """Return ``I x ... x s^axis x ... x I`` with the single-spin operator at ``site``.

    Args:
        n: Number of spins (at most ``MAX_SITES``)
        site: 1-based site index
        axis: One of x, y, z, plus, minus

    Returns:
        Operator: Read-only dense matrix of dimension ``2**n``
    """
    _check_site_count(n)
    if not 1 <= site <= n:
        raise PreconditionError(f"site {site} outside 1..{n}")
    if axis not in SINGLE_SPIN:
        raise PreconditionError(f"unknown axis {axis!r}")
    return _site_operator(n, site, axis)


def sz_diagonal(n: int, site: int) -> npt.NDArray[np.float64]:
    """Diagonal of ``S_site^z`` as a real vector, without building the matrix."""
    _check_site_count(n)
    if not 1 <= site <= n:
        raise PreconditionError(f"site {site} outside 1..{n}")
    bits = (np.arange(2**n) >> (n - site)) & 1
    return 0.5 - bits.astype(float)


def excitation_numbers(n: int) -> npt.NDArray[np.int64]:
    """Number of flipped (m = -1/2) spins for every computational basis index."""
    _check_site_count(n)
    indices = np.arange(2**n)
    return np.array([int(i).bit_count() for i in indices], dtype=np.int64)


def total_sz(n: int) -> Operator:
    """Total ``sum_i S_i^z``."""
    return np.diag(n / 2.0 - excitation_numbers(n)).astype(complex)


def commutator(a: Operator, b: Operator) -> Operator:
    """Return ``ab - ba``."""
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError(f"commutator needs equal square operators, got {a.shape}, {b.shape}")
    return a @ b - b @ a


def hermiticity_residual(h: Operator) -> float:
    """Max elementwise ``|H - H^dagger|``."""
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def unitarity_residual(u: Operator) -> float:
    """Max elementwise ``|U^dagger U - I|``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) if u.size else 0.0


def assert_hermitian(h: Operator, tol: float = HERMITIAN_TOL) -> None:
    """Raise NumericalError unless ``h`` is Hermitian relative to its scale."""
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    check_residual("hermiticity", hermiticity_residual(h) / scale, tol)


def assert_unitary(u: Operator, tol: float = UNITARY_TOL) -> None:
    """Raise NumericalError unless ``u`` is unitary within ``tol``."""
    check_residual("unitarity", unitarity_residual(u), tol)


def assert_normalized(state: PureState, tol: float = NORM_TOL) -> None:
    """Raise NumericalError unless ``state`` has unit 2-norm."""
    check_residual("normalization", abs(float(np.linalg.norm(state)) - 1.0), tol)


def state_fidelity(a: PureState, b: PureState) -> float:
    """Pure-state fidelity ``|<a|b>|``, invariant under global phase.

    Raises:
        PreconditionError: If the dimensions differ or a state is not normalized
    """
    if a.shape != b.shape:
        raise PreconditionError(f"state dimensions differ: {a.shape} vs {b.shape}")
    for state in (a, b):
        if abs(float(np.linalg.norm(state)) - 1.0) > NORM_TOL:
            raise PreconditionError("state_fidelity expects normalized states")
    return min(1.0, float(abs(np.vdot(a, b))))


def gate_fidelity(u: Operator, v: Operator) -> float:
    """Gate fidelity ``|Tr(u^dagger v)| / d``.

    Raises:
        PreconditionError: If the dimensions differ
        NumericalError: If either input is not unitary within 1e-8
    """
    if u.shape != v.shape:
        raise PreconditionError(f"operator dimensions differ: {u.shape} vs {v.shape}")
    assert_unitary(u, GATE_UNITARY_TOL)
    assert_unitary(v, GATE_UNITARY_TOL)
    return min(1.0, float(abs(np.vdot(u, v))) / u.shape[0])


def basis_state(bits: str) -> PureState:
    """Computational basis state; the leftmost character is site 1, '1' is flipped."""
    if not bits or set(bits) - {"0", "1"}:
        raise PreconditionError(f"invalid bit string {bits!r}")
    _check_site_count(len(bits))
    state = np.zeros(2 ** len(bits), dtype=complex)
    state[int(bits, 2)] = 1.0
    return state


def bloch_state(theta: float, phi: float) -> PureState:
    """``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``."""
    return np.array(
        [math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex
    )


def product_state(qubits: "list[PureState]") -> PureState:
    """Tensor product of single-qubit states, site 1 first."""
    _check_site_count(len(qubits))
    return reduce(np.kron, [np.asarray(q, dtype=complex) for q in qubits])


def site_state(n: int, site: int, qubit: PureState) -> PureState:
    """Place ``qubit`` on ``site`` with every other spin in ``|0>``."""
    _check_site_count(n)
    if not 1 <= site <= n:
        raise PreconditionError(f"site {site} outside 1..{n}")
    factors = [KET_0] * n
    factors[site - 1] = np.asarray(qubit, dtype=complex)
    return product_state(factors)


def resolve_qubit(name: str) -> PureState:
    """Look up a named single-qubit state (zero, one, plus, minus)."""
    try:
        return NAMED_QUBITS[name]
    except KeyError as exc:
        raise PreconditionError(
            f"unknown input state {name!r}; expected one of {sorted(NAMED_QUBITS)}"
        ) from exc
