"""
Hamiltonian builders for spinnet

Builds the Zeeman, dipolar, double-quantum and XY Hamiltonians of a
``SpinNetwork``. Edge sums run over each unordered pair once.
"""

from functools import reduce
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from spinnet.common.errors import PreconditionError
from spinnet.common.logging import get_logger
from spinnet.core.spin import SINGLE_SPIN, Operator, SpinNetwork, sz_diagonal

logger = get_logger(__name__)

HamiltonianTag = Literal["dipolar", "double_quantum", "xy", "zeeman"]

# Pairwise terms as (coefficient, axis_i, axis_j)
PAIR_TERMS: dict[str, tuple[tuple[float, str, str], ...]] = {
    "dipolar": ((2.0, "z", "z"), (-1.0, "x", "x"), (-1.0, "y", "y")),
    "double_quantum": ((1.0, "x", "x"), (-1.0, "y", "y")),
    "xy": ((1.0, "x", "x"), (1.0, "y", "y")),
}


class HamiltonianKind(BaseModel):
    """Which Hamiltonian to build and the sign multiplying its coupling sum."""

    model_config = ConfigDict(frozen=True)

    tag: HamiltonianTag
    sign: Literal[1, -1] = Field(default=1, description="Multiplier on the coupling sum")


XY = HamiltonianKind(tag="xy")
XY_NEGATIVE = HamiltonianKind(tag="xy", sign=-1)
DOUBLE_QUANTUM = HamiltonianKind(tag="double_quantum")
DIPOLAR = HamiltonianKind(tag="dipolar")
ZEEMAN = HamiltonianKind(tag="zeeman")


def pair_operator(n: int, i: int, j: int, axis_i: str, axis_j: str) -> Operator:
    """``S_i^{axis_i} S_j^{axis_j}`` built as a single Kronecker product."""
    factors = [np.eye(2, dtype=complex)] * n
    factors[i - 1] = SINGLE_SPIN[axis_i]
    factors[j - 1] = SINGLE_SPIN[axis_j]
    return reduce(np.kron, factors)


def pair_term(n: int, i: int, j: int, tag: str) -> Operator:
    """Unit-strength pairwise interaction of the given kind between sites i and j."""
    try:
        terms = PAIR_TERMS[tag]
    except KeyError as exc:
        raise PreconditionError(f"{tag!r} has no pairwise term") from exc
    return sum(
        (coeff * pair_operator(n, i, j, a, b) for coeff, a, b in terms),
        start=np.zeros((2**n, 2**n), dtype=complex),
    )


def build_zeeman(network: SpinNetwork) -> Operator:
    """``sum_i h_i S_i^z``; diagonal."""
    diagonal = np.zeros(network.dim)
    for site, field in enumerate(network.fields, start=1):
        if field:
            diagonal += field * sz_diagonal(network.n, site)
    return np.diag(diagonal).astype(complex)


def build_coupling(network: SpinNetwork, kind: HamiltonianKind) -> Operator:
    """``sign * sum_edges b_ij * term_ij`` for a coupling kind.

    Raises:
        PreconditionError: If ``kind`` is the Zeeman tag
    """
    if kind.tag == "zeeman":
        raise PreconditionError("build_coupling does not build Zeeman terms")
    h = np.zeros((network.dim, network.dim), dtype=complex)
    for i, j, coupling in network.edges:
        if coupling:
            h += coupling * pair_term(network.n, i, j, kind.tag)
    logger.debug("Built %s coupling on %d spins (%d edges)", kind.tag, network.n, len(network.edges))
    return kind.sign * h


def build_total(network: SpinNetwork, kind: HamiltonianKind) -> Operator:
    """Zeeman plus coupling Hamiltonian of the given kind."""
    if kind.tag == "zeeman":
        return build_zeeman(network)
    return build_zeeman(network) + build_coupling(network, kind)
