"""Spin Hamiltonians: single-excitation blocks, engineered couplings, Heisenberg fields.

Full Hilbert-space operators use the local basis ``(up, down)`` so that
``sigma_z = diag(1, -1)``; site 1 is the most significant tensor factor.  The
all-down state is therefore the last basis vector and the single-excitation
state ``|n>`` (spin ``n`` up) sits at :func:`excitation_index`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import InvalidSizeError, OracleSizeError, UndefinedFieldsError, ValidationError
from .graphs import Graph, path_graph

ORACLE_LIMIT = 12

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class CouplingChain:
    """Nearest-neighbour couplings ``J_1..J_{N-1}`` of an N-site chain.

    ``lam`` is the rotation rate when the chain was synthesized as engineered.
    """

    couplings: tuple[float, ...]
    lam: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(float(j) for j in self.couplings))
        if not all(j > 0 and np.isfinite(j) for j in self.couplings):
            raise ValidationError("couplings must be positive and finite")

    @property
    def n(self) -> int:
        return len(self.couplings) + 1

    @classmethod
    def uniform(cls, n: int, j: float = 1.0) -> "CouplingChain":
        if n < 1:
            raise InvalidSizeError(f"chain needs at least one site, got {n}")
        return cls((j,) * (n - 1))

    def to_dict(self) -> dict:
        return {"N": self.n, "J": list(self.couplings), "lambda": self.lam}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingChain":
        chain = cls(tuple(data["J"]), data.get("lambda"))
        if "N" in data and data["N"] != chain.n:
            raise ValidationError(f"N={data['N']} inconsistent with {len(chain.couplings)} couplings")
        return chain


@dataclass(frozen=True)
class FieldProfile:
    fields: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"B": list(self.fields)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class FullHamiltonian:
    """Sparse ``2^N x 2^N`` Hermitian operator on N qubits."""

    n_qubits: int
    matrix: sp.csr_matrix
    model: str

    @property
    def dimension(self) -> int:
        return 2**self.n_qubits

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def xx_subspace_hamiltonian(g: Graph) -> np.ndarray:
    """XX coupling restricted to one excitation: the adjacency matrix of ``g``."""
    return g.adjacency()


def engineered_couplings(n: int, lam: float = 2.0) -> CouplingChain:
    """Couplings ``J_k = (lam / 2) * sqrt(k (n - k))`` that rotate a spin-(n-1)/2 at rate ``lam``."""
    if n < 2:
        raise InvalidSizeError(f"engineered chain needs N >= 2, got {n}")
    if not lam > 0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    k = np.arange(1, n)
    # sqrt(k (n-k)) is symmetric in k <-> n-k, so the chain is palindromic bit for bit
    return CouplingChain(tuple(lam / 2 * np.sqrt(k * (n - k))), float(lam))


def chain_hamiltonian(chain: CouplingChain) -> np.ndarray:
    """Tridiagonal single-excitation matrix with zero diagonal."""
    j = np.asarray(chain.couplings)
    return np.diag(j, 1) + np.diag(j, -1)


def heisenberg_fields(chain: CouplingChain) -> FieldProfile:
    """Local z-fields that cancel the Heisenberg diagonal in the one-excitation sector.

    ``B_n = (J_{n-1} + J_n) / 2 - sum(J) / (2 (N - 2))`` with ``J_0 = J_N = 0``.
    """
    n = chain.n
    if n <= 2:
        raise UndefinedFieldsError(f"compensating fields need N >= 3, got N={n}")
    padded = np.concatenate([[0.0], chain.couplings, [0.0]])
    offset = sum(chain.couplings) / (2 * (n - 2))
    return FieldProfile(tuple(0.5 * (padded[:-1] + padded[1:]) - offset))


def _site_operator(op: np.ndarray, site: int, n: int) -> sp.csr_matrix:
    """``op`` acting on 1-based ``site`` of ``n`` qubits."""
    left = sp.identity(2 ** (site - 1), format="csr", dtype=complex)
    right = sp.identity(2 ** (n - site), format="csr", dtype=complex)
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def _check_size(n: int, limit: int) -> None:
    if n > limit:
        raise OracleSizeError(f"full Hilbert space for N={n} exceeds the oracle limit of {limit} qubits")


def total_sz(n: int, limit: int = ORACLE_LIMIT) -> sp.csr_matrix:
    """Sum of single-site sigma_z on ``n`` qubits."""
    _check_size(n, limit)
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for site in range(1, n + 1):
        out = out + _site_operator(SZ, site, n)
    return out


def full_hamiltonian(
    network: Graph | CouplingChain,
    model: str = "xx",
    fields: FieldProfile | Sequence[float] | None = None,
    limit: int = ORACLE_LIMIT,
) -> FullHamiltonian:
    """Assemble the many-body Hamiltonian from Pauli tensor products.

    ``model="xx"``: ``sum_edges J/2 (XX + YY)``.
    ``model="heisenberg"``: ``sum_edges J/2 (XX + YY + ZZ) + sum_n B_n Z_n``; when
    ``fields`` is None on a chain, the compensating fields are used.
    A Graph contributes unit couplings on each edge.
    """
    if model not in ("xx", "heisenberg"):
        raise ValidationError(f"unknown model {model!r}")
    if isinstance(network, CouplingChain):
        n = network.n
        bonds = [(k, k + 1, jk) for k, jk in enumerate(network.couplings, start=1)]
    else:
        n = network.n
        bonds = [(u, v, 1.0) for u, v in network.sorted_edges()]
    _check_size(n, limit)

    dim = 2**n
    H = sp.csr_matrix((dim, dim), dtype=complex)
    paulis = [SX, SY] + ([SZ] if model == "heisenberg" else [])
    for u, v, jk in bonds:
        for p in paulis:
            H = H + 0.5 * jk * (_site_operator(p, u, n) @ _site_operator(p, v, n))

    if model == "heisenberg":
        if fields is None:
            chain = network if isinstance(network, CouplingChain) else _graph_as_chain(network)
            fields = heisenberg_fields(chain)
        b = fields.fields if isinstance(fields, FieldProfile) else tuple(fields)
        if len(b) != n:
            raise ValidationError(f"expected {n} field values, got {len(b)}")
        for site, bn in enumerate(b, start=1):
            if bn:
                H = H + bn * _site_operator(SZ, site, n)
    elif fields is not None:
        raise ValidationError("fields only apply to the Heisenberg model")
    H.eliminate_zeros()
    return FullHamiltonian(n, H.tocsr(), model)


def _graph_as_chain(g: Graph) -> CouplingChain:
    if g.edges != path_graph(g.n).edges:
        raise ValidationError("default Heisenberg fields are defined for chains only; pass fields explicitly")
    return CouplingChain.uniform(g.n)


def excitation_index(site: int, n: int) -> int:
    """Full-space basis index of the state with only ``site`` (1-based) up."""
    return (2**n - 1) - 2 ** (n - site)


def vacuum_index(n: int) -> int:
    return 2**n - 1


def single_excitation_block(H: FullHamiltonian | sp.spmatrix | np.ndarray, n: int | None = None) -> np.ndarray:
    """Matrix elements ``<m|H|n>`` between single-excitation basis states."""
    if isinstance(H, FullHamiltonian):
        n, H = H.n_qubits, H.matrix
    idx = [excitation_index(s, n) for s in range(1, n + 1)]
    M = H[idx, :][:, idx]
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def single_excitation_state(site: int, n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[excitation_index(site, n)] = 1.0
    return psi
