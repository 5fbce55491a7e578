"""Binary-tree network geometry, its single-excitation Hamiltonian and the column-state reduction.

Sites are labelled 1..2^N - 1 as in a heap: site ``j`` has children ``2j`` and
``2j + 1``.  Arrays are 0-based, so site ``j`` lives at row ``j - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STRUCTURE_TOL = 1e-10
MAX_DENSE_GENERATIONS = 10


@dataclass(frozen=True)
class TreeSpec:
    generations: int
    qubit_frequency: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        if int(self.generations) != self.generations or self.generations < 1:
            raise ValueError(f"generations must be an integer >= 1, got {self.generations!r}")
        if not self.coupling > 0:
            raise ValueError(f"coupling must be positive, got {self.coupling!r}")

    @property
    def n_sites(self) -> int:
        return 2**self.generations - 1

    def generation_sites(self, m: int) -> range:
        """Site labels (1-based) of generation ``m``."""
        if not 1 <= m <= self.generations:
            raise ValueError(f"generation {m} outside 1..{self.generations}")
        return range(2 ** (m - 1), 2**m)

    def children(self, j: int) -> tuple[int, int] | tuple[()]:
        if not 1 <= j <= self.n_sites:
            raise ValueError(f"site {j} outside 1..{self.n_sites}")
        if j <= 2 ** (self.generations - 1) - 1:
            return (2 * j, 2 * j + 1)
        return ()

    def edges(self) -> list[tuple[int, int]]:
        return [(j, c) for j in range(1, 2 ** (self.generations - 1)) for c in (2 * j, 2 * j + 1)]


def generation_of(site: int) -> int:
    """Generation index n of a site, i.e. the n with 2^(n-1) <= site <= 2^n - 1."""
    if site < 1:
        raise ValueError(f"site labels start at 1, got {site}")
    return int(site).bit_length()


@dataclass(frozen=True)
class SingleExcitationHamiltonian:
    spec: TreeSpec
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ColumnBasis:
    spec: TreeSpec
    vectors: np.ndarray  # shape (D, N); column m-1 is |C_m>

    @property
    def generation_sizes(self) -> np.ndarray:
        return 2 ** np.arange(self.spec.generations)

    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T


@dataclass(frozen=True)
class EffectiveChain:
    length: int
    onsite: float
    hopping: float

    @property
    def matrix(self) -> np.ndarray:
        h = np.diag(np.full(self.length, self.onsite, dtype=float))
        idx = np.arange(self.length - 1)
        h[idx, idx + 1] = self.hopping
        h[idx + 1, idx] = self.hopping
        return h

    def eigenvalues(self) -> np.ndarray:
        """Closed-form uniform-chain spectrum, ascending."""
        l = np.arange(1, self.length + 1)
        return np.sort(self.onsite + 2 * self.hopping * np.cos(l * np.pi / (self.length + 1)))


def build_tree_hamiltonian(spec: TreeSpec) -> SingleExcitationHamiltonian:
    if spec.generations > MAX_DENSE_GENERATIONS:
        raise ValueError(f"dense storage limited to N <= {MAX_DENSE_GENERATIONS}")
    d = spec.n_sites
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = spec.qubit_frequency
    for j, c in spec.edges():
        h[j - 1, c - 1] = h[c - 1, j - 1] = spec.coupling
    return SingleExcitationHamiltonian(spec, h)


def build_column_basis(spec: TreeSpec) -> ColumnBasis:
    vecs = np.zeros((spec.n_sites, spec.generations))
    for m in range(1, spec.generations + 1):
        sites = np.asarray(spec.generation_sites(m)) - 1
        vecs[sites, m - 1] = 1.0 / np.sqrt(2 ** (m - 1))
    return ColumnBasis(spec, vecs)


def reduce_to_chain(H: SingleExcitationHamiltonian, basis: ColumnBasis, tol: float = STRUCTURE_TOL) -> EffectiveChain:
    """Sandwich ``H`` between column states and check it is the uniform sqrt(2)*nu chain.

    Raises
    ------
    ValueError
        If ``H`` and ``basis`` disagree on the tree, or any projected matrix
        element deviates from the chain by more than ``tol``.
    """
    if H.spec != basis.spec:
        raise ValueError("Hamiltonian and column basis come from different trees")
    spec = H.spec
    chain = EffectiveChain(spec.generations, spec.qubit_frequency, np.sqrt(2) * spec.coupling)
    projected = basis.vectors.T @ H.matrix @ basis.vectors
    err = np.max(np.abs(projected - chain.matrix))
    if err > tol:
        raise ValueError(f"column-state projection deviates from uniform chain by {err:.3e}")
    return chain


def invariant_subspace_residual(H: SingleExcitationHamiltonian, basis: ColumnBasis) -> float:
    """Spectral norm of (1 - P_C) H P_C."""
    V = basis.vectors
    HV = H.matrix @ V
    leak = HV - V @ (V.T @ HV)
    return float(np.linalg.norm(leak, 2))


def verify_invariant_subspace(H: SingleExcitationHamiltonian, basis: ColumnBasis, tol: float = STRUCTURE_TOL) -> bool:
    """True iff H|C_m> stays inside span{|C_{m-1}>, |C_m>, |C_{m+1}>} for every m."""
    V = basis.vectors
    n = V.shape[1]
    for m in range(n):
        nbrs = V[:, max(m - 1, 0) : m + 2]
        hv = H.matrix @ V[:, m]
        resid = hv - nbrs @ (nbrs.T @ hv)
        if np.linalg.norm(resid) > tol:
            return False
    return True
