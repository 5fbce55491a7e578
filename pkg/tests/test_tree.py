import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from treeqst.tree import (
    TreeSpec,
    build_column_basis,
    build_tree_hamiltonian,
    generation_of,
    invariant_subspace_residual,
    reduce_to_chain,
    verify_invariant_subspace,
)

generations = st.integers(min_value=1, max_value=10)


def test_single_site():
    H = build_tree_hamiltonian(TreeSpec(1, qubit_frequency=0.7))
    np.testing.assert_array_equal(H.matrix, [[0.7]])


def test_two_generations():
    H = build_tree_hamiltonian(TreeSpec(2, 0.0, 1.0)).matrix
    np.testing.assert_array_equal(H.real, [[0, 1, 1], [1, 0, 0], [1, 0, 0]])


def test_four_generation_topology():
    spec = TreeSpec(4)
    H = build_tree_hamiltonian(spec).matrix
    assert H.shape == (15, 15)
    edges = {(i + 1, j + 1) for i, j in zip(*np.nonzero(np.triu(H, 1)))}
    assert edges == {(j, c) for j in range(1, 8) for c in (2 * j, 2 * j + 1)}
    leaves = [j for j in range(1, 16) if spec.children(j) == ()]
    assert leaves == list(range(8, 16))


@pytest.mark.parametrize("kw", [dict(generations=0), dict(generations=3, coupling=0.0), dict(generations=3, coupling=-1)])
def test_rejects_bad_specs(kw):
    with pytest.raises(ValueError):
        TreeSpec(**kw)


@given(generations, st.floats(-3, 3), st.floats(0.1, 3))
@settings(max_examples=30, deadline=None)
def test_hamiltonian_invariants(n, w0, nu):
    spec = TreeSpec(n, w0, nu)
    H = build_tree_hamiltonian(spec).matrix
    assert H.shape == (spec.n_sites,) * 2
    np.testing.assert_allclose(H, H.conj().T, atol=0)
    np.testing.assert_allclose(np.diag(H), w0)
    off = H - np.diag(np.diag(H))
    assert np.count_nonzero(off) == 2 * len(spec.edges())
    for j, c in spec.edges():
        assert off[j - 1, c - 1] == nu


def test_column_states_small():
    V = build_column_basis(TreeSpec(2)).vectors
    np.testing.assert_allclose(V[:, 1], [0, 1 / np.sqrt(2), 1 / np.sqrt(2)])
    V4 = build_column_basis(TreeSpec(4)).vectors
    np.testing.assert_allclose(V4[7:, 3], 1 / np.sqrt(8))
    assert np.all(V4[:7, 3] == 0)


@given(generations)
@settings(max_examples=10, deadline=None)
def test_column_basis_orthonormal(n):
    V = build_column_basis(TreeSpec(n)).vectors
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-14)
    assert V[0, 0] == 1.0


def test_chain_hopping():
    spec = TreeSpec(2, 0.0, 1.0)
    chain = reduce_to_chain(build_tree_hamiltonian(spec), build_column_basis(spec))
    assert chain.hopping == pytest.approx(np.sqrt(2))
    one = TreeSpec(1)
    c1 = reduce_to_chain(build_tree_hamiltonian(one), build_column_basis(one))
    assert c1.length == 1 and c1.matrix.shape == (1, 1)


def test_chain_sandwich_by_hand_n3():
    # <C2|H|C3> = (1/sqrt2)(1/2) * (number of parent-child edges between gens 2,3 = 4) = sqrt2
    spec = TreeSpec(3, 0.0, 1.0)
    H, V = build_tree_hamiltonian(spec), build_column_basis(spec)
    c2, c3 = V.vectors[:, 1], V.vectors[:, 2]
    assert c2 @ H.matrix.real @ c3 == pytest.approx(4 * (1 / np.sqrt(2)) * 0.5)


def test_chain_n8():
    spec = TreeSpec(8, 0.25, 0.8)
    chain = reduce_to_chain(build_tree_hamiltonian(spec), build_column_basis(spec))
    assert chain.length == 8
    assert chain.hopping == pytest.approx(np.sqrt(2) * 0.8)
    np.testing.assert_allclose(np.linalg.eigvalsh(chain.matrix), chain.eigenvalues(), atol=1e-12)


def test_reduce_detects_mismatch():
    a, b = TreeSpec(3), TreeSpec(4)
    with pytest.raises(ValueError):
        reduce_to_chain(build_tree_hamiltonian(a), build_column_basis(b))


@pytest.mark.parametrize("n", range(1, 11))
def test_invariant_subspace(n):
    spec = TreeSpec(n)
    H, V = build_tree_hamiltonian(spec), build_column_basis(spec)
    assert verify_invariant_subspace(H, V)
    assert invariant_subspace_residual(H, V) < 1e-12


def test_perturbed_edge_breaks_invariance():
    spec = TreeSpec(3)
    H = build_tree_hamiltonian(spec)
    m = H.matrix.copy()
    m[1, 3] = m[3, 1] = 1.1  # edge 2-4
    broken = type(H)(spec, m)
    assert not verify_invariant_subspace(broken, build_column_basis(spec))


def test_unitary_evolution_stays_in_column_span():
    spec = TreeSpec(6)
    H, V = build_tree_hamiltonian(spec), build_column_basis(spec)
    psi0 = np.zeros(spec.n_sites, complex)
    psi0[0] = 1
    P = V.projector()
    for t in np.linspace(0, 20, 41):
        psi = expm(-1j * H.matrix * t) @ psi0
        assert np.linalg.norm(psi - P @ psi) < 1e-10


def test_generation_of():
    assert [generation_of(j) for j in (1, 2, 3, 4, 7, 8, 15, 16)] == [1, 2, 2, 3, 3, 4, 4, 5]
