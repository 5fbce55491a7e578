"""Cross-checks between independent routes, shared by the CLI ``verify`` mode and the tests.

Also holds the brute-force register reconstructions: the full-tree site
amplitudes are embedded in an explicit state vector (vacuum, every site, one
aggregate reservoir direction), the measurement operators are applied as
diagonal maps, and reduced states come from a generic partial trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from treeqst.dynamics import (
    BathSpec,
    amplitudes_analytic,
    amplitudes_fulltree_oracle,
    amplitudes_pseudomode_oracle,
    sine_transform_matrix,
)
from treeqst.entanglement import concurrence, distribute, wootters_concurrence
from treeqst.protocol import (
    QubitState,
    average_fidelity_closed,
    average_fidelity_numeric,
    average_success_probability,
    bloch_average,
    optimal_success_probability,
)
from treeqst.tree import (
    TreeSpec,
    build_column_basis,
    build_tree_hamiltonian,
    invariant_subspace_residual,
    reduce_to_chain,
)

ORACLE_GRID = dict(generations=(2, 4, 8), gammas=(0.0, 0.5, 1.0, 2.0), lambdas=(0.5, 5.0))
FIDELITY_P = (0.0, 0.2, 0.6, 0.99)
FIDELITY_F2 = tuple(np.round(np.linspace(0, 1, 11), 12))


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error < self.tolerance)


# --- brute-force register states -------------------------------------------------


def register_state(site_amplitudes: np.ndarray, excited_weight: complex, ground_weight: complex) -> np.ndarray:
    """Network register after evolution: [vacuum, site 1..D, reservoir aggregate].

    The single-excitation part is ``excited_weight`` times the evolved site
    vector; the weight lost to the reservoirs sits on one extra orthogonal
    direction (only its norm enters any reduced state of the system).
    """
    sites = np.asarray(site_amplitudes, dtype=complex)
    leaked = np.sqrt(max(1.0 - float(np.vdot(sites, sites).real), 0.0))
    return np.concatenate([[ground_weight], excited_weight * sites, [excited_weight * leaked]])


def reversal_mask(n_sites: int, site: int, q: float) -> np.ndarray:
    """Diagonal of the reversal on ``site``: sqrt(1-q) wherever that site is not excited."""
    m = np.full(n_sites + 2, np.sqrt(1 - q))
    m[site] = 1.0
    return m


def _split_target(n_sites: int, site: int) -> tuple[np.ndarray, np.ndarray]:
    """For each register basis state: (state of qubit ``site``, label of everything else)."""
    bit = np.zeros(n_sites + 2, dtype=int)
    bit[site] = 1
    env = np.arange(n_sites + 2)
    env[site] = 0  # |site> and |vacuum> share an empty environment
    return bit, env


def brute_force_target_dm(state: QubitState, p: float, q: float, site_amplitudes: np.ndarray, site: int) -> np.ndarray:
    """Reduced state of qubit ``site`` after the transfer protocol, with phase correction."""
    d = site_amplitudes.shape[0]
    c, s = state.amplitudes
    vec = register_state(site_amplitudes, s * np.sqrt(1 - p), c) * reversal_mask(d, site, q)
    f = site_amplitudes[site - 1]
    if abs(f) > 0:
        vec[site] *= np.conj(f) / abs(f)
    bit, env = _split_target(d, site)
    psi = np.zeros((2, d + 2), dtype=complex)
    psi[bit, env] = vec
    rho = psi @ psi.conj().T
    return rho / np.trace(rho).real


def brute_force_pair_dm(theta: float, phi: float, p: float, q: float, site_amplitudes: np.ndarray, site: int) -> np.ndarray:
    """Reduced (qubit 0, qubit ``site``) state after entanglement distribution."""
    d = site_amplitudes.shape[0]
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    mask = reversal_mask(d, site, q)
    # qubit 0 in |0>: the excitation started on site 1 and was weakly measured
    branch0 = register_state(site_amplitudes, c * np.sqrt(1 - p), 0.0) * mask
    # qubit 0 in |1>: network empty
    branch1 = register_state(site_amplitudes, 0.0, np.exp(1j * phi) * s) * mask
    bit, env = _split_target(d, site)
    psi = np.zeros((2, 2, d + 2), dtype=complex)
    psi[0, bit, env] = branch0
    psi[1, bit, env] = branch1
    psi = psi.reshape(4, d + 2)
    rho = psi @ psi.conj().T
    return rho / np.trace(rho).real


# --- checks ----------------------------------------------------------------------


def check_structure(max_generations: int = 10) -> list[CheckResult]:
    worst_resid = worst_chain = worst_spec = 0.0
    for n in range(1, max_generations + 1):
        spec = TreeSpec(n, 0.3, 1.0)
        H, V = build_tree_hamiltonian(spec), build_column_basis(spec)
        worst_resid = max(worst_resid, invariant_subspace_residual(H, V))
        chain = reduce_to_chain(H, V)
        proj = V.vectors.T @ H.matrix @ V.vectors
        worst_chain = max(worst_chain, float(np.max(np.abs(proj - chain.matrix))))
        worst_spec = max(worst_spec, float(np.max(np.abs(np.linalg.eigvalsh(chain.matrix) - chain.eigenvalues()))))
    unit = max(float(np.max(np.abs(sine_transform_matrix(n) @ sine_transform_matrix(n).T - np.eye(n)))) for n in range(1, 33))
    return [
        CheckResult("invariant_subspace_residual", worst_resid, 1e-10),
        CheckResult("chain_reduction", worst_chain, 1e-10),
        CheckResult("chain_spectrum", worst_spec, 1e-10),
        CheckResult("sine_transform_unitarity", unit, 1e-12),
    ]


def oracle_equivalence(t_max: float = 20.0, steps: int = 401) -> list[CheckResult]:
    t = np.linspace(0, t_max, steps)
    worst_pm = worst_ft = worst_out = worst_norm = 0.0
    for n in ORACLE_GRID["generations"]:
        for g in ORACLE_GRID["gammas"]:
            for lam in ORACLE_GRID["lambdas"]:
                spec, bath = TreeSpec(n), BathSpec(g, lam)
                a = amplitudes_analytic(t, spec, bath)
                pm = amplitudes_pseudomode_oracle(t, spec, bath)
                ft = amplitudes_fulltree_oracle(t, spec, bath)
                worst_pm = max(worst_pm, float(np.max(np.abs(a.amplitudes - pm.amplitudes))))
                worst_ft = max(worst_ft, float(np.max(np.abs(a.amplitudes - ft.amplitudes))))
                worst_out = max(worst_out, float(np.max(ft.outside_residual)))
                if g == 0:
                    worst_norm = max(worst_norm, float(np.max(np.abs(a.norm - 1))))
    return [
        CheckResult("analytic_vs_pseudomode", worst_pm, 1e-6),
        CheckResult("analytic_vs_fulltree", worst_ft, 1e-6),
        CheckResult("fulltree_outside_column_span", worst_out, 1e-8),
        CheckResult("closed_system_norm", worst_norm, 1e-8),
    ]


def fidelity_equivalence() -> list[CheckResult]:
    worst_f = worst_p = 0.0
    for p in FIDELITY_P:
        for f2 in FIDELITY_F2:
            fa = np.sqrt(f2)
            worst_f = max(worst_f, abs(average_fidelity_numeric(p, fa) - average_fidelity_closed(p, fa)))
            num = bloch_average(lambda st: optimal_success_probability(st, p, fa))
            worst_p = max(worst_p, abs(num - average_success_probability(p, fa)))
    return [
        CheckResult("average_fidelity_quadrature", worst_f, 1e-6),
        CheckResult("average_success_quadrature", worst_p, 1e-9),
    ]


def random_ed_states(n: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        theta = rng.uniform(0, np.pi)
        phi = rng.uniform(0, 2 * np.pi)
        p, q = rng.uniform(0, 1, size=2)
        f = np.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        yield distribute(theta, phi, p, q, f)


def concurrence_equivalence(n: int = 1000, seed: int = 12345) -> list[CheckResult]:
    worst = max(abs(concurrence(st) - wootters_concurrence(st.matrix)) for st in random_ed_states(n, seed))
    return [CheckResult("x_state_vs_wootters", float(worst), 1e-10)]


def construction_equivalence() -> list[CheckResult]:
    """Closed-form reduced states against brute-force partial traces on a full-tree run."""
    from treeqst.protocol import transfer_from_amplitude

    spec, bath, site = TreeSpec(4), BathSpec(1.0, 0.5), 13
    t = np.linspace(0, 6, 7)
    ft = amplitudes_fulltree_oracle(t, spec, bath)
    worst_t = worst_e = 0.0
    for k in range(1, t.size):
        sites = ft.site_amplitudes[k]
        f = sites[site - 1]
        for p in (0.0, 0.6):
            for th, ph in ((0.4, 1.1), (np.pi / 2, 0.0), (2.7, 4.0)):
                st = QubitState(th, ph)
                out = transfer_from_amplitude(st, p, f)
                bf = brute_force_target_dm(st, p, out.qmr_strength, sites, site)
                worst_t = max(worst_t, float(np.max(np.abs(out.reduced_dm - bf))))
                for q in (0.0, 0.5, out.qmr_strength):
                    ed = distribute(th, ph, p, q, f).matrix
                    worst_e = max(worst_e, float(np.max(np.abs(ed - brute_force_pair_dm(th, ph, p, q, sites, site)))))
    return [
        CheckResult("transfer_dm_vs_partial_trace", worst_t, 1e-9),
        CheckResult("pair_dm_vs_partial_trace", worst_e, 1e-9),
    ]


def run_all(seed: int = 12345) -> list[CheckResult]:
    return [
        *check_structure(),
        *oracle_equivalence(),
        *fidelity_equivalence(),
        *concurrence_equivalence(seed=seed),
        *construction_equivalence(),
    ]
