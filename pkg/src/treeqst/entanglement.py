"""Entanglement distribution from an idle qubit 0 through the network to site r.

The pair (qubit 0, sender) starts in cos(theta/2)|0,1> + e^{i phi} sin(theta/2)|1,0>.
Only the sender's excitation travels, so after both partial measurements the
register is spanned by qubit 0 times (vacuum, target excited, remainder) and
the reduced (0, r) state is X-shaped with an empty |1,1> population.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from treeqst.protocol import ProtocolAborted, optimal_qmr_strength

SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class TwoQubitState:
    """Density matrix of (qubit 0, qubit r) in the basis |00>, |01>, |10>, |11>."""

    matrix: np.ndarray
    success_probability: float = 1.0

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    @property
    def coherence(self) -> complex:
        """<01|rho|10>."""
        return complex(self.matrix[1, 2])


def distribute(theta: float, phi: float, p: float, q: float, f: complex) -> TwoQubitState:
    """Reduced (0, r) state after weak measurement, evolution and reversal of strength q.

    Populations: |00> carries the sender excitation that ended up elsewhere
    (attenuated by the reversal), |01> the part that arrived on r (untouched
    by the reversal), |10> qubit 0's own excitation with the network empty.
    """
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError(f"p and q must lie in [0, 1], got p={p}, q={q}")
    return _distribute(theta, phi, p, 1 - q, f)


def _distribute(theta: float, phi: float, p: float, keep: float, f: complex) -> TwoQubitState:
    # keep = 1 - q, passed directly so the optimal choice (1-p)|f|^2 avoids cancellation
    af2 = abs(f) ** 2
    if af2 > 1 + 1e-12:
        raise ValueError(f"|f| = {abs(f):.6g} > 1")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    prob = (s**2 + (1 - p) * c**2) * keep + c**2 * (1 - keep) * (1 - p) * af2
    if prob <= 0.0:
        raise ProtocolAborted("aborted, zero success probability")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = c**2 * (1 - p) * keep * (1 - min(af2, 1.0))
    rho[1, 1] = c**2 * (1 - p) * af2
    rho[2, 2] = s**2 * keep
    rho[1, 2] = np.exp(-1j * phi) * c * s * np.sqrt((1 - p) * keep) * f
    rho[2, 1] = np.conj(rho[1, 2])
    return TwoQubitState(rho / prob, prob)


def concurrence(state: TwoQubitState) -> float:
    """X-state concurrence 2 max(0, |rho_23| - sqrt(rho_11 rho_44), |rho_14| - sqrt(rho_22 rho_33))."""
    r = state.matrix
    a = abs(r[1, 2]) - np.sqrt(max(r[0, 0].real * r[3, 3].real, 0.0))
    b = abs(r[0, 3]) - np.sqrt(max(r[1, 1].real * r[2, 2].real, 0.0))
    return float(2 * max(0.0, a, b))


def wootters_concurrence(rho: np.ndarray) -> float:
    """General two-qubit concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of rho (YY) rho* (YY),
    obtained here as singular values of sqrt(rho) (YY) sqrt(rho)*; this avoids
    square-rooting round-off from a non-Hermitian eigensolver.
    """
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    sv = np.linalg.svd(root @ SIGMA_YY @ root.conj(), compute_uv=False)
    return float(max(0.0, sv[0] - sv[1:].sum()))


def optimal_ed_success_probability(theta: float, p, f_abs):
    """(1-p)|f|^2 (1 + (1-p)(1-|f|^2) cos^2(theta/2))."""
    af2 = np.asarray(f_abs, dtype=float) ** 2
    p = np.asarray(p, dtype=float)
    out = (1 - p) * af2 * (1 + (1 - p) * (1 - af2) * np.cos(theta / 2) ** 2)
    return out[()] if out.ndim == 0 else out


def optimal_concurrence(theta: float, p, f_abs):
    """2 cos sin (1-p)|f|^2 / P_ED with the common factor cancelled, so finite at |f| = 0."""
    af2 = np.asarray(f_abs, dtype=float) ** 2
    p = np.asarray(p, dtype=float)
    val = np.sin(theta) / (1 + (1 - p) * (1 - af2) * np.cos(theta / 2) ** 2)
    out = np.maximum(0.0, val)
    return out[()] if out.ndim == 0 else out


def natural_concurrence(theta: float, f_abs):
    out = np.maximum(0.0, np.sin(theta) * np.asarray(f_abs, dtype=float))
    return out[()] if out.ndim == 0 else out


def optimal_ed(theta: float, phi: float, p: float, f: complex) -> tuple[TwoQubitState, float, float]:
    """Distribute with the optimal reversal strength; returns (state, concurrence, success probability)."""
    optimal_qmr_strength(p, f)  # validates |f| <= 1
    st = _distribute(theta, phi, p, (1 - p) * abs(f) ** 2, f)
    return st, concurrence(st), st.success_probability
