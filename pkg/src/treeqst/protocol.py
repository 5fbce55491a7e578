"""Weak measurement -> free evolution -> optimal reversal -> phase fix, and its fidelities.

After evolution the single-excitation branch of the register only matters
through three mutually orthogonal pieces: the vacuum, the excitation sitting
on the target site ``r`` (amplitude ``f``), and everything else (other sites
plus the reservoirs, total weight ``1 - |f|^2``).  The reduced state of qubit
``r`` is built from that three-component success branch.

Measurement conventions: the weak measurement on the sender attenuates the
excited amplitude, ``|0><0| + sqrt(1-p)|1><1|``; the reversal on the receiver
attenuates the ground amplitude, ``sqrt(1-q)|0><0| + |1><1|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad

from treeqst.tree import generation_of


class ProtocolAborted(ArithmeticError):
    """The post-selected branch has zero probability."""


@dataclass(frozen=True)
class QubitState:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)])


@dataclass(frozen=True)
class ProtocolParams:
    wm_strength: float
    target_site: int
    qmr_strength: float | None = None  # None -> optimal for the given transfer amplitude

    def __post_init__(self):
        _check_p(self.wm_strength)
        if self.target_site < 1:
            raise ValueError(f"target site labels start at 1, got {self.target_site}")
        if self.qmr_strength is not None and not 0 <= self.qmr_strength <= 1:
            raise ValueError(f"q must lie in [0, 1], got {self.qmr_strength}")

    @property
    def target_generation(self) -> int:
        return generation_of(self.target_site)


@dataclass(frozen=True)
class TransferOutcome:
    reduced_dm: np.ndarray
    success_probability: float
    fidelity: float
    transfer_amplitude: complex
    qmr_strength: float


def _check_p(p: float) -> None:
    if not 0 <= p < 1:
        raise ValueError(f"weak-measurement strength must lie in [0, 1), got {p}")


def weak_measurement(state: QubitState, p: float) -> tuple[np.ndarray, float]:
    """Normalised post-measurement amplitudes and the probability of that outcome."""
    _check_p(p)
    psi = state.amplitudes * np.array([1.0, np.sqrt(1 - p)])
    prob = float(np.vdot(psi, psi).real)
    return psi / np.sqrt(prob), prob


def optimal_qmr_strength(p: float, f: complex) -> float:
    """q = 1 - (1-p)|f|^2, which restores the input amplitude ratio on the receiver."""
    af2 = abs(f) ** 2
    if af2 > 1 + 1e-12:
        raise ValueError(f"|f| = {abs(f):.6g} > 1; amplitudes are not normalised")
    q = 1 - (1 - p) * min(af2, 1.0)
    assert 0 <= q <= 1
    return q


def success_branch(state: QubitState, p: float, q: float, f: complex, phase_correct: bool = True) -> np.ndarray:
    """Unnormalised amplitudes on (vacuum, target excited, remainder) after both measurements.

    Its squared norm is the joint success probability of the two measurements.
    """
    c, s = state.amplitudes
    af = abs(f)
    on_target = s * np.sqrt(1 - p) * (af if phase_correct else f)
    rest = s * np.sqrt(1 - p) * np.sqrt(1 - q) * np.sqrt(max(1 - af**2, 0.0))
    return np.array([np.sqrt(1 - q) * c, on_target, rest])


def _reduced_target(branch: np.ndarray) -> np.ndarray:
    vac, tgt, rest = branch
    rho = np.array(
        [[abs(vac) ** 2 + abs(rest) ** 2, vac * np.conj(tgt)], [tgt * np.conj(vac), abs(tgt) ** 2]],
        dtype=complex,
    )
    return rho / np.trace(rho).real


def _conditional_branch(state: QubitState, p: float, f_abs: float) -> np.ndarray:
    """Optimal-q success branch with the common factor sqrt(1-p)|f| divided out.

    Finite as |f| -> 0, where the unscaled branch vanishes identically.
    """
    c, s = state.amplitudes
    x = (1 - p) * (1 - f_abs**2)
    return np.array([c, s, s * np.sqrt(max(x, 0.0))])


def state_fidelity(rho: np.ndarray, state: QubitState) -> float:
    psi = state.amplitudes
    return float(np.real(np.conj(psi) @ rho @ psi))


def conditional_fidelity(state: QubitState, p: float, f_abs: float, reference: str = "input") -> float:
    """Fidelity of the optimal-protocol output with ``state``.

    ``reference="input"`` compares against the state before the weak
    measurement; ``"post_wm"`` against the normalised post-measurement state.
    Only the former averages to :func:`average_fidelity_closed`.
    """
    rho = _reduced_target(_conditional_branch(state, p, f_abs))
    if reference == "input":
        return state_fidelity(rho, state)
    if reference == "post_wm":
        psi, _ = weak_measurement(state, p)
        return float(np.real(np.conj(psi) @ rho @ psi))
    raise ValueError(f"unknown reference {reference!r}")


def natural_fidelity(state: QubitState, f_abs: float) -> float:
    """Fidelity with no measurements (p = q = 0) but with the phase correction."""
    rho = _reduced_target(success_branch(state, 0.0, 0.0, f_abs))
    return state_fidelity(rho, state)


def transfer(state: QubitState, params: ProtocolParams, trajectory, t: float) -> TransferOutcome:
    """Run the protocol at time ``t`` of ``trajectory``, reading the amplitude of ``params.target_site``.

    ``t`` must be a grid point of the trajectory.
    """
    idx = np.flatnonzero(np.isclose(trajectory.times, t, rtol=0, atol=1e-12))
    if idx.size == 0:
        raise ValueError(f"t={t} is not on the trajectory grid")
    f = complex(trajectory.transfer_amplitude(params.target_site)[idx[0]])
    return transfer_from_amplitude(state, params.wm_strength, f, params.qmr_strength)


def transfer_from_amplitude(state: QubitState, p: float, f: complex, q: float | None = None) -> TransferOutcome:
    _check_p(p)
    if q is None:
        q = optimal_qmr_strength(p, f)
    branch = success_branch(state, p, q, f)
    prob = float(np.vdot(branch, branch).real)
    if prob <= 0.0:
        raise ProtocolAborted("protocol aborted, zero success probability")
    rho = _reduced_target(branch)
    return TransferOutcome(rho, prob, state_fidelity(rho, state), f, q)


def optimal_success_probability(state: QubitState, p: float, f: complex) -> float:
    """(1-p)|f|^2 (1 + (1-p) sin^2(theta/2) (1-|f|^2))."""
    af2 = abs(f) ** 2
    return (1 - p) * af2 * (1 + (1 - p) * np.sin(state.theta / 2) ** 2 * (1 - af2))


def _x(p, f_abs):
    return (1 - np.asarray(p, dtype=float)) * (1 - np.asarray(f_abs, dtype=float) ** 2)


def average_fidelity_closed(p, f_abs):
    """Bloch-averaged fidelity 1/2 + 1/x - ln(1+x)/x^2 with x = (1-p)(1-|f|^2).

    Vectorised; ``f_abs`` is |f|.  Small x uses the series 1 - x/3 + x^2/4 - x^3/5 + x^4/6.
    """
    x = np.asarray(_x(p, f_abs))
    xs = np.where(x > 1e-3, x, 1.0)
    exact = 0.5 + 1 / xs - np.log1p(xs) / xs**2
    series = 1 - x / 3 + x**2 / 4 - x**3 / 5 + x**4 / 6
    out = np.where(x > 1e-3, exact, series)
    return out[()] if out.ndim == 0 else out


def average_fidelity_natural(f_abs):
    f_abs = np.asarray(f_abs, dtype=float)
    out = (3 + 2 * f_abs + f_abs**2) / 6
    return out[()] if out.ndim == 0 else out


def average_success_probability(p, f_abs):
    """Bloch average of the optimal success probability, 1/2 (1-p)|f|^2 (2 + (1-p)(1-|f|^2))."""
    p = np.asarray(p, dtype=float)
    af2 = np.asarray(f_abs, dtype=float) ** 2
    out = 0.5 * (1 - p) * af2 * (2 + (1 - p) * (1 - af2))
    return out[()] if out.ndim == 0 else out


def bloch_average(func, epsabs: float = 1e-11, epsrel: float = 1e-11) -> float:
    """Haar average of ``func(QubitState)`` over pure qubit states, sin(theta)/(4 pi) weight."""
    val, err = dblquad(
        lambda th, ph: func(QubitState(th, ph)) * np.sin(th),
        0.0,
        2 * np.pi,
        0.0,
        np.pi,
        epsabs=epsabs,
        epsrel=epsrel,
    )
    if not np.isfinite(val) or err > 1e-8:
        raise RuntimeError(f"Bloch-sphere quadrature did not converge (error estimate {err:.2e})")
    return val / (4 * np.pi)


def average_fidelity_numeric(p: float, f_abs: float, reference: str = "input") -> float:
    """Quadrature over the Bloch sphere of the constructed protocol fidelity."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return bloch_average(lambda st: conditional_fidelity(st, p, f_abs, reference))
