"""Column-state amplitudes C_m(t) under identical Lorentzian reservoirs.

Three independent routes are provided:

* :func:`amplitudes_analytic` - closed-form pole/residue solution per chain
  eigenmode, recombined with the discrete sine transform;
* :func:`amplitudes_pseudomode_oracle` - the integro-differential equation on
  the N-site effective chain, made local in time by one auxiliary variable per
  site (exact for an exponential kernel), integrated with DOP853;
* :func:`amplitudes_fulltree_oracle` - the same pseudomode trick on every one of
  the 2^N - 1 tree sites, projected onto the column basis afterwards.

Amplitudes are in the interaction picture, so ``qubit_frequency`` never enters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from treeqst.tree import MAX_DENSE_GENERATIONS, TreeSpec, build_column_basis

ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


@dataclass(frozen=True)
class BathSpec:
    coupling_constant: float = 1.0  # gamma
    spectral_width: float = 0.5  # lambda

    def __post_init__(self):
        if self.coupling_constant < 0:
            raise ValueError(f"gamma must be >= 0, got {self.coupling_constant}")
        if not self.spectral_width > 0:
            raise ValueError(f"lambda must be > 0, got {self.spectral_width}")

    def spectral_density(self, omega, omega0: float = 0.0):
        g, lam = self.coupling_constant, self.spectral_width
        return g * lam**2 / (2 * np.pi * ((np.asarray(omega) - omega0) ** 2 + lam**2))


def memory_kernel(bath: BathSpec):
    """Reservoir correlation function f(tau) = (gamma*lambda/2) exp(-lambda*tau), tau >= 0."""
    g, lam = bath.coupling_constant, bath.spectral_width

    def f(tau):
        return 0.5 * g * lam * np.exp(-lam * np.asarray(tau, dtype=float))

    return f


@dataclass(frozen=True)
class AmplitudeTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # (T, N) complex, column m-1 is C_m
    method: str = ""
    # full-tree oracle only: distance of the site vector from span{|C_m>}
    outside_residual: np.ndarray | None = field(default=None, compare=False)
    site_amplitudes: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def norm(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    @property
    def leaked_weight(self) -> np.ndarray:
        return 1.0 - self.norm

    def generation(self, n: int) -> np.ndarray:
        return self.amplitudes[:, n - 1]

    def transfer_amplitude(self, site: int) -> np.ndarray:
        """f(t) = C_n(t)/sqrt(2^(n-1)), amplitude on a single site of generation n."""
        n = int(site).bit_length()
        if n > self.amplitudes.shape[1]:
            raise ValueError(f"site {site} lies beyond generation {self.amplitudes.shape[1]}")
        return self.amplitudes[:, n - 1] / np.sqrt(2 ** (n - 1))


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if t[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    return t


def sine_transform_matrix(n: int) -> np.ndarray:
    """Orthogonal, symmetric S_ml = sqrt(2/(n+1)) sin(m l pi/(n+1)), m, l = 1..n."""
    k = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(k, k) * np.pi / (n + 1))


def mode_energies(spec: TreeSpec) -> np.ndarray:
    """Chain eigenvalues 2*sqrt(2)*nu*cos(l pi/(N+1)) in the interaction picture."""
    n = spec.generations
    l = np.arange(1, n + 1)
    return 2 * np.sqrt(2) * spec.coupling * np.cos(l * np.pi / (n + 1))


def mode_poles(spec: TreeSpec, bath: BathSpec) -> tuple[np.ndarray, np.ndarray]:
    """The two Laplace poles of each chain mode l = 1..N.

    They are the roots of (s + lambda)(s + i*eps_l) + gamma*lambda/2 = 0.
    """
    lam, g = bath.spectral_width, bath.coupling_constant
    eps = mode_energies(spec)
    sq = np.sqrt((lam - 1j * eps) ** 2 - 2 * g * lam + 0j)
    return (-(lam + 1j * eps) + sq) / 2, (-(lam + 1j * eps) - sq) / 2


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z with the removable singularity at 0 filled in."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    big = np.abs(z) > 1e-4
    out[big] = np.sinh(z[big]) / z[big]
    zs = z[~big] ** 2
    out[~big] = 1 + zs / 6 + zs**2 / 120
    return out


def _mode_amplitudes(t: np.ndarray, spec: TreeSpec, bath: BathSpec) -> np.ndarray:
    """C'_l(t) for all l, shape (T, N)."""
    n = spec.generations
    lam, g = bath.spectral_width, bath.coupling_constant
    eps = mode_energies(spec)[None, :]
    t = t[:, None]
    a = lam + 1j * eps
    b = lam - 1j * eps
    root = np.sqrt(b**2 - 2 * g * lam + 0j)
    z = root * t / 2
    # cosh and sinh(x)/x are even in the root, so the branch of the sqrt is irrelevant
    bracket = np.cosh(z) + b * (t / 2) * _sinhc(z)
    l = np.arange(1, n + 1)
    c0 = np.sqrt(2.0 / (n + 1)) * np.sin(l * np.pi / (n + 1))
    return c0[None, :] * np.exp(-a * t / 2) * bracket


def chain_mode_amplitude_analytic(m: int, t, spec: TreeSpec, bath: BathSpec):
    """Closed-form amplitude of chain eigenmode ``m`` at time(s) ``t``."""
    if not 1 <= m <= spec.generations:
        raise ValueError(f"mode index {m} outside 1..{spec.generations}")
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0):
        raise ValueError("t must be >= 0")
    vals = _mode_amplitudes(tt, spec, bath)[:, m - 1]
    return vals[0] if np.ndim(t) == 0 else vals


def amplitudes_analytic(t_grid, spec: TreeSpec, bath: BathSpec) -> AmplitudeTrajectory:
    t = _check_grid(t_grid)
    modes = _mode_amplitudes(t, spec, bath)
    S = sine_transform_matrix(spec.generations)
    return AmplitudeTrajectory(t, modes @ S.T, method="analytic")


def _integrate(rhs, y0: np.ndarray, t: np.ndarray, label: str) -> np.ndarray:
    t0 = 0.0
    sol = solve_ivp(
        rhs,
        (t0, t[-1]) if t[-1] > t0 else (t0, t0 + 1e-12),
        y0,
        method="DOP853",
        t_eval=t,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
    )
    if not sol.success:
        raise RuntimeError(f"{label}: integrator failed to meet tolerance: {sol.message}")
    return sol.y.T


def amplitudes_pseudomode_oracle(t_grid, spec: TreeSpec, bath: BathSpec) -> AmplitudeTrajectory:
    """Integrate the chain equations with one auxiliary memory variable per site.

    With f(tau) = (gamma*lambda/2) exp(-lambda*tau), the memory integral
    z_m(t) = int_0^t f(t - s) C_m(s) ds obeys dz_m/dt = -lambda z_m + (gamma*lambda/2) C_m.
    DOP853 (order 8, embedded error control) at rtol=1e-10, atol=1e-12; the
    output grid does not constrain the internal steps.
    """
    t = _check_grid(t_grid)
    n = spec.generations
    hop = np.sqrt(2) * spec.coupling
    lam, g = bath.spectral_width, bath.coupling_constant
    A = np.zeros((n, n))
    idx = np.arange(n - 1)
    A[idx, idx + 1] = A[idx + 1, idx] = hop
    gen = np.block([[-1j * A, -np.eye(n)], [0.5 * g * lam * np.eye(n), -lam * np.eye(n)]])

    y0 = np.zeros(2 * n, dtype=complex)
    y0[0] = 1.0
    y = _integrate(lambda _t, y: gen @ y, y0, t, "pseudomode oracle")
    return AmplitudeTrajectory(t, y[:, :n], method="pseudomode")


def amplitudes_fulltree_oracle(t_grid, spec: TreeSpec, bath: BathSpec) -> AmplitudeTrajectory:
    """Evolve every tree site with its own reservoir, then project onto the column states."""
    if spec.generations > MAX_DENSE_GENERATIONS:
        raise ValueError(f"full-tree oracle limited to N <= {MAX_DENSE_GENERATIONS}")
    t = _check_grid(t_grid)
    d = spec.n_sites
    lam, g = bath.spectral_width, bath.coupling_constant
    A = np.zeros((d, d))
    for j, c in spec.edges():
        A[j - 1, c - 1] = A[c - 1, j - 1] = spec.coupling
    hop = -1j * A
    feed = 0.5 * g * lam

    def rhs(_t, y):
        c, z = y[:d], y[d:]
        return np.concatenate([hop @ c - z, feed * c - lam * z])

    y0 = np.zeros(2 * d, dtype=complex)
    y0[0] = 1.0
    sites = _integrate(rhs, y0, t, "full-tree oracle")[:, :d]
    V = build_column_basis(spec).vectors
    cols = sites @ V
    outside = np.linalg.norm(sites - cols @ V.T, axis=1)
    return AmplitudeTrajectory(t, cols, method="fulltree", outside_residual=outside, site_amplitudes=sites)
