"""Plane-wave scattering off the g = 0 cavity via staircase transfer
matrices, and the momentum-averaged transmission of a finite-width packet.

Transfer matrices act on (psi, psi') columns, so each constant-potential
step is an entire function of the energy and the E = V crossover needs no
special casing.  Products run through the cascade kernel (compiled when
available).  With gravity there are no asymptotic plane waves; those cases
belong to the time-dependent propagator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import cascade_chain
from .grid import WaveFunction, to_momentum
from .model import InvalidParameterError, ModelParams


class GravityNotSupportedError(ValueError):
    """Plane-wave scattering states require g = 0."""


class NotConvergedError(RuntimeError):
    """Staircase refinement did not converge within the doubling budget."""


@dataclass(frozen=True)
class TransferMatrix:
    """Transfer matrix in the (psi, psi') basis across a window.

    The stored matrix is rescaled to avoid overflow under deep tunneling;
    the true matrix is `matrix * exp(log_scale)`.
    """

    matrix: np.ndarray
    energy: float
    n_steps: int
    window: tuple
    log_scale: float = 0.0

    def determinant(self) -> float:
        return float(np.real(np.linalg.det(self.matrix)) * np.exp(2.0 * self.log_scale))


@dataclass(frozen=True)
class TransmissionSpectrum:
    energies_over_barrier: np.ndarray
    transmission: np.ndarray
    reflection: np.ndarray
    n_steps: int
    converged: bool


def step_matrix(energy: float, v_step: float, width: float, mass: float, hbar: float) -> TransferMatrix:
    """Analytic transfer matrix of one constant-potential step."""
    if width <= 0:
        raise InvalidParameterError("width must be positive")
    b = hbar**2 / (2.0 * mass)
    m, ls = cascade_chain(np.array([float(energy)]), np.array([float(v_step)]), width, b)
    return TransferMatrix(m[0].astype(complex), energy, 1, (0.0, width), float(ls[0]))


def concatenate(first: TransferMatrix, second: TransferMatrix) -> TransferMatrix:
    """Matrix of `first` followed by `second` (semigroup product)."""
    return TransferMatrix(
        second.matrix @ first.matrix,
        first.energy,
        first.n_steps + second.n_steps,
        (first.window[0], second.window[1]),
        first.log_scale + second.log_scale,
    )


def _window(params: ModelParams) -> tuple:
    pad = 6.0 * params.barrier_width
    return (params.z_minus - pad, params.z_plus + pad)


def _staircase(params: ModelParams, n_steps: int, window=None):
    z_a, z_b = window or _window(params)
    w = (z_b - z_a) / n_steps
    mid = z_a + (np.arange(n_steps) + 0.5) * w
    sb, vb = params.barrier_width, params.barrier_height
    v = vb * np.exp(-((mid - params.z_minus) ** 2) / (2 * sb**2))
    v += vb * np.exp(-((mid - params.z_plus) ** 2) / (2 * sb**2))
    return v, w, (z_a, z_b)


def cavity_matrix(energy: float, params: ModelParams, n_steps: int) -> TransferMatrix:
    """Staircase product over the cavity window, midpoint-sampled."""
    if params.gravity != 0.0:
        raise GravityNotSupportedError("transfer matrices are defined for g = 0 only")
    if n_steps < 1:
        raise InvalidParameterError("n_steps must be >= 1")
    v, w, window = _staircase(params, n_steps)
    b = params.hbar**2 / (2.0 * params.mass)
    m, ls = cascade_chain(np.array([float(energy)]), v, w, b)
    return TransferMatrix(m[0].astype(complex), energy, n_steps, window, float(ls[0]))


def transmission_coefficients(energies, params: ModelParams, n_steps: int):
    """(tau, rho) amplitude arrays for free plane waves at the given energies."""
    if params.gravity != 0.0:
        raise GravityNotSupportedError("transfer matrices are defined for g = 0 only")
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    if np.any(energies <= 0):
        raise InvalidParameterError("scattering energies must be positive")
    v, w, _ = _staircase(params, n_steps)
    b = params.hbar**2 / (2.0 * params.mass)
    m, ls = cascade_chain(energies, v, w, b)
    k = np.sqrt(energies / b)
    diag = m[:, 0, 0] + m[:, 1, 1]
    off = m[:, 1, 0] / k - k * m[:, 0, 1]
    denom = diag + 1j * off
    tau = 2.0 * np.exp(-ls) / denom
    rho = -((m[:, 0, 0] - m[:, 1, 1]) + 1j * (m[:, 1, 0] / k + k * m[:, 0, 1])) / denom
    return tau, rho


def converged_transmission(
    energies,
    params: ModelParams,
    tol: float = 1e-6,
    n_steps_start: int = 128,
    max_doublings: int = 20,
):
    """Pointwise-converged (|tau|^2, |rho|^2, n_steps) over an energy grid.

    n_steps doubles until each sample moves less than tol; samples that have
    settled are frozen, so only the steep resonance flanks pay for the deep
    refinements.  Raises NotConvergedError if any sample is still moving
    after max_doublings doublings.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    n = n_steps_start
    tau, rho = transmission_coefficients(energies, params, n)
    t = np.abs(tau) ** 2
    r = np.abs(rho) ** 2
    active = np.ones(energies.size, dtype=bool)
    for _ in range(max_doublings):
        n *= 2
        tau_a, rho_a = transmission_coefficients(energies[active], params, n)
        t_new = np.abs(tau_a) ** 2
        moved = np.abs(t_new - t[active]) >= tol
        t[active] = t_new
        r[active] = np.abs(rho_a) ** 2
        still = np.zeros_like(active)
        still[np.flatnonzero(active)[moved]] = True
        active = still
        if not active.any():
            return t, r, n
    raise NotConvergedError(
        f"{int(active.sum())} samples not converged to {tol} after {max_doublings} doublings"
    )


def transmission_spectrum(
    params: ModelParams,
    energies,
    tol: float = 1e-6,
    n_steps_start: int = 128,
    max_doublings: int = 20,
) -> TransmissionSpectrum:
    """|tau|^2 over an energy grid, staircase-refined until pointwise stable."""
    energies = np.asarray(energies, dtype=float)
    t, r, n = converged_transmission(energies, params, tol, n_steps_start, max_doublings)
    return TransmissionSpectrum(energies / params.barrier_height, t, r, n, True)


def averaged_transmission(
    psi0: WaveFunction,
    params: ModelParams,
    tol: float = 1e-7,
    n_steps_start: int = 256,
    max_doublings: int = 20,
) -> float:
    """Momentum-averaged transmission  T_R = sum |tau(p)|^2 |psi0(p)|^2 dp.

    Valid for g = 0 and right-moving packets: the weight carried by p <= 0
    bins must be below 1e-6.  tau(p) is evaluated at E = p^2/2m on the
    packet's own momentum grid (the same lattice the split-step evolution
    lives on) with each bin refined until its contribution to T_R is stable.
    """
    if params.gravity != 0.0:
        raise GravityNotSupportedError("momentum averaging is defined for g = 0 only")
    mom = to_momentum(psi0)
    weights = mom.density() * mom.grid.dp
    p = mom.grid.p
    neg = float(weights[p <= 0].sum())
    if neg > 1e-6:
        raise InvalidParameterError(
            f"negative-momentum weight {neg:.2e} too large for the tau(p) average"
        )
    keep = (p > 0) & (weights > 1e-18)
    energies = p[keep] ** 2 / (2.0 * params.mass)
    w = weights[keep]
    tol_bin = tol / max(float(w.max()), 1e-300)
    t, _, _ = converged_transmission(energies, params, tol_bin, n_steps_start, max_doublings)
    return float(t @ w)


def dump_spectrum_csv(spectrum: TransmissionSpectrum, path) -> None:
    data = np.column_stack([spectrum.energies_over_barrier, spectrum.transmission])
    np.savetxt(path, data, delimiter=",", header="E_over_Vb,tau_sq", comments="")
