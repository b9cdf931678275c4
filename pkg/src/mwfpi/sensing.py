"""Transmission observables, their shot-noise variances, the relative
acceleration uncertainty for both sensor configurations, and the mapping of
cavity resonances onto equivalent velocity-selective Bragg pulses.

All relative uncertainties are returned pre-scaled as sqrt(N) sqrt(nu)
delta_g (single particle, single shot); `scale_to_ensemble` divides the
shot-noise factors back in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .grid import WaveFunction, to_position
from .model import InvalidParameterError, ModelParams
from .resonances import Resonance

DIVERGENT = np.nan
_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class TransmissionObservables:
    """Projector expectation values of a scattered state."""

    transmitted_right: float  # T_R, weight beyond z_+
    transmitted_left: float  # T_L, weight below z_-
    total: float  # T_+ = T_L + T_R
    asymmetry: float  # T_- = T_L - T_R
    var_right: float  # T_R (1 - T_R)
    var_asymmetry: float  # T_+ - T_-^2


def project(psi_sc: WaveFunction, params: ModelParams) -> TransmissionObservables:
    """Integrate the scattered density beyond each barrier center."""
    pos = to_position(psi_sc)
    dens = pos.density() * pos.grid.dz
    z = pos.grid.z
    t_r = float(dens[z >= params.z_plus].sum())
    t_l = float(dens[z <= params.z_minus].sum())
    t_r = min(max(t_r, 0.0), 1.0)
    t_l = min(max(t_l, 0.0), 1.0)
    t_plus = t_l + t_r
    t_minus = t_l - t_r
    return TransmissionObservables(
        transmitted_right=t_r,
        transmitted_left=t_l,
        total=t_plus,
        asymmetry=t_minus,
        var_right=t_r * (1.0 - t_r),
        var_asymmetry=t_plus - t_minus**2,
    )


@dataclass(frozen=True)
class SensitivityMap:
    """delta-g map over a (g, E) sweep grid, pre-scaled by sqrt(N nu)."""

    g_values: np.ndarray
    energy_values: np.ndarray
    transmission: np.ndarray  # (n_g, n_E)
    delta_g: np.ndarray  # (n_g, n_E), NaN where divergent
    variant: str  # 'full' | 'intrinsic' | 'asymmetric'


def _gradients(t_map, g_values, e_values):
    """Central differences in the interior, one-sided at the edges."""
    dg = np.gradient(t_map, g_values, axis=0)
    de = np.gradient(t_map, e_values, axis=1) if t_map.shape[1] > 1 else np.zeros_like(t_map)
    return dg, de


def rel_uncertainty_right(
    t_map,
    g_values,
    e_values,
    packet_center: float,
    mass: float,
    n_atoms: float = 1.0,
    n_runs: float = 1.0,
    include_propagation: bool = True,
) -> np.ndarray:
    """Gaussian-propagated uncertainty of g from a T_R(g, E) map.

    delta_g = sqrt(T(1-T)) / sqrt(N nu) / sqrt(|g dT/dg|^2 + |m g z0 dT/dE|^2);
    include_propagation=False drops the second (pre-scattering acceleration)
    term, isolating the cavity response.  Entries where the denominator
    underflows are NaN (divergent), in particular the whole g = 0 row.

    e_values must carry the same energy units as mass * g * packet_center
    (i.e. absolute energies, not E/V_b ratios), or both terms cannot share
    the denominator.
    """
    t_map = np.asarray(t_map, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    e_values = np.asarray(e_values, dtype=float)
    if t_map.shape != (g_values.size, e_values.size):
        raise InvalidParameterError("T map shape does not match the axes")
    if g_values.size < 3:
        raise InvalidParameterError("need at least 3 g samples for derivatives")
    d_g, d_e = _gradients(t_map, g_values, e_values)
    g_col = g_values[:, None]
    denom_sq = (g_col * d_g) ** 2
    if include_propagation:
        denom_sq = denom_sq + (mass * g_col * packet_center * d_e) ** 2
    denom = np.sqrt(denom_sq) * np.sqrt(n_atoms * n_runs)
    sigma = np.sqrt(np.clip(t_map * (1.0 - t_map), 0.0, None))
    out = np.full_like(t_map, DIVERGENT)
    ok = denom > _DENOM_FLOOR
    out[ok] = sigma[ok] / denom[ok]
    return out


def rel_uncertainty_minus(
    t_minus_map,
    t_plus_map,
    g_values,
    n_atoms: float = 1.0,
    n_runs: float = 1.0,
) -> np.ndarray:
    """delta_g of the intra-cavity configuration:
    sqrt(T_+ - T_-^2) / (sqrt(N nu) g |dT_-/dg|)."""
    t_minus_map = np.asarray(t_minus_map, dtype=float)
    t_plus_map = np.asarray(t_plus_map, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    if g_values.size < 3:
        raise InvalidParameterError("need at least 3 g samples for derivatives")
    d_g = np.gradient(t_minus_map, g_values, axis=0)
    denom = np.abs(g_values[:, None] * d_g) * np.sqrt(n_atoms * n_runs)
    var = np.clip(t_plus_map - t_minus_map**2, 0.0, None)
    out = np.full_like(t_minus_map, DIVERGENT)
    ok = denom > _DENOM_FLOOR
    out[ok] = np.sqrt(var[ok]) / denom[ok]
    return out


def scale_to_ensemble(delta_g_single, n_atoms: float, n_runs: float):
    """Convert the single-particle single-shot map to N atoms, nu runs."""
    return np.asarray(delta_g_single) / np.sqrt(n_atoms * n_runs)


def epsilon_fw() -> float:
    """Full width (in Rabi-frequency units) of a pi-pulse Doppler line.

    The mirror-pulse transfer probability (pi/2)^2 sinc^2((pi/2) sqrt(1+x))
    with sinc(x) = sin(x)/x drops to 1/2 at a unique x in (0, 4); the
    detuning enters quadratically, so the full width is 2 sqrt(x) = 1.597.
    """

    def f(x):
        arg = 0.5 * np.pi * np.sqrt(1.0 + x)
        return (np.sin(arg) / np.sqrt(1.0 + x)) ** 2 - 0.5

    root = brentq(f, 1e-12, 4.0, xtol=1e-14, rtol=1e-15)
    return 2.0 * np.sqrt(root)


def bragg_rabi(
    resonance: Resonance,
    mass: float,
    bragg_wavevector: float,
    doppler_width: float | None = None,
) -> float:
    """Effective Rabi frequency [rad/s] of the Bragg pulse with the same
    velocity selectivity as the resonance:
    Omega = Gamma k_B / (2 sqrt(2 m E_r) eps_FW)."""
    if resonance.energy <= 0 or resonance.width <= 0:
        raise InvalidParameterError("resonance must have positive energy and width")
    eps = epsilon_fw() if doppler_width is None else doppler_width
    return resonance.width * bragg_wavevector / (
        2.0 * np.sqrt(2.0 * mass * resonance.energy) * eps
    )


def calibrate_barrier_height(
    energy_ratios,
    width_ratios,
    omega_table_hz,
    mass: float,
    bragg_wavevector: float,
    hbar: float,
) -> float:
    """Least-squares barrier height from a table of Bragg Rabi frequencies.

    Given dimensionless resonances (E_r/V_b, Gamma/V_b) and target Omega/2pi
    values, Omega scales as sqrt(V_b); the log-domain least-squares fit has
    the closed form below.
    """
    e = np.asarray(energy_ratios, dtype=float)
    w = np.asarray(width_ratios, dtype=float)
    om = np.asarray(omega_table_hz, dtype=float)
    if not (e.size == w.size == om.size and e.size > 0):
        raise InvalidParameterError("ratio and table arrays must have equal nonzero length")
    eps = epsilon_fw()
    # Omega/2pi at V_b = 1 J: (w V_b) k_B / (2 sqrt(2 m e V_b) eps) / 2pi
    model_at_unit = w * bragg_wavevector / (2.0 * np.sqrt(2.0 * mass * e) * eps) / (2.0 * np.pi)
    log_scale = np.mean(np.log(om) - np.log(model_at_unit))
    return float(np.exp(2.0 * log_scale))
