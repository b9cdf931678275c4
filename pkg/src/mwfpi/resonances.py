"""Quasi-bound states of the tilted cavity by complex scaling on a global
sine interpolation basis (Lagrange-mesh style: analytic kinetic matrix,
potential diagonal at the rotated mesh points).

An eigenvalue E_r - i Gamma/2 counts as a resonance only if it stays put
while the rotation angle moves by +-10%; rotated continuum states fail that
plateau test because they track 2 theta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig, eigvals

from .model import InvalidParameterError, ModelParams
from .potentials import triangular_eigenenergies


class NoPlateauError(RuntimeError):
    """No eigenvalue passed the theta-stability test."""


class TrackLostError(RuntimeError):
    """A resonance trajectory could not be continued across the g grid."""


@dataclass(frozen=True)
class Resonance:
    """One complex eigenvalue E_r - i Gamma/2 with its diagnostics."""

    energy: float
    width: float
    theta: float
    plateau_shift: float  # max |delta E| under the +-10% theta variation
    index: int
    hbar: float
    track_id: int = -1
    plateau_width: float = 0.0  # verified theta-stability window [rad]

    @property
    def lifetime(self) -> float:
        return self.hbar / self.width

    @property
    def phase_angle(self) -> float:
        """phi = arctan(Gamma / (2 E_r)); validity requires 2 theta > phi."""
        return float(np.arctan2(self.width, 2.0 * self.energy))


def default_box(params: ModelParams, margin: float | None = None) -> tuple:
    """Solver box: barrier centers padded by 90 sigma_b per side (enough to
    converge the narrowest width against box truncation)."""
    pad = 90.0 * params.barrier_width if margin is None else margin
    return (params.z_minus - pad, params.z_plus + pad)


def _complex_cavity_potential(params: ModelParams, zc: np.ndarray) -> np.ndarray:
    sb, vb = params.barrier_width, params.barrier_height
    v = vb * np.exp(-((zc - params.z_minus) ** 2) / (2.0 * sb**2))
    v = v + vb * np.exp(-((zc - params.z_plus) ** 2) / (2.0 * sb**2))
    return v + params.mass * params.gravity * zc


def _sine_dvr_kinetic(n: int, length: float, mass: float, hbar: float) -> np.ndarray:
    """Exact kinetic matrix on the sine basis over a hard box of given length."""
    i = np.arange(1, n + 1)
    npl = n + 1
    pref = hbar**2 * np.pi**2 / (4.0 * mass * length**2)
    diff = i[:, None] - i[None, :]
    summ = i[:, None] + i[None, :]
    with np.errstate(divide="ignore"):
        off = (-1.0) ** diff * (
            1.0 / np.sin(np.pi * diff / (2.0 * npl)) ** 2
            - 1.0 / np.sin(np.pi * summ / (2.0 * npl)) ** 2
        )
    diag = (2.0 * npl**2 + 1.0) / 3.0 - 1.0 / np.sin(np.pi * i / npl) ** 2
    t = pref * off
    t[np.diag_indices(n)] = pref * diag
    return t


def complex_scaled_hamiltonian(
    params: ModelParams,
    theta: float,
    basis_size: int = 512,
    box: tuple | None = None,
) -> np.ndarray:
    """Dense non-hermitian matrix e^{-2 i theta} T + V(z e^{i theta}).

    The mesh is uniform inside the box (sine-basis Lagrange mesh); the
    potential is diagonal at the complex-rotated mesh points, the gravity
    term enters as m g z e^{i theta}.
    """
    if not 0.0 <= theta < np.pi / 4.0:
        raise InvalidParameterError(f"theta must lie in [0, pi/4), got {theta}")
    if basis_size < 64:
        raise InvalidParameterError("basis_size must be >= 64")
    z_lo, z_hi = box if box is not None else default_box(params)
    tail = max(
        abs(_complex_cavity_potential(params.with_(gravity=0.0), np.array([z_lo + 0j]))[0]),
        abs(_complex_cavity_potential(params.with_(gravity=0.0), np.array([z_hi + 0j]))[0]),
    )
    if tail > 1e-10 * params.barrier_height:
        raise InvalidParameterError(
            f"box too small: barrier tail {tail:.2e} at the edge exceeds 1e-10 V_b"
        )
    length = z_hi - z_lo
    mesh = z_lo + (np.arange(1, basis_size + 1)) * (length / (basis_size + 1))
    t = _sine_dvr_kinetic(basis_size, length, params.mass, params.hbar)
    h = t * np.exp(-2j * theta)
    zc = mesh * np.exp(1j * theta)
    h[np.diag_indices(basis_size)] += _complex_cavity_potential(params, zc)
    return h


def _plateau_filter(w, w_lo, w_hi, e_max, v_b, theta, interior, tilted):
    """Keep eigenvalues stable under the +-10% theta re-solves whose states
    actually live between the barriers (a tilted finite box also binds
    states downhill of the cavity; those are model artifacts).

    Rotated continuum states move by about 2 theta |E|, four or more orders
    above any threshold here.  The untilted threshold follows the strict
    max(1e-3 Gamma, 1e-6 V_b); with gravity the downhill box ladder raises
    the genuine theta sensitivity of resonances, so a 5%-of-width allowance
    keeps them without admitting any continuum state.
    """
    keep = []
    for idx, ev in enumerate(w):
        e_r, gam = ev.real, -2.0 * ev.imag
        if not (0.0 < e_r < e_max and gam > 0.0):
            continue
        if interior[idx] < 1.0:  # peaks outside the cavity: box artifact
            continue
        shift = max(np.min(np.abs(w_lo - ev)), np.min(np.abs(w_hi - ev)))
        allowance = max(5e-2 * gam, 1e-6 * v_b) if tilted else max(1e-3 * gam, 1e-6 * v_b)
        if shift >= allowance:
            continue
        if 2.0 * theta <= np.arctan2(gam, 2.0 * e_r):
            continue
        keep.append((ev, float(shift)))
    keep.sort(key=lambda t: t[0].real)
    return keep


def find_resonances(
    params: ModelParams,
    theta: float = 0.15,
    basis_size: int = 512,
    e_max: float | None = None,
    box: tuple | None = None,
    check_basis: bool = False,
) -> list:
    """Resonances below e_max (default 1.3 V_b), theta-plateau filtered."""
    if e_max is None:
        e_max = 1.3 * params.barrier_height
    z_lo, z_hi = box if box is not None else default_box(params)
    mesh = z_lo + np.arange(1, basis_size + 1) * ((z_hi - z_lo) / (basis_size + 1))
    pad = 4.0 * params.barrier_width
    inside = (mesh >= params.z_minus) & (mesh <= params.z_plus)
    outside = (mesh < params.z_minus - pad) | (mesh > params.z_plus + pad)
    w, vecs = eig(complex_scaled_hamiltonian(params, theta, basis_size, box))
    dens = np.abs(vecs) ** 2
    # quasi-bound states peak between the barriers; a tilted finite box also
    # binds states downhill of the cavity, which peak outside instead
    interior = dens[inside].max(axis=0) / np.maximum(
        dens[outside].max(axis=0), 1e-300
    )
    w_lo = eigvals(complex_scaled_hamiltonian(params, 0.9 * theta, basis_size, box))
    w_hi = eigvals(complex_scaled_hamiltonian(params, 1.1 * theta, basis_size, box))
    kept = _plateau_filter(
        w, w_lo, w_hi, e_max, params.barrier_height, theta, interior,
        tilted=params.gravity != 0.0,
    )
    if not kept:
        raise NoPlateauError("no eigenvalue passed the theta-plateau test")
    if check_basis:
        w2 = eigvals(complex_scaled_hamiltonian(params, theta, 2 * basis_size, box))
        for ev, _ in kept:
            drift = np.min(np.abs(w2 - ev))
            if drift > 1e-3 * params.barrier_height:
                warnings.warn(
                    f"resonance at E_r={ev.real:.4g} moved {drift:.2e} under basis "
                    f"doubling; increase basis_size"
                )
    return [
        Resonance(
            energy=float(ev.real),
            width=float(-2.0 * ev.imag),
            theta=theta,
            plateau_shift=shift,
            index=j,
            hbar=params.hbar,
            plateau_width=0.2 * theta,
        )
        for j, (ev, shift) in enumerate(kept)
    ]


@dataclass
class ResonanceTrajectory:
    """(E_r(g), Gamma(g)) for one tracked resonance, possibly truncated."""

    track_id: int
    gravities: np.ndarray
    energies: np.ndarray
    widths: np.ndarray
    lost: bool = False
    triangular_level: float | None = None  # matched Airy level at the largest |g|
    triangular_distance: float | None = None


def track_vs_gravity(
    params: ModelParams,
    g_grid,
    theta: float = 0.15,
    basis_size: int = 512,
    box: tuple | None = None,
    e_max: float | None = None,
    strict: bool = False,
    candidates_by_g: dict | None = None,
) -> list:
    """Continue each g = 0 resonance outward over a monotone g grid.

    Candidates at every g are the plateau-filtered resonance sets (pass
    `candidates_by_g`, mapping g to complex E_r - i Gamma/2 arrays, to reuse
    sets solved elsewhere, e.g. on a worker pool).  Matching goes by nearest
    distance to a linear prediction, which keeps the diabatic branch through
    avoided crossings, and tolerates up to two consecutive retention
    dropouts.  A step beyond half the local level spacing counts as a lost
    track and truncates the trajectory (or raises with strict=True).  Each
    trajectory is annotated with the nearest triangular-well level at its
    outermost g.
    """
    g_grid = np.asarray(list(g_grid), dtype=float)
    if g_grid.size == 0 or np.any(np.diff(g_grid) <= 0):
        raise InvalidParameterError("g_grid must be non-empty and strictly increasing")
    if not np.any(g_grid == 0.0):
        raise InvalidParameterError("g_grid must include 0")
    if e_max is None:
        e_max = 1.3 * params.barrier_height

    def candidates(g):
        try:
            res = find_resonances(
                params.with_(gravity=float(g)), theta=theta, basis_size=basis_size,
                e_max=e_max, box=box,
            )
        except NoPlateauError:
            return np.empty(0, dtype=complex)
        return np.array([r.energy - 0.5j * r.width for r in res])

    if candidates_by_g is None:
        candidates_by_g = {float(g): candidates(g) for g in g_grid}
    spectra = {g: np.asarray(v, dtype=complex) for g, v in candidates_by_g.items()}
    base = np.sort_complex(spectra[0.0])

    trajs = []
    for tid, ev0 in enumerate(base):
        rows = {0.0: ev0}
        lost_any = False
        for direction in (+1, -1):
            prev, prev_g, slope = ev0, 0.0, 0.0
            misses = 0
            gs = sorted((g for g in g_grid if g * direction > 0), key=abs)
            for g in gs:
                cand = spectra[float(g)]
                predicted = prev + slope * (g - prev_g)
                d = np.abs(cand - predicted) if cand.size else np.empty(0)
                pick = int(np.argmin(d)) if d.size else -1
                if pick < 0 or d[pick] > 0.5 * _local_spacing(cand, pick):
                    # allow isolated retention dropouts before giving up
                    misses += 1
                    if misses > 2:
                        if strict:
                            raise TrackLostError(
                                f"track {tid} lost at g={g:.3g}: no candidate within "
                                f"half the local level spacing"
                            )
                        lost_any = True
                        break
                    continue
                misses = 0
                slope = (cand[pick] - prev) / (g - prev_g)
                prev, prev_g = cand[pick], g
                rows[float(g)] = prev
        gs_sorted = np.array(sorted(rows))
        evs = np.array([rows[g] for g in gs_sorted])
        traj = ResonanceTrajectory(
            track_id=tid,
            gravities=gs_sorted,
            energies=evs.real,
            widths=-2.0 * evs.imag,
            lost=lost_any,
        )
        _annotate_triangular(traj, params)
        trajs.append(traj)
    return trajs


def _local_spacing(evs: np.ndarray, i: int) -> float:
    if evs.size < 2:
        return np.inf
    d = np.abs(evs - evs[i])
    d = d[d > 0]
    return float(np.min(d)) if d.size else np.inf


def _annotate_triangular(traj: ResonanceTrajectory, params: ModelParams) -> None:
    """Distance from the outermost-|g| endpoint to its Airy level.

    The triangular well has its hard wall at the downhill barrier center, so
    its levels sit at m g z_wall + |a_n| (hbar^2 m g^2/2)^(1/3) in the cavity
    energy frame.  Compared with |g| for either tilt sign.
    """
    i_out = int(np.argmax(np.abs(traj.gravities)))
    g = traj.gravities[i_out]
    if g == 0.0:
        return
    z_wall = params.z_minus if g > 0 else params.z_plus
    offset = params.mass * g * z_wall
    levels = offset + triangular_eigenenergies(
        abs(g), params.mass, traj.track_id + 2, hbar=params.hbar
    )
    e_end = traj.energies[i_out]
    n = int(np.argmin(np.abs(levels - e_end)))
    traj.triangular_level = float(levels[n])
    traj.triangular_distance = float(abs(levels[n] - e_end))


@dataclass(frozen=True)
class SpectrumModel:
    """Independent Lorentzian line shapes, one per resonance."""

    components: tuple  # ((E_r, Gamma), ...)

    def evaluate(self, energies):
        """Pointwise max over components of (G/2)^2 / ((E-E_r)^2 + (G/2)^2)."""
        e = np.asarray(energies, dtype=float)
        out = np.zeros_like(e)
        for e_r, gam in self.components:
            half = 0.5 * gam
            out = np.maximum(out, half**2 / ((e - e_r) ** 2 + half**2))
        return out


def lorentzian_model(resonances) -> SpectrumModel:
    if not resonances:
        raise InvalidParameterError("need at least one resonance")
    return SpectrumModel(tuple((r.energy, r.width) for r in resonances))
