"""Initial states: incident Gaussian packets and the intra-cavity
superposition of opposite momentum kicks, plus moment diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, WaveFunction, to_momentum, to_position
from .model import ModelParams


class PacketGridError(ValueError):
    """The packet does not fit the grid with negligible edge amplitude."""


class BarrierOverlapError(ValueError):
    """An intra-cavity packet leaks significantly into the barriers."""


@dataclass(frozen=True)
class PacketMoments:
    mean_position: float
    mean_momentum: float
    position_width: float
    momentum_width: float

    def uncertainty_product(self) -> float:
        return self.position_width * self.momentum_width


def gaussian_packet(params: ModelParams, grid: Grid) -> WaveFunction:
    """Normalized Gaussian at packet_center with kick packet_momentum.

    psi(z) = (2 pi dz^2)^(-1/4) exp(-(z-z0)^2/(4 dz^2) + i (z-z0) p0 / hbar)
    """
    z0, p0, dz = params.packet_center, params.packet_momentum, params.packet_width
    if abs(z0 - grid.z_min) <= 6.0 * dz or abs(grid.z_max - z0) <= 6.0 * dz:
        raise PacketGridError("packet center closer than 6 widths to a grid edge")
    z = grid.z
    psi = (2.0 * np.pi * dz**2) ** -0.25 * np.exp(
        -((z - z0) ** 2) / (4.0 * dz**2) + 1j * (z - z0) * p0 / grid.hbar
    )
    edge = max(abs(psi[0]), abs(psi[-1]))
    if edge > 1e-12:
        raise PacketGridError(f"packet tail amplitude {edge:.2e} at grid edge exceeds 1e-12")
    wf = WaveFunction(grid, psi)
    wf.values /= np.sqrt(wf.norm())
    return wf


def symmetric_superposition(params: ModelParams, grid: Grid) -> WaveFunction:
    """Equal-weight superposition of +-packet_momentum kicks centered at z = 0.

    The normalization keeps the interference cross term
    exp(-2 p0^2 dz^2 / hbar^2), which matters for small kicks.  Raises if more
    than 2% of the probability sits within 3 sigma_b of a barrier center.
    """
    dz, p0 = params.packet_width, abs(params.packet_momentum)
    z = grid.z
    envelope = (2.0 * np.pi * dz**2) ** -0.25 * np.exp(-(z**2) / (4.0 * dz**2))
    psi = envelope * np.cos(p0 * z / grid.hbar)  # (e^{ip0z} + e^{-ip0z})/2 * 2
    overlap = np.exp(-2.0 * (p0 * dz / grid.hbar) ** 2)
    psi = psi / np.sqrt(0.5 * (1.0 + overlap))
    wf = WaveFunction(grid, psi.astype(complex))
    # guard: the packet must be essentially confined between the barriers
    sb = params.barrier_width
    near = np.zeros(grid.n_points, dtype=bool)
    for zc in (params.z_minus, params.z_plus):
        near |= np.abs(z - zc) <= 3.0 * sb
    leaked = float(np.sum(wf.density()[near]) * grid.dz) / wf.norm()
    if leaked > 0.02:
        raise BarrierOverlapError(
            f"{leaked:.1%} of the packet overlaps the barriers; reduce packet_width"
        )
    wf.values /= np.sqrt(wf.norm())
    return wf


def moments(psi: WaveFunction) -> PacketMoments:
    """Mean and width of position and momentum by discrete quadrature."""
    pos = to_position(psi)
    mom = to_momentum(psi)
    rho_z = pos.density() * pos.grid.dz
    rho_p = mom.density() * mom.grid.dp
    rho_z /= rho_z.sum()
    rho_p /= rho_p.sum()
    z, p = pos.grid.z, mom.grid.p
    mz = float(rho_z @ z)
    mp = float(rho_p @ p)
    vz = float(rho_z @ (z - mz) ** 2)
    vp = float(rho_p @ (p - mp) ** 2)
    return PacketMoments(mz, mp, np.sqrt(max(vz, 0.0)), np.sqrt(max(vp, 0.0)))


def dump_wavefunction_csv(psi: WaveFunction, path) -> None:
    """Write (z, Re psi, Im psi, |psi|^2) rows for plotting."""
    pos = to_position(psi)
    data = np.column_stack(
        [pos.grid.z, pos.values.real, pos.values.imag, pos.density()]
    )
    header = "z,re_psi,im_psi,density"
    np.savetxt(path, data, delimiter=",", header=header, comments="")
