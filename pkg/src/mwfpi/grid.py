"""Uniform position grid with its conjugate momentum grid, and the sampled
wave function container moved between the two representations by unitary
FFTs.

Momentum samples exposed through the public API are always in ascending
order; `Grid.fft_order` maps them back to the transform-native layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import HBAR, InvalidParameterError


@dataclass(frozen=True)
class Grid:
    """n_points equidistant positions on [z_min, z_max) with dz = span/n."""

    z_min: float
    z_max: float
    n_points: int
    hbar: float = HBAR
    z: np.ndarray = field(init=False, repr=False, compare=False)
    p: np.ndarray = field(init=False, repr=False, compare=False)
    fft_order: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_points
        if self.z_max <= self.z_min:
            raise InvalidParameterError("z_max must exceed z_min")
        if n < 2**8 or (n & (n - 1)) != 0:
            raise InvalidParameterError(f"n_points must be a power of two >= 256, got {n}")
        dz = (self.z_max - self.z_min) / n
        z = self.z_min + dz * np.arange(n)
        k_native = 2.0 * np.pi * np.fft.fftfreq(n, d=dz)
        order = np.argsort(k_native, kind="stable")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "p", self.hbar * k_native[order])
        object.__setattr__(self, "fft_order", order)
        for a in (self.z, self.p, self.fft_order):
            a.setflags(write=False)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.z_max - self.z_min)


def build_grid(z_min: float, z_max: float, n_points: int, hbar: float = HBAR) -> Grid:
    return Grid(z_min, z_max, n_points, hbar)


@dataclass
class WaveFunction:
    """Complex amplitudes over a Grid, in position or momentum representation.

    Normalization is sum |psi_i|^2 dz = 1 (resp. dp); constructors in
    `wavepackets` guarantee it to 1e-10 and linear propagation preserves it.
    """

    grid: Grid
    values: np.ndarray
    representation: str = "position"

    def __post_init__(self):
        if self.representation not in ("position", "momentum"):
            raise InvalidParameterError(f"bad representation {self.representation!r}")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_points,):
            raise InvalidParameterError("amplitude array does not match grid")

    @property
    def weight(self) -> float:
        """Quadrature weight of the current representation."""
        return self.grid.dz if self.representation == "position" else self.grid.dp

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.weight)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values.copy(), self.representation)


def to_momentum(psi: WaveFunction) -> WaveFunction:
    """Unitary transform to the momentum representation (ascending p)."""
    if psi.representation == "momentum":
        return psi.copy()
    g = psi.grid
    k_native = g.p[np.argsort(g.fft_order, kind="stable")] / g.hbar
    raw = np.fft.fft(psi.values)
    raw *= np.exp(-1j * k_native * g.z_min) * g.dz / np.sqrt(2.0 * np.pi * g.hbar)
    return WaveFunction(g, raw[g.fft_order], "momentum")


def to_position(psi: WaveFunction) -> WaveFunction:
    """Inverse of `to_momentum`."""
    if psi.representation == "position":
        return psi.copy()
    g = psi.grid
    inv = np.empty_like(psi.values)
    inv[g.fft_order] = psi.values
    k_native = g.p[np.argsort(g.fft_order, kind="stable")] / g.hbar
    inv = inv * np.exp(1j * k_native * g.z_min)
    vals = np.fft.ifft(inv) * np.sqrt(2.0 * np.pi * g.hbar) / g.dz
    return WaveFunction(g, vals, "position")
