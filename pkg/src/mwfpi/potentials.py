"""Gravitationally tilted double-Gaussian cavity potential and the reference
triangular well used to interpret the strong-tilt limit of the resonances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import airy

from .grid import Grid
from .model import HBAR, InvalidParameterError, ModelParams


class NoBoundStatesError(ValueError):
    """The triangular well needs a nonzero tilt to bind anything."""


def _evaluate_components(components, z):
    z = np.asarray(z, dtype=float)
    v = np.zeros_like(z)
    for comp in components:
        if comp[0] == "gravity":
            v = v + comp[1] * z
        elif comp[0] == "barrier":
            _, center, height, width = comp
            v = v + height * np.exp(-((z - center) ** 2) / (2.0 * width**2))
        elif comp[0] == "wall":
            _, pos, cap, slope = comp
            v = np.where(z <= pos, cap, v + slope * (z - pos))
        else:
            raise InvalidParameterError(f"unknown potential component {comp[0]!r}")
    return v


@dataclass(frozen=True)
class PotentialField:
    """Sampled potential plus the analytic term list it was built from.

    components is a tuple of descriptors:
      ("gravity", m*g)                     -> m*g*z
      ("barrier", center, height, width)   -> height*exp(-(z-center)^2/(2 width^2))
      ("wall", position, cap, slope)       -> cap for z <= position, slope*(z-position) after
    """

    grid: Grid
    values: np.ndarray
    components: tuple

    def __post_init__(self):
        self.values.setflags(write=False)

    def evaluate(self, z):
        """Evaluate the analytic descriptor at arbitrary positions."""
        return _evaluate_components(self.components, z)


def cavity_potential(params: ModelParams, grid: Grid) -> PotentialField:
    """m g z plus the two Gaussian barriers at z_-, z_+."""
    comps = (
        ("gravity", params.mass * params.gravity),
        ("barrier", params.z_minus, params.barrier_height, params.barrier_width),
        ("barrier", params.z_plus, params.barrier_height, params.barrier_width),
    )
    return PotentialField(grid, _evaluate_components(comps, grid.z), comps)


def triangular_potential(
    z_wall: float, g: float, m: float, grid: Grid, cap: float | None = None
) -> PotentialField:
    """Hard wall at z_wall with a linear rise m|g|(z - z_wall) on the open side.

    The wall is a finite cap rather than an infinity so the field stays usable
    inside grid-based solvers; pass e.g. cap = 1e3 * barrier_height to match
    the cavity scale.  The analytic Airy route in `triangular_eigenenergies`
    is the reference for eigenvalues.
    """
    if g == 0.0:
        raise NoBoundStatesError("triangular well requires |g| > 0")
    slope = m * abs(g)
    if cap is None:
        cap = 1e3 * slope * (grid.z_max - grid.z_min)
    comps = (("wall", z_wall, cap, slope),)
    return PotentialField(grid, _evaluate_components(comps, grid.z), comps)


def _airy_negative_zeros(n_levels: int) -> np.ndarray:
    """First n negative zeros of Ai, by bracketed root-finding.

    The large-argument asymptotics a_n ~ -(3 pi (4n-1)/8)^(2/3) locates each
    zero to much better than the inter-zero spacing, so midpoints between
    consecutive estimates bracket exactly one zero each.
    """
    def f(x):
        return airy(x)[0]

    est = [-((3.0 * np.pi * (4.0 * n - 1.0) / 8.0) ** (2.0 / 3.0)) for n in range(0, n_levels + 2)]
    est[0] = 0.0
    zeros = []
    for n in range(1, n_levels + 1):
        lo = 0.5 * (est[n] + est[n + 1])
        hi = 0.5 * (est[n] + est[n - 1])
        zeros.append(brentq(f, lo, hi, xtol=1e-14, rtol=1e-15))
    return np.asarray(zeros)


def triangular_eigenenergies(g: float, m: float, n_levels: int, hbar: float = HBAR) -> np.ndarray:
    """Bound-state energies |a_n| (hbar^2 m g^2 / 2)^(1/3) above the wall base."""
    if g == 0.0:
        raise NoBoundStatesError("triangular well requires |g| > 0")
    if n_levels < 1:
        raise InvalidParameterError("n_levels must be >= 1")
    scale = (hbar**2 * m * g**2 / 2.0) ** (1.0 / 3.0)
    return np.abs(_airy_negative_zeros(n_levels)) * scale
