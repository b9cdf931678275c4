"""Physical parameters of the double-barrier matter-wave cavity and the
dimensionless unit system used by all solvers.

Every numerical routine in this package is unit-agnostic: it evaluates the
same formulas for any self-consistent set of (mass, energies, lengths, hbar).
SI parameters enter at the I/O boundary and are mapped onto the internal
dimensionless system (lengths in barrier widths, energies in barrier heights)
by :class:`Scales`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict, replace

# CODATA 2018 reduced Planck constant [J s]
HBAR = 1.054571817e-34

# Mass of 87Rb [kg] and its D2-line single-photon recoil velocity [m/s]
RB87_MASS = 1.4431609e-25
RB87_RECOIL_VELOCITY = 5.8845e-3

# Barrier height [J] calibrated against the g = 0 resonance ladder of the
# reference cavity (sigma_b = 1 um, d = 15 um, 87Rb); equals
# hbar^2 / (2 m sigma_b^2) / 1.0235.  The published SI value 1.42e-25 J is
# dimensionally inconsistent with the quoted resonance count and is only
# available as an explicit override.
CALIBRATED_BARRIER_HEIGHT = HBAR**2 / (2.0 * RB87_MASS * 1e-12) / 1.0235
QUOTED_BARRIER_HEIGHT = 1.42e-25

_JSON_FIELDS = {
    "mass": "mass_kg",
    "gravity": "gravity_m_s2",
    "barrier_height": "barrier_height_J",
    "barrier_width": "barrier_width_m",
    "cavity_length": "cavity_length_m",
    "interaction": "interaction_J_m",
    "packet_width": "packet_width_m",
    "packet_center": "packet_center_m",
    "packet_momentum": "packet_momentum_kg_m_s",
    "recoil_velocity": "recoil_velocity_m_s",
    "bragg_wavevector": "bragg_wavevector_1_m",
}


class InvalidParameterError(ValueError):
    """A model parameter violates its domain constraints."""


@dataclass(frozen=True)
class ModelParams:
    """Cavity, packet and field parameters in one consistent unit system.

    The defaults describe the reference cavity in SI units.  `packet_center`
    defaults to the launch position -3*packet_width - 6*barrier_width - d/2
    so the initial packet does not overlap the barriers; pass an explicit
    value to override.  `bragg_wavevector` defaults to the two-photon recoil
    2 m v_R / hbar.
    """

    mass: float = RB87_MASS
    gravity: float = 0.0
    barrier_height: float = CALIBRATED_BARRIER_HEIGHT
    barrier_width: float = 1e-6
    cavity_length: float = 15e-6
    interaction: float = 0.0
    packet_width: float = 12e-6
    packet_center: float | None = None
    packet_momentum: float = 0.0
    recoil_velocity: float = RB87_RECOIL_VELOCITY
    bragg_wavevector: float | None = None
    hbar: float = HBAR

    def __post_init__(self):
        for name in ("mass", "barrier_height", "barrier_width", "packet_width"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.cavity_length < 0:
            raise InvalidParameterError(f"cavity_length must be >= 0, got {self.cavity_length}")
        if self.packet_center is None:
            object.__setattr__(self, "packet_center", self.default_packet_center)
        if self.bragg_wavevector is None:
            object.__setattr__(
                self, "bragg_wavevector", 2.0 * self.mass * self.recoil_velocity / self.hbar
            )

    @property
    def z_plus(self) -> float:
        """Center of the right barrier, +(3 sigma_b + d/2)."""
        return 3.0 * self.barrier_width + 0.5 * self.cavity_length

    @property
    def z_minus(self) -> float:
        """Center of the left barrier, -(3 sigma_b + d/2)."""
        return -self.z_plus

    @property
    def default_packet_center(self) -> float:
        """Launch position -3 dz - 6 sigma_b - d/2 left of the cavity."""
        return -3.0 * self.packet_width - 6.0 * self.barrier_width - 0.5 * self.cavity_length

    @property
    def momentum_width(self) -> float:
        """Minimum-uncertainty momentum width hbar / (2 dz)."""
        return self.hbar / (2.0 * self.packet_width)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps({jname: d[f] for f, jname in _JSON_FIELDS.items()}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        raw = json.loads(text)
        unknown = set(raw) - set(_JSON_FIELDS.values())
        if unknown:
            raise InvalidParameterError(f"unknown parameter fields: {sorted(unknown)}")
        rev = {j: f for f, j in _JSON_FIELDS.items()}
        return cls(**{rev[k]: v for k, v in raw.items()})

    @classmethod
    def reference_cavity(cls, *, quoted_barrier: bool = False, **overrides) -> "ModelParams":
        """Named constructor for the reference cavity (calibrated barrier
        height unless quoted_barrier=True selects the published 1.42e-25 J)."""
        if quoted_barrier:
            overrides.setdefault("barrier_height", QUOTED_BARRIER_HEIGHT)
        return cls(**overrides)


@dataclass(frozen=True)
class Scales:
    """Unit system anchored to the cavity: lengths in barrier widths,
    energies in barrier heights.

    stiffness = hbar^2 / (2 m sigma_b^2 V_b) is the single dimensionless
    number controlling the tunneling problem; the calibrated reference
    cavity has stiffness 1/1.0235.
    """

    length_unit: float
    energy_unit: float
    time_unit: float
    momentum_unit: float
    stiffness: float
    hbar: float = HBAR

    # scalar conversions, SI -> dimensionless
    def length(self, z):
        return z / self.length_unit

    def energy(self, e):
        return e / self.energy_unit

    def time(self, t):
        return t / self.time_unit

    def momentum(self, p):
        """Momentum in units sqrt(2 m V_b); the energy axis is E/V_b = q^2."""
        return p / self.momentum_unit

    def wavenumber(self, p):
        """Momentum as a dimensionless wavenumber p sigma_b / hbar."""
        return p * self.length_unit / self.hbar

    # dimensionless -> SI
    def length_si(self, z):
        return z * self.length_unit

    def energy_si(self, e):
        return e * self.energy_unit

    def time_si(self, t):
        return t * self.time_unit

    def gravity_si(self, g_tilt, mass):
        return g_tilt * self.energy_unit / (mass * self.length_unit)

    def gravity_tilt(self, g, mass):
        """Dimensionless tilt m g sigma_b / V_b of a gravity field g [m/s^2]."""
        return mass * g * self.length_unit / self.energy_unit

    def reduce_params(self, p: ModelParams) -> ModelParams:
        """Dimensionless twin of `p`: hbar = 1, sigma_b = 1, V_b = 1.

        Momenta are mapped to wavenumber units hbar / sigma_b so that plane
        waves read exp(i p z) with no residual constants.
        """
        L, E, hb = self.length_unit, self.energy_unit, self.hbar
        p_unit = hb / L
        m_red = 1.0 / (2.0 * self.stiffness)  # from hbar = sigma_b = V_b = 1
        g_red = self.gravity_tilt(p.gravity, p.mass) / m_red
        return ModelParams(
            mass=m_red,
            gravity=g_red,
            barrier_height=p.barrier_height / E,
            barrier_width=p.barrier_width / L,
            cavity_length=p.cavity_length / L,
            interaction=p.interaction / (E * L),
            packet_width=p.packet_width / L,
            packet_center=p.packet_center / L,
            packet_momentum=p.packet_momentum / p_unit,
            recoil_velocity=p.recoil_velocity * self.time_unit / L,
            bragg_wavevector=p.bragg_wavevector * L,
            hbar=1.0,
        )


def make_scales(params: ModelParams) -> Scales:
    """Build the cavity-anchored unit system from a parameter set."""
    L = params.barrier_width
    E = params.barrier_height
    hb = params.hbar
    return Scales(
        length_unit=L,
        energy_unit=E,
        time_unit=hb / E,
        momentum_unit=(2.0 * params.mass * E) ** 0.5,
        stiffness=hb**2 / (2.0 * params.mass * L**2 * E),
        hbar=hb,
    )
