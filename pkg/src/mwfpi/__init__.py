"""Matter-wave Fabry-Perot cavity toolkit: split-step wave-packet scattering,
transfer-matrix spectra, complex-scaling resonance widths, and acceleration
sensitivity maps for a double-Gaussian optical cavity under gravity."""

from ._kernels import backend_name
from .grid import Grid, WaveFunction, build_grid, to_momentum, to_position
from .model import ModelParams, Scales, make_scales
from .potentials import PotentialField, cavity_potential, triangular_eigenenergies
from .wavepackets import PacketMoments, gaussian_packet, moments, symmetric_superposition

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "ModelParams",
    "PacketMoments",
    "PotentialField",
    "Scales",
    "WaveFunction",
    "backend_name",
    "build_grid",
    "cavity_potential",
    "gaussian_packet",
    "make_scales",
    "moments",
    "symmetric_superposition",
    "to_momentum",
    "to_position",
    "triangular_eigenenergies",
]
