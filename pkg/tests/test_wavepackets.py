import numpy as np
import pytest

from mwfpi.grid import build_grid, to_momentum
from mwfpi.wavepackets import (
    BarrierOverlapError,
    PacketGridError,
    gaussian_packet,
    moments,
    symmetric_superposition,
)


@pytest.fixture()
def grid():
    return build_grid(-1500.0, 1500.0, 8192, hbar=1.0)


def test_gaussian_is_normalized(reduced, grid):
    psi = gaussian_packet(reduced.with_(packet_momentum=0.7), grid)
    assert psi.norm() == pytest.approx(1.0, abs=1e-10)


def test_gaussian_moments_match_targets(reduced, grid):
    r = reduced.with_(packet_momentum=0.7656)
    m = moments(gaussian_packet(r, grid))
    assert m.mean_position == pytest.approx(r.packet_center, rel=1e-6)
    assert m.mean_momentum == pytest.approx(0.7656, rel=1e-6)
    assert m.position_width == pytest.approx(r.packet_width, rel=1e-6)
    assert m.momentum_width == pytest.approx(1.0 / (2 * r.packet_width), rel=1e-6)


def test_momentum_width_is_hbar_over_two_dz(reduced, grid):
    m = moments(gaussian_packet(reduced.with_(packet_momentum=0.5), grid))
    assert m.momentum_width * reduced.packet_width == pytest.approx(0.5, rel=1e-6)


def test_momentum_density_closed_form(reduced, grid):
    r = reduced.with_(packet_momentum=0.9)
    mom = to_momentum(gaussian_packet(r, grid))
    dp = 1.0 / (2 * r.packet_width)
    expect = (2 * np.pi * dp**2) ** -0.5 * np.exp(
        -((mom.grid.p - 0.9) ** 2) / (2 * dp**2)
    )
    assert np.max(np.abs(mom.density() - expect)) < 1e-8


def test_packet_must_fit_grid(reduced):
    small = build_grid(-60.0, 60.0, 512, hbar=1.0)
    with pytest.raises(PacketGridError):
        gaussian_packet(reduced, small)  # center at -49.5 sits too close to the edge


def test_superposition_mean_momentum_vanishes(reduced, grid):
    r = reduced.with_(packet_width=3.0, packet_center=0.0, packet_momentum=0.6)
    m = moments(symmetric_superposition(r, grid))
    assert abs(m.mean_momentum) < 1e-10
    assert symmetric_superposition(r, grid).norm() == pytest.approx(1.0, abs=1e-10)


def test_superposition_degenerates_to_gaussian(reduced, grid):
    r = reduced.with_(packet_width=3.0, packet_center=0.0, packet_momentum=0.0)
    psi = symmetric_superposition(r, grid)
    ref = gaussian_packet(r, grid)
    assert np.max(np.abs(psi.density() - ref.density())) < 1e-12


def test_superposition_momentum_peaks(reduced, grid):
    r = reduced.with_(packet_width=3.0, packet_center=0.0, packet_momentum=0.6)
    mom = to_momentum(symmetric_superposition(r, grid))
    p = mom.grid.p
    dens = mom.density()
    peak_pos = p[np.argmax(np.where(p > 0.2, dens, 0.0))]
    peak_neg = p[np.argmax(np.where(p < -0.2, dens, 0.0))]
    assert peak_pos == pytest.approx(0.6, abs=0.02)
    assert peak_neg == pytest.approx(-0.6, abs=0.02)


def test_superposition_normalization_includes_cross_term(reduced, grid):
    # oracle: analytic overlap exp(-2 p0^2 dz^2) between the two branches
    for p0 in (0.05, 0.2, 0.6):
        r = reduced.with_(packet_width=3.0, packet_center=0.0, packet_momentum=p0)
        psi = symmetric_superposition(r, grid)
        envelope = (2 * np.pi * 9.0) ** -0.25 * np.exp(-(grid.z**2) / 36.0)
        overlap = np.exp(-2.0 * (p0 * 3.0) ** 2)
        expect = envelope * 2 * np.cos(p0 * grid.z) / np.sqrt(2 * (1 + overlap))
        expect /= np.sqrt(np.sum(np.abs(expect) ** 2) * grid.dz)
        assert np.max(np.abs(psi.values - expect)) < 1e-10
    # large kick: each branch carries 1/sqrt(2), cross term below 1e-6
    assert np.exp(-2.0 * (0.6 * 3.0) ** 2) < 1e-2
    assert np.exp(-2.0 * (2.0 * 3.0) ** 2) < 1e-6


def test_superposition_width_two_peak_oracle(reduced, grid):
    # independent quadrature over the analytic two-branch momentum density
    p0 = 0.6
    r = reduced.with_(packet_width=3.0, packet_center=0.0, packet_momentum=p0)
    m = moments(symmetric_superposition(r, grid))
    k = np.linspace(-4, 4, 40001)
    dz = 3.0
    branch = lambda c: np.exp(-((k - c) ** 2) * dz**2)  # amplitude falloff
    amp = branch(p0) + branch(-p0)
    w = amp**2 / np.trapezoid(amp**2, k)
    var = np.trapezoid(w * k**2, k)
    assert m.momentum_width == pytest.approx(np.sqrt(var), rel=1e-6)
    assert m.momentum_width == pytest.approx(p0, rel=0.05)  # p0 >> hbar/(2 dz)


def test_superposition_rejects_barrier_overlap(reduced, grid):
    r = reduced.with_(packet_width=6.5, packet_center=0.0, packet_momentum=0.3)
    with pytest.raises(BarrierOverlapError):
        symmetric_superposition(r, grid)


def test_heisenberg_bound(reduced, grid, rng):
    for p0 in rng.uniform(0.0, 1.2, 5):
        m = moments(gaussian_packet(reduced.with_(packet_momentum=p0), grid))
        assert m.uncertainty_product() >= 0.5 - 1e-9
