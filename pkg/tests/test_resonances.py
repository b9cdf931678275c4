import numpy as np
import pytest
from scipy.linalg import eigvals, eigvalsh

from mwfpi.model import InvalidParameterError
from mwfpi.resonances import (
    Resonance,
    complex_scaled_hamiltonian,
    default_box,
    find_resonances,
    lorentzian_model,
    track_vs_gravity,
)
from mwfpi.scattering import converged_transmission


def test_box_spectrum_at_zero_theta(reduced):
    # barriers switched off: hard-box levels are exact on the sine mesh
    empty = reduced.with_(barrier_height=1e-30)
    h = complex_scaled_hamiltonian(empty, 0.0, basis_size=128, box=(-25.0, 25.0))
    levels = np.sort(eigvalsh(h.real))[:5]
    n = np.arange(1, 6)
    exact = n**2 * np.pi**2 / (2 * empty.mass * 50.0**2)
    assert np.allclose(levels, exact, rtol=1e-6)


def test_hermitian_at_zero_theta(reduced):
    h = complex_scaled_hamiltonian(reduced, 0.0, basis_size=128, box=(-40.0, 40.0))
    assert np.max(np.abs(h - h.conj().T)) < 1e-10


def test_kinetic_rotation(reduced):
    empty = reduced.with_(barrier_height=1e-30)
    theta = 0.2
    h0 = complex_scaled_hamiltonian(empty, 0.0, basis_size=96, box=(-25.0, 25.0))
    h = complex_scaled_hamiltonian(empty, theta, basis_size=96, box=(-25.0, 25.0))
    w0 = np.sort(eigvalsh(h0.real))[:4]
    w = eigvals(h)
    for ev in w0:
        target = ev * np.exp(-2j * theta)
        assert np.min(np.abs(w - target)) < 1e-8 * max(1.0, abs(ev))


def test_theta_and_basis_validation(reduced):
    with pytest.raises(InvalidParameterError):
        complex_scaled_hamiltonian(reduced, 0.9)
    with pytest.raises(InvalidParameterError):
        complex_scaled_hamiltonian(reduced, 0.15, basis_size=32)
    with pytest.raises(InvalidParameterError):
        complex_scaled_hamiltonian(reduced, 0.15, box=(-12.0, 12.0))  # tails too fat


@pytest.fixture(scope="module")
def resonances_fast(reduced):
    """Moderate-cost resonance set used by several tests."""
    return find_resonances(reduced, theta=0.15, basis_size=384, box=(-70.0, 70.0))


def test_seven_resonances_found(resonances_fast):
    assert len(resonances_fast) == 7
    e = np.array([r.energy for r in resonances_fast])
    assert np.all(np.diff(e) > 0)
    assert np.all(np.array([r.width for r in resonances_fast]) > 0)


def test_validity_condition(resonances_fast):
    for r in resonances_fast:
        assert 2 * r.theta > r.phase_angle


def test_continuum_rejected_by_plateau(reduced):
    # raw spectrum has many complex eigenvalues below e_max; only the
    # plateau-stable ones survive
    h = complex_scaled_hamiltonian(reduced, 0.15, basis_size=384, box=(-70.0, 70.0))
    w = eigvals(h)
    raw = np.sum((w.real > 0) & (w.real < 1.3) & (w.imag < 0))
    kept = find_resonances(reduced, theta=0.15, basis_size=384, box=(-70.0, 70.0))
    assert raw > len(kept)


def test_parity_in_gravity_sign(reduced):
    up = find_resonances(
        reduced.with_(gravity=2e-3 / reduced.mass), theta=0.15, basis_size=320,
        box=(-70.0, 70.0),
    )
    down = find_resonances(
        reduced.with_(gravity=-2e-3 / reduced.mass), theta=0.15, basis_size=320,
        box=(-70.0, 70.0),
    )
    assert len(up) == len(down)
    for a, b in zip(up, down):
        assert a.energy == pytest.approx(b.energy, rel=1e-10)
        assert a.width == pytest.approx(b.width, rel=1e-8)


def test_lorentzian_values():
    model = lorentzian_model(
        [Resonance(0.4, 0.02, 0.15, 0.0, 0, 1.0), Resonance(0.8, 0.05, 0.15, 0.0, 1, 1.0)]
    )
    assert model.evaluate(0.4) == pytest.approx(1.0)
    assert model.evaluate(0.4 + 0.01) == pytest.approx(0.5)
    assert model.evaluate(0.4 - 0.01) == pytest.approx(0.5)
    with pytest.raises(InvalidParameterError):
        lorentzian_model([])


def test_lorentzian_overlay_matches_spectrum(reduced, resonances_fast):
    # transfer-matrix spectrum is the independent oracle for the two lowest
    # resonances: peak positions within Gamma/2, widths within 20%
    for r in resonances_fast[:2]:
        eps = np.linspace(r.energy - 3 * r.width, r.energy + 3 * r.width, 41)
        t, _, _ = converged_transmission(eps, reduced, tol=1e-7)
        peak = eps[np.argmax(t)]
        assert abs(peak - r.energy) < 0.5 * r.width
        half = t > 0.5 * t.max()
        fwhm = eps[half][-1] - eps[half][0]
        assert fwhm == pytest.approx(r.width, rel=0.2)


def test_track_recovers_zero_gravity_endpoint(reduced, resonances_fast):
    g_grid = np.array([-1.5e-3, 0.0, 1.5e-3]) / reduced.mass
    trajs = track_vs_gravity(
        reduced, g_grid, theta=0.15, basis_size=384, box=(-70.0, 70.0), e_max=0.5
    )
    zero_e = [r.energy for r in resonances_fast if r.energy < 0.5]
    for traj, e0 in zip(trajs, zero_e):
        i0 = np.argmin(np.abs(traj.gravities))
        assert traj.energies[i0] == pytest.approx(e0, rel=1e-9)


def test_track_widths_grow_and_triangular_annotation(reduced):
    g_grid = np.array([-6e-3, -3e-3, 0.0, 3e-3, 6e-3]) / reduced.mass
    trajs = track_vs_gravity(
        reduced, g_grid, theta=0.15, basis_size=384, box=(-70.0, 70.0), e_max=0.35
    )
    assert len(trajs) >= 3
    for traj in trajs[:2]:
        # growth over the outer half of the range (small tilts can dip)
        order = np.argsort(np.abs(traj.gravities))
        w_by_tilt = traj.widths[order]
        assert w_by_tilt[-1] > w_by_tilt[-3]
        assert w_by_tilt[-2] > w_by_tilt[-4]
    assert trajs[0].triangular_level is not None
    assert trajs[0].triangular_distance >= 0


def test_track_grid_validation(reduced):
    with pytest.raises(InvalidParameterError):
        track_vs_gravity(reduced, [0.1, 0.2])  # no zero
    with pytest.raises(InvalidParameterError):
        track_vs_gravity(reduced, [0.2, 0.1, 0.0])  # not increasing


def test_default_box_margin(reduced):
    lo, hi = default_box(reduced)
    assert hi - reduced.z_plus >= 10.0  # spec floor: barriers plus >= 10 sigma
    assert hi - reduced.z_plus == pytest.approx(90.0)
