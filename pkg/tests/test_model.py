import json

import numpy as np
import pytest

from mwfpi.model import HBAR, InvalidParameterError, ModelParams, make_scales


def test_time_unit_is_hbar_over_barrier_height(params, scales):
    assert scales.time_unit == pytest.approx(HBAR / params.barrier_height, rel=1e-14)


def test_barrier_positions_reference_geometry():
    p = ModelParams(barrier_width=1e-6, cavity_length=15e-6)
    assert p.z_plus == pytest.approx(10.5e-6, rel=1e-15)
    assert p.z_minus == pytest.approx(-10.5e-6, rel=1e-15)


def test_default_launch_position_reference_geometry():
    p = ModelParams(packet_width=12e-6, barrier_width=1e-6, cavity_length=15e-6)
    assert p.packet_center == pytest.approx(-49.5e-6, rel=1e-15)


def test_derived_positions_closed_form_random_draws(rng):
    for _ in range(100):
        sb, d, dz = rng.uniform(0.1, 5.0, 3) * 1e-6
        p = ModelParams(barrier_width=sb, cavity_length=d, packet_width=dz)
        assert p.z_plus == 3.0 * sb + 0.5 * d
        assert p.z_minus == -(3.0 * sb + 0.5 * d)
        assert p.packet_center == -3.0 * dz - 6.0 * sb - 0.5 * d


def test_scales_definitions(params, scales):
    assert scales.length_unit == params.barrier_width
    assert scales.energy_unit == params.barrier_height
    assert scales.momentum_unit == pytest.approx(
        np.sqrt(2.0 * params.mass * params.barrier_height), rel=1e-15
    )
    beta = HBAR**2 / (2 * params.mass * params.barrier_width**2 * params.barrier_height)
    assert scales.stiffness == pytest.approx(beta, rel=1e-15)


def test_si_roundtrip_identity_12_digits(scales, rng):
    for x in rng.uniform(1e-9, 1e-3, 50):
        assert scales.length_si(scales.length(x)) == pytest.approx(x, rel=1e-12)
        assert scales.energy_si(scales.energy(x)) == pytest.approx(x, rel=1e-12)
        assert scales.time_si(scales.time(x)) == pytest.approx(x, rel=1e-12)


def test_reduce_params_roundtrip(params, scales, reduced):
    assert reduced.hbar == 1.0
    assert reduced.barrier_height == 1.0
    assert reduced.barrier_width == 1.0
    # kinetic coefficient hbar^2/(2 m) equals the stiffness
    assert 1.0 / (2.0 * reduced.mass) == pytest.approx(scales.stiffness, rel=1e-12)
    # the dimensionless tilt m~ g~ agrees with m g sigma / V_b
    p2 = params.with_(gravity=1.3e-3)
    r2 = scales.reduce_params(p2)
    assert r2.mass * r2.gravity == pytest.approx(
        scales.gravity_tilt(1.3e-3, params.mass), rel=1e-12
    )
    back = scales.gravity_si(r2.mass * r2.gravity, params.mass)
    assert back == pytest.approx(1.3e-3, rel=1e-12)


def test_reduced_plane_wave_phase_convention(params, scales):
    # packet momentum maps to a wavenumber: p z / hbar == p~ z~ with hbar~=1
    p = params.with_(packet_momentum=3.2e-28)
    r = scales.reduce_params(p)
    z = 7.7e-6
    assert p.packet_momentum * z / p.hbar == pytest.approx(
        r.packet_momentum * scales.length(z), rel=1e-12
    )


def test_json_roundtrip_field_names(params):
    doc = json.loads(params.to_json())
    assert set(doc) == {
        "mass_kg",
        "gravity_m_s2",
        "barrier_height_J",
        "barrier_width_m",
        "cavity_length_m",
        "interaction_J_m",
        "packet_width_m",
        "packet_center_m",
        "packet_momentum_kg_m_s",
        "recoil_velocity_m_s",
        "bragg_wavevector_1_m",
    }
    again = ModelParams.from_json(params.to_json())
    assert again == params


def test_json_rejects_unknown_fields():
    with pytest.raises(InvalidParameterError):
        ModelParams.from_json('{"mass_kg": 1e-25, "bogus": 1}')


@pytest.mark.parametrize("field", ["mass", "barrier_height", "barrier_width"])
def test_invalid_parameters_raise(field):
    with pytest.raises(InvalidParameterError):
        ModelParams(**{field: -1.0})
    with pytest.raises(InvalidParameterError):
        ModelParams(**{field: 0.0})


def test_bragg_wavevector_default_two_photon(params):
    k_b = 2.0 * params.mass * params.recoil_velocity / params.hbar
    assert params.bragg_wavevector == pytest.approx(k_b, rel=1e-14)
    assert params.bragg_wavevector == pytest.approx(1.61e7, rel=1e-2)


def test_quoted_barrier_override():
    p = ModelParams.reference_cavity(quoted_barrier=True)
    assert p.barrier_height == 1.42e-25
    beta = make_scales(p).stiffness
    assert beta < 1e-6  # the quoted value puts the cavity deep in the classical regime
