import math

import numpy as np
import pytest
from scipy.integrate import dblquad

import magheat as mh
from magheat.errors import PresetError
from magheat.field import alpha_batch, flux_at


def test_radial_step_support():
    f = mh.make_field("radial-step", {"b0": 1.0, "r": 1.0})
    assert f.support_radius == 1.0
    assert f.eval(0.3, 0.4) == 1.0
    assert f.eval(1.2, 0.0) == 0.0


def test_support_vanishing_outside(offset_bump, dipole, rng):
    for f in (offset_bump, dipole):
        theta = rng.uniform(0, 2 * np.pi, 500)
        r = f.support_radius * (1.0 + rng.uniform(0, 3, 500))
        vals = f.eval(r * np.cos(theta), r * np.sin(theta))
        assert np.all(vals == 0.0)


def test_bump_continuity(bump_field):
    # Lipschitz sampling across the support edge
    xs = np.linspace(0.8, 1.2, 4001)
    vals = bump_field.eval(xs, np.zeros_like(xs))
    assert np.max(np.abs(np.diff(vals))) < 2e-3


def test_scaled_to_flux_independent_quadrature():
    f = mh.make_field("scaled-to-flux", {"target": 1.0, "r": 1.0})
    assert abs(mh.total_flux(f) - 1.0) < 1e-10
    # independent oracle: Cartesian 2-D quadrature over the bounding square
    val, err = dblquad(lambda y, x: f.eval(x, y), -1, 1, -1, 1,
                       epsabs=1e-11, epsrel=1e-11)
    assert err < 1e-9
    assert abs(val / (2 * math.pi) - 1.0) < 1e-9

    f13 = mh.make_field("scaled-to-flux", {"target": 1.3, "r": 1.0})
    assert abs(mh.total_flux(f13) - 1.3) < 1e-10


def test_dipole_zero_flux(dipole):
    assert abs(mh.total_flux(dipole)) < 1e-12


def test_flux_additivity(offset_bump):
    # moving a bump does not change its flux
    centered = mh.make_field("radial-bump", {"b0": 1.0, "r": 1.0})
    assert abs(mh.total_flux(offset_bump) - mh.total_flux(centered)) < 1e-9


def test_make_field_errors():
    with pytest.raises(PresetError):
        mh.make_field("no-such-preset", {})
    with pytest.raises(PresetError):
        mh.make_field("radial-step", {"b0": 1.0, "r": -2.0})
    with pytest.raises(PresetError):
        mh.make_field("dipole-pair", {"b0": 1.0, "r": 2.0, "center": [1.0, 0.0]})


def test_compute_alpha_closed_forms(step_half):
    assert mh.compute_alpha(step_half, 0.5, 0.1) == pytest.approx(0.125, abs=1e-12)
    assert mh.compute_alpha(step_half, 3.0, 2.0) == pytest.approx(0.5, abs=1e-12)
    assert mh.compute_alpha(step_half, 0.0, 0.3) == 0.0


def test_alpha_constant_beyond_support(offset_bump, rng):
    thetas = rng.uniform(0, 2 * np.pi, 16)
    rs = offset_bump.support_radius
    for th in thetas:
        a1 = mh.compute_alpha(offset_bump, rs, th)
        a2 = mh.compute_alpha(offset_bump, 3.0 * rs, th)
        assert a1 == pytest.approx(a2, abs=1e-12)
        assert mh.alpha_infinity(offset_bump, th) == pytest.approx(a1, abs=1e-12)


def test_alpha_batch_matches_scalar(offset_bump, dipole, rng):
    for f in (offset_bump, dipole):
        r = rng.uniform(0, 1.5 * f.support_radius, 40)
        th = rng.uniform(0, 2 * np.pi, 40)
        batch = alpha_batch(f, r, th)
        scalar = np.array([mh.compute_alpha(f, ri, ti) for ri, ti in zip(r, th)])
        assert np.max(np.abs(batch - scalar)) < 1e-10


def test_alpha_infinity_radial_step(step_half):
    for th in (0.0, 1.0, 4.0):
        assert mh.alpha_infinity(step_half, th) == pytest.approx(0.5, abs=1e-12)


def test_alpha_infinity_dipole_mean(dipole):
    assert abs(flux_at(dipole, dipole.support_radius)) < 1e-9


def test_alpha_infinity_offset_mean_is_flux(offset_bump):
    phi = mh.total_flux(offset_bump)
    assert flux_at(offset_bump, offset_bump.support_radius) == pytest.approx(phi, abs=1e-9)
    # and alpha_inf is genuinely angle dependent
    vals = [mh.alpha_infinity(offset_bump, th) for th in np.linspace(0, 2 * np.pi, 9)]
    assert max(vals) - min(vals) > 0.1


def test_beta_examples():
    for target, expected in ((0.5, 0.5), (1.3, 0.3), (2.0, 0.0)):
        f = mh.make_field("scaled-to-flux", {"target": target, "r": 1.0})
        assert mh.beta_of(f) == pytest.approx(expected, abs=1e-10)


def test_flux_profile_bundle(step_half):
    prof = mh.flux_profile(step_half)
    assert prof.total_flux == pytest.approx(0.5, abs=1e-10)
    assert prof.beta == pytest.approx(0.5, abs=1e-10)
    assert prof.flux_at(0.5) == pytest.approx(0.125, abs=1e-9)
    assert prof.flux_at(2.0) == prof.total_flux
    assert prof.alpha(0.5, 0.0) == pytest.approx(0.125, abs=1e-12)


def test_vector_potential_examples(step_half):
    a = mh.vector_potential(step_half, (1.0, 0.0))
    assert np.allclose(a, [0.0, 0.5], atol=1e-12)
    assert np.allclose(mh.vector_potential(step_half, (0.0, 0.0)), 0.0)


def test_transversality(offset_bump, rng):
    gauge = mh.gauge_field(offset_bump)
    pts = rng.uniform(-4, 4, size=(10_000, 2))
    a_vals = gauge.eval_batch(pts)
    assert np.max(np.abs(np.sum(pts * a_vals, axis=1))) < 1e-12


def test_curl_matches_field(offset_bump, rng):
    # finite-difference curl of A reproduces B at second order in the stencil
    gauge = mh.gauge_field(offset_bump)
    pts = rng.uniform(-1.2, 1.2, size=(30, 2))
    residuals = []
    for h in (2e-2, 1e-2):
        ex, ey = np.array([h, 0.0]), np.array([0.0, h])
        curl = ((gauge.eval_batch(pts + ex)[:, 1] - gauge.eval_batch(pts - ex)[:, 1])
                - (gauge.eval_batch(pts + ey)[:, 0] - gauge.eval_batch(pts - ey)[:, 0])
                ) / (2 * h)
        residuals.append(np.max(np.abs(curl - offset_bump.eval(pts[:, 0], pts[:, 1]))))
    order = math.log(residuals[0] / residuals[1]) / math.log(2.0)
    assert order > 1.7


def test_eval_scaled_is_composition(bump_field, rng):
    gauge = mh.gauge_field(bump_field)
    pts = rng.uniform(-2, 2, size=(50, 2))
    s = 1.7
    lhs = gauge.eval_scaled(s, pts)
    rhs = math.exp(s / 2) * gauge.eval_batch(math.exp(s / 2) * pts)
    assert np.array_equal(lhs, rhs)


def test_descriptor_roundtrip(dipole):
    desc = dipole.descriptor()
    rebuilt = mh.field.field_from_descriptor(desc)
    assert rebuilt == dipole
