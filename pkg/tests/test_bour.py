import math

import numpy as np
import pytest
from scipy import integrate

from heliflow import (
    DomainError,
    DomainViolationError,
    HelicoidalSeed,
    WarpingFunction,
    align_about_z,
    build_bour_chart,
    family_angle_sq,
    family_patch,
    first_integral_chart,
    recover_datum,
)
from heliflow.errors import DegeneracyError
from heliflow.surface import evaluate, fundamental_forms
from heliflow.verify import check_bour_identity, seed_from_surface

from ._helpers import interior, member


def test_chart_of_a_flat_disk():
    seed = HelicoidalSeed(0.0, lambda u: u, lambda u: 0 * u, (0.5, 2.0), dR=lambda u: 1 + 0 * u)
    chart = build_bour_chart(seed, n_nodes=64)
    s = np.linspace(0, 1.5, 9)
    np.testing.assert_allclose(chart.U(s), s + 0.5, atol=1e-12)
    np.testing.assert_allclose(chart.dU(s), 1.0, atol=1e-9)
    np.testing.assert_allclose(chart.Theta(s), 0.0, atol=0)


def test_chart_of_a_cylinder():
    seed = HelicoidalSeed(0.0, lambda u: 1 + 0 * u, lambda u: u, (-1.0, 1.0), dLambda=lambda u: 1 + 0 * u)
    chart = build_bour_chart(seed, n_nodes=64)
    assert chart.s_domain == pytest.approx((0.0, 2.0), abs=1e-12)
    s = np.linspace(0.1, 1.9, 7)
    np.testing.assert_allclose(chart.U(s), 1.0, atol=1e-14)
    np.testing.assert_allclose(chart.dU(s), 0.0, atol=1e-9)


def test_chart_of_the_paraboloid_profile():
    seed = HelicoidalSeed(0.0, lambda u: u, lambda u: 0.5 * u * u, (0.0, 2.0), dR=lambda u: 1 + 0 * u, dLambda=lambda u: u)
    chart = build_bour_chart(seed, n_nodes=128)
    s1 = 0.5 * (math.sqrt(2) + math.asinh(1))
    assert float(chart.s_table(1.0)) == pytest.approx(s1, abs=1e-12)
    assert float(chart.U(s1)) == pytest.approx(1.0, abs=1e-12)
    # dU/ds = 1/sqrt(1 + U^2)
    assert float(chart.dU(s1)) == pytest.approx(1 / math.sqrt(2), abs=1e-10)


def test_chart_of_a_helicoid_has_offset_warping():
    mu = 0.7
    seed = HelicoidalSeed(mu, lambda u: u, lambda u: 0 * u, (0.2, 2.0), dR=lambda u: 1 + 0 * u)
    chart = build_bour_chart(seed, n_nodes=64)
    s = np.linspace(0.0, 1.8, 11)
    U = chart.U(s)
    R = seed.R(chart.u_of_s(s))
    np.testing.assert_allclose(U**2 - R**2, mu**2, atol=1e-10)
    np.testing.assert_allclose(chart.Theta(s), 0.0, atol=0)


@pytest.mark.parametrize("c,h", [(1.0, 1.0), (2.0, 0.5), (0.5, 1.0)])
def test_translator_chart_matches_first_integral(c, h):
    S = member(c, h)
    chart = build_bour_chart(seed_from_surface(S), n_nodes=128)
    lo = S.U_domain.lower
    for U in (lo + 0.1, 2.0, 4.0):
        ref, _ = integrate.quad(lambda x: math.sqrt(x * x + c), lo, U, epsabs=1e-13, epsrel=1e-13)
        assert float(chart.s_table(U)) == pytest.approx(ref, abs=1e-9)
    s = interior(*chart.s_domain, 25)
    u = chart.u_of_s(s)
    np.testing.assert_allclose(chart.U(s) ** 2 - S.R(u) ** 2, h * h, atol=1e-10)
    # U in Bour coordinates is the same U that labels the family
    np.testing.assert_allclose(chart.U(s), u, atol=1e-10)


def test_zero_speed_seed_is_rejected():
    seed = HelicoidalSeed(0.0, lambda u: 1 + 0 * u, lambda u: 0 * u, (0.0, 1.0))
    with pytest.raises(DegeneracyError):
        build_bour_chart(seed, n_nodes=16)


def test_nonpositive_seed_radius_is_rejected():
    seed = HelicoidalSeed(0.0, lambda u: u, lambda u: u, (-1.0, 1.0))
    with pytest.raises(DomainError):
        build_bour_chart(seed, n_nodes=16)


@pytest.fixture(scope="module")
def chart11():
    return build_bour_chart(seed_from_surface(member(1.0, 1.0)))


def test_identity_member_reproduces_its_datum(chart11):
    datum = recover_datum(chart11, 1.0, 1.0)
    s = interior(*datum.s_domain, 40)
    u = chart11.u_of_s(s)
    np.testing.assert_allclose(datum.R(s), chart11.seed.R(u), atol=1e-8)
    lam0 = chart11.seed.Lambda(chart11.u_of_s(datum.s_domain[0]))
    np.testing.assert_allclose(datum.Lambda(s) + lam0, chart11.seed.Lambda(u), atol=1e-8)
    th0 = chart11.Theta(datum.s_domain[0])
    np.testing.assert_allclose(datum.Theta(s) + th0, chart11.Theta(s), atol=1e-8)


def test_identity_member_reproduces_positions():
    rep = check_bour_identity(member(1.0, 1.0))
    assert rep.passed and rep.max_residual < 1e-7


def test_rotational_member_from_translator_chart():
    S = member(1.0, 0.0)
    chart = build_bour_chart(seed_from_surface(S), n_nodes=128)
    datum = recover_datum(chart, 1.0, 0.0, n_nodes=128)
    s = interior(*datum.s_domain, 20)
    assert np.all(datum.Theta(s) == 0)
    np.testing.assert_allclose(datum.R(s), chart.U(s), atol=1e-14)


def test_explicit_range_violation_names_interval():
    w = WarpingFunction(lambda s: s, lambda s: 1 + 0 * s, (1.0, 2.0))
    with pytest.raises(DomainViolationError) as err:
        recover_datum(w, 2.0, 0.0, s_range=(1.0, 2.0), n_nodes=16)
    lo, hi = err.value.interval
    assert lo == pytest.approx(1.0) and hi == pytest.approx(2.0)
    assert "s in [" in str(err.value)


def test_no_valid_interval_at_all():
    w = WarpingFunction(lambda s: s, lambda s: 1 + 0 * s, (1.0, 2.0))
    with pytest.raises(DomainViolationError):
        recover_datum(w, 2.0, 0.0, n_nodes=16)


def test_zero_lambda_is_rejected():
    w = WarpingFunction(lambda s: s, lambda s: 0 * s, (1.0, 2.0))
    with pytest.raises(DomainError):
        recover_datum(w, 0.0, 0.0)


def test_trimmed_domain_keeps_radicands_positive():
    w = first_integral_chart(1.0, (0.05, 4.0), n_nodes=128)
    datum = recover_datum(w, 1.0, 0.8, n_nodes=128)
    s = np.linspace(*datum.s_domain, 200)
    U, dU = w.U_and_dU(s)
    assert np.all(U**2 - 0.64 > 0)
    assert np.all(U**2 * (1 - dU**2) - 0.64 > 0)
    assert datum.s_domain[0] > w.s_domain[0]


@pytest.fixture(scope="module")
def warping():
    return first_integral_chart(1.0, (0.3, 3.0), n_nodes=256)


@pytest.mark.parametrize("lam,h", [(1.0, 0.5), (0.8, 0.3), (1.2, 0.4), (0.6, 0.0), (-0.9, 0.2)])
def test_family_members_are_isometric(warping, lam, h):
    datum = recover_datum(warping, lam, h, n_nodes=256)
    patch = family_patch(datum)
    lo, hi, t0, t1 = patch.domain
    pad = 0.05 * (hi - lo)
    s = np.linspace(lo + pad, hi - pad, 20)[:, None]
    t = np.linspace(0.9 * t0, 0.9 * t1, 20)[None, :]
    F = fundamental_forms(patch, s, t, "numeric")
    U = warping.U(s)
    res = max(np.max(np.abs(F.metric.E - 1)), np.max(np.abs(F.metric.F)), np.max(np.abs(F.metric.G - U**2)))
    assert res < 1e-5
    # shared angle function
    assert np.max(np.abs(F.n3**2 - family_angle_sq(warping, lam, s))) < 1e-5
    # U' = (U^2 + 1)^(-1/2) here, so -U''/U = (U^2 + 1)^(-2)
    assert np.max(np.abs(F.K - 1 / (U**2 + 1) ** 2)) < 1e-4


def test_zero_pitch_member_is_rotational(warping):
    datum = recover_datum(warping, 0.7, 0.0, n_nodes=128)
    patch = family_patch(datum)
    s = interior(*datum.s_domain, 8)[:, None]
    t = np.linspace(-2, 2, 9)[None, :]
    P = evaluate(patch, s, t)
    r = np.hypot(P[..., 0], P[..., 1])
    assert np.ptp(r, axis=1).max() < 1e-13
    assert np.ptp(P[..., 2], axis=1).max() < 1e-13


def test_sign_flips_height(warping):
    a = recover_datum(warping, 1.0, 0.3, n_nodes=128)
    b = recover_datum(warping, 1.0, 0.3, sign=-1, n_nodes=128)
    s = interior(*a.s_domain, 10)
    np.testing.assert_allclose(a.Lambda(s), -b.Lambda(s), atol=1e-14)
    np.testing.assert_allclose(a.Theta(s), -b.Theta(s), atol=1e-14)


def test_family_angle_sq_examples():
    assert family_angle_sq(lambda s: s / math.sqrt(2), 1.0, 0.3) == pytest.approx(0.5, abs=1e-9)
    assert family_angle_sq(lambda s: 0 * s + 2.0, 1.0, 0.3) == 0.0
    val = family_angle_sq(lambda s: s / math.sqrt(2), 2.0, 0.3)
    assert val == pytest.approx(2.0, abs=1e-8) and val > 1


def test_align_about_z_recovers_rigid_motion():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(50, 3))
    ang, dz = 0.7, -1.3
    c, s = math.cos(ang), math.sin(ang)
    b = np.column_stack([c * a[:, 0] - s * a[:, 1], s * a[:, 0] + c * a[:, 1], a[:, 2] + dz])
    got_ang, got_dz, err = align_about_z(a, b)
    assert got_ang == pytest.approx(ang, abs=1e-12)
    assert got_dz == pytest.approx(dz, abs=1e-12)
    assert err < 1e-12
