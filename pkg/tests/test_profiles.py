"""Closed forms and quadratures.

Reference values marked "mp" were frozen from a 30-digit mpmath tanh-sinh
quadrature of the raw integrands (no substitution), which is independent of
the tau-substituted Gauss-Kronrod path under test.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcbar import profiles as pf
from cmcbar.errors import DomainError

H_st = st.floats(0.02, 0.48)


def r_st(H):
    return st.floats(pf.r_min(H) + 0.02, 6.0)


def test_c_H_examples():
    assert pf.c_H(0.3, 0.4, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert pf.c_H(0.25, 0.0, pf.z_H(0.25, 0.0)) == pytest.approx(0.0, abs=1e-15)
    assert pf.c_H(0.25, 0.0, 1.0) == pytest.approx(0.267257195686003, rel=1e-13)


def test_s_H_examples():
    assert pf.s_H(0.3, 0.4, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert pf.s_H(0.25, 1.0, pf.Z_H(0.25, 1.0)) == pytest.approx(0.0, abs=1e-15)
    # (sinh 1 + 0.5 (cosh 1 - cosh 2)) / sinh 2
    assert pf.s_H(0.25, 1.0, 1.0) == pytest.approx(0.0180993085279990, rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        pf.c_H(0.25, pf.r_min(0.25), 1.0)
    with pytest.raises(DomainError):
        pf.c_H(0.25, 0.0, -0.1)
    with pytest.raises(DomainError):
        pf.s_H(0.25, 0.0, 1.0)
    with pytest.raises(DomainError):
        pf.h_H(0.6, 1.0)
    with pytest.raises(DomainError):
        pf.psi(0.25, 1.0, 1.5)
    with pytest.raises(DomainError):
        pf.BarrierParams(0.25, "hypercycle", -0.6)


def test_z_H_values():
    assert pf.z_H(0.25, 0.0) == pytest.approx(math.asinh(2.0), rel=1e-15)
    assert pf.z_H(0.25, 0.0) == pytest.approx(1.44363547517881, rel=1e-13)
    assert pf.z_H_inf(0.25) == pytest.approx(math.log(3.0), rel=1e-15)
    assert pf.z_H(0.25, 30.0) == pytest.approx(math.log(3.0), abs=1e-12)
    assert pf.Z_H(0.25, 1.0) == pytest.approx(1.03553610040556, rel=1e-12)
    assert pf.Z_H(0.25, 30.0) == pytest.approx(math.log(3.0), abs=1e-12)


def test_h_H_and_psi():
    assert pf.h_H(0.25, 0.0) == 0.0
    assert pf.h_H(0.25, 1.0) == pytest.approx(0.226649127181746, rel=1e-13)  # mp
    assert pf.psi(0.25, 1.0, 0.0) == pytest.approx(0.226649127181746, rel=1e-12)  # mp
    assert pf.psi(0.3, 2.0, 2.0) == 0.0
    # large l stays finite (log-cosh form)
    assert math.isfinite(pf.h_H(0.25, 800.0))


@given(H_st, st.floats(0.0, 5.0), st.floats(0.0, 1.0))
@settings(max_examples=60, deadline=None)
def test_psi_is_height_difference(H, l, frac):
    d = l * frac
    assert pf.psi(H, l, d) == pytest.approx(pf.h_H(H, l) - pf.h_H(H, d), abs=1e-10)


def test_heights_against_mpmath():
    assert pf.a_H(0.25, 0.0) == pytest.approx(1.54665523793083, abs=1e-11)
    assert pf.a_H(0.25, 1.0) == pytest.approx(0.905035295682137, abs=1e-11)
    assert pf.a_H(0.25, -0.3) == pytest.approx(2.33843733327096, abs=1e-11)
    assert pf.A_H(0.25, 1.0) == pytest.approx(0.715856928015543, abs=1e-11)
    assert pf.profile_hypercycle(0.25, 0.0, 1.0) == pytest.approx(1.48975345868524, abs=1e-11)
    assert pf.profile_nodoid(0.25, 1.0, 0.5) == pytest.approx(0.625559703649029, abs=1e-11)
    assert pf.profile_hypercycle(0.25, 0.0, pf.z_H(0.25, 0.0)) == pytest.approx(pf.a_H(0.25, 0.0), abs=1e-12)


def test_a_H_inf():
    assert pf.a_H_inf(0.25) == pytest.approx(0.810450330493950, rel=1e-13)
    assert pf.a_H_inf_quadrature(0.25) == pytest.approx(pf.a_H_inf(0.25), abs=1e-12)
    # the closed form tends to pi/2 - 1 as H -> 1/2
    assert pf.a_H_inf(0.4999) == pytest.approx(0.570863001462554, rel=1e-10)
    assert pf.a_H_inf(0.4999999) == pytest.approx(math.pi / 2 - 1, abs=1e-3)
    Hs = np.linspace(0.01, 0.49, 50)
    vals = [pf.a_H_inf(H) for H in Hs]
    assert all(v > 0 for v in vals) and np.all(np.diff(vals) < 0)


def test_a_H_endpoint_is_infinite():
    assert pf.a_H(0.25, pf.r_min(0.25)) == math.inf
    assert pf.a_H(0.25, pf.r_min(0.25) + 1e-8) > pf.a_H(0.25, pf.r_min(0.25) + 1e-4) > 5


def test_limits_at_20():
    inf = pf.a_H_inf(0.25)
    assert abs(pf.a_H(0.25, 20.0) - inf) < 1e-4
    assert abs(pf.A_H(0.25, 20.0) - inf) < 1e-4
    assert pf.A_H(0.25, 5.0) < inf
    assert abs(pf.a_H(0.25, 30.0) - inf) < 1e-6


@given(H_st, st.data())
@settings(max_examples=40, deadline=None)
def test_c_H_range_and_decrease(H, data):
    r = data.draw(r_st(H))
    t = np.linspace(0, 12, 400)
    c = pf.c_H(H, r, t)
    assert c[0] == pytest.approx(1.0, abs=1e-14)
    assert np.all(c[1:] < 1) and np.all(c > -1)
    assert np.all(np.diff(c) < 0)
    assert pf.c_H(H, r, 40.0) == pytest.approx(-2 * H, abs=1e-8)


@given(H_st, st.floats(0.02, 6.0))
@settings(max_examples=40, deadline=None)
def test_s_H_range_and_decrease(H, rho):
    t = np.linspace(0, 12, 400)
    s = pf.s_H(H, rho, t)
    assert np.all(s[1:] < 1) and np.all(s > -1)
    assert np.all(np.diff(s) < 0)


@given(H_st, st.data())
@settings(max_examples=40, deadline=None)
def test_one_minus_c_is_stable(H, data):
    r = data.draw(r_st(H))
    t = np.array([1e-3, 0.1, 1.0, 3.0])
    np.testing.assert_allclose(pf.one_minus_c_H(H, r, t), 1 - pf.c_H(H, r, t), rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(pf.one_minus_s_H(H, 1.0, t), 1 - pf.s_H(H, 1.0, t), rtol=1e-9, atol=1e-15)


@given(H_st, st.data())
@settings(max_examples=30, deadline=None)
def test_symmetric_decay(H, data):
    r = data.draw(r_st(H))
    z = pf.z_H(H, r)
    s = z * np.linspace(0.01, 0.99, 20)
    assert np.all(-pf.c_H(H, r, z + s) <= pf.c_H(H, r, z - s))


@given(H_st, st.data())
@settings(max_examples=30, deadline=None)
def test_prop26_comparisons(H, data):
    r = data.draw(st.floats(pf.r_min(H) * 0.98, -1e-3))
    assert pf.h_H(H, abs(r)) < pf.a_H(H, r)
    assert abs(r) < pf.z_H(H, r)


def test_partial_derivatives_signs():
    h = 1e-6
    for H in (0.1, 0.25, 0.4):
        for t in (0.3, 1.0, 2.5):
            ds = (pf.s_H(H, 1.0 + h, t) - pf.s_H(H, 1.0 - h, t)) / (2 * h)
            dc = (pf.c_H(H, 0.5 + h, t) - pf.c_H(H, 0.5 - h, t)) / (2 * h)
            assert ds > 0 and dc < 0


def test_monotone_heights():
    r = np.linspace(pf.r_min(0.25) + 0.05, 6, 50)
    rho = np.linspace(0.05, 8, 50)
    a = np.array([pf.a_H(0.25, x) for x in r])
    A = np.array([pf.A_H(0.25, x) for x in rho])
    assert np.all(np.diff(a) < 0) and np.all(np.diff(A) > 0)
    assert A.max() <= a.min()


def test_profile_gradient_matches_flux():
    H, r = 0.3, 0.2
    for d in (0.2, 0.8, 2.0):
        slopes = []
        for h in (1e-2, 5e-3):
            fd = (pf.profile_hypercycle(H, r, d + h) - pf.profile_hypercycle(H, r, d - h)) / (2 * h)
            c = pf.c_H(H, r, d)
            slopes.append(abs(fd - c / math.sqrt(1 - c * c)))
        # O(h^2): halving h cuts the error by about 4
        assert slopes[1] < slopes[0] / 3


def test_profile_goes_negative_far_out():
    assert pf.profile_hypercycle(0.25, 0.0, 20.0) < -1.0
    assert pf.profile_nodoid(0.25, 1.0, 20.0) < -1.0


@pytest.mark.parametrize("family,shape", [("strip", 1.0), ("hypercycle", 0.0), ("nodoid", 1.0)])
def test_sample_profile(family, shape, tmp_path):
    params = pf.BarrierParams(0.25, family, shape)
    curve = pf.sample_profile(params, n=128)
    assert len(curve.d) == 128
    assert np.all(np.diff(curve.d) > 0)
    if family == "strip":
        assert curve.u[-1] == 0.0
        assert curve.u.max() == pytest.approx(pf.h_H(0.25, 1.0), abs=1e-10)
    else:
        assert curve.u[0] == 0.0
        assert curve.u[-1] == pytest.approx(0.0, abs=1e-9)
        k = int(np.argmax(curve.u))
        assert np.all(np.diff(curve.u[: k + 1]) > 0) and np.all(np.diff(curve.u[k:]) < 0)
        # non-negative on [0, 2 argmax]
        assert np.all(curve.u[curve.d <= 2 * curve.argmax_d] >= -1e-12)
        assert curve.height >= curve.u.max()
    curve.write_csv(tmp_path / "p.csv")
    curve.write_json(tmp_path / "p.json")
    data = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1], curve.u)
    assert (tmp_path / "p.csv").read_text().startswith("d,u\n")
