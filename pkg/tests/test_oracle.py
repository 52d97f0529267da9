import numpy as np
import pytest

from cmcbar import oracle
from cmcbar import profiles as pf
from cmcbar.errors import DomainError


def P(H, fam, shape):
    return pf.BarrierParams(H, fam, shape)


def test_phi_matches_closed_form():
    run = oracle.integrate_flux("hypercycle", P(0.25, "hypercycle", 0.0), step=1e-4)
    assert np.max(np.abs(run.phi - pf.c_H(0.25, 0.0, run.d))) < 1e-8
    # stops at the top of the profile
    assert run.d[-1] == pytest.approx(pf.z_H(0.25, 0.0), abs=1e-10)
    assert abs(run.phi[-1]) < 1e-12
    run = oracle.integrate_flux("nodoid", P(0.25, "nodoid", 1.0), step=1e-4)
    assert np.max(np.abs(run.phi - pf.s_H(0.25, 1.0, run.d))) < 1e-8


def test_phi_bounded():
    run = oracle.integrate_flux("hypercycle", P(0.3, "hypercycle", 0.5), d_end=10.0)
    assert np.all(np.abs(run.phi) <= 1) and np.all(np.abs(run.phi[1:]) < 1)
    assert run.phi[-1] == pytest.approx(-0.6, abs=1e-3)


@pytest.mark.parametrize("fam,shape,ref", [
    ("strip", 1.0, lambda: pf.h_H(0.25, 1.0)),
    ("hypercycle", 0.0, lambda: pf.a_H(0.25, 0.0)),
    ("hypercycle", 25.0, lambda: pf.a_H_inf(0.25)),
    ("nodoid", 1.0, lambda: pf.A_H(0.25, 1.0)),
])
def test_oracle_heights(fam, shape, ref, backend):
    h = oracle.oracle_height(fam, P(0.25, fam, shape), backend=backend)
    assert h == pytest.approx(ref(), abs=1e-6)


def test_strip_oracle_value():
    assert oracle.oracle_height("strip", P(0.25, "strip", 1.0)) == pytest.approx(0.22665, abs=1e-5)


def test_richardson_fourth_order():
    # strip flux is exactly -2H tanh d; halving the RK4 step cuts the error ~16x
    params = P(0.3, "strip", 2.0)
    errs = []
    for h in (0.2, 0.1, 0.05):
        run = oracle.integrate_flux("strip", params, step=h)
        errs.append(np.max(np.abs(run.phi + 0.6 * np.tanh(run.d))))
    assert 14 < errs[0] / errs[1] < 18.5
    assert 14 < errs[1] / errs[2] < 18.5


def test_phi_richardson_hypercycle():
    # self-convergence at a fixed end point, same singular start
    params = P(0.25, "hypercycle", 0.0)

    def end_phi(h):
        return oracle.integrate_flux("hypercycle", params, step=h, eps_start=0.04, d_end=1.44).phi[-1]

    ref = end_phi(0.1 / 64)
    errs = [abs(end_phi(h) - ref) for h in (0.1, 0.05, 0.025)]
    assert 14 < errs[0] / errs[1] < 18
    assert 14 < errs[1] / errs[2] < 18


def test_backends_agree():
    params = P(0.2, "nodoid", 0.7)
    a = oracle.integrate_flux("nodoid", params, step=1e-3, backend="python")
    if "cython" in oracle.kernels.BACKENDS:
        b = oracle.integrate_flux("nodoid", params, step=1e-3, backend="cython")
        np.testing.assert_allclose(a.phi, b.phi, atol=1e-14)
        assert a.height_estimate == pytest.approx(b.height_estimate, abs=1e-13)


def test_errors_and_json():
    with pytest.raises(DomainError):
        oracle.integrate_flux("strip", P(0.25, "strip", 1.0), step=0.0)
    with pytest.raises(DomainError):
        oracle.integrate_flux("nodoid", P(0.25, "strip", 1.0))
    run = oracle.integrate_flux("strip", P(0.25, "strip", 1.0), step=0.1)
    d = run.to_json_dict()
    assert d["family"] == "strip" and len(d["phi_samples"]) == len(run.d)
