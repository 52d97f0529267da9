import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmcbar.errors import DomainError
from cmcbar.hyperbolic import (
    disk_distance,
    fermi_gradient_norm_sq,
    fermi_to_disk,
    hypercycle_curvature,
    log_metric_derivative,
    metric_factor,
    polar_gradient_norm_sq,
    polar_to_disk,
)


def test_fermi_gradient_examples():
    assert fermi_gradient_norm_sq(1.0, 0.0, 3.7) == 1.0
    assert fermi_gradient_norm_sq(0.0, 1.0, 0.0) == 1.0
    # 4 / cosh(1)^2, frozen from a 30-digit evaluation
    assert fermi_gradient_norm_sq(0.0, 2.0, 1.0) == pytest.approx(1.67989736645610, rel=1e-13)


def test_polar_gradient_examples():
    assert polar_gradient_norm_sq(1.0, 0.0, 1.0) == 1.0
    assert polar_gradient_norm_sq(0.0, 1.0, math.asinh(1.0)) == pytest.approx(1.0, rel=1e-15)
    assert polar_gradient_norm_sq(0.0, 0.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        polar_gradient_norm_sq(1.0, 0.0, 0.0)


def test_metric_conventions():
    t = np.linspace(-3, 3, 61)
    g = metric_factor("fermi", t)
    assert np.all(g >= 1.0) and g[30] == 1.0
    assert metric_factor("polar", 0.0) == 0.0
    np.testing.assert_allclose(hypercycle_curvature(t), -np.tanh(t))
    # Laplacian of distance: g'/g
    h = 1e-6
    for chart, s in (("fermi", 0.7), ("polar", 1.3)):
        fd = (np.log(metric_factor(chart, s + h)) - np.log(metric_factor(chart, s - h))) / (2 * h)
        assert log_metric_derivative(chart, s) == pytest.approx(fd, rel=1e-8)


@given(st.floats(-4, 4), st.floats(-3, 3))
def test_fermi_disk_distance_to_geodesic(t, x):
    # distance from the image point to its foot on the base geodesic is |t|
    p = np.array(fermi_to_disk(t, x))
    foot = np.array(fermi_to_disk(0.0, x))
    assert disk_distance(p, foot) == pytest.approx(abs(t), abs=1e-7)


@given(st.floats(0.0, 6.0), st.floats(0.0, 2 * math.pi))
def test_polar_disk_distance_to_center(rho, theta):
    p = np.array(polar_to_disk(rho, theta))
    assert disk_distance(p, np.zeros(2)) == pytest.approx(rho, abs=1e-7)


def test_fermi_arclength_along_geodesic():
    p = np.array(fermi_to_disk(0.0, -0.4))
    q = np.array(fermi_to_disk(0.0, 1.1))
    assert disk_distance(p, q) == pytest.approx(1.5, abs=1e-12)
