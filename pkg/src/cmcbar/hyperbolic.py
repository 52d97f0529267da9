"""Coordinate charts on the hyperbolic plane.

Two charts are used throughout:

* Fermi coordinates ``(t, x)`` about a geodesic: ``t`` is the signed distance
  to the geodesic and ``x`` the arclength along it. Metric
  ``dt^2 + cosh(t)^2 dx^2``.
* Geodesic polar coordinates ``(rho, theta)`` about a point. Metric
  ``drho^2 + sinh(rho)^2 dtheta^2``.

The Poincare disk only appears as an export target for plotting.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError


class Chart(str, enum.Enum):
    FERMI = "fermi"
    POLAR = "polar"


def metric_factor(chart, s):
    """Square root of the metric determinant, ``cosh`` (Fermi) or ``sinh`` (polar)."""
    chart = Chart(chart)
    if chart is Chart.FERMI:
        return np.cosh(s)
    return np.sinh(s)


def log_metric_derivative(chart, s):
    """``g'/g``: ``tanh`` in the Fermi chart, ``coth`` in the polar chart.

    This is the Laplacian of the distance function to the base geodesic
    (resp. the base point), i.e. the mean curvature term of the level curves.
    """
    chart = Chart(chart)
    if chart is Chart.FERMI:
        return np.tanh(s)
    return 1.0 / np.tanh(s)


def hypercycle_curvature(s):
    """Geodesic curvature of ``{t = s}`` with normal toward decreasing ``t``."""
    return -np.tanh(s)


def fermi_gradient_norm_sq(du_dt, du_dx, t):
    return du_dt**2 + du_dx**2 / np.cosh(t) ** 2


def polar_gradient_norm_sq(du_dr, du_dth, rho):
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("polar chart is singular at rho <= 0")
    return du_dr**2 + du_dth**2 / np.sinh(rho) ** 2


def fermi_to_disk(t, x):
    """Map Fermi coordinates about the disk's vertical diameter into the disk.

    The base geodesic is the imaginary axis of the upper half-plane, where a
    point at arclength ``x`` and signed distance ``t`` is
    ``exp(x) * (tanh t + i sech t)``; the Cayley transform then sends it into
    the unit disk.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    z = np.exp(x) * (np.tanh(t) + 1j / np.cosh(t))
    w = (z - 1j) / (z + 1j)
    return w.real, w.imag


def polar_to_disk(rho, theta):
    """Map geodesic polar coordinates about the disk center into the disk."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho must be non-negative")
    radius = np.tanh(rho / 2.0)
    return radius * np.cos(theta), radius * np.sin(theta)


def to_disk(chart, s, y):
    chart = Chart(chart)
    if chart is Chart.FERMI:
        return fermi_to_disk(s, y)
    return polar_to_disk(s, y)


def disk_distance(p, q):
    """Hyperbolic distance between two points of the Poincare disk."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    num = np.sum((p - q) ** 2, axis=-1)
    den = (1.0 - np.sum(p**2, axis=-1)) * (1.0 - np.sum(q**2, axis=-1))
    return np.arccosh(1.0 + 2.0 * num / den)


def write_disk_csv(path, chart, s, y, u):
    """Write ``x_disk, y_disk, u`` columns for flattened chart samples."""
    xd, yd = to_disk(chart, np.ravel(s), np.ravel(y))
    data = np.column_stack([xd, yd, np.ravel(u)])
    np.savetxt(path, data, delimiter=",", header="x_disk,y_disk,u", comments="",
               fmt="%.17g", encoding="utf-8")
