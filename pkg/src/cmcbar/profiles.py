"""Closed-form barrier quantities and the singular quadratures behind them.

Three rotationally or translationally symmetric CMC graphs are used as
barriers, each determined by its profile ``u(d)`` over a distance variable:

``STRIP``
    Graph over the region between two hypercycles at distance ``l`` from a
    geodesic. Profile ``psi(d)``, ``d`` the distance to the geodesic; height
    ``h_H(l)`` in closed form.
``HYPERCYCLE``
    Graph over the region beyond a hypercycle of curvature ``-tanh r``;
    profile is the integral of ``c/sqrt(1 - c^2)`` with ``c = c_H(r, .)``.
    Vertical at ``d = 0``, maximum ``a_H(r)`` at ``d = z_H(r)``.
``NODOID``
    Graph over an annulus outside a circle of radius ``rho``; same with
    ``s_H(rho, .)``, maximum ``A_H(rho)`` at ``Z_H(rho)``.

The hypercycle and nodoid integrands blow up like ``t**-0.5`` at ``t = 0``.
All such integrals are taken in the variable ``tau = sqrt(t)``, with
``1 - c`` evaluated from a cancellation-free product formula, which leaves a
smooth integrand for adaptive Gauss-Kronrod quadrature.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError

#: absolute tolerance handed to the adaptive quadrature
QUAD_TOL = 1e-10
QUAD_LIMIT = 200
PROFILE_SAMPLES = 512


class Family(str, enum.Enum):
    STRIP = "strip"
    HYPERCYCLE = "hypercycle"
    NODOID = "nodoid"


def check_H(H):
    if not 0.0 < H < 0.5:
        raise DomainError(f"H={H!r} outside (0, 1/2)")


def r_min(H):
    """Left end ``atanh(-2H)`` of the hypercycle parameter range."""
    check_H(H)
    return math.atanh(-2.0 * H)


def _check_r(H, r, allow_endpoint=False):
    lo = r_min(H)
    if r < lo or (r == lo and not allow_endpoint):
        raise DomainError(f"r={r!r} must exceed atanh(-2H)={lo!r}")


def _check_rho(H, rho):
    check_H(H)
    if not rho > 0.0:
        raise DomainError(f"rho={rho!r} must be positive")


def _check_t(t):
    if np.any(np.asarray(t) < 0):
        raise DomainError("t must be non-negative")


def _sinhc(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-4
    safe = np.where(small, 1.0, y)
    return np.where(small, 1.0 + y * y / 6.0, np.sinh(safe) / safe)


@dataclass(frozen=True)
class BarrierParams:
    """One member of a barrier family: ``l``, ``r`` or ``rho`` as ``shape``."""

    H: float
    family: Family
    shape: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        check_H(self.H)
        if self.family is Family.STRIP:
            if not self.shape > 0:
                raise DomainError("strip half-width l must be positive")
        elif self.family is Family.HYPERCYCLE:
            _check_r(self.H, self.shape)
        else:
            _check_rho(self.H, self.shape)

    def to_dict(self):
        return {"H": self.H, "family": self.family.value, "shape": self.shape}


# ---------------------------------------------------------------------------
# closed forms


def c_H(H, r, t):
    """Flux ``u'/sqrt(1+u'^2)`` of the hypercycle barrier at distance ``t``."""
    _check_r(H, r)
    _check_t(t)
    return (math.cosh(r) + 2 * H * (math.sinh(r) - np.sinh(r + t))) / np.cosh(r + t)


def s_H(H, rho, t):
    """Flux of the nodoid barrier at distance ``t`` from the inner circle."""
    _check_rho(H, rho)
    _check_t(t)
    return (math.sinh(rho) + 2 * H * (math.cosh(rho) - np.cosh(rho + t))) / np.sinh(rho + t)


def one_minus_c_H(H, r, t):
    """``1 - c_H(r, t)`` without cancellation near ``t = 0``."""
    t = np.asarray(t, dtype=float)
    x = r + 0.5 * t
    k = np.sinh(x) + 2 * H * np.cosh(x)
    return t * _sinhc(0.5 * t) * k / np.cosh(r + t)


def one_minus_s_H(H, rho, t):
    t = np.asarray(t, dtype=float)
    x = rho + 0.5 * t
    k = np.cosh(x) + 2 * H * np.sinh(x)
    return t * _sinhc(0.5 * t) * k / np.sinh(rho + t)


def z_H(H, r):
    """Location of the maximum of the hypercycle profile (zero of ``c_H``)."""
    _check_r(H, r)
    return math.asinh(math.sinh(r) + math.cosh(r) / (2 * H)) - r


def Z_H(H, rho):
    """Location of the maximum of the nodoid profile (zero of ``s_H``)."""
    _check_rho(H, rho)
    return math.acosh(math.cosh(rho) + math.sinh(rho) / (2 * H)) - rho


def z_H_inf(H):
    """Common limit of ``z_H(r)`` and ``Z_H(rho)`` at infinity."""
    check_H(H)
    return math.log(1.0 / (2 * H) + 1.0)


def _log_cosh(x):
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - math.log(2.0)


def h_H(H, l):
    """Height of the strip barrier of half-width ``l``, in closed form."""
    check_H(H)
    if l < 0:
        raise DomainError("l must be non-negative")
    q = math.sqrt(1 - 4 * H * H)
    ratio = (q + math.sqrt(1 - 4 * H * H * math.tanh(l) ** 2)) / (q + 1)
    return 2 * H / q * (math.log(ratio) + _log_cosh(l))


def a_H_inf(H):
    """Common limit of ``a_H(r)`` (r -> inf) and ``A_H(rho)`` (rho -> inf)."""
    check_H(H)
    q = math.sqrt(1 - 4 * H * H)
    return math.pi / 2 - 4 * H / q * math.atanh((1 - 2 * H) / q)


# ---------------------------------------------------------------------------
# quadratures


def _quad(f, a, b, tol, points=None):
    if b <= a:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b] or None
    val, _ = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=QUAD_LIMIT, points=points)
    return val


def _psi_integrand(s, H):
    th = math.tanh(s)
    return th / math.sqrt(1 - 4 * H * H * th * th)


def psi(H, l, d, tol=QUAD_TOL):
    """Strip barrier profile at distance ``d`` from the geodesic, by quadrature."""
    check_H(H)
    if not 0 <= d <= l:
        raise DomainError(f"need 0 <= d <= l, got d={d!r}, l={l!r}")
    return 2 * H * _quad(lambda s: _psi_integrand(s, H), d, l, tol)


def _sinhc1(y):
    return 1.0 + y * y / 6.0 if abs(y) < 1e-4 else math.sinh(y) / y


def _hyper_tau(tau, H, r):
    # 2*tau * c/sqrt(1-c^2) at t = tau^2, with the tau factor cancelled
    t = tau * tau
    x = r + 0.5 * t
    den = math.cosh(r + t)
    k = (math.sinh(x) + 2 * H * math.cosh(x)) / den
    c = 1.0 - t * _sinhc1(0.5 * t) * k
    return 2.0 * c / math.sqrt(_sinhc1(0.5 * t) * k * (1.0 + c))


def _nodoid_tau(tau, H, rho):
    t = tau * tau
    x = rho + 0.5 * t
    den = math.sinh(rho + t)
    k = (math.cosh(x) + 2 * H * math.sinh(x)) / den
    s = 1.0 - t * _sinhc1(0.5 * t) * k
    return 2.0 * s / math.sqrt(_sinhc1(0.5 * t) * k * (1.0 + s))


def _limit_tau(tau, H):
    t = tau * tau
    ratio = -math.expm1(-t) / t if t > 1e-12 else 1.0 - 0.5 * t
    e = 1.0 - (1 + 2 * H) * t * ratio
    return 2.0 * e / math.sqrt((1 + 2 * H) * ratio * (1.0 + e))


def profile_hypercycle(H, r, d, tol=QUAD_TOL):
    """Height of the hypercycle barrier at distance ``d`` from its zero-level curve."""
    _check_r(H, r)
    if d < 0:
        raise DomainError("d must be non-negative")
    return _quad(_hyper_args(H, r), 0.0, math.sqrt(d), tol, points=[math.sqrt(z_H(H, r))]) if d else 0.0


def profile_nodoid(H, rho, d, tol=QUAD_TOL):
    """Height of the nodoid barrier at distance ``d`` from the inner circle."""
    _check_rho(H, rho)
    if d < 0:
        raise DomainError("d must be non-negative")
    return _quad(_nodoid_args(H, rho), 0.0, math.sqrt(d), tol, points=[math.sqrt(Z_H(H, rho))]) if d else 0.0


def _hyper_args(H, r):
    return lambda tau: _hyper_tau(tau, H, r)


def _nodoid_args(H, rho):
    return lambda tau: _nodoid_tau(tau, H, rho)


def a_H(H, r, tol=QUAD_TOL):
    """Height of the hypercycle barrier; ``inf`` at the endpoint ``r = atanh(-2H)``."""
    _check_r(H, r, allow_endpoint=True)
    if r == r_min(H):
        return math.inf
    return _quad(_hyper_args(H, r), 0.0, math.sqrt(z_H(H, r)), tol)


def A_H(H, rho, tol=QUAD_TOL):
    """Height of the nodoid barrier."""
    _check_rho(H, rho)
    return _quad(_nodoid_args(H, rho), 0.0, math.sqrt(Z_H(H, rho)), tol)


def a_H_inf_quadrature(H, tol=QUAD_TOL):
    """``a_H(inf)`` as the integral of the limiting integrand up to ``z_H(inf)``."""
    check_H(H)
    return _quad(lambda tau: _limit_tau(tau, H), 0.0, math.sqrt(z_H_inf(H)), tol)


# ---------------------------------------------------------------------------
# sampled profiles


@dataclass
class ProfileCurve:
    params: BarrierParams
    d: np.ndarray
    u: np.ndarray
    d_max: float
    argmax_d: float
    height: float
    meta: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "params": self.params.to_dict(),
            "samples": [[float(a), float(b)] for a, b in zip(self.d, self.u)],
            "d_max": self.d_max,
            "argmax_d": self.argmax_d,
            "height": self.height,
        }

    def write_csv(self, path):
        np.savetxt(path, np.column_stack([self.d, self.u]), delimiter=",",
                   header="d,u", comments="", fmt="%.17g", encoding="utf-8")

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)


def sample_profile(params, n=PROFILE_SAMPLES, d_max=None, tol=QUAD_TOL):
    """Sample a barrier profile on ``[0, d_max]``.

    For the hypercycle and nodoid families the default ``d_max`` is the width
    ``delta_H`` / ``Delta_H`` where the profile returns to zero, and samples
    are clustered at ``d = 0`` through ``d = d_max * s**2`` with ``s``
    uniform. The strip profile is sampled uniformly on ``[0, l]``.
    Values are accumulated piecewise so each sample costs one short quadrature.
    """
    H, shape = params.H, params.shape
    if n < 2:
        raise DomainError("need at least two samples")
    s = np.linspace(0.0, 1.0, n)
    if params.family is Family.STRIP:
        l = shape
        d = l * s
        f = lambda x: 2 * H * _psi_integrand(x, H)  # noqa: E731
        pieces = [_quad(f, d[k], d[k + 1], tol) for k in range(n - 1)]
        tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        return ProfileCurve(params, d, tail, l, 0.0, h_H(H, l))

    from . import scalar  # local import: scalar depends on this module

    if params.family is Family.HYPERCYCLE:
        integrand, argmax, height = _hyper_args(H, shape), z_H(H, shape), a_H(H, shape, tol)
        width = scalar.solve_delta(H, shape).value if d_max is None else d_max
    else:
        integrand, argmax, height = _nodoid_args(H, shape), Z_H(H, shape), A_H(H, shape, tol)
        width = scalar.solve_Delta(H, shape).value if d_max is None else d_max
    tau = math.sqrt(width) * s
    d = tau**2
    pieces = [_quad(integrand, tau[k], tau[k + 1], tol) for k in range(n - 1)]
    u = np.concatenate([[0.0], np.cumsum(pieces)])
    return ProfileCurve(params, d, u, width, argmax, height)
