"""Independent profile heights from the reduced flux ODE.

For a profile ``u(d)`` depending on the distance ``d`` to a hypercycle or a
circle, the CMC equation reduces to a linear first order ODE for the flux
``phi = u'/sqrt(1 + u'^2)``::

    phi' + phi * m(d) + 2H = 0

where ``m`` is the curvature of the level curves: ``tanh(d)`` for the strip,
``tanh(r + d)`` for the hypercycle family and ``coth(rho + d)`` for the nodoid
family. This module integrates that ODE with classical RK4 and never touches
the closed forms or the quadratures in :mod:`cmcbar.profiles`.

The state is ``w = 1 - phi`` (so ``1 - phi**2 = w (2 - w)`` carries no
cancellation) together with the height ``u``. For the hypercycle and nodoid
families, which are vertical at ``d = 0``, the independent variable is
``tau = sqrt(d)``; in that variable both equations have bounded right-hand
sides. Integration starts at ``d = eps`` from the one-term expansions
``w ~ k eps`` and ``u ~ sqrt(2 eps / k)``, ``k = 2H + m(0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .profiles import BarrierParams, Family

EPS_START = 1e-6
DEFAULT_STEP = 1e-4
PHI_TOL = 1e-9


@dataclass
class OdeRun:
    family: Family
    params: BarrierParams
    step: float
    epsilon_start: float
    d: np.ndarray
    phi: np.ndarray
    u: np.ndarray
    height_estimate: float

    @property
    def phi_samples(self):
        return list(zip(self.d.tolist(), self.phi.tolist()))

    def to_json_dict(self):
        return {
            "family": self.family.value,
            "params": self.params.to_dict(),
            "step": self.step,
            "epsilon_start": self.epsilon_start,
            "phi_samples": [[a, b] for a, b in self.phi_samples],
            "height_estimate": self.height_estimate,
        }


class OdeInstability(RuntimeError):
    pass


def integrate_flux(family, params, step=DEFAULT_STEP, eps_start=EPS_START, d_end=None,
                   backend=None):
    """Integrate the flux ODE for one barrier.

    ``step`` is the RK4 step in ``d`` for the strip and in ``tau = sqrt(d)``
    for the hypercycle and nodoid families. Without ``d_end`` those two stop
    at the top of the profile, where ``phi`` crosses zero; the strip is
    integrated from its axis ``d = 0`` (where ``phi = 0`` by symmetry) out to
    ``d = l``.
    """
    family = Family(family)
    if not step > 0:
        raise DomainError("step must be positive")
    if params.family is not family:
        raise DomainError("family does not match params")
    impl = kernels.BACKENDS[backend] if backend else kernels
    H, p = params.H, params.shape

    if family is Family.STRIP:
        end = p if d_end is None else d_end
        s, w, u = impl.rk4_flux(0, H, 0.0, 0.0, 1.0, 0.0, step, end, 0, 0)
        d = s
        # u was accumulated outward from the axis; re-anchor to u(l) = 0
        u = u - u[-1]
        height = float(u[0])
        eps = 0.0
    else:
        polar = 1 if family is Family.NODOID else 0
        m0 = 1.0 / math.tanh(p) if polar else math.tanh(p)
        k = 2.0 * H + m0
        w0 = k * eps_start
        u0 = math.sqrt(2.0 * eps_start / k)
        s0 = math.sqrt(eps_start)
        if d_end is None:
            s_end, stop = math.sqrt(50.0), 1
        else:
            s_end, stop = math.sqrt(d_end), 0
        s, w, u = impl.rk4_flux(polar, H, p, s0, w0, u0, step, s_end, 1, stop)
        d = s * s
        height = float(u[-1]) if stop else float(np.max(u))
        eps = eps_start
    phi = 1.0 - w
    if np.any(np.abs(phi) > 1.0 + PHI_TOL):
        raise OdeInstability(f"|phi| exceeded 1 by {np.max(np.abs(phi)) - 1:.3e}")
    return OdeRun(family, params, step, eps, d, phi, u, height)


def oracle_height(family, params, step=DEFAULT_STEP, backend=None):
    """Height of a barrier obtained from the flux ODE alone."""
    return integrate_flux(family, params, step=step, backend=backend).height_estimate
