"""Constant mean curvature barriers and height estimates in H^2 x R."""
from .errors import BracketError, ConvergenceError, DomainError
from .kernels import BACKEND
from .profiles import (
    A_H,
    BarrierParams,
    Family,
    Z_H,
    a_H,
    a_H_inf,
    c_H,
    h_H,
    profile_hypercycle,
    profile_nodoid,
    psi,
    s_H,
    z_H,
)
from .scalar import F_dispatch, solve_Delta, solve_delta, solve_ell, solve_R, solve_rho_crit

__version__ = "0.1.0"
