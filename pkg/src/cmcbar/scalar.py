"""Root finding for implicitly defined widths and critical half-widths.

``delta_H(r)`` and ``Delta_H(rho)`` are the distances at which the hypercycle
and nodoid profiles come back down to zero. ``R``, ``varrho`` and ``ell``
are the strip half-widths whose barrier height matches ``a_H(r)``,
``A_H(rho)`` and ``a_H(inf)`` respectively. ``F_dispatch`` assembles the
height bound ``F(kappa, H)`` from these pieces.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

from scipy import optimize

from . import profiles as pf
from .errors import BracketError, ConvergenceError, DomainError

ROOT_XTOL = 1e-12
RESIDUAL_TOL = 1e-9
MAX_DOUBLINGS = 60


class Quantity(str, enum.Enum):
    DELTA_SMALL = "delta_H"
    DELTA_BIG = "Delta_H"
    ELL = "ell"
    R_CRIT = "R"
    RHO_CRIT = "varrho"


@dataclass
class ScalarReport:
    quantity: Quantity
    value: float
    residual: float
    iterations: int
    bracket: tuple
    params: dict = field(default_factory=dict)
    unbounded: bool = False

    def to_json_dict(self):
        out = asdict(self)
        out["quantity"] = self.quantity.value
        out["bracket"] = [_num(b) for b in self.bracket]
        out["value"] = _num(self.value)
        return out


def _num(x):
    return "inf" if math.isinf(x) else x


def _expand_bracket(f, lo, hi):
    """Double ``hi`` until ``f`` changes sign, moving ``lo`` along."""
    f_lo = f(lo)
    for _ in range(MAX_DOUBLINGS):
        f_hi = f(hi)
        if f_lo * f_hi <= 0:
            return lo, hi
        lo, f_lo, hi = hi, f_hi, 2.0 * hi
    raise BracketError(f"no sign change found up to {hi!r}")


def _solve(quantity, f, bracket, params, xtol=ROOT_XTOL, residual_tol=RESIDUAL_TOL):
    lo, hi = bracket
    root, info = optimize.brentq(f, lo, hi, xtol=xtol, full_output=True, disp=False)
    residual = f(root)
    report = ScalarReport(quantity, root, residual, info.iterations, (lo, hi), params)
    if not info.converged or abs(residual) > residual_tol:
        raise ConvergenceError(f"{quantity.value}: residual {residual:.3e}", report)
    return report


def solve_delta(H, r, quad_tol=pf.QUAD_TOL, **kw):
    """Width ``delta_H(r)`` where the hypercycle profile returns to zero."""
    z = pf.z_H(H, r)
    f = lambda d: pf.profile_hypercycle(H, r, d, tol=quad_tol)  # noqa: E731
    bracket = _expand_bracket(f, z, 2.0 * z)
    return _solve(Quantity.DELTA_SMALL, f, bracket, {"H": H, "r": r}, **kw)


def solve_Delta(H, rho, quad_tol=pf.QUAD_TOL, **kw):
    """Width ``Delta_H(rho)`` where the nodoid profile returns to zero."""
    z = pf.Z_H(H, rho)
    f = lambda d: pf.profile_nodoid(H, rho, d, tol=quad_tol)  # noqa: E731
    bracket = _expand_bracket(f, z, 2.0 * z)
    return _solve(Quantity.DELTA_BIG, f, bracket, {"H": H, "rho": rho}, **kw)


def _strip_height_root(quantity, H, target, params, **kw):
    if math.isinf(target):
        return ScalarReport(quantity, math.inf, 0.0, 0, (0.0, math.inf), params, unbounded=True)
    if target < 0:
        raise DomainError("target height must be non-negative")
    f = lambda l: pf.h_H(H, l) - target  # noqa: E731
    bracket = _expand_bracket(f, 0.0, 1.0)
    return _solve(quantity, f, bracket, params, **kw)


def ell_equation_residual(H, ell):
    """Residual of the logarithmic equation characterizing ``ell(H)``."""
    q = math.sqrt(1 - 4 * H * H)
    lhs = math.log((q + math.sqrt(1 - 4 * H * H * math.tanh(ell) ** 2)) / (q + 1)) + pf._log_cosh(ell)
    rhs = math.pi * q / (4 * H) - 2 * math.atanh((1 - 2 * H) / q)
    return lhs - rhs


def solve_ell(H, **kw):
    """Strip half-width whose barrier height equals ``a_H(inf)``.

    Solved on the logarithmic form; the report's residual is that of the
    height identity ``h_H(ell) - a_H(inf)``.
    """
    pf.check_H(H)
    f = lambda l: ell_equation_residual(H, l)  # noqa: E731
    bracket = _expand_bracket(f, 0.0, 1.0)
    report = _solve(Quantity.ELL, f, bracket, {"H": H}, **kw)
    report.residual = pf.h_H(H, report.value) - pf.a_H_inf(H)
    return report


def solve_R(H, r, **kw):
    """Strip half-width ``R`` with ``h_H(R) = a_H(r)``.

    Any ``r > atanh(-2H)`` is accepted; the target is infinite only at the
    endpoint itself, in which case an unbounded report is returned.
    """
    return _strip_height_root(Quantity.R_CRIT, H, pf.a_H(H, r), {"H": H, "r": r}, **kw)


def solve_rho_crit(H, rho, **kw):
    """Strip half-width ``varrho`` with ``h_H(varrho) = A_H(rho)``."""
    return _strip_height_root(Quantity.RHO_CRIT, H, pf.A_H(H, rho), {"H": H, "rho": rho}, **kw)


def F_dispatch(H, kappa):
    """Height bound ``F(kappa, H)`` for boundary curvature bounded below by ``kappa``."""
    pf.check_H(H)
    if kappa >= 2 * H:
        return math.inf
    if kappa == -1.0:
        return pf.a_H_inf(H)
    if kappa > -1.0:
        return pf.a_H(H, math.atanh(-kappa))
    return pf.A_H(H, math.atanh(-1.0 / kappa))
