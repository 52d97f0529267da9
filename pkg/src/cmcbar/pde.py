"""Finite-difference solver for CMC graphs over Fermi and polar chart rectangles.

The operator is discretized in conservative form::

    Q_H(u) = (1/g) [ d_s(g X^s) + d_y(g X^y) ] + 2H,   X = grad u / sqrt(1 + |grad u|^2)

with ``g = cosh s`` (Fermi) or ``sinh s`` (polar), fluxes evaluated at face
midpoints and tangential derivatives averaged across the face. This is second
order accurate. Dirichlet data is imposed on all four edges of the rectangle.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import kernels
from . import profiles as pf
from .errors import ConvergenceError, DomainError
from .hyperbolic import Chart, metric_factor, write_disk_csv

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-9
MAX_NEWTON = 40
MAX_HALVINGS = 30
CONTINUATION_STEP = 0.05
EDGES = ("s_lo", "s_hi", "y_lo", "y_hi")
_OFFSETS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]


def _zero(coord):
    return np.zeros_like(coord)


@dataclass
class ChartGrid:
    """A chart rectangle ``[s0, s1] x [y0, y1]`` with a nodal height field.

    ``s`` is the distance-like coordinate (``t`` in the Fermi chart, ``rho``
    in the polar chart) and ``y`` the transverse one (``x`` or ``theta``).
    ``boundary`` maps each edge name to a callable of the coordinate running
    along that edge.
    """

    chart: Chart
    s_range: tuple
    y_range: tuple
    n_s: int
    n_y: int
    boundary: dict = field(default_factory=dict)
    u: np.ndarray = None

    def __post_init__(self):
        self.chart = Chart(self.chart)
        if self.n_s < 3 or self.n_y < 3:
            raise DomainError("need at least 3 nodes per direction")
        if not (self.s_range[1] > self.s_range[0] and self.y_range[1] > self.y_range[0]):
            raise DomainError("empty chart rectangle")
        if self.chart is Chart.POLAR and self.s_range[0] <= 0:
            raise DomainError("polar chart needs rho_min > 0")
        for e in EDGES:
            self.boundary.setdefault(e, _zero)
        if self.u is None:
            self.u = np.zeros((self.n_s, self.n_y))
        self.apply_boundary()

    @property
    def s(self):
        return np.linspace(*self.s_range, self.n_s)

    @property
    def y(self):
        return np.linspace(*self.y_range, self.n_y)

    @property
    def hs(self):
        return (self.s_range[1] - self.s_range[0]) / (self.n_s - 1)

    @property
    def hy(self):
        return (self.y_range[1] - self.y_range[0]) / (self.n_y - 1)

    def mesh(self):
        return np.meshgrid(self.s, self.y, indexing="ij")

    def boundary_values(self):
        s, y = self.s, self.y
        return {
            "s_lo": np.asarray(self.boundary["s_lo"](y), dtype=float),
            "s_hi": np.asarray(self.boundary["s_hi"](y), dtype=float),
            "y_lo": np.asarray(self.boundary["y_lo"](s), dtype=float),
            "y_hi": np.asarray(self.boundary["y_hi"](s), dtype=float),
        }

    def apply_boundary(self):
        b = self.boundary_values()
        self.u[:, 0] = b["y_lo"]
        self.u[:, -1] = b["y_hi"]
        self.u[0, :] = b["s_lo"]
        self.u[-1, :] = b["s_hi"]

    def copy(self):
        return ChartGrid(self.chart, self.s_range, self.y_range, self.n_s, self.n_y,
                         dict(self.boundary), self.u.copy())

    def write_csv(self, path):
        names = ("t", "x") if self.chart is Chart.FERMI else ("rho", "theta")
        S, Y = self.mesh()
        np.savetxt(path, np.column_stack([S.ravel(), Y.ravel(), self.u.ravel()]),
                   delimiter=",", header=f"{names[0]},{names[1]},u", comments="",
                   fmt="%.17g", encoding="utf-8")

    def write_disk_csv(self, path):
        S, Y = self.mesh()
        write_disk_csv(path, self.chart, S, Y, self.u)


def boundary_from_function(f: Callable, s_range, y_range):
    """Per-edge Dirichlet callables taken from a function ``f(s, y)``."""
    s0, s1 = s_range
    y0, y1 = y_range
    return {
        "s_lo": lambda y: f(np.full_like(y, s0), y),
        "s_hi": lambda y: f(np.full_like(y, s1), y),
        "y_lo": lambda s: f(s, np.full_like(s, y0)),
        "y_hi": lambda s: f(s, np.full_like(s, y1)),
    }


def _metrics(grid):
    s = grid.s
    faces = 0.5 * (s[1:] + s[:-1])
    return (np.ascontiguousarray(metric_factor(grid.chart, faces)),
            np.ascontiguousarray(metric_factor(grid.chart, s)))


def stencil(grid, H, backend=None):
    impl = kernels.BACKENDS[backend] if backend else kernels
    g_face, g_node = _metrics(grid)
    return impl.flux_stencil(np.ascontiguousarray(grid.u, dtype=float), grid.hs, grid.hy,
                             g_face, g_node, float(H))


def assemble_residual(grid, H, backend=None):
    """Discrete ``Q_H(u)`` at every node; boundary entries are zero."""
    return stencil(grid, H, backend)[0]


def face_flux_norms(grid):
    """Largest ``|X|`` over the s-faces and y-faces."""
    u, hs, hy = grid.u, grid.hs, grid.hy
    g_face, g_node = _metrics(grid)
    a = (u[1:, 1:-1] - u[:-1, 1:-1]) / hs
    b = (u[:-1, 2:] + u[1:, 2:] - u[:-1, :-2] - u[1:, :-2]) / (4 * hy) / g_face[:, None]
    n1 = a * a + b * b
    a = (u[1:-1, 1:] - u[1:-1, :-1]) / hy / g_node[1:-1, None]
    b = (u[2:, :-1] + u[2:, 1:] - u[:-2, :-1] - u[:-2, 1:]) / (4 * hs)
    n2 = a * a + b * b
    return max(float(np.sqrt(np.max(n1 / (1 + n1)))), float(np.sqrt(np.max(n2 / (1 + n2)))))


def _interior_index(n_s, n_y):
    idx = -np.ones((n_s, n_y), dtype=np.int64)
    idx[1:-1, 1:-1] = np.arange((n_s - 2) * (n_y - 2)).reshape(n_s - 2, n_y - 2)
    return idx


def _jacobian_matrix(jac, idx):
    n_s, n_y = idx.shape
    rows_all, cols_all, vals_all = [], [], []
    rows = idx[1:-1, 1:-1]
    for k, (di, dj) in enumerate(_OFFSETS):
        cols = idx[1 + di:n_s - 1 + di, 1 + dj:n_y - 1 + dj]
        keep = cols >= 0
        rows_all.append(rows[keep])
        cols_all.append(cols[keep])
        vals_all.append(jac[1:-1, 1:-1, k][keep])
    m = (n_s - 2) * (n_y - 2)
    return sp.csc_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(m, m),
    )


@dataclass
class SolveReport:
    residual_norm: float
    newton_iters: int
    max_u: float
    min_u: float
    converged: bool
    H: float = 0.0
    max_flux: float = 0.0
    continuation: bool = False

    def to_json_dict(self):
        return asdict(self)


def _newton(grid, H, tol, max_iters, backend):
    idx = _interior_index(grid.n_s, grid.n_y)
    res, jac = stencil(grid, H, backend)
    norm = float(np.max(np.abs(res)))
    it = 0
    while norm >= tol and it < max_iters:
        it += 1
        J = _jacobian_matrix(jac, idx)
        du = spsolve(J, -res[1:-1, 1:-1].ravel()).reshape(grid.n_s - 2, grid.n_y - 2)
        u0 = grid.u[1:-1, 1:-1].copy()
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            grid.u[1:-1, 1:-1] = u0 + lam * du
            res_new, jac_new = stencil(grid, H, backend)
            norm_new = float(np.max(np.abs(res_new)))
            if np.isfinite(norm_new) and norm_new < norm:
                break
            lam *= 0.5
        else:
            grid.u[1:-1, 1:-1] = u0
            log.debug("line search failed at iteration %d, residual %.3e", it, norm)
            return norm, it, False
        res, jac, norm = res_new, jac_new, norm_new
        log.debug("newton %d: residual %.3e, step %.3g", it, norm, lam)
    return norm, it, norm < tol


def newton_solve(grid, H, tol=NEWTON_TOL, max_iters=MAX_NEWTON, continuation=True,
                 backend=None, raise_on_failure=False):
    """Solve ``Q_H(u) = 0`` in place on ``grid`` by damped Newton.

    The interior starts from ``grid.u`` (zero by default). If plain Newton
    stalls, the solve is restarted from zero and continued in ``H`` in steps
    of ``CONTINUATION_STEP``.
    """
    if not 0 <= H < 0.5:
        raise DomainError("H must lie in [0, 1/2)")
    grid.apply_boundary()
    start = grid.u.copy()
    norm, iters, ok = _newton(grid, H, tol, max_iters, backend)
    used_continuation = False
    if not ok and continuation and H > CONTINUATION_STEP:
        used_continuation = True
        grid.u[:] = start
        grid.u[1:-1, 1:-1] = 0.0
        iters_total = iters
        for h in list(np.arange(CONTINUATION_STEP, H, CONTINUATION_STEP)) + [H]:
            norm, iters, ok = _newton(grid, float(h), tol, max_iters, backend)
            iters_total += iters
        iters = iters_total
    report = SolveReport(norm, iters, float(grid.u.max()), float(grid.u.min()), bool(ok),
                         H=float(H), max_flux=face_flux_norms(grid),
                         continuation=used_continuation)
    if raise_on_failure and not ok:
        raise ConvergenceError(f"Newton stopped at residual {norm:.3e}", report)
    return report


# ---------------------------------------------------------------------------
# exact-solution scenarios


@dataclass
class Scenario:
    """A chart rectangle whose exact solution is known."""

    name: str
    chart: Chart
    H: float
    s_range: tuple
    y_range: tuple
    exact: Callable  # exact(s) -> u, depends on s only
    meta: dict = field(default_factory=dict)

    def grid(self, n_s, n_y=None):
        n_y = n_s if n_y is None else n_y
        f = lambda s, y: self.exact(s) + 0.0 * y  # noqa: E731
        return ChartGrid(self.chart, self.s_range, self.y_range, n_s, n_y,
                         boundary_from_function(f, self.s_range, self.y_range))


def strip_scenario(H, l, length=None):
    """Fermi strip ``|t| <= l`` over the equidistant barrier.

    Side walls carry the exact translation-invariant solution so the finite
    rectangle reproduces the graph over the unbounded strip. The exact
    profile is ``h_H(l) - h_H(|t|)``.
    """
    if not l > 0:
        raise DomainError("l must be positive")
    if H == 0:
        top = 0.0
        exact = np.zeros_like
    else:
        top = pf.h_H(H, l)
        exact = np.vectorize(lambda t: top - pf.h_H(H, abs(t)), otypes=[float])
    length = 2.0 * l if length is None else length
    return Scenario("strip", Chart.FERMI, H, (-l, l), (0.0, length), exact,
                    {"l": l, "height": top})


def annulus_scenario(H, rho, d1=None, d2=None, theta_span=1.0):
    """Polar sub-annulus ``rho + d1 <= rho_hat <= rho + d2`` of the nodoid barrier.

    The inner radius is kept away from the vertical boundary at ``d = 0``.
    Defaults are ``d1 = Z_H/4`` and ``d2 = 3 Z_H/2``.
    """
    Z = pf.Z_H(H, rho)
    d1 = 0.25 * Z if d1 is None else d1
    d2 = 1.5 * Z if d2 is None else d2
    if not 0 < d1 < d2:
        raise DomainError("need 0 < d1 < d2")
    cache = {}

    def exact(s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        for k, v in np.ndenumerate(s):
            key = float(v)
            if key not in cache:
                cache[key] = pf.profile_nodoid(H, rho, key - rho, tol=1e-13)
            out[k] = cache[key]
        return out

    return Scenario("annulus", Chart.POLAR, H, (rho + d1, rho + d2), (0.0, theta_span), exact,
                    {"rho": rho, "d1": d1, "d2": d2})


@dataclass
class ConvergenceStudy:
    scenario: str
    H: float
    rows: list  # (n, spacing, max_error, SolveReport)
    orders: list

    def to_json_dict(self):
        return {
            "scenario": self.scenario,
            "H": self.H,
            "levels": [
                {"n": n, "spacing": h, "max_error": e, "report": r.to_json_dict()}
                for n, h, e, r in self.rows
            ],
            "observed_orders": self.orders,
        }


def solve_scenario(scn, n, **kw):
    grid = scn.grid(n)
    report = newton_solve(grid, scn.H, **kw)
    err = float(np.max(np.abs(grid.u - scn.exact(grid.s)[:, None])))
    return grid, report, err


def convergence_study(scn, levels=(33, 65, 129), **kw):
    """Max-norm errors against the exact solution under grid refinement."""
    if len(levels) < 2:
        raise DomainError("need at least two levels")
    rows = []
    for n in levels:
        grid, report, err = solve_scenario(scn, n, **kw)
        if not report.converged:
            raise ConvergenceError(f"level {n} did not converge", report)
        rows.append((n, max(grid.hs, grid.hy), err, report))
    orders = [
        math.log(e0 / e1) / math.log(h0 / h1)
        for (_, h0, e0, _), (_, h1, e1, _) in zip(rows, rows[1:])
    ]
    return ConvergenceStudy(scn.name, scn.H, rows, orders)


def dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
