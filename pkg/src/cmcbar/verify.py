"""Sweep configuration and the property suite behind ``cmcbar verify``."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import oracle
from . import profiles as pf
from . import scalar
from .errors import DomainError

DEFAULT_TOLERANCES = {"quadrature": 1e-10, "root": 1e-12, "ode": 1e-4, "pde": 1e-9}
IDENTITY_TOL = 1e-8
ORACLE_TOL = 1e-6
LIMIT_TOL = 1e-4
FORMATS = {"json", "csv"}


def _default_H():
    return [round(float(h), 6) for h in np.linspace(0.05, 0.45, 20)]


@dataclass
class SweepConfig:
    """Parameter grids for a verification sweep.

    ``r_grid`` must lie above ``atanh(-2H)`` for every ``H`` in ``H_grid``.
    Negative ``r`` down to that endpoint is additionally sampled per ``H`` by
    the comparison checks.
    """

    H_grid: list = field(default_factory=_default_H)
    r_grid: list = field(default_factory=lambda: [round(float(r), 6) for r in np.linspace(-0.09, 6.0, 20)])
    rho_grid: list = field(default_factory=lambda: [round(float(r), 6) for r in np.geomspace(0.05, 8.0, 20)])
    l_grid: list = field(default_factory=lambda: [round(float(r), 6) for r in np.linspace(0.25, 4.0, 16)])
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "cmcbar-out"
    formats: list = field(default_factory=lambda: ["json"])

    def __post_init__(self):
        self.tolerances = {**DEFAULT_TOLERANCES, **(self.tolerances or {})}
        self.validate()

    def validate(self):
        for name in ("H_grid", "r_grid", "rho_grid", "l_grid"):
            grid = getattr(self, name)
            if not grid:
                raise DomainError(f"{name} is empty")
        for H in self.H_grid:
            pf.check_H(H)
        r_floor = max(pf.r_min(H) for H in self.H_grid)
        if min(self.r_grid) <= r_floor:
            raise DomainError(f"r_grid values must exceed atanh(-2H) = {r_floor:.6g} for all H")
        if min(self.rho_grid) <= 0:
            raise DomainError("rho_grid values must be positive")
        if min(self.l_grid) <= 0:
            raise DomainError("l_grid values must be positive")
        bad = [k for k, v in self.tolerances.items() if not v > 0]
        if bad:
            raise DomainError(f"tolerances must be positive: {bad}")
        if not set(self.formats) <= FORMATS:
            raise DomainError(f"formats must be a subset of {sorted(FORMATS)}")

    @classmethod
    def from_json(cls, path, **overrides):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_dict(self):
        return asdict(self)


@dataclass
class Entry:
    property_id: str
    paper_ref: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    kind: str  # "inequality", "strict" or "identity"
    tolerance: float = 0.0
    passed: bool = False
    error: str = ""

    def judge(self):
        if self.error or not np.isfinite(self.margin):
            self.passed = False
        elif self.kind == "identity":
            self.passed = abs(self.margin) <= self.tolerance
        elif self.kind == "strict":
            self.passed = self.margin > 0
        else:
            self.passed = self.margin >= 0
        return self

    def to_json_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        for k in ("lhs", "rhs", "margin"):
            if isinstance(d[k], float) and math.isinf(d[k]):
                d[k] = "inf" if d[k] > 0 else "-inf"
        return d

    @classmethod
    def from_json_dict(cls, d):
        d = dict(d)
        d["passed"] = d.pop("pass")
        for k in ("lhs", "rhs", "margin"):
            if isinstance(d[k], str):
                d[k] = float(d[k])
        return cls(**d)


@dataclass
class VerificationReport:
    entries: list

    @property
    def summary(self):
        failed = sum(not e.passed for e in self.entries)
        return {"total": len(self.entries), "passed": len(self.entries) - failed, "failed": failed}

    @property
    def ok(self):
        return all(e.passed for e in self.entries)

    def to_json_dict(self):
        return {"entries": [e.to_json_dict() for e in self.entries], "summary": self.summary}

    def dumps(self):
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        data = json.loads(text)
        return cls([Entry.from_json_dict(e) for e in data["entries"]])

    def write_csv(self, path):
        import csv

        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["property_id", "paper_ref", "params", "lhs", "rhs", "margin", "pass"])
            for e in self.entries:
                w.writerow([e.property_id, e.paper_ref, json.dumps(e.params, sort_keys=True),
                            repr(e.lhs), repr(e.rhs), repr(e.margin), int(e.passed)])


# ---------------------------------------------------------------------------
# individual checks; each returns an Entry (unjudged)


def _ineq(pid, ref, params, lhs, rhs, strict=False):
    # lhs >= rhs (or >)
    return Entry(pid, ref, params, lhs, rhs, lhs - rhs, "strict" if strict else "inequality")


def _ident(pid, ref, params, lhs, rhs, tol):
    return Entry(pid, ref, params, lhs, rhs, lhs - rhs, "identity", tol)


def check_psi_height(H, l, tol):
    return _ident("strip_height_closed_form", "hG=psi2", {"H": H, "l": l},
                  pf.h_H(H, l), pf.psi(H, l, 0.0, tol=tol["quadrature"]), IDENTITY_TOL)


def check_delta(H, r, tol):
    rep = scalar.solve_delta(H, r, quad_tol=tol["quadrature"], xtol=tol["root"])
    return _ineq("delta_ge_2z", "eq-deltaineq", {"H": H, "r": r}, rep.value, 2 * pf.z_H(H, r), strict=True)


def check_Delta(H, rho, tol):
    rep = scalar.solve_Delta(H, rho, quad_tol=tol["quadrature"], xtol=tol["root"])
    return _ineq("Delta_ge_2Z", "eq-Deltaineq", {"H": H, "rho": rho}, rep.value, 2 * pf.Z_H(H, rho), strict=True)


def check_symmetric_decay(H, r, tol, n=20):
    z = pf.z_H(H, r)
    s = z * np.arange(1, n + 1) / (n + 1)
    lhs = pf.c_H(H, r, z - s)
    rhs = -pf.c_H(H, r, z + s)
    k = int(np.argmin(lhs - rhs))
    return _ineq("symmetric_decay", "d1_2MHr", {"H": H, "r": r, "s": float(s[k])},
                 float(lhs[k]), float(rhs[k]))


def prop26_r_values(H, n=10):
    lo = pf.r_min(H)
    return [lo * (k + 0.5) / n for k in range(n)]


def check_prop26(H, r, tol):
    q = tol["quadrature"]
    return [
        _ineq("a_H_above_h_H", "prop-comparison", {"H": H, "r": r}, pf.a_H(H, r, q), pf.h_H(H, abs(r)), strict=True),
        _ineq("z_H_above_abs_r", "prop-comparison", {"H": H, "r": r}, pf.z_H(H, r), abs(r), strict=True),
    ]


def check_monotone(H, r_grid, rho_grid, tol):
    q = tol["quadrature"]
    rs = sorted(r for r in r_grid if r > pf.r_min(H))
    a = np.array([pf.a_H(H, r, q) for r in rs])
    A = np.array([pf.A_H(H, rho, q) for rho in sorted(rho_grid)])
    return [
        _ineq("a_H_decreasing", "prop-comparison", {"H": H, "n": len(a)}, float(np.min(-np.diff(a))), 0.0, strict=True),
        _ineq("A_H_increasing", "prop-comparison", {"H": H, "n": len(A)}, float(np.min(np.diff(A))), 0.0, strict=True),
        _ineq("A_H_below_a_H", "prop-comparison", {"H": H}, float(np.min(a)), float(np.max(A))),
    ]


def check_limits(H, tol):
    q = tol["quadrature"]
    inf = pf.a_H_inf(H)
    return [
        _ident("a_H_limit", "hNinf", {"H": H, "r": 25.0}, pf.a_H(H, 25.0, q), inf, LIMIT_TOL),
        _ident("A_H_limit", "hNinf", {"H": H, "rho": 25.0}, pf.A_H(H, 25.0, q), inf, LIMIT_TOL),
        _ident("a_H_inf_quadrature", "gfcomp", {"H": H}, pf.a_H_inf_quadrature(H, q), inf, IDENTITY_TOL),
    ]


def check_ell(H, tol):
    rep = scalar.solve_ell(H, xtol=tol["root"])
    return [
        _ident("ell_height_identity", "iH", {"H": H}, pf.h_H(H, rep.value), pf.a_H_inf(H), IDENTITY_TOL),
        _ident("ell_log_equation", "iH", {"H": H}, scalar.ell_equation_residual(H, rep.value), 0.0, scalar.RESIDUAL_TOL),
    ]


def check_oracle(H, family, shape, tol):
    params = pf.BarrierParams(H, family, shape)
    q = tol["quadrature"]
    ref = {"strip": lambda: pf.h_H(H, shape), "hypercycle": lambda: pf.a_H(H, shape, q),
           "nodoid": lambda: pf.A_H(H, shape, q)}[family]()
    got = oracle.oracle_height(family, params, step=tol["ode"])
    return _ident(f"oracle_{family}", "ode_oracle", params.to_dict(), got, ref, ORACLE_TOL)


def check_F(H, tol, n=100):
    kappas = np.linspace(-2.0, 1.0, n + 2)[1:-1]
    F = np.array([scalar.F_dispatch(H, k) for k in kappas])
    finite = np.isfinite(F)
    diffs = np.diff(F[finite])
    return [
        _ineq("F_monotone", "rem-Fdispatch", {"H": H, "n": n}, float(np.min(diffs)), 0.0),
        _ident("F_at_2H", "rem-Fdispatch", {"H": H}, 1.0 if math.isinf(scalar.F_dispatch(H, 2 * H)) else 0.0, 1.0, 0.0),
        _ident("F_at_minus_one", "Thm3.2(iv)", {"H": H}, scalar.F_dispatch(H, -1.0), pf.a_H_inf(H), 0.0),
    ]


def _tasks(cfg):
    tol = cfg.tolerances
    H_grid = cfg.H_grid
    for H in H_grid:
        for l in cfg.l_grid:
            yield check_psi_height, (H, l, tol)
    for H in H_grid:
        for r in cfg.r_grid:
            yield check_delta, (H, r, tol)
            yield check_symmetric_decay, (H, r, tol)
        for rho in cfg.rho_grid:
            yield check_Delta, (H, rho, tol)
        for r in prop26_r_values(H):
            yield check_prop26, (H, r, tol)
        yield check_monotone, (H, cfg.r_grid, cfg.rho_grid, tol)
        yield check_limits, (H, tol)
        yield check_ell, (H, tol)
        yield check_F, (H, tol)
    # oracle cross-check on a 10x10 sub-grid
    sub_H = H_grid[:: max(1, len(H_grid) // 10)][:10]
    for H in sub_H:
        for r in cfg.r_grid[:: max(1, len(cfg.r_grid) // 10)][:10]:
            yield check_oracle, (H, "hypercycle", r, tol)
        for rho in cfg.rho_grid[:: max(1, len(cfg.rho_grid) // 10)][:10]:
            yield check_oracle, (H, "nodoid", rho, tol)
        for l in cfg.l_grid[:: max(1, len(cfg.l_grid) // 10)][:10]:
            yield check_oracle, (H, "strip", l, tol)


def _run(task):
    fn, args = task
    try:
        out = fn(*args)
    except Exception as exc:  # recorded per entry, never fatal to the sweep
        H = args[0]
        return [Entry(fn.__name__, "", {"H": H}, math.nan, math.nan, math.nan, "identity",
                      error=f"{type(exc).__name__}: {exc}")]
    return out if isinstance(out, list) else [out]


def thread_count():
    try:
        return max(1, int(os.environ.get("CMCBAR_THREADS", "1")))
    except ValueError:
        return 1


def run_verification(cfg):
    """Run the full property suite over ``cfg``'s grids."""
    tasks = list(_tasks(cfg))
    n = thread_count()
    if n == 1:
        results = map(_run, tasks)
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_run, tasks))
    entries = [e.judge() for batch in results for e in batch]
    return VerificationReport(entries)
