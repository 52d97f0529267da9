import json

import pytest

from cmcbar import verify
from cmcbar.errors import DomainError

SMALL = dict(H_grid=[0.15, 0.35], r_grid=[0.0, 1.0, 3.0], rho_grid=[0.5, 2.0],
             l_grid=[0.5, 2.0])


def test_config_validation():
    with pytest.raises(DomainError):
        verify.SweepConfig(H_grid=[])
    with pytest.raises(DomainError):
        verify.SweepConfig(H_grid=[0.6])
    with pytest.raises(DomainError):
        verify.SweepConfig(H_grid=[0.05], r_grid=[-0.2])
    with pytest.raises(DomainError):
        verify.SweepConfig(tolerances={"quadrature": 0.0})
    with pytest.raises(DomainError):
        verify.SweepConfig(formats=["xml"])


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({**SMALL, "output_dir": "x"}))
    cfg = verify.SweepConfig.from_json(path, H_grid=[0.2])
    assert cfg.H_grid == [0.2] and cfg.r_grid == SMALL["r_grid"] and cfg.output_dir == "x"
    assert cfg.tolerances["quadrature"] == verify.DEFAULT_TOLERANCES["quadrature"]


def test_small_sweep_passes_and_roundtrips():
    rep = verify.run_verification(verify.SweepConfig(**SMALL))
    assert rep.ok, [e for e in rep.entries if not e.passed]
    refs = {e.paper_ref for e in rep.entries}
    assert {"eq-deltaineq", "eq-Deltaineq", "d1_2MHr", "prop-comparison", "hNinf", "iH", "rem-Fdispatch"} <= refs
    text = rep.dumps()
    again = verify.VerificationReport.loads(text)
    assert again.dumps() == text
    assert json.loads(text)["summary"]["failed"] == 0


def test_pass_semantics():
    e = verify.Entry("x", "r", {}, 1.0, 1.0, 0.0, "inequality").judge()
    assert e.passed
    e = verify.Entry("x", "r", {}, 1.0, 1.0, 0.0, "strict").judge()
    assert not e.passed
    e = verify.Entry("x", "r", {}, 1.0, 1.0 + 1e-9, -1e-9, "identity", 1e-8).judge()
    assert e.passed


def test_failures_recorded_not_fatal(monkeypatch):
    def boom(*a):
        raise RuntimeError("quadrature blew up")

    monkeypatch.setattr(verify, "check_ell", boom)
    rep = verify.run_verification(verify.SweepConfig(**SMALL))
    bad = [e for e in rep.entries if not e.passed]
    assert len(bad) == 2 and all("blew up" in e.error for e in bad)
    assert rep.summary["total"] > 50


def test_deterministic_and_threaded(monkeypatch):
    cfg = verify.SweepConfig(**SMALL)
    a = verify.run_verification(cfg).dumps()
    monkeypatch.setenv("CMCBAR_THREADS", "4")
    b = verify.run_verification(cfg).dumps()
    assert a == b
