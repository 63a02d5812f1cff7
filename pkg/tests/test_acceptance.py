"""Acceptance criteria 1-12, each at its stated tolerance and runtime budget.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""
import contextlib
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from nonlocal_korn.cli import groundstate_points, main
from nonlocal_korn.constants import c_p, gamma2_quadrature, gamma_constants
from nonlocal_korn.core import Domain, FracParams, half_space_fields, library_field
from nonlocal_korn.extension import normal_derivative_jump, trace_mismatch
from nonlocal_korn.quad import QuadConfig, seminorm_S
from nonlocal_korn.spectral import parseval_seminorm_S, spectral_constants
from nonlocal_korn.verify import ground_state_limit_check, pointwise_inequalities

from _fields import smooth_touching

SEED = "1234"
ARGV = {
    7: ["hardy", "--sweep", "default"],
    8: ["korn", "--d", "1", "--d", "2", "--s", "0.25", "--s", "0.75"],
    9: ["scaling", "--d", "1", "--d", "2", "--d", "3", "--p", "1", "--p", "2", "--p", "3",
        "--s", "0.25", "--s", "0.75", "--lambda", "2", "--lambda", "3", "--lambda", "5"],
}


@contextlib.contextmanager
def criterion(n, text, budget):
    """Time the block, check the runtime budget and record the outcome."""
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds {budget}s"
    except BaseException as exc:
        ACCEPTANCE[n] = f"criterion {n:2d}: FAIL  {text}  ({str(exc).splitlines()[0] if str(exc) else type(exc).__name__})"
        raise
    ACCEPTANCE[n] = f"criterion {n:2d}: PASS  {text}  ({elapsed:.1f}s)"


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def cli_run(n, run_dir, jobs):
    out = run_dir / f"c{n}_jobs{jobs}.jsonl"
    code = main(ARGV[n] + ["--seed", SEED, "--jobs", str(jobs), "--out", str(out)])
    return code, out


def reports(path):
    lines = path.read_text(encoding="utf-8").splitlines()[1:]
    return [json.loads(x) for x in lines if '"check_name"' in x]


def test_criterion_01_gamma2_closed_form():
    with criterion(1, "gamma_2(p=2, s=0.75) = 16/105", 1.0):
        P = FracParams(2, 2.0, 0.75)
        g2 = gamma_constants(P)[1].value
        assert abs(g2 - 16 / 105) <= 1e-10 * 16 / 105
        assert abs(gamma2_quadrature(P).value - 16 / 105) <= 1e-8 * 16 / 105


def test_criterion_02_c_p():
    with criterion(2, "c_2 = 1, c_3 = 2 - sqrt(2)", 1.0):
        assert abs(c_p(2).value - 1.0) <= 1e-9
        tau = 1 - 1 / math.sqrt(2)
        # derivative of (1 - t)^3 - t^3 + 3 t^2 vanishes at tau
        assert abs(-3 * (1 - tau) ** 2 - 3 * tau**2 + 6 * tau) < 1e-14
        assert abs(c_p(3).value - (2 - math.sqrt(2))) <= 1e-6


def test_criterion_03_extension_trace_and_jump():
    with criterion(3, "extension trace continuity and -7 normal-derivative jump", 5.0):
        fields = [smooth_touching()] + half_space_fields(2) + half_space_fields(3)
        for u in fields:
            assert trace_mismatch(u, n_points=10_000) <= 1e-12
        u = smooth_touching()
        for x1 in np.linspace(-1.5, 1.5, 7):
            below, above = normal_derivative_jump(u, [x1], step=1e-5)
            assert abs(below[1] / above[1] + 7.0) <= 1e-3


def test_criterion_04_null_space():
    with criterion(4, "skew-affine field has zero S-seminorm on the unit ball", 1.0):
        for d in (2, 3):
            e = seminorm_S(library_field(d, "skew_affine"), Domain.ball(np.zeros(d), 1.0), FracParams(d, 2.0, 0.6))
            assert e.value == 0.0 and e.std_error == 0.0


def test_criterion_05_spectral_identity():
    with criterion(5, "l1 + (d-1) l2 = kappa(d, s)", 60.0):
        for d in (1, 2, 3):
            for s in (0.25, 0.5, 0.75):
                resid, err = spectral_constants(FracParams(d, 2.0, s)).identity_residual()
                assert abs(resid) <= 3 * err


def _parseval_records(n_jobs):
    out = []
    for s in (0.25, 0.75):
        P = FracParams(2, 2.0, s)
        u = library_field(2, "gauss_iso")
        mc = seminorm_S(u, "WholeSpace", P, QuadConfig(n_samples=1_000_000, seed=int(SEED), n_jobs=n_jobs))
        out.append({"s": s, "mc": mc.to_dict(), "parseval": parseval_seminorm_S(u, P).to_dict()})
    return out


def test_criterion_06_parseval(run_dir):
    with criterion(6, "Monte Carlo S-seminorm matches Parseval (d=2, Gaussian)", 120.0):
        recs = _parseval_records(1)
        (run_dir / "c6_jobs1.json").write_text(json.dumps(recs, sort_keys=True))
        for r in recs:
            assert abs(r["mc"]["value"] - r["parseval"]["value"]) <= 3 * r["mc"]["std_error"]


def test_criterion_07_hardy_sweep(run_dir):
    with criterion(7, "Hardy inequality on every half-space field across the sweep", 900.0):
        code, out = cli_run(7, run_dir, 1)
        rs = reports(out)
        assert len(rs) == 36 * 6
        failed = [(r["params"], r["field_id"]) for r in rs if not r["passed"]]
        assert not failed, f"failed: {failed}"
        assert code == 0


def test_criterion_08_korn_band(run_dir):
    with criterion(8, "whole-space Korn ratios inside the spectral band; d=1 ratio 1", 600.0):
        code, out = cli_run(8, run_dir, 1)
        rs = [r for r in reports(out) if r["check_name"] == "korn_wholespace"]
        assert len(rs) == 2 * 2 * 3
        for r in rs:
            W, S = r["lhs"], r["rhs"]
            lo, hi = r["details"]["band_lower"], r["details"]["band_upper"]
            sd = math.hypot(W["std_error"], hi * S["std_error"])
            assert lo * S["value"] - 3 * sd <= W["value"] <= hi * S["value"] + 3 * sd
            if r["params"]["d"] == 1:
                assert abs(W["value"] - S["value"]) <= 3 * math.hypot(W["std_error"], S["std_error"])
        assert code == 0


def test_criterion_09_scaling(run_dir):
    with criterion(9, "scaling lemma for lambda in {2, 3, 5}", 600.0):
        code, out = cli_run(9, run_dir, 1)
        rs = reports(out)
        assert len(rs) == 18 * 6 * 3
        failed = [(r["params"], r["field_id"], r["details"]["lambda"]) for r in rs if not r["passed"]]
        assert not failed, f"failed: {failed}"
        assert code == 0


def test_criterion_10_pointwise():
    with criterion(10, "basic/refined (a, t) grids and Phi >= -1e-12", 120.0):
        for p in (1.0, 1.5, 2.0, 3.0):
            r = pointwise_inequalities(p, n_samples=100_000, grid=1000)
            assert r.details["basic_violations"] == 0
            if p >= 2:
                assert r.details["refined_violations"] == 0
            assert r.details["phi_samples"] >= 99_990
            assert r.details["phi_min"] >= -1e-12
            assert r.passed


def test_criterion_11_ground_state():
    with criterion(11, "ground-state limit with final Cauchy difference < 1e-4", 60.0):
        for s in (0.25, 0.75):
            P = FracParams(2, 2.0, s)
            for x_d, v in groundstate_points(2):
                r = ground_state_limit_check(P, x_d, v)
                assert r.details["final_cauchy_rel"] < 1e-4
                assert abs(r.details["final_value"] - r.details["limit"]) <= 1e-4 * abs(r.details["limit"])
                assert r.passed


def test_criterion_12_determinism(run_dir):
    with criterion(12, "byte-identical reports for criteria 6-9 under --jobs 1 and 2", 1800.0):
        first = run_dir / "c6_jobs1.json"
        if not first.exists():
            first.write_text(json.dumps(_parseval_records(1), sort_keys=True))
        assert first.read_text() == json.dumps(_parseval_records(2), sort_keys=True)
        for n in (7, 8, 9):
            one = run_dir / f"c{n}_jobs1.jsonl"
            if not one.exists():
                cli_run(n, run_dir, 1)
            _, two = cli_run(n, run_dir, 2)
            assert one.read_bytes() == two.read_bytes(), f"criterion {n} output differs"
