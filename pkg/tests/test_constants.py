import math

import numpy as np
import pytest

from nonlocal_korn.constants import (CSV_COLUMNS, Method, c_p, constants_table, eta_constants, eta_quadrature,
                                     f_of_v, gamma1_quadrature, gamma2_quadrature, gamma_constants, j_kernel,
                                     j_kernel_quadrature, min_f_on_sphere, sigma, to_csv)
from nonlocal_korn.core import FracParams
from nonlocal_korn.errors import ExcludedParameter, InvalidParameter
from nonlocal_korn.verify import default_sweep

# Values computed once with mpmath at 30 digits straight from the defining
# integrals (sigma over [0, 1]; eta as (d-1)-dimensional integrals of the bell
# (1 + |z|^2)^(-(d+ps+p)/2); J as the half-space integral of the reflected kernel,
# transverse directions integrated first with int (|r|^2 + h^2)^(-e) dr over R^m
# = pi^(m/2) Gamma(e - m/2) / Gamma(e) h^(m - 2e), then x_d by mpmath.quad).
SIGMA_ORACLE = {
    (2, 2.0, 0.75): 0.20735251809737327,
    (3, 3.0, 0.25): 0.0067833719568213308,
    (2, 3.0, 0.4): 0.0015828780988292002,
    (1, 2.0, 0.25): 0.3962804694711844,
    (3, 1.5, 0.4): 0.51524557724207295,
}
ETA_ORACLE = {
    (2, 2.0, 0.75): (1.2485988353771999, 0.49943953415087996),
    (2, 1.0, 0.6): (1.7079161579858145, 1.2499999999999999),
    (3, 3.0, 0.25): (1.3227758541430708, 0.66532991556789968),
    (2, 3.0, 0.4): (1.1530397583310361, 0.43290043290043285),
    (3, 1.5, 0.4): (2.0268339700579314, 1.3575804013909695),
}
J_ORACLE = {
    (2, 2.0, 0.25, 1.0): 1.533619500461558,
    (3, 2.0, 0.75, 1.3): 0.14354332758203222,
    (1, 3.0, 0.4, 0.7): 0.25943609978591221,
}

SWEEP = default_sweep()


@pytest.mark.parametrize("key", sorted(SIGMA_ORACLE))
def test_sigma_matches_oracle(key):
    c = sigma(FracParams(*key))
    assert c.method is Method.ADAPTIVE_QUADRATURE
    assert c.abs_error <= 1e-8
    assert abs(c.value - SIGMA_ORACLE[key]) <= max(c.abs_error, 1e-12 * SIGMA_ORACLE[key])


def test_sigma_examples_and_gate():
    c = sigma(FracParams(1, 1.0, 0.5))
    assert math.isfinite(c.value) and c.value > 0
    with pytest.raises(ExcludedParameter):
        sigma(FracParams(2, 2.0, 0.5))


def test_sigma_monte_carlo_cross_check():
    # independent plain MC over t in (0, 1) with the t = 1 pole tamed by t = 1 - v^(1/(p-ps))
    P = FracParams(2, 2.0, 0.75)
    p, ps, a = P.p, P.ps, P.alpha
    rng = np.random.default_rng(11)
    k = 1.0 / (p - ps)
    v = rng.random(2_000_000)
    t = 1.0 - v**k
    jac = k * v ** (k - 1.0)
    g = np.abs(t**a - 1.0) ** p / (1.0 - t) ** (ps + 1.0) * jac
    mean, se = g.mean(), g.std(ddof=1) / math.sqrt(g.size)
    assert abs(mean - sigma(P).value) < 4 * se


@pytest.mark.parametrize("key", sorted(ETA_ORACLE))
def test_eta_matches_oracle(key):
    P = FracParams(*key)
    e1, e2 = eta_constants(P, cross_check=True)
    assert e1.value == pytest.approx(ETA_ORACLE[key][0], rel=1e-12)
    assert e2.value == pytest.approx(ETA_ORACLE[key][1], rel=1e-12)


def test_eta_beta_identity_example():
    P = FracParams(2, 2.0, 0.25)
    expect = math.gamma(1.5) * math.gamma(0.75) / math.gamma(2.25)
    assert eta_constants(P)[1].value == pytest.approx(expect, rel=1e-13)
    assert f_of_v(P, [1.0, 0.0]).value == pytest.approx(expect, rel=1e-10)


@pytest.mark.parametrize("P", SWEEP, ids=str)
def test_constants_positive_and_cross_checked(P):
    for c in constants_table(P):
        assert math.isfinite(c.value) and c.value > 0
        assert c.abs_error >= 0
    e1, e2 = eta_constants(P)
    if P.d in (2, 3):
        q1, q2 = eta_quadrature(P)
        assert abs(q1.value - e1.value) <= max(q1.abs_error, 1e-10 * e1.value)
        assert abs(q2.value - e2.value) <= max(q2.abs_error, 1e-10 * e2.value)
    g1, g2, g = gamma_constants(P)
    assert gamma2_quadrature(P).value == pytest.approx(g2.value, rel=1e-9)
    assert gamma1_quadrature(P).value == pytest.approx(g1.value, rel=1e-9)
    assert g.value == pytest.approx(g1.value * g2.value, rel=1e-15)


def test_d1_conventions():
    P = FracParams(1, 2.0, 0.75)
    e1, e2 = eta_constants(P)
    assert e1.value == e2.value == 1.0
    assert gamma_constants(P)[0].value == 1.0
    assert f_of_v(P, [-2.0]).value == 4.0


def test_gamma2_closed_form():
    g2 = gamma_constants(FracParams(2, 2.0, 0.75))[1]
    assert abs(g2.value - 16 / 105) <= 1e-10 * 16 / 105
    assert abs(gamma2_quadrature(FracParams(2, 2.0, 0.75)).value - 16 / 105) <= 1e-8 * 16 / 105


@pytest.mark.parametrize("d", [2, 3])
def test_f_of_v_properties(d):
    P = FracParams(d, 3.0, 0.4)
    e1, _ = eta_constants(P)
    ed = np.zeros(d)
    ed[-1] = 1.0
    assert f_of_v(P, ed).value == pytest.approx(e1.value, rel=1e-10)
    rng = np.random.default_rng(12)
    for v in rng.normal(size=(20, d)):
        assert f_of_v(P, -v).value == pytest.approx(f_of_v(P, v).value, rel=1e-12)
    if d == 3:
        for v in rng.normal(size=(20, 3)):
            th = rng.uniform(0, 2 * math.pi)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            w = v.copy()
            w[:2] = R @ v[:2]
            assert f_of_v(P, w).value == pytest.approx(f_of_v(P, v).value, rel=1e-12)
    with pytest.raises(InvalidParameter):
        f_of_v(P, np.ones(d + 1))


@pytest.mark.parametrize("P", [P for P in SWEEP if P.d > 1], ids=str)
def test_corollary_lower_bound(P):
    # f(v) >= eta_1/2 |v_d|^p + eta_2/2 |v'|^p on 10^3 random v
    e1, e2 = (c.value for c in eta_constants(P))
    rng = np.random.default_rng(13)
    V = rng.normal(size=(1000, P.d)) * rng.uniform(0.1, 3.0, size=(1000, 1))
    for v in V:
        lower = 0.5 * e1 * abs(v[-1]) ** P.p + 0.5 * e2 * np.linalg.norm(v[:-1]) ** P.p
        assert f_of_v(P, v).value >= lower * (1 - 1e-12)


def test_min_f_on_sphere():
    for P in (FracParams(2, 3.0, 0.4), FracParams(3, 1.0, 0.6), FracParams(2, 2.0, 0.75)):
        m = min_f_on_sphere(P)
        rng = np.random.default_rng(14)
        for v in rng.normal(size=(50, P.d)):
            v /= np.linalg.norm(v)
            assert f_of_v(P, v).value >= m - 1e-9


@pytest.mark.parametrize("key", sorted(J_ORACLE))
def test_j_kernel(key):
    d, p, s, y = key
    P = FracParams(d, p, s)
    J = j_kernel(P, y).value
    assert J == pytest.approx(J_ORACLE[key], rel=1e-12)
    assert j_kernel_quadrature(P, y).value == pytest.approx(J, rel=1e-4)
    assert j_kernel(P, 1.0).value == pytest.approx(gamma_constants(P)[2].value, rel=1e-15)
    assert j_kernel(P, 2 * y).value / J == pytest.approx(2 ** -P.ps, rel=1e-14)
    with pytest.raises(InvalidParameter):
        j_kernel(P, 0.0)


def test_c_p():
    assert abs(c_p(2).value - 1.0) <= 1e-9
    c3 = c_p(3).value
    tau = 1 - math.sqrt(0.5)
    # stationarity of (1 - t)^3 - t^3 + 3 t^2 at t = 1 - 1/sqrt(2): -3 + 12 t - 6 t^2 = 0
    assert abs(-3 + 12 * tau - 6 * tau**2) < 1e-14
    stationary = (1 - tau) ** 3 - tau**3 + 3 * tau**2
    assert abs(stationary - (2 - math.sqrt(2))) < 1e-14
    assert abs(c3 - stationary) <= 1e-6
    assert 0 < c_p(2.5).value <= 1
    for p in (4.0, 7.5):
        assert 0 < c_p(p).value <= 1
    with pytest.raises(ExcludedParameter):
        c_p(1.5)


def test_csv_table():
    rows = constants_table(FracParams(2, 2.0, 0.75))
    text = to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    names = [ln.split(",")[0] for ln in lines[1:]]
    assert names == ["Sigma", "Eta1", "Eta2", "Gamma1", "Gamma2", "Gamma", "Cp"]
    assert "np.float64" not in text
    # ps = 1 drops sigma only
    assert "Sigma" not in [c.name for c in constants_table(FracParams(2, 2.0, 0.5))]
