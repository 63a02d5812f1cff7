"""Closed-form and low-dimensional-integral constants of the Hardy/extension argument.

Conventions for d = 1: the (d-1)-dimensional integrals defining eta_1, eta_2
and gamma_1 are over R^0 and are set to 1, and f(v) = |v_d|^p.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ._quadrature import integrate
from .core import FracParams
from .errors import ExcludedParameter, InvalidParameter
from .special import beta, moment_bell_integral, power_bell_integral, sphere_area


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    ADAPTIVE_QUADRATURE = "AdaptiveQuadrature"
    MONTE_CARLO = "MonteCarlo"
    MINIMIZATION = "Minimization"


@dataclass(frozen=True)
class ConstantValue:
    name: str
    params: FracParams | None
    value: float
    abs_error: float
    method: Method
    v: tuple[float, ...] | None = field(default=None)

    def __float__(self) -> float:
        return self.value

    def row(self) -> dict[str, object]:
        p = self.params
        return {
            "name": self.name,
            "d": p.d if p else "",
            "p": p.p if p else "",
            "s": p.s if p else "",
            "value": repr(float(self.value)),
            "abs_error": repr(float(self.abs_error)),
            "method": self.method.value,
        }


def _closed(name: str, params: FracParams, value: float, v=None) -> ConstantValue:
    # lgamma-based closed forms are good to a few ulps
    return ConstantValue(name, params, value, 64 * np.finfo(float).eps * abs(value), Method.CLOSED_FORM, v)


def sigma(params: FracParams) -> ConstantValue:
    """int_0^1 |t^alpha - 1|^p / |t - 1|^(ps+1) dt."""
    params.require_ps_not_one()
    p, ps, a = params.p, params.ps, params.alpha

    def left(t):
        # near t = 0 the numerator behaves like t^(alpha p) when alpha < 0
        return np.abs(np.expm1(a * np.log(t))) ** p / (1.0 - t) ** (ps + 1.0)

    def right(tau):
        # tau = 1 - t, numerator ~ |alpha tau|^p
        num = np.abs(np.expm1(a * np.log1p(-tau))) ** p
        out = np.zeros_like(tau)
        ok = tau > 0
        out[ok] = num[ok] / tau[ok] ** (ps + 1.0)
        return out

    left_exp = ps - 1.0 if a < 0 else None
    v1, e1 = integrate(left, 0.0, 0.5, left_exponent=left_exp, abs_tol=1e-13, rel_tol=1e-13)
    v2, e2 = integrate(right, 0.0, 0.5, left_exponent=p - ps - 1.0, abs_tol=1e-13, rel_tol=1e-13)
    return ConstantValue("Sigma", params, v1 + v2, e1 + e2, Method.ADAPTIVE_QUADRATURE)


def _bell_exponent(params: FracParams) -> float:
    return (params.d + params.ps + params.p) / 2.0


def eta_constants(params: FracParams, cross_check: bool = False) -> tuple[ConstantValue, ConstantValue]:
    """(eta_1, eta_2) from their Beta-function closed forms."""
    m = params.d - 1
    a = _bell_exponent(params)
    if m == 0:
        eta1 = eta2 = 1.0
    else:
        eta1 = power_bell_integral(m, a)
        eta2 = moment_bell_integral(m, params.p, a)
    out = (_closed("Eta1", params, eta1), _closed("Eta2", params, eta2))
    if cross_check and 1 <= m <= 2:
        q1, q2 = eta_quadrature(params)
        for closed, quad in zip(out, (q1, q2)):
            if abs(closed.value - quad.value) > max(quad.abs_error, 1e-10 * closed.value):
                raise ArithmeticError(f"{closed.name}: closed form {closed.value!r} vs quadrature {quad.value!r}")
    return out


def eta_quadrature(params: FracParams) -> tuple[ConstantValue, ConstantValue]:
    """eta_1, eta_2 by radial (and, for d = 3, angular) quadrature; d in {2, 3}."""
    m = params.d - 1
    if m not in (1, 2):
        raise InvalidParameter("quadrature cross-check implemented for d = 2, 3")
    a = _bell_exponent(params)
    p = params.p
    r1, e1 = integrate(lambda r: r ** (m - 1) * (1 + r * r) ** (-a), 0.0, math.inf)
    r2, e2 = integrate(lambda r: r ** (m - 1 + p) * (1 + r * r) ** (-a), 0.0, math.inf, left_exponent=m - 1 + p)
    if m == 1:
        ang1, ang2, ea = 2.0, 2.0, 0.0
    else:
        ang1 = 2 * math.pi
        # the kink of |cos| at pi/2 is placed on a panel boundary
        q, ea = integrate(lambda t: np.abs(np.cos(t)) ** p, 0.0, math.pi / 2)
        ang2 = 4 * q
    return (
        ConstantValue("Eta1", params, ang1 * r1, ang1 * e1, Method.ADAPTIVE_QUADRATURE),
        ConstantValue("Eta2", params, ang2 * r2, ang2 * e2 + 4 * ea * r2, Method.ADAPTIVE_QUADRATURE),
    )


def f_of_v(params: FracParams, v) -> ConstantValue:
    """f(v) = int_{R^(d-1)} |v'.z' + v_d|^p (|z'|^2 + 1)^(-(d+ps+p)/2) dz'.

    Rotational symmetry reduces f to a function of (|v'|, v_d); integrating out
    the directions orthogonal to v' and substituting z_1 = tan(theta) leaves
    C * int_{-pi/2}^{pi/2} |b sin(theta) + c cos(theta)|^p cos(theta)^(ps) dtheta.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size != params.d:
        raise InvalidParameter(f"v must have length d={params.d}")
    p, ps, d = params.p, params.ps, params.d
    c = float(v[-1])
    if d == 1:
        return ConstantValue("FofV", params, abs(c) ** p, 0.0, Method.CLOSED_FORM, tuple(v.tolist()))
    b = float(np.linalg.norm(v[:-1]))
    m = d - 1
    a = _bell_exponent(params)
    pref = power_bell_integral(m - 1, a) if m > 1 else 1.0
    if b == 0.0 and c == 0.0:
        return ConstantValue("FofV", params, 0.0, 0.0, Method.CLOSED_FORM, tuple(v.tolist()))

    def g(t):
        return np.abs(b * np.sin(t) + c * np.cos(t)) ** p * np.clip(np.cos(t), 0.0, None) ** ps

    lo, hi = -math.pi / 2, math.pi / 2
    kink = math.atan2(-c, b)
    if kink <= lo:
        kink += math.pi
    elif kink >= hi:
        kink -= math.pi
    total, err = 0.0, 0.0
    for a_, b_ in ((lo, kink), (kink, hi)):
        if b_ - a_ <= 0:
            continue
        le = ps if a_ == lo else None
        re = ps if b_ == hi else None
        val, e = integrate(g, a_, b_, left_exponent=le, right_exponent=re, abs_tol=1e-14, rel_tol=1e-13)
        total += val
        err += e
    return ConstantValue("FofV", params, pref * total, pref * err, Method.ADAPTIVE_QUADRATURE, tuple(v.tolist()))


def min_f_on_sphere(params: FracParams) -> float:
    """min over unit v of f(v); f depends on v only through (|v'|, v_d)."""
    if params.d == 1:
        return 1.0
    if params.p == 2.0:
        eta1, eta2 = eta_constants(params)
        # f is the quadratic form eta2 |v'|^2 + eta1 v_d^2 when p = 2
        return min(eta1.value, eta2.value)

    def on_circle(theta: float) -> float:
        v = np.zeros(params.d)
        v[0], v[-1] = math.sin(theta), math.cos(theta)
        return f_of_v(params, v).value

    grid = np.linspace(0.0, math.pi / 2, 33)
    vals = [on_circle(t) for t in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(on_circle, bounds=(lo, hi), method="bounded", options={"xatol": 1e-9})
    return float(min(res.fun, min(vals)))


def gamma_constants(params: FracParams) -> tuple[ConstantValue, ConstantValue, ConstantValue]:
    """(gamma_1, gamma_2, gamma = gamma_1 gamma_2) from their closed forms."""
    m = params.d - 1
    p, ps = params.p, params.ps
    g1 = power_bell_integral(m, (params.d + (params.s + 1.0) * p) / 2.0)
    g2 = beta(p + 1.0, ps)
    return (
        _closed("Gamma1", params, g1),
        _closed("Gamma2", params, g2),
        _closed("Gamma", params, g1 * g2),
    )


def gamma2_quadrature(params: FracParams) -> ConstantValue:
    """Defining integral int_0^inf w^p / (1 + w)^(p(s+1)+1) dw by adaptive quadrature."""
    p, ps = params.p, params.ps
    expo = p * (params.s + 1.0) + 1.0
    val, err = integrate(lambda w: w**p / (1.0 + w) ** expo, 0.0, math.inf, abs_tol=1e-14, rel_tol=1e-13,
                         tail_decay=expo - p)
    return ConstantValue("Gamma2", params, val, err, Method.ADAPTIVE_QUADRATURE)


def gamma1_quadrature(params: FracParams) -> ConstantValue:
    m = params.d - 1
    b = (params.d + (params.s + 1.0) * params.p) / 2.0
    if m == 0:
        return ConstantValue("Gamma1", params, 1.0, 0.0, Method.CLOSED_FORM)
    val, err = integrate(lambda r: r ** (m - 1) * (1 + r * r) ** (-b), 0.0, math.inf, abs_tol=1e-14, rel_tol=1e-13,
                         tail_decay=2 * b - m + 1)
    area = sphere_area(m)
    return ConstantValue("Gamma1", params, area * val, area * err, Method.ADAPTIVE_QUADRATURE)


def j_kernel(params: FracParams, y_d: float) -> ConstantValue:
    """J(y) = gamma / y_d^(ps): the x-integral of |x_d|^p / |y* - x|^(d+(s+1)p) over R^d_+,
    y* being the reflection of y."""
    if not y_d > 0:
        raise InvalidParameter(f"y_d must be positive, got {y_d!r}")
    _, _, g = gamma_constants(params)
    val = g.value * y_d ** (-params.ps)
    return ConstantValue("J", params, val, 64 * np.finfo(float).eps * val, Method.CLOSED_FORM)


def j_kernel_quadrature(params: FracParams, y_d: float) -> ConstantValue:
    """The defining d-dimensional integral of J by nested quadrature (x' in polar form)."""
    if not y_d > 0:
        raise InvalidParameter(f"y_d must be positive, got {y_d!r}")
    p, d = params.p, params.d
    m = d - 1
    b = (d + (params.s + 1.0) * p) / 2.0
    if m == 0:
        val, err = integrate(lambda x: x**p * (y_d + x) ** (-2 * b), 0.0, math.inf, abs_tol=1e-14, rel_tol=1e-12,
                             tail_decay=2 * b - p)
        return ConstantValue("J", params, val, err, Method.ADAPTIVE_QUADRATURE)
    area = sphere_area(m)

    def inner(xd_arr: np.ndarray) -> np.ndarray:
        out = np.empty_like(xd_arr)
        for i, xd in enumerate(xd_arr):
            h2 = (y_d + xd) ** 2
            v, e = integrate(lambda r: r ** (m - 1) * (h2 + r * r) ** (-b), 0.0, math.inf,
                             abs_tol=0.0, rel_tol=1e-11, tail_decay=2 * b - m + 1)
            out[i] = area * xd**p * v
        return out

    val, err = integrate(inner, 0.0, math.inf, abs_tol=1e-13, rel_tol=1e-9, tail_decay=2 * b - m - p)
    return ConstantValue("J", params, val, err, Method.ADAPTIVE_QUADRATURE)


def c_p(p: float) -> ConstantValue:
    """min over tau in (0, 1/2) of (1 - tau)^p - tau^p + p tau^(p-1)."""
    if p < 2:
        raise ExcludedParameter(f"c_p requires p >= 2, got p={p!r}")

    def g(tau):
        return (1.0 - tau) ** p - tau**p + p * tau ** (p - 1.0)

    grid = np.linspace(0.0, 0.5, 2001)
    vals = g(grid)
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    value = float(min(res.fun, vals[i]))
    return ConstantValue("Cp", None, value, 1e-12, Method.MINIMIZATION, (float(p),))


def constants_table(params: FracParams) -> list[ConstantValue]:
    """Every constant defined for ``params``, in a fixed order."""
    rows: list[ConstantValue] = []
    if abs(params.ps - 1.0) > 1e-12:
        rows.append(sigma(params))
    rows.extend(eta_constants(params))
    rows.extend(gamma_constants(params))
    if params.p >= 2:
        cp = c_p(params.p)
        rows.append(ConstantValue("Cp", params, cp.value, cp.abs_error, cp.method))
    return rows


CSV_COLUMNS = ("name", "d", "p", "s", "value", "abs_error", "method")


def to_csv(rows: list[ConstantValue]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.row())
    return buf.getvalue()
