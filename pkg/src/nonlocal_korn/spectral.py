"""Fourier side of the p = 2 theory: the symbol M(xi), l1, l2, kappa and Parseval values.

Fourier convention: F u(xi) = int u(x) exp(-2 pi i x.xi) dx. With it,

    |u|_S^2 = 2 int <M(xi) F u, F u> dxi,
    |u|_W^2 = 2 kappa (2 pi)^(2s) int |xi|^(2s) |F u|^2 dxi,

and M(xi) = (2 pi |xi|)^(2s) ((l1 - l2) e e^T + l2 I) with e = xi/|xi|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import integrate
from .core import DomainTag, Family, FieldSpec, FracParams
from .errors import ExcludedParameter, InvalidParameter, UnsupportedField
from .quad import Estimate, RadialLaw, QuadConfig
from .special import sphere_area


@dataclass(frozen=True)
class SpectralConstants:
    params: FracParams
    l1: float
    l2: float | None
    kappa: float
    l1_error: float
    l2_error: float
    kappa_error: float

    @property
    def l_min(self) -> float:
        return self.l1 if self.l2 is None else min(self.l1, self.l2)

    @property
    def l_max(self) -> float:
        return self.l1 if self.l2 is None else max(self.l1, self.l2)

    def identity_residual(self) -> tuple[float, float]:
        """(l1 + (d-1) l2 - kappa, combined absolute error)."""
        d = self.params.d
        l2 = 0.0 if self.l2 is None else self.l2
        resid = self.l1 + (d - 1) * l2 - self.kappa
        err = self.l1_error + (d - 1) * self.l2_error + self.kappa_error
        return resid, err

    def as_dict(self) -> dict:
        return {"d": self.params.d, "s": self.params.s, "l1": self.l1, "l2": self.l2, "kappa": self.kappa}


def oscillatory_factor(s: float, periods: int = 160) -> tuple[float, float]:
    """A_s = int_0^inf (1 - cos t) t^(-1-2s) dt.

    [0, 1] carries the t^(1-2s) endpoint behaviour; [1, 2 pi N] is integrated
    period by period; beyond R = 2 pi N the tail R^(-2s)/(2s) - int_R^inf cos(t) t^(-b) dt
    uses the integration-by-parts series b R^(-b-1) - b(b+1)(b+2) R^(-b-3), b = 1 + 2s.
    """
    b = 1.0 + 2.0 * s

    def f(t):
        return (1.0 - np.cos(t)) * t ** (-b)

    def near(t):
        # 1 - cos t = 2 sin^2(t/2) avoids cancellation for small t
        return 2.0 * np.sin(0.5 * t) ** 2 * t ** (-b)

    v0, e0 = integrate(near, 0.0, 1.0, left_exponent=1.0 - 2.0 * s, abs_tol=1e-15, rel_tol=1e-14)
    R = 2.0 * math.pi * periods
    v1, e1 = integrate(f, 1.0, 2.0 * math.pi, abs_tol=1e-15, rel_tol=1e-14)
    total, err = v0 + v1, e0 + e1
    for k in range(1, periods):
        vk, ek = integrate(f, 2.0 * math.pi * k, 2.0 * math.pi * (k + 1), abs_tol=1e-16, rel_tol=1e-14)
        total += vk
        err += ek
    cos_tail = b * R ** (-b - 1) - b * (b + 1) * (b + 2) * R ** (-b - 3)
    tail = R ** (-2.0 * s) / (2.0 * s) - cos_tail
    err += b * (b + 1) * (b + 2) * (b + 3) * (b + 4) * R ** (-b - 5)
    return total + tail, err


def _transverse_moments(d: int, s: float) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
    """Integrals over w in R^(d-1) of (1+|w|^2)^(-(d+2+2s)/2), w_1^2 (1+|w|^2)^(-(d+2+2s)/2)
    and (1+|w|^2)^(-(d+2s)/2), each with its error estimate."""
    m = d - 1
    if m == 0:
        return (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)
    a = (d + 2.0 + 2.0 * s) / 2.0
    area = sphere_area(m)
    tol = dict(abs_tol=1e-15, rel_tol=1e-13)
    r0, e0 = integrate(lambda r: r ** (m - 1) * (1 + r * r) ** (-a), 0.0, math.inf, tail_decay=2 * a - m + 1, **tol)
    r2, e2 = integrate(lambda r: r ** (m + 1) * (1 + r * r) ** (-a), 0.0, math.inf, tail_decay=2 * a - m - 1, **tol)
    rk, ek = integrate(lambda r: r ** (m - 1) * (1 + r * r) ** (1 - a), 0.0, math.inf, tail_decay=2 * a - m - 1,
                       **tol)
    # the mean of w_1^2 over the sphere of radius r is r^2 / m
    return (area * r0, area * e0), (area * r2 / m, area * e2 / m), (area * rk, area * ek)


def spectral_constants(params: FracParams) -> SpectralConstants:
    """l1, l2 and kappa(d, s).

    Integrating out the directions orthogonal to z_1 turns each d-dimensional
    integral into (transverse moment) x 2 A_s, with A_s from oscillatory_factor.
    """
    params.require_p2()
    d, s = params.d, params.s
    A, eA = oscillatory_factor(s)
    (c1, e1), (c2, e2), (ck, ek) = _transverse_moments(d, s)
    l1 = 2 * A * c1
    kappa = 2 * A * ck
    l1_err = 2 * (A * e1 + eA * c1)
    k_err = 2 * (A * ek + eA * ck)
    if d == 1:
        return SpectralConstants(params, l1, None, kappa, l1_err, 0.0, k_err)
    return SpectralConstants(params, l1, 2 * A * c2, kappa, l1_err, 2 * (A * e2 + eA * c2), k_err)


def kappa_closed_form(d: int, s: float) -> float:
    """pi^(d/2) Gamma(1-s) / (s 4^s Gamma(d/2 + s))."""
    return math.pi ** (d / 2) * math.gamma(1 - s) / (s * 4.0**s * math.gamma(d / 2 + s))


@dataclass(frozen=True)
class SymbolMatrix:
    xi: np.ndarray
    matrix: np.ndarray
    params: FracParams

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    def quadratic(self, v) -> float:
        v = np.asarray(v)
        return float(np.real(np.conj(v) @ self.matrix @ v))


def _symbol_matrix(xi: np.ndarray, sc: SpectralConstants) -> np.ndarray:
    d = xi.size
    s = sc.params.s
    r = float(np.linalg.norm(xi))
    scale = (2 * math.pi * r) ** (2 * s)
    if d == 1:
        return np.array([[scale * sc.l1]])
    e = xi / r
    return scale * ((sc.l1 - sc.l2) * np.outer(e, e) + sc.l2 * np.eye(d))


def symbol(params: FracParams, xi, constants: SpectralConstants | None = None) -> SymbolMatrix:
    """M(xi) from its closed form in l1, l2."""
    params.require_p2()
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size != params.d:
        raise InvalidParameter(f"xi must have length d={params.d}")
    if not np.any(xi):
        raise InvalidParameter("the symbol is evaluated at xi != 0")
    sc = constants or spectral_constants(params)
    return SymbolMatrix(xi.copy(), _symbol_matrix(xi, sc), params)


def symbol_monte_carlo(params: FracParams, xi, cfg: QuadConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise MC estimate (and standard errors) of int (1 - cos(2 pi xi.h)) h h^T / |h|^(d+2+2s) dh."""
    params.require_p2()
    cfg = cfg or QuadConfig(n_samples=200_000)
    xi = np.asarray(xi, dtype=float).ravel()
    d, s = params.d, params.s
    if d > 3:
        raise InvalidParameter("MC symbol diagnostic is limited to d <= 3")
    if not np.any(xi):
        raise InvalidParameter("the symbol is evaluated at xi != 0")
    law = RadialLaw(1.0 - 2.0 * s, -1.0 - 2.0 * s, 1.0 / (2 * math.pi * np.linalg.norm(xi)))
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    n = cfg.n_samples
    omega = rng.standard_normal((n, d))
    omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    r = law.inverse(rng.random(n))
    h = omega * r[:, None]
    g = law.pdf(r) / (sphere_area(d) * r ** (d - 1))
    # 1 - cos x = 2 sin^2(x/2)
    base = 2.0 * np.sin(math.pi * (h @ xi)) ** 2 / r ** (d + 2 + 2 * s) / g
    w = base[:, None, None] * h[:, :, None] * h[:, None, :]
    return w.mean(axis=0), w.std(axis=0, ddof=1) / math.sqrt(n)


# -- Parseval values for Gaussian fields -------------------------------------

def _sphere_rule(d: int, n: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights integrating polynomials of degree < n exactly over S^(d-1)."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        t = 2 * math.pi * np.arange(n) / n
        return np.stack([np.cos(t), np.sin(t)], axis=1), np.full(n, 2 * math.pi / n)
    if d == 3:
        c, wc = np.polynomial.legendre.leggauss(n)
        phi = 2 * math.pi * np.arange(n) / n
        C, P = np.meshgrid(c, phi, indexing="ij")
        S = np.sqrt(1 - C**2)
        dirs = np.stack([S * np.cos(P), S * np.sin(P), C], axis=-1).reshape(-1, 3)
        w = (wc[:, None] * np.full(n, 2 * math.pi / n)[None, :]).ravel()
        return dirs, w
    raise InvalidParameter("Parseval quadrature implemented for d <= 3")


def _gaussian_parts(u: FieldSpec, params: FracParams):
    if u.family is not Family.GAUSSIAN or u.domain_tag is not DomainTag.WHOLE_SPACE:
        raise UnsupportedField(f"field {u.name!r} has no closed-form Fourier transform")
    if u.d != params.d:
        raise InvalidParameter(f"field dimension {u.d} does not match d={params.d}")
    A = u._arrays
    return A["amplitude"], A["linear"], float(A["width"])


def _radial_moments(s: float, d: int, w: float) -> tuple[float, float]:
    """int_0^inf rho^(2s+d-1+k) exp(-2 pi w^2 rho^2) drho for k = 0, 2, truncated where
    the Gaussian factor drops below 1e-16."""
    c = 2 * math.pi * w * w
    rho_max = math.sqrt(math.log(1e16) / c)
    out = []
    for k in (0, 2):
        e = 2 * s + d - 1 + k
        v, _ = integrate(lambda r: r**e * np.exp(-c * r * r), 0.0, rho_max, left_exponent=e,
                         abs_tol=0.0, rel_tol=1e-14)
        out.append(v)
    return out[0], out[1]


def parseval_seminorm_S(u: FieldSpec, params: FracParams, constants: SpectralConstants | None = None) -> Estimate:
    """2 int <M(xi) F u(xi), F u(xi)> dxi for a Gaussian field, by polar quadrature."""
    params.require_p2()
    a, B, w = _gaussian_parts(u, params)
    sc = constants or spectral_constants(params)
    d, s = params.d, params.s
    dirs, wts = _sphere_rule(d)
    R0, R2 = _radial_moments(s, d, w)
    total = 0.0
    for e, wt in zip(dirs, wts):
        Mt = _symbol_matrix(e, sc) / (2 * math.pi) ** (2 * s)
        Be = B @ e
        total += wt * (a @ Mt @ a * R0 + w**4 * (Be @ Mt @ Be) * R2)
    value = 2 * (2 * math.pi) ** (2 * s) * w ** (2 * d) * total
    return Estimate.exact(value)


def parseval_seminorm_W(u: FieldSpec, params: FracParams, constants: SpectralConstants | None = None) -> Estimate:
    """2 kappa (2 pi)^(2s) int |xi|^(2s) |F u(xi)|^2 dxi for a Gaussian field."""
    params.require_p2()
    a, B, w = _gaussian_parts(u, params)
    sc = constants or spectral_constants(params)
    d, s = params.d, params.s
    dirs, wts = _sphere_rule(d)
    R0, R2 = _radial_moments(s, d, w)
    total = 0.0
    for e, wt in zip(dirs, wts):
        Be = B @ e
        total += wt * (a @ a * R0 + w**4 * (Be @ Be) * R2)
    value = 2 * sc.kappa * (2 * math.pi) ** (2 * s) * w ** (2 * d) * total
    return Estimate.exact(value)


def korn_bounds(params: FracParams, constants: SpectralConstants | None = None) -> tuple[float, float]:
    """Band [kappa / max(l1, l2), kappa / min(l1, l2)] for |u|_W^2 / |u|_S^2 on R^d."""
    if params.p != 2.0:
        raise ExcludedParameter(f"the spectral Korn band needs p = 2, got p={params.p:g}")
    sc = constants or spectral_constants(params)
    if params.d == 1:
        return 1.0, 1.0
    return sc.kappa / sc.l_max, sc.kappa / sc.l_min
