"""Monte Carlo engines for the nonlocal double integrals and the weighted norms.

All double integrals have the form ``int int K(x, y) dy dx`` over pairs in a
domain. Samples are drawn as ``x ~ q`` (outer density) and ``y = x + r w``
with ``w`` uniform on the sphere and ``r`` from a broken power law matched to
the kernel's diagonal and far-field exponents. For symmetric kernels the
estimator uses the balance heuristic over the two roles of the pair,

    I = E[ 2 K(x, y) / ((q(x) + q(y)) g(y - x)) ],

which stays unbiased as long as ``q`` is positive wherever ``u`` is nonzero:
pairs with both points outside the support contribute nothing, so no
truncation of the outer integral is needed. The radial variable is
stratified in shells; every shell draws from its own RNG stream and shells
are reduced in index order, so results do not depend on ``n_jobs``.
"""
from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from ._quadrature import tensor_quadrature
from .constants import j_kernel
from .core import Domain, DomainTag, Family, FieldSpec, FracParams, Smoothness, natural_domain
from .errors import BoundaryContact, DomainError, InvalidParameter, UnsupportedField
from .special import sphere_area


class EstimateMethod(str, enum.Enum):
    MONTE_CARLO = "MonteCarlo"
    STRATIFIED = "Stratified"
    DETERMINISTIC = "Deterministic"


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n_samples: int
    method: EstimateMethod
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", EstimateMethod(self.method))
        if (self.std_error == 0.0) != (self.method is EstimateMethod.DETERMINISTIC):
            raise InvalidParameter("std_error must vanish exactly for deterministic estimates")

    @classmethod
    def exact(cls, value: float, n_samples: int = 0, seed: int = 0) -> "Estimate":
        return cls(float(value), 0.0, int(n_samples), EstimateMethod.DETERMINISTIC, int(seed))

    def scaled(self, c: float) -> "Estimate":
        return replace(self, value=self.value * c, std_error=self.std_error * abs(c))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Estimate":
        keys = {"value", "std_error", "n_samples", "method", "seed"}
        if set(data) != keys:
            raise InvalidParameter(f"Estimate keys must be {sorted(keys)}")
        return cls(float(data["value"]), float(data["std_error"]), int(data["n_samples"]),
                   EstimateMethod(data["method"]), int(data["seed"]))

    @classmethod
    def from_json(cls, text: str) -> "Estimate":
        return cls.from_dict(json.loads(text))


def combined_std(*estimates: Estimate, weights=None) -> float:
    """Standard error of a weighted sum of independent estimates."""
    weights = [1.0] * len(estimates) if weights is None else weights
    return math.sqrt(sum((w * e.std_error) ** 2 for w, e in zip(weights, estimates)))


@dataclass(frozen=True)
class QuadConfig:
    n_samples: int = 1_000_000
    truncation_pad: float = 0.1
    diagonal_cutoff: float = 1e-4
    seed: int = 0x5EED
    n_strata: int = 32
    n_jobs: int = 1
    chunk: int = 1 << 16

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise InvalidParameter("n_samples must be >= 1")
        if not self.truncation_pad > 0:
            raise InvalidParameter("truncation_pad must be positive")
        if not 0 < self.diagonal_cutoff < 1:
            raise InvalidParameter("diagonal_cutoff must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        if self.n_strata < 1 or self.n_jobs < 1 or self.chunk < 1:
            raise InvalidParameter("n_strata, n_jobs and chunk must be positive")

    def with_seed(self, seed: int) -> "QuadConfig":
        return replace(self, seed=int(seed) % 2**64)


# -- sampling densities --------------------------------------------------------

@dataclass(frozen=True)
class BoxDensity:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random((n, self.lo.size))

    def pdf(self, x: np.ndarray) -> np.ndarray:
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=-1)
        return inside / self.volume


@dataclass(frozen=True)
class GaussDensity:
    center: np.ndarray
    std: float

    @property
    def diameter(self) -> float:
        return 8.0 * self.std * math.sqrt(self.center.size)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.center + self.std * rng.standard_normal((n, self.center.size))

    def pdf(self, x: np.ndarray) -> np.ndarray:
        d = self.center.size
        z2 = np.sum((x - self.center) ** 2, axis=-1)
        return np.exp(-0.5 * z2 / self.std**2) / (2 * math.pi * self.std**2) ** (d / 2)


@dataclass(frozen=True)
class RadialLaw:
    """Density proportional to r^near on [0, r0] and r0^(near-far) r^far beyond, cut at r_max."""

    near: float
    far: float
    r0: float
    r_max: float = math.inf

    def __post_init__(self) -> None:
        if self.near <= -1:
            raise InvalidParameter("near-diagonal exponent must exceed -1")
        if math.isinf(self.r_max) and self.far >= -1:
            raise InvalidParameter("an unbounded radial law needs far < -1")
        if self.far == -1:
            raise InvalidParameter("far exponent -1 is not supported")

    def _cdf(self, r: np.ndarray) -> np.ndarray:
        a, b, r0 = self.near, self.far, self.r0
        r = np.asarray(r, dtype=float)
        f0 = r0 ** (a + 1) / (a + 1)
        with np.errstate(over="ignore", divide="ignore"):
            tail = f0 + r0 ** (a - b) * (np.power(r, b + 1) - r0 ** (b + 1)) / (b + 1)
        return np.where(r <= r0, np.power(np.minimum(r, r0), a + 1) / (a + 1), tail)

    @property
    def total(self) -> float:
        return float(self._cdf(np.array(self.r_max)))

    def cdf(self, r) -> np.ndarray:
        return self._cdf(np.minimum(r, self.r_max)) / self.total

    def pdf(self, r: np.ndarray) -> np.ndarray:
        a, b, r0 = self.near, self.far, self.r0
        un = np.where(r <= r0, np.power(r, a), r0 ** (a - b) * np.power(r, b))
        return un / self.total

    def inverse(self, F: np.ndarray) -> np.ndarray:
        a, b, r0 = self.near, self.far, self.r0
        G = np.asarray(F, dtype=float) * self.total
        f0 = r0 ** (a + 1) / (a + 1)
        low = np.power(np.maximum(G, 0.0) * (a + 1), 1.0 / (a + 1))
        with np.errstate(invalid="ignore", divide="ignore"):
            high = np.power(r0 ** (b + 1) + (G - f0) * (b + 1) / r0 ** (a - b), 1.0 / (b + 1))
        return np.where(G <= f0, low, high)


Kernel = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]
PairMask = Callable[[np.ndarray, np.ndarray], np.ndarray]


def stratum_edges(diameter: float, law: RadialLaw, cfg: QuadConfig) -> np.ndarray:
    """0, a near-diagonal shell up to diagonal_cutoff * diameter, log-spaced shells, then r_max."""
    start = cfg.diagonal_cutoff * diameter
    if cfg.n_strata == 1:
        return np.array([0.0, law.r_max])
    if math.isinf(law.r_max):
        inner = np.geomspace(start, 1e3 * diameter, cfg.n_strata - 1) if cfg.n_strata > 2 else np.array([start])
        return np.concatenate([[0.0], inner, [math.inf]])
    stop = law.r_max
    if start >= stop:
        return np.array([0.0, stop])
    return np.concatenate([[0.0], np.geomspace(start, stop, cfg.n_strata)])


def pair_integral(
    kernel: Kernel,
    outer,
    law: RadialLaw,
    mask: PairMask | None,
    d: int,
    cfg: QuadConfig,
    symmetric: bool = True,
) -> Estimate:
    """Stratified estimate of int int kernel(x, y, h, r) over pairs accepted by ``mask``.

    ``kernel`` receives points x, y (n, d), h = y - x and r = |h|. When
    ``symmetric`` is False only the outer density of x enters the weight, so
    the kernel must vanish whenever x lies outside the support of ``outer``.
    """
    edges = stratum_edges(outer.diameter, law, cfg)
    F = law.cdf(edges)
    probs = np.diff(F)
    n_per = np.maximum(2, np.round(cfg.n_samples * probs).astype(np.int64))
    n_per[probs <= 0] = 0
    area = sphere_area(d)
    jobs = [(k, int(n_per[k]), float(F[k]), float(F[k + 1])) for k in range(probs.size)]

    def run(job) -> tuple[float, float]:
        k, n, f_lo, f_hi = job
        if n == 0:
            return 0.0, 0.0
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(k,)))
        parts = []
        for start in range(0, n, cfg.chunk):
            m = min(cfg.chunk, n - start)
            x = outer.sample(rng, m)
            omega = rng.standard_normal((m, d))
            omega /= np.linalg.norm(omega, axis=1, keepdims=True)
            r = law.inverse(f_lo + (f_hi - f_lo) * rng.random(m))
            r = np.maximum(r, np.finfo(float).tiny)
            h = omega * r[:, None]
            y = x + h
            w = np.zeros(m)
            ok = np.ones(m, dtype=bool) if mask is None else mask(x, y)
            if np.any(ok):
                xs, ys, hs, rs = x[ok], y[ok], h[ok], r[ok]
                K = kernel(xs, ys, hs, rs)
                dens = outer.pdf(xs)
                if symmetric:
                    dens = 0.5 * (dens + outer.pdf(ys))
                g = law.pdf(rs) / (area * rs ** (d - 1))
                w[ok] = np.where(K != 0.0, K / (dens * g), 0.0)
            parts.append(w)
        wk = np.concatenate(parts)
        var = float(np.var(wk, ddof=1)) if n > 1 else 0.0
        return float(np.mean(wk)), var / n

    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    value = math.fsum(p * m for p, (m, _) in zip(probs, results))
    var = math.fsum(p * p * v for p, (_, v) in zip(probs, results))
    method = EstimateMethod.STRATIFIED if probs.size > 1 else EstimateMethod.MONTE_CARLO
    std = math.sqrt(var)
    if std == 0.0:
        # a vanishing sample variance is still a statistical statement
        std = np.finfo(float).tiny
    return Estimate(max(value, 0.0), std, int(n_per.sum()), method, cfg.seed)


# -- field-level integrals ----------------------------------------------------

def _as_field(u) -> FieldSpec:
    return u.field if hasattr(u, "field") and isinstance(u.field, FieldSpec) else u


def resolve_domain(u: FieldSpec, domain) -> Domain:
    """Check that ``domain`` lies inside the natural domain of ``u``."""
    if domain is None:
        return natural_domain(u)
    if isinstance(domain, (str, DomainTag)):
        tag = DomainTag(domain)
        if tag is DomainTag.BALL:
            if u.domain_tag is not DomainTag.BALL:
                raise DomainError("a Ball domain needs explicit center and radius")
            return natural_domain(u)
        domain = Domain.half_space() if tag is DomainTag.HALF_SPACE else Domain.whole_space()
    tag = u.domain_tag
    if tag is DomainTag.WHOLE_SPACE:
        return domain
    if tag is DomainTag.HALF_SPACE:
        if domain.kind == "HalfSpace":
            return domain
        if domain.kind == "Ball" and domain.center[-1] - domain.radius >= 0:
            return domain
        raise DomainError(f"half-space field {u.name!r} cannot be integrated over {domain.kind}")
    if domain.kind == "Ball":
        nat = natural_domain(u)
        c = np.asarray(domain.center) - np.asarray(nat.center)
        if np.linalg.norm(c) + domain.radius <= nat.radius + 1e-12:
            return domain
    raise DomainError(f"field {u.name!r} lives on a ball and cannot be integrated over {domain.kind}")


def outer_density(u: FieldSpec, domain: Domain, params: FracParams, cfg: QuadConfig):
    """Outer sampling density whose support covers every point where u may be nonzero."""
    d = u.d
    if u.family is Family.GAUSSIAN:
        A = u._arrays
        std = float(A["width"]) / math.sqrt(params.p * math.pi) + cfg.truncation_pad
        return GaussDensity(A["center"].copy(), std)
    box = u.support_box()
    dlo, dhi = domain.box(d)
    if box is None:
        if not domain.bounded:
            raise UnsupportedField(f"field {u.name!r} has no compact support on an unbounded domain")
        return BoxDensity(dlo, dhi)
    lo = np.maximum(box[0] - cfg.truncation_pad, dlo)
    hi = np.minimum(box[1] + cfg.truncation_pad, dhi)
    if np.any(hi <= lo):
        return None
    return BoxDensity(lo, hi)


def domain_mask(domain: Domain, region: str | None = None) -> PairMask:
    def mask(x, y):
        ok = domain.contains(x) & domain.contains(y)
        if region == "upper":
            ok &= (x[:, -1] > 0) & (y[:, -1] > 0)
        elif region == "lower":
            ok &= (x[:, -1] < 0) & (y[:, -1] < 0)
        elif region == "mixed":
            ok &= (x[:, -1] * y[:, -1]) < 0
        elif region is not None:
            raise InvalidParameter(f"unknown region {region!r}")
        return ok
    return mask


def _check_field(u: FieldSpec, domain: Domain) -> None:
    if u.smoothness is Smoothness.AFFINE and not domain.bounded:
        raise UnsupportedField("affine fields have infinite seminorms on unbounded domains")
    if u.family is Family.CUSTOM and u.support_box() is None and not domain.bounded:
        raise UnsupportedField("custom fields need a support box on unbounded domains")


def _kernel_S(u: FieldSpec, params: FracParams) -> Kernel:
    if params.d == 1:
        # |du h|^p / |h|^(1+ps+p) = |du|^p / |h|^(1+ps); share the arithmetic so the two agree bit for bit
        return _kernel_W(u, params)
    p, expo = params.p, params.d + params.ps + params.p

    def K(x, y, h, r):
        proj = np.sum((u.evaluate(y) - u.evaluate(x)) * h, axis=-1)
        return np.abs(proj) ** p / r**expo
    return K


def _kernel_W(u: FieldSpec, params: FracParams) -> Kernel:
    p, expo = params.p, params.d + params.ps

    def K(x, y, h, r):
        diff = np.linalg.norm(u.evaluate(y) - u.evaluate(x), axis=-1)
        return diff**p / r**expo
    return K


def _kernel_remainder(u: FieldSpec, params: FracParams) -> Kernel:
    p, expo = params.p, params.d + params.ps + params.p
    beta = (1.0 - params.ps) / params.p
    half = (1.0 - params.ps) / 2.0

    def K(x, y, h, r):
        vx = u.evaluate(x) * x[:, -1:] ** beta
        vy = u.evaluate(y) * y[:, -1:] ** beta
        proj = np.sum((vx - vy) * h, axis=-1)
        return np.abs(proj) ** p / r**expo / (x[:, -1] * y[:, -1]) ** half
    return K


def _seminorm(u, domain, params: FracParams, cfg: QuadConfig | None, kind: str, region=None) -> Estimate:
    cfg = cfg or QuadConfig()
    u = _as_field(u)
    if u.d != params.d:
        raise InvalidParameter(f"field dimension {u.d} does not match d={params.d}")
    dom = resolve_domain(u, domain)
    _check_field(u, dom)
    if kind == "S" and u.family is Family.SKEW_AFFINE:
        # Sym(A) = 0, so the integrand vanishes identically
        return Estimate.exact(0.0, seed=cfg.seed)
    outer = outer_density(u, dom, params, cfg)
    if outer is None:
        return Estimate.exact(0.0, seed=cfg.seed)
    kernels = {"S": _kernel_S, "W": _kernel_W, "R": _kernel_remainder}
    far = -1.0 - params.ps
    if kind == "R":
        far += max(0.0, (params.ps - 1.0) / 2.0)
    law = RadialLaw(params.p * (1.0 - params.s) - 1.0, far, u.length_scale, dom.diameter)
    return pair_integral(kernels[kind](u, params), outer, law, domain_mask(dom, region), params.d, cfg)


def seminorm_S(u, domain, params: FracParams, cfg: QuadConfig | None = None, region: str | None = None) -> Estimate:
    """int int |(u(y) - u(x)) . (y - x)|^p / |y - x|^(d + ps + p) over domain x domain.

    ``region`` restricts pairs to the upper/lower quadrant or to the mixed pairs
    (one point on each side of x_d = 0).
    """
    return _seminorm(u, domain, params, cfg, "S", region)


def seminorm_W(u, domain, params: FracParams, cfg: QuadConfig | None = None, region: str | None = None) -> Estimate:
    """Gagliardo seminorm int int |u(y) - u(x)|^p / |y - x|^(d + ps)."""
    return _seminorm(u, domain, params, cfg, "W", region)


def remainder_integral(u, params: FracParams, cfg: QuadConfig | None = None) -> Estimate:
    """Half-space double integral of the ground-state remainder

    |(x_d^b u(x) - y_d^b u(y)) . (y - x)|^p / |y - x|^(d+ps+p) / (x_d y_d)^((1-ps)/2),
    with b = (1 - ps)/p.
    """
    u = _as_field(u)
    if u.domain_tag is not DomainTag.HALF_SPACE:
        raise DomainError("the remainder integral lives on the half-space")
    return _seminorm(u, Domain.half_space(), params, cfg, "R")


def _halfspace_box(u: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    if u.domain_tag is not DomainTag.HALF_SPACE:
        raise DomainError("a half-space field is required")
    box = u.support_box()
    if box is None:
        raise UnsupportedField("a compactly supported field is required")
    return box


def hardy_norm(u, params: FracParams, cfg: QuadConfig | None = None, panels: int = 8, order: int = 12) -> Estimate:
    """int_{x_d > 0} |u(x)|^p x_d^(-ps) dx by tensor Gauss-Legendre over the support box."""
    cfg = cfg or QuadConfig()
    u = _as_field(u)
    lo, hi = _halfspace_box(u)
    if u.boundary_gap <= 0:
        raise BoundaryContact("support touches x_d = 0; the weight x_d^(-ps) is unbounded there")
    p, ps = params.p, params.ps

    def f(x):
        return np.linalg.norm(u.evaluate(x), axis=-1) ** p * x[:, -1] ** (-ps)

    val, n = tensor_quadrature(f, lo, hi, panels=panels, order=order)
    return Estimate.exact(val, n, cfg.seed)


def weighted_norm(u, params: FracParams, weight: Callable[[np.ndarray], np.ndarray], panels: int = 8,
                  order: int = 12) -> float:
    """int_{x_d > 0} weight(u(x)) x_d^(-ps) dx for a weight acting on field values (n, d) -> n."""
    u = _as_field(u)
    lo, hi = _halfspace_box(u)
    if u.boundary_gap <= 0:
        raise BoundaryContact("support touches x_d = 0")
    val, _ = tensor_quadrature(lambda x: weight(u.evaluate(x)) * x[:, -1] ** (-params.ps), lo, hi,
                               panels=panels, order=order)
    return val


def _mixed_source(u: FieldSpec):
    """g(y) = u_d(y', -3 y_d) - u_d(y', -y_d) for y_d < 0, and the box carrying it."""
    lo, hi = _halfspace_box(u)
    glo, ghi = lo.copy(), hi.copy()
    glo[-1], ghi[-1] = -hi[-1], -lo[-1] / 3.0

    def g(y):
        a = y.copy()
        b = y.copy()
        a[:, -1] *= -3.0
        b[:, -1] *= -1.0
        return u.evaluate(a)[:, -1] - u.evaluate(b)[:, -1]
    return g, glo, ghi


def mixed_halfspace_integral(u, params: FracParams, cfg: QuadConfig | None = None) -> Estimate:
    """int_{x_d > 0} int_{y_d < 0} |(u_d(y', -3y_d) - u_d(y', -y_d)) x_d|^p / |y - x|^(d + (s+1)p) dy dx."""
    cfg = cfg or QuadConfig()
    u = _as_field(u)
    if u.d != params.d:
        raise InvalidParameter(f"field dimension {u.d} does not match d={params.d}")
    g, glo, ghi = _mixed_source(u)
    if u.family is Family.BUMP or u.family is Family.SEPARABLE_BUMP:
        if np.all(np.asarray(u.parameters["amplitude"])[-1:] == 0) and not np.any(u._arrays["linear"][-1]):
            return Estimate.exact(0.0, seed=cfg.seed)
    p, expo = params.p, params.d + (params.s + 1.0) * params.p

    def K(y, x, h, r):
        return np.abs(g(y) * x[:, -1]) ** p / r**expo

    def mask(y, x):
        return x[:, -1] > 0

    law = RadialLaw(params.p * (1.0 - params.s) - 1.0, -1.0 - params.ps, u.length_scale)
    return pair_integral(K, BoxDensity(glo, ghi), law, mask, params.d, cfg, symmetric=False)


def mixed_halfspace_via_j(u, params: FracParams, panels: int = 8, order: int = 12) -> Estimate:
    """The same integral after the x-integration: int_{y_d > 0} |u_d(y', 3y_d) - u_d(y', y_d)|^p J(y) dy."""
    u = _as_field(u)
    lo, hi = _halfspace_box(u)
    lo = lo.copy()
    lo[-1] /= 3.0
    gamma = j_kernel(params, 1.0).value

    def f(y):
        a = y.copy()
        a[:, -1] *= 3.0
        diff = u.evaluate(a)[:, -1] - u.evaluate(y)[:, -1]
        return np.abs(diff) ** params.p * gamma * y[:, -1] ** (-params.ps)

    val, n = tensor_quadrature(f, lo, hi, panels=panels, order=order)
    return Estimate.exact(val, n)
