"""Generalised reflection of half-space fields across x_d = 0.

For x_d < 0 the extension U = E u is

    U_i(x', x_d) = 2 u_i(x', -x_d) - u_i(x', -3 x_d)     (i < d)
    U_d(x', x_d) = -2 u_d(x', -x_d) + 3 u_d(x', -3 x_d)

and U = u on the closed upper half-space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainTag, Family, FieldSpec, FracParams, Smoothness
from .errors import DomainError, NullSeminorm
from .quad import Estimate, QuadConfig, combined_std, seminorm_S


@dataclass(frozen=True)
class ExtendedField:
    original: FieldSpec
    field: FieldSpec = field(repr=False)

    @property
    def d(self) -> int:
        return self.original.d

    def evaluate(self, x) -> np.ndarray:
        return self.field.evaluate(x)

    __call__ = evaluate

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.field.support_box()


def _reflect(u: FieldSpec, x: np.ndarray) -> np.ndarray:
    d = u.d
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[:-1] + (d,))
    up = x[..., -1] >= 0
    out[up] = u.evaluate(x[up])
    xl = x[~up]
    a = xl.copy()
    b = xl.copy()
    a[..., -1] *= -1.0
    b[..., -1] *= -3.0
    ua = u.evaluate(a)
    ub = u.evaluate(b)
    low = 2.0 * ua - ub
    low[..., -1] = -2.0 * ua[..., -1] + 3.0 * ub[..., -1]
    out[~up] = low
    return out


def _reflect_gradient(u: FieldSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = u.d
    out = np.empty(x.shape[:-1] + (d, d))
    up = x[..., -1] >= 0
    out[up] = u.gradient(x[up])
    xl = x[~up]
    a = xl.copy()
    b = xl.copy()
    a[..., -1] *= -1.0
    b[..., -1] *= -3.0
    # chain rule: d/dx_d of u(x', -c x_d) is -c (du/dx_d)
    Ga = u.gradient(a)
    Gb = u.gradient(b)
    Ga[..., -1] *= -1.0
    Gb[..., -1] *= -3.0
    low = 2.0 * Ga - Gb
    low[..., -1, :] = -2.0 * Ga[..., -1, :] + 3.0 * Gb[..., -1, :]
    out[~up] = low
    return out


def extend(u: FieldSpec) -> ExtendedField:
    """E u as a whole-space field; evaluation wraps u lazily."""
    if u.domain_tag is not DomainTag.HALF_SPACE:
        raise DomainError("the extension operator acts on half-space fields")
    params = {"d": u.d, "length_scale": u.length_scale}
    box = u.support_box()
    if box is not None:
        lo, hi = box[0].copy(), box[1].copy()
        top = max(hi[-1], 0.0)
        lo[-1] = -top
        hi[-1] = top
        params["support_lo"] = lo.tolist()
        params["support_hi"] = hi.tolist()
    grad = (lambda x, _u=u: _reflect_gradient(_u, x)) if u.has_gradient else None
    name = f"E({u.name})" if u.name else "E(u)"
    spec = FieldSpec(Family.CUSTOM, params, DomainTag.WHOLE_SPACE, Smoothness.C1_COMPACT, name,
                     evaluator=lambda x, _u=u: _reflect(_u, x), gradient_fn=grad)
    return ExtendedField(u, spec)


def decompose_seminorm(U: ExtendedField, params: FracParams, cfg: QuadConfig | None = None,
                       ) -> tuple[Estimate, Estimate, Estimate]:
    """(I+, I-, I+-): S-integrals over upper x upper, lower x lower and lower x upper pairs.

    The whole-space seminorm equals I+ + I- + 2 I+-.
    """
    cfg = cfg or QuadConfig()
    i_plus = seminorm_S(U, "WholeSpace", params, cfg, region="upper")
    i_minus = seminorm_S(U, "WholeSpace", params, cfg, region="lower")
    both = seminorm_S(U, "WholeSpace", params, cfg, region="mixed")
    return i_plus, i_minus, both.scaled(0.5)


@dataclass(frozen=True)
class BoundednessResult:
    ratio: float
    ratio_std: float
    extended: Estimate
    original: Estimate


def boundedness(u: FieldSpec, params: FracParams, cfg: QuadConfig | None = None) -> BoundednessResult:
    """|E u|_S^p on R^d over |u|_S^p on the half-space, with a delta-method standard error."""
    params.require_ps_not_one()
    cfg = cfg or QuadConfig()
    den = seminorm_S(u, "HalfSpace", params, cfg)
    if den.value == 0.0 or den.value <= 3.0 * den.std_error:
        raise NullSeminorm(f"field {u.name!r} has vanishing S-seminorm")
    num = seminorm_S(extend(u), "WholeSpace", params, cfg)
    ratio = num.value / den.value
    rel = math.hypot(num.std_error / num.value if num.value else 0.0, den.std_error / den.value)
    return BoundednessResult(ratio, ratio * rel, num, den)


def boundedness_ratio(u: FieldSpec, params: FracParams, cfg: QuadConfig | None = None) -> float:
    return boundedness(u, params, cfg).ratio


def trace_mismatch(u: FieldSpec, n_points: int = 10_000, seed: int = 0) -> float:
    """max |U(x', 0-) - u(x', 0)| over sampled boundary points, limits taken exactly at x_d = 0."""
    U = extend(u)
    box = u.support_box()
    rng = np.random.default_rng(seed)
    d = u.d
    if box is None:
        lo, hi = -np.ones(d - 1), np.ones(d - 1)
    else:
        lo, hi = box[0][:-1], box[1][:-1]
    xp = lo + (hi - lo) * rng.random((n_points, d - 1))
    x0 = np.concatenate([xp, np.zeros((n_points, 1))], axis=1)
    # the lower formula evaluated at x_d = -0.0 is the one-sided limit from below
    below = _lower_formula(u, x0)
    return float(np.max(np.abs(below - U.evaluate(x0))))


def _lower_formula(u: FieldSpec, x: np.ndarray) -> np.ndarray:
    a = x.copy()
    b = x.copy()
    a[:, -1] *= -1.0
    b[:, -1] *= -3.0
    ua, ub = u.evaluate(a), u.evaluate(b)
    out = 2.0 * ua - ub
    out[:, -1] = -2.0 * ua[:, -1] + 3.0 * ub[:, -1]
    return out


def normal_derivative_jump(u: FieldSpec, xp, step: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """One-sided x_d-derivatives of U at (x', 0): (from below, from above), each a d-vector."""
    U = extend(u)
    xp = np.asarray(xp, dtype=float).ravel()
    pts = np.array([np.append(xp, c * step) for c in (-2.0, -1.0, 0.0, 1.0, 2.0)])
    vals = U.evaluate(pts)
    vals[2] = _lower_formula(u, pts[2:3])[0]
    below = (3.0 * vals[2] - 4.0 * vals[1] + vals[0]) / (2.0 * step)
    vals[2] = u.evaluate(pts[2:3])[0]
    above = (-3.0 * vals[2] + 4.0 * vals[3] - vals[4]) / (2.0 * step)
    return below, above


def lipschitz_ratio(u: FieldSpec, n_pairs: int = 10_000, seed: int = 0) -> float:
    """Largest |U(y) - U(x)| / |y - x| over cross-boundary pairs, divided by u's Lipschitz bound.

    Pairs straddle x_d = 0 with log-spaced offsets, where the reflection is most delicate.
    """
    U = extend(u)
    d = u.d
    rng = np.random.default_rng(seed)
    box = u.support_box()
    lo, hi = (box[0], box[1]) if box is not None else (-np.ones(d), np.ones(d))
    xp = lo[:-1] + (hi[:-1] - lo[:-1]) * rng.random((n_pairs, d - 1))
    top = max(hi[-1], 1e-3)
    t1 = top * 10.0 ** rng.uniform(-6, 0, n_pairs)
    t2 = top * 10.0 ** rng.uniform(-6, 0, n_pairs)
    jitter = 0.01 * top * rng.standard_normal((n_pairs, d - 1))
    x = np.concatenate([xp, t1[:, None]], axis=1)
    y = np.concatenate([xp + jitter, -t2[:, None]], axis=1)
    q = np.linalg.norm(U.evaluate(y) - U.evaluate(x), axis=1) / np.linalg.norm(y - x, axis=1)
    return float(np.max(q)) / u.lipschitz_bound


def decomposition_residual(U: ExtendedField, params: FracParams, cfg: QuadConfig | None = None) -> dict:
    """Compare I+ + I- + 2 I+- with the directly estimated whole-space seminorm."""
    cfg = cfg or QuadConfig()
    ip, im, ipm = decompose_seminorm(U, params, cfg)
    whole = seminorm_S(U, "WholeSpace", params, cfg.with_seed(cfg.seed + 1))
    total = ip.value + im.value + 2 * ipm.value
    err = math.hypot(combined_std(ip, im, ipm, weights=[1, 1, 2]), whole.std_error)
    return {"I_plus": ip, "I_minus": im, "I_pm": ipm, "whole": whole, "difference": total - whole.value,
            "combined_std": err}
