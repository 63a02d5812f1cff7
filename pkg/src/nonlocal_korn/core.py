"""Parameters, vector fields and the analytic test-field library."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

import numpy as np

from .errors import DegeneratePair, DomainError, ExcludedParameter, InvalidParameter, UnsupportedField

_PS_TOL = 1e-12


@dataclass(frozen=True)
class FracParams:
    """The triple (d, p, s); ``alpha = (p*s - 1)/p`` is the ground-state exponent."""

    d: int
    p: float
    s: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParameter(f"d must be a positive integer, got {self.d!r}")
        if not (1.0 <= self.p < math.inf):
            raise InvalidParameter(f"p must lie in [1, inf), got {self.p!r}")
        if not (0.0 < self.s < 1.0):
            raise InvalidParameter(f"s must lie in (0, 1), got {self.s!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "s", float(self.s))

    @property
    def alpha(self) -> float:
        return (self.p * self.s - 1.0) / self.p

    @property
    def ps(self) -> float:
        return self.p * self.s

    def require_ps_not_one(self) -> "FracParams":
        if abs(self.p * self.s - 1.0) <= _PS_TOL:
            raise ExcludedParameter(f"ps = 1 excluded (p={self.p:g}, s={self.s:g})")
        return self

    def require_p2(self) -> "FracParams":
        if self.p != 2.0:
            raise ExcludedParameter(f"p = 2 required, got p={self.p:g}")
        return self

    def require_korn(self) -> "FracParams":
        self.require_p2()
        if abs(self.s - 0.5) <= _PS_TOL:
            raise ExcludedParameter("s = 1/2 excluded for the half-space Korn inequality")
        return self

    def as_dict(self) -> dict[str, float]:
        return {"d": self.d, "p": self.p, "s": self.s}


class Family(str, enum.Enum):
    BUMP = "Bump"
    SEPARABLE_BUMP = "SeparableBump"
    GAUSSIAN = "Gaussian"
    SKEW_AFFINE = "SkewAffine"
    CUSTOM = "Custom"


class DomainTag(str, enum.Enum):
    HALF_SPACE = "HalfSpace"
    WHOLE_SPACE = "WholeSpace"
    BALL = "Ball"


class Smoothness(str, enum.Enum):
    C1_COMPACT = "C1_compact"
    SCHWARTZ = "Schwartz"
    AFFINE = "Affine"


_DEFAULT_SMOOTHNESS = {
    Family.BUMP: Smoothness.C1_COMPACT,
    Family.SEPARABLE_BUMP: Smoothness.C1_COMPACT,
    Family.GAUSSIAN: Smoothness.SCHWARTZ,
    Family.SKEW_AFFINE: Smoothness.AFFINE,
}


@dataclass(frozen=True)
class Domain:
    """Integration domain: the upper/lower half-space, the whole space, or a ball."""

    kind: str  # "HalfSpace", "LowerHalfSpace", "WholeSpace", "Ball"
    center: tuple[float, ...] = ()
    radius: float = 0.0

    @classmethod
    def half_space(cls) -> "Domain":
        return cls("HalfSpace")

    @classmethod
    def lower_half_space(cls) -> "Domain":
        return cls("LowerHalfSpace")

    @classmethod
    def whole_space(cls) -> "Domain":
        return cls("WholeSpace")

    @classmethod
    def ball(cls, center, radius: float) -> "Domain":
        if radius <= 0:
            raise InvalidParameter("ball radius must be positive")
        return cls("Ball", tuple(float(c) for c in center), float(radius))

    @property
    def bounded(self) -> bool:
        return self.kind == "Ball"

    def contains(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "WholeSpace":
            return np.ones(x.shape[:-1], dtype=bool)
        if self.kind == "HalfSpace":
            return x[..., -1] > 0
        if self.kind == "LowerHalfSpace":
            return x[..., -1] < 0
        c = np.asarray(self.center)
        return np.sum((x - c) ** 2, axis=-1) < self.radius**2

    def box(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box, with infinite sides where the domain is unbounded."""
        lo = np.full(d, -np.inf)
        hi = np.full(d, np.inf)
        if self.kind == "HalfSpace":
            lo[-1] = 0.0
        elif self.kind == "LowerHalfSpace":
            hi[-1] = 0.0
        elif self.kind == "Ball":
            c = np.asarray(self.center)
            lo, hi = c - self.radius, c + self.radius
        return lo, hi

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius if self.kind == "Ball" else math.inf


def _bump_profile(rho2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """phi = exp(1 - 1/(1 - rho^2)) on rho < 1 and dphi/d(rho^2)."""
    inside = rho2 < 1.0
    gap = np.where(inside, 1.0 - rho2, 1.0)
    phi = np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)
    dphi = np.where(inside, -phi / gap**2, 0.0)
    return phi, dphi


def _as_matrix(value, d: int) -> np.ndarray:
    if value is None:
        return np.zeros((d, d))
    return np.asarray(value, dtype=float).reshape(d, d)


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """Immutable closed-form vector field u: R^d -> R^d.

    ``parameters`` holds JSON-native values only (floats and nested lists), so
    the spec round-trips through :meth:`to_json` losslessly. Custom fields carry
    Python callables instead and cannot be serialised.
    """

    family: Family
    parameters: dict[str, Any]
    domain_tag: DomainTag
    smoothness: Smoothness
    name: str = ""
    evaluator: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    gradient_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (
            self.family == other.family
            and self.domain_tag == other.domain_tag
            and self.smoothness == other.smoothness
            and self.name == other.name
            and json.dumps(self.parameters, sort_keys=True) == json.dumps(other.parameters, sort_keys=True)
            and self.evaluator is other.evaluator
            and self.gradient_fn is other.gradient_fn
        )

    def __hash__(self) -> int:
        return hash((self.family, self.domain_tag, self.name, json.dumps(self.parameters, sort_keys=True)))

    @property
    def d(self) -> int:
        return int(self.parameters["d"])

    # -- cached numeric views -------------------------------------------------
    @cached_property
    def _arrays(self) -> dict[str, np.ndarray]:
        d = self.d
        P = self.parameters
        fam = self.family
        if fam in (Family.BUMP, Family.SEPARABLE_BUMP):
            return {
                "center": np.asarray(P["center"], float),
                "radii": np.asarray(P["radii"], float),
                "amplitude": np.asarray(P["amplitude"], float),
                "linear": _as_matrix(P.get("linear"), d),
            }
        if fam is Family.GAUSSIAN:
            return {
                "center": np.asarray(P["center"], float),
                "width": np.asarray(float(P["width"])),
                "amplitude": np.asarray(P["amplitude"], float),
                "linear": _as_matrix(P.get("linear"), d),
            }
        if fam is Family.SKEW_AFFINE:
            return {"matrix": _as_matrix(P["matrix"], d), "offset": np.asarray(P["offset"], float)}
        return {}

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, x) -> np.ndarray:
        """u(x) for points of shape (..., d); returns shape (..., d)."""
        x = np.asarray(x, dtype=float)
        fam = self.family
        A = self._arrays
        if fam is Family.BUMP:
            z = x - A["center"]
            rho2 = np.sum((z / A["radii"]) ** 2, axis=-1)
            phi, _ = _bump_profile(rho2)
            vec = A["amplitude"] + z @ A["linear"].T
            return vec * phi[..., None]
        if fam is Family.SEPARABLE_BUMP:
            g, h = self._separable_factors(x)
            return A["amplitude"] * (g * h)[..., None]
        if fam is Family.GAUSSIAN:
            z = x - A["center"]
            env = np.exp(-math.pi * np.sum(z**2, axis=-1) / float(A["width"]) ** 2)
            vec = A["amplitude"] + z @ A["linear"].T
            return vec * env[..., None]
        if fam is Family.SKEW_AFFINE:
            return x @ A["matrix"].T + A["offset"]
        if self.evaluator is None:
            raise UnsupportedField("custom field has no evaluator")
        return np.asarray(self.evaluator(x), dtype=float)

    __call__ = evaluate

    def _separable_factors(self, x: np.ndarray):
        A = self._arrays
        z = x - A["center"]
        r = A["radii"]
        if self.d > 1:
            g, _ = _bump_profile(np.sum((z[..., :-1] / r[:-1]) ** 2, axis=-1))
        else:
            g = np.ones(x.shape[:-1])
        h, _ = _bump_profile((z[..., -1] / r[-1]) ** 2)
        return g, h

    @property
    def has_gradient(self) -> bool:
        return self.family is not Family.CUSTOM or self.gradient_fn is not None

    def gradient(self, x) -> np.ndarray:
        """Jacobian G[..., i, j] = du_i/dx_j."""
        x = np.asarray(x, dtype=float)
        fam = self.family
        A = self._arrays
        d = self.d
        if fam is Family.BUMP:
            z = x - A["center"]
            r2 = A["radii"] ** 2
            rho2 = np.sum(z**2 / r2, axis=-1)
            phi, dphi = _bump_profile(rho2)
            grad_phi = dphi[..., None] * 2.0 * z / r2
            vec = A["amplitude"] + z @ A["linear"].T
            return A["linear"] * phi[..., None, None] + vec[..., :, None] * grad_phi[..., None, :]
        if fam is Family.SEPARABLE_BUMP:
            z = x - A["center"]
            r2 = A["radii"] ** 2
            grad_s = np.zeros(x.shape)
            if d > 1:
                g, dg = _bump_profile(np.sum(z[..., :-1] ** 2 / r2[:-1], axis=-1))
                grad_s[..., :-1] = (dg[..., None] * 2.0 * z[..., :-1] / r2[:-1])
            else:
                g = np.ones(x.shape[:-1])
                dg = np.zeros(x.shape[:-1])
            h, dh = _bump_profile(z[..., -1] ** 2 / r2[-1])
            grad_s[..., :-1] *= h[..., None]
            grad_s[..., -1] = g * dh * 2.0 * z[..., -1] / r2[-1]
            return A["amplitude"][:, None] * grad_s[..., None, :]
        if fam is Family.GAUSSIAN:
            z = x - A["center"]
            w2 = float(A["width"]) ** 2
            env = np.exp(-math.pi * np.sum(z**2, axis=-1) / w2)
            vec = A["amplitude"] + z @ A["linear"].T
            grad_env = (-2.0 * math.pi / w2) * z * env[..., None]
            return A["linear"] * env[..., None, None] + vec[..., :, None] * grad_env[..., None, :]
        if fam is Family.SKEW_AFFINE:
            return np.broadcast_to(A["matrix"], x.shape[:-1] + (d, d)).copy()
        if self.gradient_fn is None:
            raise UnsupportedField("custom field was supplied without a gradient")
        return np.asarray(self.gradient_fn(x), dtype=float)

    def fourier(self, xi) -> np.ndarray:
        """Fourier transform with the convention F u(xi) = int u(x) exp(-2 pi i x.xi) dx."""
        if self.family is not Family.GAUSSIAN:
            raise UnsupportedField(f"{self.family.value} field has no closed-form Fourier transform")
        xi = np.asarray(xi, dtype=float)
        A = self._arrays
        w = float(A["width"])
        base = w**self.d * np.exp(-math.pi * w**2 * np.sum(xi**2, axis=-1))
        phase = np.exp(-2j * math.pi * (xi @ A["center"]))
        vec = A["amplitude"] - 1j * w**2 * (xi @ A["linear"].T)
        return vec * (base * phase)[..., None]

    # -- support metadata -----------------------------------------------------
    @property
    def compact(self) -> bool:
        return self.smoothness is Smoothness.C1_COMPACT

    def support_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Axis-aligned box containing the support, or None when unbounded."""
        fam = self.family
        if fam in (Family.BUMP, Family.SEPARABLE_BUMP):
            c, r = self._arrays["center"], self._arrays["radii"]
            return c - r, c + r
        if fam is Family.CUSTOM and "support_lo" in self.parameters:
            return (np.asarray(self.parameters["support_lo"], float), np.asarray(self.parameters["support_hi"], float))
        return None

    @property
    def boundary_gap(self) -> float:
        """Distance from the support to the hyperplane x_d = 0 (inf if no support box)."""
        box = self.support_box()
        if box is None:
            return math.inf
        lo, hi = box
        if lo[-1] >= 0:
            return float(lo[-1])
        if hi[-1] <= 0:
            return float(-hi[-1])
        return 0.0

    @property
    def length_scale(self) -> float:
        """Characteristic length used to place the radial importance break point."""
        fam = self.family
        if fam in (Family.BUMP, Family.SEPARABLE_BUMP):
            return float(np.min(self._arrays["radii"]))
        if fam is Family.GAUSSIAN:
            return float(self._arrays["width"])
        if "length_scale" in self.parameters:
            return float(self.parameters["length_scale"])
        box = self.support_box()
        if box is not None:
            return float(np.min(box[1] - box[0])) / 2
        return 1.0

    @cached_property
    def lipschitz_bound(self) -> float:
        """Max of the Frobenius norm of the Jacobian over a dense sample of the support."""
        if self.family is Family.SKEW_AFFINE:
            return float(np.linalg.norm(self._arrays["matrix"], 2))
        if self.family is Family.GAUSSIAN:
            c = self._arrays["center"]
            ext = 4.0 * float(self._arrays["width"])
            lo, hi = c - ext, c + ext
        else:
            box = self.support_box()
            if box is None or not self.has_gradient:
                raise UnsupportedField("Lipschitz bound needs a support box and a gradient")
            lo, hi = box
        per_axis = max(3, int(round(60_000 ** (1.0 / self.d))))
        axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(self.d)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        rng = np.random.default_rng(12345)
        pts = np.concatenate([pts, lo + (hi - lo) * rng.random((20_000, self.d))])
        G = self.gradient(pts)
        return float(np.max(np.sqrt(np.sum(G**2, axis=(-2, -1)))))

    def sup_norm(self) -> float:
        if self.family is Family.BUMP:
            # |a + B z| on the support ellipsoid is at most |a| + ||B|| max(r)
            A = self._arrays
            return float(np.linalg.norm(A["amplitude"]) + np.linalg.norm(A["linear"], 2) * np.max(A["radii"]))
        if self.family is Family.SEPARABLE_BUMP:
            return float(np.linalg.norm(self._arrays["amplitude"]))
        raise UnsupportedField("sup norm available for bump families only")

    # -- serialisation --------------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        if self.family is Family.CUSTOM:
            raise UnsupportedField("custom fields are programmatic and cannot be serialised")
        out = {
            "family": self.family.value,
            "parameters": self.parameters,
            "domain_tag": self.domain_tag.value,
        }
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FieldSpec":
        unknown = set(data) - {"family", "parameters", "domain_tag", "name", "smoothness"}
        if unknown:
            raise InvalidParameter(f"unknown field keys: {sorted(unknown)}")
        family = Family(data["family"])
        if family is Family.CUSTOM:
            raise UnsupportedField("custom fields cannot be deserialised")
        params = dict(data["parameters"])
        if "d" not in params:
            ref = params.get("center", params.get("offset"))
            params["d"] = len(ref)
        spec = cls(
            family=family,
            parameters=params,
            domain_tag=DomainTag(data["domain_tag"]),
            smoothness=Smoothness(data.get("smoothness", _DEFAULT_SMOOTHNESS[family].value)),
            name=data.get("name", ""),
        )
        _validate(spec)
        return spec

    @classmethod
    def from_json(cls, text: str) -> "FieldSpec":
        return cls.from_dict(json.loads(text))


def _floats(v) -> list:
    return np.asarray(v, dtype=float).tolist()


def _validate(spec: FieldSpec) -> None:
    d = spec.d
    P = spec.parameters
    fam = spec.family
    if fam in (Family.BUMP, Family.SEPARABLE_BUMP, Family.GAUSSIAN):
        for key in ("center", "amplitude"):
            if len(P[key]) != d:
                raise InvalidParameter(f"{key} must have length d={d}")
    if fam in (Family.BUMP, Family.SEPARABLE_BUMP):
        if len(P["radii"]) != d or min(P["radii"]) <= 0:
            raise InvalidParameter("radii must be d positive numbers")
        if spec.domain_tag is DomainTag.HALF_SPACE and spec.boundary_gap <= 0:
            raise DomainError("half-space field support must stay at positive distance from x_d = 0")
    if fam is Family.GAUSSIAN and float(P["width"]) <= 0:
        raise InvalidParameter("width must be positive")
    if fam is Family.SKEW_AFFINE:
        A = np.asarray(P["matrix"], float).reshape(d, d)
        if not np.array_equal(A, -A.T):
            raise InvalidParameter("SkewAffine matrix must satisfy A = -A^T exactly")


def bump(center, radii, amplitude, linear=None, domain_tag=DomainTag.HALF_SPACE, name="") -> FieldSpec:
    """u(x) = (a + B (x - c)) phi(|(x - c)/r|) with phi the standard mollifier profile."""
    d = len(center)
    params = {"d": d, "center": _floats(center), "radii": _floats(radii), "amplitude": _floats(amplitude)}
    if linear is not None:
        params["linear"] = _floats(np.asarray(linear, float).reshape(d, d))
    spec = FieldSpec(Family.BUMP, params, DomainTag(domain_tag), Smoothness.C1_COMPACT, name)
    _validate(spec)
    return spec


def separable_bump(center, radii, amplitude, name="") -> FieldSpec:
    """u(x) = a g(x') h(x_d) with g, h bump profiles in x' and x_d."""
    d = len(center)
    params = {"d": d, "center": _floats(center), "radii": _floats(radii), "amplitude": _floats(amplitude)}
    spec = FieldSpec(Family.SEPARABLE_BUMP, params, DomainTag.HALF_SPACE, Smoothness.C1_COMPACT, name)
    _validate(spec)
    return spec


def gaussian(center, width, amplitude, linear=None, name="") -> FieldSpec:
    """u(x) = (a + B (x - c)) exp(-pi |x - c|^2 / w^2) on the whole space."""
    d = len(center)
    params = {"d": d, "center": _floats(center), "width": float(width), "amplitude": _floats(amplitude)}
    if linear is not None:
        params["linear"] = _floats(np.asarray(linear, float).reshape(d, d))
    spec = FieldSpec(Family.GAUSSIAN, params, DomainTag.WHOLE_SPACE, Smoothness.SCHWARTZ, name)
    _validate(spec)
    return spec


def skew_affine(matrix, offset, ball_center=None, ball_radius=1.0, name="") -> FieldSpec:
    d = len(offset)
    params = {
        "d": d,
        "matrix": _floats(np.asarray(matrix, float).reshape(d, d)),
        "offset": _floats(offset),
        "ball_center": _floats(np.zeros(d) if ball_center is None else ball_center),
        "ball_radius": float(ball_radius),
    }
    spec = FieldSpec(Family.SKEW_AFFINE, params, DomainTag.BALL, Smoothness.AFFINE, name)
    _validate(spec)
    return spec


def custom(d: int, evaluator, gradient=None, support=None, domain_tag=DomainTag.HALF_SPACE,
           smoothness=Smoothness.C1_COMPACT, name="custom") -> FieldSpec:
    params: dict[str, Any] = {"d": int(d)}
    if support is not None:
        params["support_lo"] = _floats(support[0])
        params["support_hi"] = _floats(support[1])
    return FieldSpec(Family.CUSTOM, params, DomainTag(domain_tag), Smoothness(smoothness), name,
                     evaluator=evaluator, gradient_fn=gradient)


def natural_domain(u: FieldSpec) -> Domain:
    if u.domain_tag is DomainTag.HALF_SPACE:
        return Domain.half_space()
    if u.domain_tag is DomainTag.WHOLE_SPACE:
        return Domain.whole_space()
    P = u.parameters
    return Domain.ball(P.get("ball_center", [0.0] * u.d), P.get("ball_radius", 1.0))


# -- operations ---------------------------------------------------------------

def projected_difference_batch(u: FieldSpec, x, y) -> np.ndarray:
    """(u(y) - u(x)) . (y - x) / |y - x|^2 for arrays of point pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    h = y - x
    r2 = np.sum(h**2, axis=-1)
    if np.any(r2 == 0):
        raise DegeneratePair("projected difference undefined for coincident points")
    if u.family is Family.SKEW_AFFINE:
        A = u._arrays["matrix"]
        sym = 0.5 * (A + A.T)  # exactly zero for an exactly skew matrix
        return np.einsum("...i,ij,...j->...", h, sym, h) / r2
    return np.sum((u.evaluate(y) - u.evaluate(x)) * h, axis=-1) / r2


def projected_difference(u: FieldSpec, x, y) -> float:
    return float(projected_difference_batch(u, np.atleast_2d(x), np.atleast_2d(y))[0])


def scale_field(u: FieldSpec, lam: float) -> FieldSpec:
    """F_lam(u)(x) = (u'(x', lam x_d) / lam, u_d(x', lam x_d))."""
    if not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam!r}")
    if u.domain_tag is not DomainTag.HALF_SPACE:
        raise DomainError("scale_field acts on half-space fields")
    d = u.d
    lam = float(lam)
    D = np.ones(d)
    D[:-1] = 1.0 / lam
    S = np.ones(d)
    S[-1] = lam
    name = f"{u.name}@scale{lam:g}" if u.name else ""
    if u.family in (Family.BUMP, Family.SEPARABLE_BUMP):
        A = u._arrays
        params = dict(u.parameters)
        params["center"] = _floats(A["center"] / S)
        params["radii"] = _floats(A["radii"] / S)
        params["amplitude"] = _floats(D * A["amplitude"])
        if "linear" in params:
            params["linear"] = _floats(D[:, None] * A["linear"] * S[None, :])
        return FieldSpec(u.family, params, u.domain_tag, u.smoothness, name)
    if u.family is Family.CUSTOM:
        def ev(x, _u=u):
            xs = np.array(x, dtype=float, copy=True)
            xs[..., -1] *= lam
            return _u.evaluate(xs) * D

        grad = None
        if u.gradient_fn is not None:
            def grad(x, _u=u):
                xs = np.array(x, dtype=float, copy=True)
                xs[..., -1] *= lam
                return D[:, None] * _u.gradient(xs) * S[None, :]

        params = dict(u.parameters)
        if "support_lo" in params:
            params["support_lo"] = _floats(np.asarray(params["support_lo"]) / S)
            params["support_hi"] = _floats(np.asarray(params["support_hi"]) / S)
        return FieldSpec(Family.CUSTOM, params, u.domain_tag, u.smoothness, name, evaluator=ev, gradient_fn=grad)
    raise UnsupportedField(f"cannot scale a {u.family.value} field")


def field_library(d: int) -> list[FieldSpec]:
    """Deterministic canonical suite of test fields in dimension d."""
    if d < 1:
        raise InvalidParameter("d must be positive")
    e = np.eye(d)
    tangential = np.ones(d)
    tangential[-1] = 0.0

    def pt(tail: float, head: float = 0.0) -> list[float]:
        v = np.full(d, head)
        v[-1] = tail
        return v.tolist()

    def radii(tail: float, head: float) -> list[float]:
        v = np.full(d, head)
        v[-1] = tail
        return v.tolist()

    # mixed symmetric/skew linear part; shear only when d >= 2
    lin = np.zeros((d, d))
    if d >= 2:
        lin[0, -1], lin[-1, 0] = 0.8, -0.3
    lin[-1, -1] = 0.5

    amp_mixed = np.linspace(1.0, 0.4, d)
    amp_normal = 0.3 * tangential + e[-1]
    amp_alt = np.array([(-1.0) ** i for i in range(d)], float)
    amp_alt[-1] = 0.5

    suite = [
        bump(pt(2.0, 0.1), radii(0.8, 0.8), amp_mixed, name="bump_far"),
        bump(pt(1.0, -0.2), radii(0.6, 0.6), amp_normal, linear=lin, name="bump_mid"),
        bump(pt(0.7), radii(0.5, 1.2), amp_alt, name="bump_ellipse"),
        bump(pt(0.06), radii(0.05, 0.3), amp_mixed[::-1].copy(), name="bump_near_boundary"),
        separable_bump(pt(1.5), radii(0.7, 1.0), e[0], name="separable_tangential"),
        separable_bump(pt(0.9, 0.2), radii(0.6, 0.5), amp_normal - 1.3 * e[-1], name="separable_normal"),
        gaussian(np.zeros(d), 1.0, e[0], name="gauss_iso"),
        gaussian(np.linspace(0.3, -0.2, d), 0.8, np.linspace(0.5, 1.0, d), linear=lin + 0.4 * np.eye(d),
                 name="gauss_aniso"),
        bump(np.zeros(d), radii(0.6, 1.0), amp_alt, linear=lin, domain_tag=DomainTag.WHOLE_SPACE,
             name="bump_whole_aniso"),
    ]
    A = np.zeros((d, d))
    if d >= 2:
        A[0, 1], A[1, 0] = 0.7, -0.7
    if d >= 3:
        A[0, 2], A[2, 0] = -0.25, 0.25
        A[1, 2], A[2, 1] = 1.1, -1.1
    suite.append(skew_affine(A, np.linspace(0.5, -0.5, d), name="skew_affine"))
    return suite


def half_space_fields(d: int) -> list[FieldSpec]:
    return [u for u in field_library(d) if u.domain_tag is DomainTag.HALF_SPACE]


def whole_space_fields(d: int) -> list[FieldSpec]:
    return [u for u in field_library(d) if u.domain_tag is DomainTag.WHOLE_SPACE]


def library_field(d: int, name: str) -> FieldSpec:
    for u in field_library(d):
        if u.name == name:
            return u
    raise InvalidParameter(f"no library field named {name!r}")
