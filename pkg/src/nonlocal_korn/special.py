"""Gamma-function helpers and standard radial integrals over R^m."""
from __future__ import annotations

import math


def beta(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d: int, radius: float = 1.0) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius**d


def power_bell_integral(m: int, a: float) -> float:
    """int_{R^m} (1 + |z|^2)^(-a) dz = pi^(m/2) Gamma(a - m/2) / Gamma(a); equals 1 for m = 0."""
    if m == 0:
        return 1.0
    if a <= m / 2:
        raise ValueError("integral diverges")
    return math.pi ** (m / 2) * math.exp(math.lgamma(a - m / 2) - math.lgamma(a))


def moment_bell_integral(m: int, p: float, a: float) -> float:
    """int_{R^m} |z_1|^p (1 + |z|^2)^(-a) dz for m >= 1."""
    if m == 0:
        raise ValueError("no first coordinate in R^0")
    if a <= (m + p) / 2:
        raise ValueError("integral diverges")
    return (
        math.gamma((p + 1) / 2)
        * math.pi ** ((m - 1) / 2)
        * math.exp(math.lgamma(a - (m + p) / 2) - math.lgamma(a))
    )
