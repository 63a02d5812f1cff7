"""Test-only fields."""
import numpy as np

from nonlocal_korn.core import custom


def smooth_touching():
    """A d = 2 field whose support reaches x_d = 0 with d_d u_d = 1 + x_1^2 there."""
    def ev(x):
        x1, xd = x[:, 0], x[:, 1]
        return np.stack([np.cos(x1) * (1 + 0.5 * xd), np.sin(x1) + (1 + x1**2) * xd * np.exp(xd)], axis=1)
    return custom(2, ev, support=([-2.0, 0.0], [2.0, 2.0]), name="touching")
