"""Radial cut-off functions and manufactured right-hand sides."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import PoleAtVertex, ValidationError


class Smoothness(Enum):
    C2_QUINTIC = "quintic"
    CINF_EXP = "exp"


@dataclass(frozen=True)
class CutoffProfile:
    """``eta = 1`` for r <= r0, ``eta = 0`` for r >= r1, monotone in between."""

    r0: float
    r1: float
    smoothness: Smoothness = Smoothness.C2_QUINTIC

    def __post_init__(self):
        if not 0 < self.r0 < self.r1:
            raise ValidationError(f"need 0 < r0 < r1, got r0={self.r0}, r1={self.r1}")
        object.__setattr__(self, "smoothness", Smoothness(self.smoothness))

    def _step(self, t):
        """Smoothed step S(t) rising from 0 to 1 on (0, 1), with S', S''."""
        if self.smoothness is Smoothness.C2_QUINTIC:
            s = t**3 * (10 - 15 * t + 6 * t**2)
            ds = 30 * t**2 * (1 - t) ** 2
            d2s = 60 * t * (1 - t) * (1 - 2 * t)
            return s, ds, d2s
        u = 1 - t
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            a = np.exp(-1 / t)
            b = np.exp(-1 / u)
            # exp(-1/t) underflows long before 1/t^4 overflows matters
            da = np.where(a > 0, a / t**2, 0.0)
            db = np.where(b > 0, -b / u**2, 0.0)
            d2a = np.where(a > 0, a * (1 / t**4 - 2 / t**3), 0.0)
            d2b = np.where(b > 0, b * (1 / u**4 - 2 / u**3), 0.0)
        q = a + b
        num = da * b - a * db
        s = a / q
        ds = num / q**2
        d2s = (d2a * b - a * d2b) / q**2 - 2 * num * (da + db) / q**3
        return s, ds, d2s

    def __call__(self, r):
        return self.derivatives(r)[0]

    eta = __call__

    def derivatives(self, r):
        """``(eta, eta', eta'')`` at ``r``; exactly (1, 0, 0) or (0, 0, 0) off the ramp."""
        r = np.asarray(r, dtype=float)
        width = self.r1 - self.r0
        ramp = (r > self.r0) & (r < self.r1)
        t = np.where(ramp, (r - self.r0) / width, 0.5)
        s, ds, d2s = self._step(t)
        eta = np.where(ramp, 1.0 - s, np.where(r <= self.r0, 1.0, 0.0))
        d1 = np.where(ramp, -ds / width, 0.0)
        d2 = np.where(ramp, -d2s / width**2, 0.0)
        return eta, d1, d2

    def ramp(self, r):
        r = np.asarray(r, dtype=float)
        return (r > self.r0) & (r < self.r1)


def laplace_rhs(field, profile, x, y):
    """``f = -Lap(eta u)`` for a harmonic ``field``; zero outside (r0, r1)."""
    r, theta = field.frame.to_polar(x, y)
    ramp = profile.ramp(r)
    if np.any(r == 0) and field.lam < 2:
        raise PoleAtVertex("right-hand side evaluated at the vertex")
    rr = np.where(ramp, r, 0.5 * (profile.r0 + profile.r1))
    _, d1, d2 = profile.derivatives(rr)
    u = field.eval_polar(rr, theta)
    ur, _ = field.gradient_polar(rr, theta)
    f = -(d2 + d1 / rr) * u - 2 * d1 * ur
    return np.where(ramp, f, 0.0)


def stokes_rhs(field, profile, x, y):
    """Data ``(f1, f2, g)`` for the cut-off pair ``(eta u, eta p)``.

    ``f = -Lap(eta u) + grad(eta p)`` and ``g = div(eta u) = eta' u_r``. Using
    ``-Lap u + grad p = 0`` and ``div u = 0`` only first derivatives of the
    exact field are needed:
    ``f = -(eta'' + eta'/r) u - 2 eta' d_r u + eta' p e_r``.
    """
    r, theta = field.frame.to_polar(x, y)
    if np.any(r == 0):
        raise PoleAtVertex("right-hand side evaluated at the vertex")
    ramp = profile.ramp(r)
    # evaluate the field off the ramp at a harmless radius, then mask
    rr = np.where(ramp, r, 0.5 * (profile.r0 + profile.r1))
    px, py = field.frame.to_global(rr, theta)
    _, d1, d2 = profile.derivatives(rr)
    u1, u2 = field.velocity(px, py)
    dr1, dr2 = field.radial_derivative(px, py)
    p = field.pressure(px, py)
    ur, _ = field.velocity_polar(rr, theta)
    a = theta + field.frame.angle
    er1, er2 = np.cos(a), np.sin(a)
    k = d2 + d1 / rr
    f1 = -k * u1 - 2 * d1 * dr1 + d1 * p * er1
    f2 = -k * u2 - 2 * d1 * dr2 + d1 * p * er2
    g = d1 * ur
    zero = 0.0
    return np.where(ramp, f1, zero), np.where(ramp, f2, zero), np.where(ramp, g, zero)
