"""Green-formula defects that separate weak, very weak and limit-case solutions.

For a harmonic corner function ``u`` and the test function
``v = eta(r) r^xi sin(xi theta)`` (``xi = pi/omega``) the defect

    D(u) = (u, Lap v) - <u, d_n v>_Gamma

equals the limit of the arc integral over ``r = eps``. It vanishes for
``lam > -xi`` and equals ``-pi`` for ``u = r^-xi sin(xi theta)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .cutoff import CutoffProfile
from .errors import (
    EpsOutsidePlateau,
    NonConvergent,
    NotInL2,
    SupportTouchesBoundary,
    ValidationError,
)
from .laplace import CornerFrame


@dataclass(frozen=True)
class TestFunctionV:
    """``v = eta(r) r^xi sin(xi theta)``, vanishing on both edges when xi*omega = pi."""

    __test__ = False

    xi: float
    profile: CutoffProfile
    frame: CornerFrame = field(default_factory=CornerFrame)

    def __post_init__(self):
        if not self.xi > 0:
            raise ValidationError(f"xi must be positive, got {self.xi}")

    def value(self, r, theta):
        eta = self.profile(r)
        return eta * r**self.xi * np.sin(self.xi * theta)

    def dr(self, r, theta):
        eta, d1, _ = self.profile.derivatives(r)
        xi = self.xi
        s = np.sin(xi * theta)
        return (d1 * r**xi + eta * xi * r ** (xi - 1)) * s

    def dtheta(self, r, theta):
        eta = self.profile(r)
        return eta * self.xi * r**self.xi * np.cos(self.xi * theta)

    def laplacian(self, r, theta):
        """``Lap v = (eta'' + eta'/r) w + 2 eta' d_r w`` with harmonic ``w``."""
        _, d1, d2 = self.profile.derivatives(r)
        xi = self.xi
        s = np.sin(xi * theta)
        w = r**xi * s
        wr = xi * r ** (xi - 1) * s
        return (d2 + d1 / r) * w + 2 * d1 * wr


def _check_lambda(u):
    if u.lam <= -1:
        raise NotInL2(f"u is not in L^2 for lam = {u.lam} <= -1")


def arc_integral(u, v, omega, eps):
    """``int_0^omega (u d_n v - v d_n u) eps dtheta`` on ``r = eps``, ``d_n = -d_r``."""

    def integrand(theta):
        ur, _ = u.gradient_polar(eps, theta)
        return (-u.eval_polar(eps, theta) * v.dr(eps, theta) + v.value(eps, theta) * ur) * eps

    value, _ = integrate.quad(integrand, 0.0, float(omega), epsabs=1e-15, epsrel=1e-13, limit=200)
    return value


def default_eps_sequence(profile, count=12):
    return [profile.r0 * 2.0**-k for k in range(1, count + 1)]


def extrapolate_to_zero(values):
    """Limit of ``A(eps) = L + C eps^p`` (p > 0) from a geometric eps sequence.

    Constant sequences are returned as is; otherwise Aitken's delta-squared
    on the last three terms. Raises :class:`NonConvergent` when the
    differences do not shrink.
    """
    a = np.asarray(values, dtype=float)
    last = a[-1]
    if np.max(np.abs(a - last)) <= 1e-12 * (1 + abs(last)):
        return float(last)
    d1 = a[-2] - a[-3]
    d2 = a[-1] - a[-2]
    if d1 == 0 or abs(d2 / d1) >= 1:
        raise NonConvergent("arc integrals do not converge as eps -> 0")
    return float(a[-1] - d2 * d2 / (d2 - d1))


def arc_limit_defect(u, v, omega, eps_sequence=None):
    """Limit of the arc integral as eps -> 0; see :func:`arc_integral`."""
    _check_lambda(u)
    eps = list(eps_sequence) if eps_sequence is not None else default_eps_sequence(v.profile)
    if len(eps) < 3:
        raise ValidationError("need at least three eps values")
    if max(eps) >= v.profile.r0:
        raise EpsOutsidePlateau(f"all eps must lie below r0 = {v.profile.r0}")
    values = [arc_integral(u, v, omega, e) for e in eps]
    return extrapolate_to_zero(values)


def _gauss(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _edge_integrand(u, v, omega, r):
    """``u d_n v`` summed over both edges; outward normals as in LaplaceField."""
    w = float(omega)
    left = u.eval_polar(r, 0.0) * (-v.dtheta(r, 0.0) / r)
    right = u.eval_polar(r, w) * (v.dtheta(r, w) / r)
    return left + right


def edge_pairing(u, v, omega, order=24, max_annuli=40):
    """``<u, d_n v>`` over the two corner edges up to ``r1``.

    Dyadic intervals toward the vertex; on the plateau the integrand is a
    pure power of r, so once successive contributions shrink by a steady
    factor the remaining tail is summed as a geometric series.
    """
    profile = v.profile
    x, w = _gauss(order, profile.r0, profile.r1)
    total = float(np.dot(w, _edge_integrand(u, v, omega, x)))
    parts = []
    hi = profile.r0
    running = 0.0
    for _ in range(max_annuli):
        x, w = _gauss(order, 0.5 * hi, hi)
        part = float(np.dot(w, _edge_integrand(u, v, omega, x)))
        parts.append(part)
        running += part
        hi *= 0.5
        if abs(part) <= 1e-14 * max(1.0, abs(running) + abs(total)):
            return total + running
        if len(parts) >= 4:
            q = np.array(parts[-3:]) / np.array(parts[-4:-1])
            if np.all(np.abs(q - q[-1]) <= 1e-9) and 0 < q[-1] < 1:
                return total + running + part * q[-1] / (1 - q[-1])
    raise NonConvergent("edge contributions near the vertex do not decay geometrically")


def area_integral(u, v, omega, order=48):
    """``(u, Lap v)`` over the ramp annulus (``Lap v`` vanishes elsewhere)."""
    profile = v.profile
    rr, wr = _gauss(order, profile.r0, profile.r1)
    tt, wt = _gauss(order, 0.0, float(omega))
    R, T = np.meshgrid(rr, tt, indexing="ij")
    vals = u.eval_polar(R, T) * v.laplacian(R, T) * R
    return float(wr @ vals @ wt)


def area_pairing(u, v, omega, order=48, tol=1e-10):
    """Full defect ``(u, Lap v) - <u, d_n v>_Gamma`` by quadrature.

    Each term is computed at ``order`` and ``2*order`` points; a mismatch
    above ``tol`` raises :class:`NonConvergent`.
    """
    _check_lambda(u)
    coarse = area_integral(u, v, omega, order) - edge_pairing(u, v, omega, order // 2)
    fine = area_integral(u, v, omega, 2 * order) - edge_pairing(u, v, omega, order)
    if abs(fine - coarse) > tol * max(1.0, abs(fine)):
        raise NonConvergent(f"area pairing unsettled: {coarse} vs {fine}")
    return fine


def edge_integrability(lam, xi, phi0, phi_omega):
    """Whether ``u d_n v`` is integrable on the corner edges."""
    if not xi > 0:
        raise ValidationError(f"xi must be positive, got {xi}")
    return bool(lam + xi > 0 or (phi0 == 0 and phi_omega == 0))


# -- Stokes ------------------------------------------------------------------


def _bump(s):
    """``phi(s) = exp(-1/(1-s))`` on s < 1 with first two derivatives."""
    inside = s < 1
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        m = np.where(inside, 1.0 / (1.0 - s), 0.0)
        phi = np.where(inside, np.exp(-m), 0.0)
    d1 = -phi * m**2
    d2 = phi * (m**4 - 2 * m**3)
    return phi, d1, d2


@dataclass(frozen=True)
class CompactTestPair:
    """Polynomial ``(v, q)`` times a smooth bump supported in a disc.

    ``v1, v2, q`` are 2D coefficient arrays for
    :func:`numpy.polynomial.polynomial.polyval2d` in global coordinates.
    """

    v1: np.ndarray
    v2: np.ndarray
    q: np.ndarray
    center: tuple
    radius: float

    def _bump(self, x, y):
        dx, dy = x - self.center[0], y - self.center[1]
        R2 = self.radius**2
        phi, d1, d2 = _bump((dx * dx + dy * dy) / R2)
        bx, by = d1 * 2 * dx / R2, d1 * 2 * dy / R2
        lap = d2 * 4 * (dx * dx + dy * dy) / R2**2 + d1 * 4 / R2
        return phi, bx, by, lap

    @staticmethod
    def _poly(c, x, y):
        c = np.asarray(c, dtype=float)
        cx = P.polyder(c, axis=0)
        cy = P.polyder(c, axis=1)
        lap = P.polyder(c, 2, axis=0)
        lap_y = P.polyder(c, 2, axis=1)
        ev = lambda k: P.polyval2d(x, y, k)
        return ev(c), ev(cx), ev(cy), ev(lap) + ev(lap_y)

    def terms(self, x, y):
        """``(-Lap v, grad q, div v)`` at global points."""
        b, bx, by, blap = self._bump(x, y)
        out = []
        grads = []
        for c in (self.v1, self.v2):
            p, px, py, plap = self._poly(c, x, y)
            out.append(-(blap * p + 2 * (bx * px + by * py) + b * plap))
            grads.append((b * px + bx * p, b * py + by * p))
        qv, qx, qy, _ = self._poly(self.q, x, y)
        grad_q = (bx * qv + b * qx, by * qv + b * qy)
        div_v = grads[0][0] + grads[1][1]
        return out, grad_q, div_v


def _disc_inside_sector(center, radius, frame, omega):
    r, theta = frame.to_polar(*center)
    r, theta = float(r), float(theta)
    if not 0 < theta < omega or r <= radius:
        return False
    for edge_angle in (0.0, omega):
        gap = theta - edge_angle
        along = r * math.cos(gap)
        dist = abs(r * math.sin(gap)) if along > 0 else r
        if dist <= radius:
            return False
    return True


def _disc_rule(center, radius, n):
    rho, wr = _gauss(n, 0.0, radius)
    m = 2 * n
    phi = 2 * math.pi * np.arange(m) / m
    R, PHI = np.meshgrid(rho, phi, indexing="ij")
    x = center[0] + R * np.cos(PHI)
    y = center[1] + R * np.sin(PHI)
    w = (wr * rho)[:, None] * np.full(m, 2 * math.pi / m)[None, :]
    return x, y, w


def _stokes_defect_at(field, pair, n):
    x, y, w = _disc_rule(pair.center, pair.radius, n)
    (mv1, mv2), (qx, qy), div_v = pair.terms(x, y)
    u1, u2 = field.velocity(x, y)
    p = field.pressure(x, y)
    vals = u1 * (mv1 + qx) + u2 * (mv2 + qy) - div_v * p
    return np.sum(w * vals), float(np.sum(w * np.abs(vals)))


def stokes_very_weak_defect(field, pair, omega, order=96, tol=1e-10):
    """``(u, -Lap v + grad q) - (div v, p)`` for a pair supported inside the sector."""
    if np.real(field.lam) <= -1:
        raise NotInL2(f"u is not in L^2 for lam = {field.lam}")
    if not _disc_inside_sector(pair.center, pair.radius, field.frame, float(omega)):
        raise SupportTouchesBoundary("test pair support must lie strictly inside the sector")
    coarse, _ = _stokes_defect_at(field, pair, order)
    fine, scale = _stokes_defect_at(field, pair, 2 * order)
    # tolerance relative to the integral of |integrand|, since the defect itself is ~0
    if abs(fine - coarse) > tol * max(scale, 1e-300):
        raise NonConvergent(f"Stokes pairing unsettled: {coarse} vs {fine}")
    return complex(fine) if np.iscomplexobj(fine) else float(fine)

