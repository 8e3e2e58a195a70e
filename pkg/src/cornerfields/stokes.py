"""Separable Stokes corner solutions u = r^lam U(theta), p = r^(lam-1) P(theta).

Four basis pairs span the solutions for a given exponent; at lam = 0 pairs 3
and 4 coincide with 1 and 2 and are replaced by their lam-derivatives.
Velocities are available in polar components and as Cartesian closed forms;
both are evaluated and must agree.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotARoot, NumericalError, PoleAtVertex, StepTooLarge, ValidationError
from .exponents import ExponentRoot
from .laplace import CornerFrame

CROSS_CHECK_TOL = 1e-12


def _check_index(i):
    if i not in (1, 2, 3, 4):
        raise ValidationError(f"basis index must be 1..4, got {i}")


def basis_polar(i, lam, theta):
    """``(U_r, U_theta, P)`` of basis pair ``i`` at angle ``theta``."""
    _check_index(i)
    t = np.asarray(theta, dtype=float)
    if lam == 0 and i >= 3:
        c, s = np.cos(t), np.sin(t)
        if i == 3:
            return -c + 2 * t * s, -s + 2 * t * c, -4.0 * c
        return -s - 2 * t * c, c + 2 * t * s, -4.0 * s
    a, b = (1 + lam) * t, (1 - lam) * t
    if i == 1:
        return np.cos(a), -np.sin(a), np.zeros_like(a)
    if i == 2:
        return np.sin(a), np.cos(a), np.zeros_like(a)
    if i == 3:
        return (1 - lam) * np.cos(b), -(1 + lam) * np.sin(b), -4 * lam * np.cos(b)
    return (1 - lam) * np.sin(b), (1 + lam) * np.cos(b), -4 * lam * np.sin(b)


def basis_dtheta_utheta(i, lam, theta):
    """Angular derivative of ``U_theta`` for basis pair ``i``."""
    _check_index(i)
    t = np.asarray(theta, dtype=float)
    if lam == 0 and i >= 3:
        c, s = np.cos(t), np.sin(t)
        return c - 2 * t * s if i == 3 else s + 2 * t * c
    a, b = (1 + lam) * t, (1 - lam) * t
    if i == 1:
        return -(1 + lam) * np.cos(a)
    if i == 2:
        return -(1 + lam) * np.sin(a)
    if i == 3:
        return -(1 + lam) * (1 - lam) * np.cos(b)
    return -(1 + lam) * (1 - lam) * np.sin(b)


def basis_cartesian(i, lam, theta):
    """Closed-form Cartesian velocity profile ``(U_1, U_2)`` in the corner frame."""
    _check_index(i)
    t = np.asarray(theta, dtype=float)
    if lam == 0 and i >= 3:
        if i == 3:
            return -np.cos(2 * t), 2 * t - np.sin(2 * t)
        return -2 * t - np.sin(2 * t), np.cos(2 * t)
    cl, sl = np.cos(lam * t), np.sin(lam * t)
    if i == 1:
        return cl, -sl
    if i == 2:
        return sl, cl
    c2, s2 = np.cos((2 - lam) * t), np.sin((2 - lam) * t)
    if i == 3:
        return cl - lam * c2, sl - lam * s2
    return -sl - lam * s2, cl + lam * c2


def rotate_polar(ur, ut, theta):
    c, s = np.cos(theta), np.sin(theta)
    return c * ur - s * ut, s * ur + c * ut


@dataclass(frozen=True)
class StokesField:
    lam: complex
    coeffs: tuple = (1.0, 0.0, 0.0, 0.0)
    frame: CornerFrame = field(default_factory=CornerFrame)

    def __post_init__(self):
        if len(self.coeffs) != 4:
            raise ValidationError("a Stokes field needs exactly four coefficients")

    @property
    def is_complex(self):
        return bool(np.iscomplexobj(np.asarray(self.coeffs)) or isinstance(self.lam, complex))

    @property
    def coeff_norm(self):
        return float(np.linalg.norm(np.asarray(self.coeffs)))

    def _combine(self, parts):
        return sum(c * np.asarray(p) for c, p in zip(self.coeffs, parts) if c != 0) + 0 * np.asarray(parts[0])

    def profile(self, theta):
        """Combined ``(U_r, U_theta, P)`` at ``theta``."""
        rows = [basis_polar(i, self.lam, theta) for i in (1, 2, 3, 4)]
        return tuple(self._combine([row[k] for row in rows]) for k in range(3))

    def profile_cartesian(self, theta):
        rows = [basis_cartesian(i, self.lam, theta) for i in (1, 2, 3, 4)]
        return tuple(self._combine([row[k] for row in rows]) for k in range(2))

    def _radial(self, r, power, what, allow_zero):
        r = np.asarray(r, dtype=float)
        at_vertex = r == 0
        if np.any(at_vertex):
            if not allow_zero:
                raise PoleAtVertex(f"{what} is singular or undefined at the vertex (lam = {self.lam})")
            return np.where(at_vertex, 0.0, np.where(at_vertex, 1.0, r) ** power)
        return r**power

    def velocity_polar(self, r, theta):
        ur, ut, _ = self.profile(theta)
        scale = self._radial(r, self.lam, "velocity", np.real(self.lam) > 0)
        return scale * ur, scale * ut

    def velocity(self, x, y):
        """Global Cartesian velocity from the closed forms, cross-checked
        against the rotated polar components."""
        r, theta = self.frame.to_polar(x, y)
        scale = self._radial(r, self.lam, "velocity", np.real(self.lam) > 0)
        u1, u2 = self.profile_cartesian(theta)
        ur, ut, _ = self.profile(theta)
        v1, v2 = rotate_polar(ur, ut, theta)
        bound = CROSS_CHECK_TOL * (1 + self.coeff_norm) * (4 + 4 * abs(self.lam)) * (1 + np.abs(theta))
        if np.any(np.abs(u1 - v1) > bound) or np.any(np.abs(u2 - v2) > bound):
            raise NumericalError("Cartesian closed form disagrees with rotated polar components")
        return self.frame.rotate_frame(scale * u1, scale * u2)

    __call__ = velocity

    def pressure(self, x, y):
        r, theta = self.frame.to_polar(x, y)
        _, _, p = self.profile(theta)
        return self._radial(r, self.lam - 1, "pressure", np.real(self.lam) > 1) * p

    def divergence(self, x, y):
        """Analytic divergence ``r^(lam-1) [(1 + lam) U_r + U_theta']``."""
        r, theta = self.frame.to_polar(x, y)
        if np.any(np.asarray(r) == 0):
            raise PoleAtVertex("divergence is undefined at the vertex")
        ur, _, _ = self.profile(theta)
        dut = self._combine([basis_dtheta_utheta(i, self.lam, theta) for i in (1, 2, 3, 4)])
        return r ** (self.lam - 1) * ((1 + self.lam) * ur + dut)

    divergence_polar = divergence

    def radial_derivative(self, x, y):
        """Cartesian components of ``d_r u`` (derivative along the ray)."""
        r, theta = self.frame.to_polar(x, y)
        if np.any(np.asarray(r) == 0):
            raise PoleAtVertex("radial derivative is undefined at the vertex")
        u1, u2 = self.profile_cartesian(theta)
        scale = self.lam * r ** (self.lam - 1)
        return self.frame.rotate_frame(scale * u1, scale * u2)

    def momentum_residual_fd(self, x, y, h):
        """Central-difference ``-Lap u + grad p`` at one point.

        Returns the residual 2-vector and the constant ``C`` in
        ``|res| = C h^2 r^(lam-3) |c|``.
        """
        r, _ = self.frame.to_polar(x, y)
        if not 4 * h < r:
            raise StepTooLarge(f"need 4h < r, got h = {h}, r = {float(r)}")
        xs = np.array([x, x + h, x - h, x, x])
        ys = np.array([y, y, y, y + h, y - h])
        u1, u2 = self.velocity(xs, ys)
        p = self.pressure(xs, ys)
        lap1 = (u1[1] + u1[2] + u1[3] + u1[4] - 4 * u1[0]) / h**2
        lap2 = (u2[1] + u2[2] + u2[3] + u2[4] - 4 * u2[0]) / h**2
        px = (p[1] - p[2]) / (2 * h)
        py = (p[3] - p[4]) / (2 * h)
        res = np.array([-lap1 + px, -lap2 + py])
        scale = h**2 * float(r) ** (np.real(self.lam) - 3) * max(self.coeff_norm, 1e-300)
        return res, float(np.linalg.norm(res)) / scale

    def regularity_sup(self):
        """Suprema (not attained) of the Sobolev orders for ``(u, p)``."""
        re = float(np.real(self.lam))
        return 1.0 + re, re

    regularity_sup_stokes = regularity_sup


@dataclass(frozen=True)
class DirichletCoefficients:
    coeffs: np.ndarray
    singular_values: np.ndarray
    double_root: bool
    lam: complex

    def field(self, frame=None):
        lam = self.lam
        if isinstance(lam, complex) and lam.imag == 0 and not np.iscomplexobj(self.coeffs):
            lam = lam.real
        return StokesField(lam, tuple(self.coeffs), frame or CornerFrame())


def dirichlet_system(lam, omega):
    """2x2 matrix acting on ``(c3, c4)`` whose kernel gives ``U(omega) = 0``
    once ``U(0) = 0`` has fixed ``c1, c2``."""
    w = float(omega)
    b1 = basis_polar(1, lam, w)
    b2 = basis_polar(2, lam, w)
    b3 = basis_polar(3, lam, w)
    b4 = basis_polar(4, lam, w)
    col3 = [b3[k] - (1 - lam) * b1[k] for k in range(2)]
    col4 = [b4[k] - (1 + lam) * b2[k] for k in range(2)]
    return np.array([[col3[0], col4[0]], [col3[1], col4[1]]])


def dirichlet_coefficients(omega, root):
    """Coefficients of a field vanishing on both corner edges.

    ``(c3, c4)`` spans the kernel of :func:`dirichlet_system`, normalised to
    unit length with its first nonzero entry real and positive; then
    ``c1 = -(1 - lam) c3`` and ``c2 = -(1 + lam) c4``.
    """
    lam = root.lam if isinstance(root, ExponentRoot) else root
    if isinstance(lam, complex) and lam.imag == 0:
        lam = lam.real
    if lam == 0:
        raise ValidationError("the Dirichlet construction requires lam != 0")
    m = dirichlet_system(lam, omega)
    _, s, vh = np.linalg.svd(m)
    if s[-1] > 1e-6:
        raise NotARoot(f"lam = {lam} is not an exponent for omega = {float(omega)} (sigma_min = {s[-1]:.3e})")
    kernel = vh[-1].conj()
    lead = kernel[np.argmax(np.abs(kernel) > 1e-14)]
    kernel = kernel * (abs(lead) / lead)
    if not np.iscomplexobj(m):
        kernel = kernel.real
    elif np.all(np.abs(kernel.imag) == 0):
        kernel = kernel.real
    c3, c4 = kernel
    coeffs = np.array([-(1 - lam) * c3, -(1 + lam) * c4, c3, c4])
    coeffs = coeffs + 0.0  # no negative zeros
    return DirichletCoefficients(coeffs, s, bool(s[0] < 1e-10), lam)


def dirichlet_field(omega, root, frame=None):
    return dirichlet_coefficients(omega, root).field(frame)
