"""Harmonic corner functions r^lam * Phi(theta) and their metadata."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import PoleAtVertex, ValidationError
from .exponents import BcKind, laplace_exponent


@dataclass(frozen=True)
class CornerFrame:
    """Local polar frame: ``theta`` is measured counterclockwise from ``edge0``."""

    vertex: tuple = (0.0, 0.0)
    edge0: tuple = (1.0, 0.0)

    def __post_init__(self):
        if abs(math.hypot(*self.edge0) - 1.0) > 1e-12:
            raise ValidationError(f"edge0 direction must be a unit vector, got {self.edge0}")

    @property
    def angle(self):
        return math.atan2(self.edge0[1], self.edge0[0])

    def to_polar(self, x, y):
        """Map global points to ``(r, theta)`` with ``theta`` in [0, 2pi)."""
        dx = np.asarray(x, dtype=float) - self.vertex[0]
        dy = np.asarray(y, dtype=float) - self.vertex[1]
        r = np.hypot(dx, dy)
        theta = np.mod(np.arctan2(dy, dx) - self.angle, 2.0 * math.pi)
        return r, theta

    def to_global(self, r, theta):
        a = np.asarray(theta) + self.angle
        return self.vertex[0] + r * np.cos(a), self.vertex[1] + r * np.sin(a)

    def rotate(self, vr, vt, theta):
        """Polar vector components at ``theta`` to global Cartesian components."""
        a = np.asarray(theta) + self.angle
        c, s = np.cos(a), np.sin(a)
        return c * vr - s * vt, s * vr + c * vt

    def rotate_frame(self, v1, v2):
        """Frame Cartesian components to global Cartesian components."""
        c, s = self.edge0
        return c * v1 - s * v2, s * v1 + c * v2


class SolutionClass(Enum):
    WEAK = "weak"
    VERY_WEAK = "very-weak"
    LIMIT_CASE = "limit-case"
    NOT_VERY_WEAK = "not-very-weak"


class Edge(Enum):
    THETA0 = "theta0"
    THETA_OMEGA = "thetaOmega"


@dataclass(frozen=True)
class LaplaceField:
    """``u = r^lam (c1 cos(lam theta) + c2 sin(lam theta))``, or ``c1 + c2 theta`` at lam = 0."""

    lam: float
    c1: float = 0.0
    c2: float = 1.0
    frame: CornerFrame = field(default_factory=CornerFrame)

    @property
    def is_log_branch(self):
        return self.lam == 0

    def phi(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.lam == 0:
            return self.c1 + self.c2 * theta
        return self.c1 * np.cos(self.lam * theta) + self.c2 * np.sin(self.lam * theta)

    def dphi(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.lam == 0:
            return np.full_like(theta, self.c2)
        lam = self.lam
        return lam * (-self.c1 * np.sin(lam * theta) + self.c2 * np.cos(lam * theta))

    def eval_polar(self, r, theta):
        r = np.asarray(r, dtype=float)
        at_vertex = r == 0
        if np.any(at_vertex):
            if self.lam <= 0:
                raise PoleAtVertex(f"u is singular at the vertex for lam = {self.lam}")
            safe = np.where(at_vertex, 1.0, r)
            return np.where(at_vertex, 0.0, safe**self.lam * self.phi(theta))
        if self.lam == 0:
            return np.broadcast_to(self.phi(theta), np.broadcast(r, theta).shape).astype(float)
        return r**self.lam * self.phi(theta)

    def __call__(self, x, y):
        return self.eval_polar(*self.frame.to_polar(x, y))

    eval = __call__

    def gradient_polar(self, r, theta):
        """``(d_r u, r^-1 d_theta u)``."""
        r = np.asarray(r, dtype=float)
        if np.any(r == 0):
            raise PoleAtVertex("gradient is undefined at the vertex")
        scale = r ** (self.lam - 1.0)
        return self.lam * scale * self.phi(theta), scale * self.dphi(theta)

    def gradient(self, x, y):
        """Global Cartesian gradient ``(u_x, u_y)``."""
        r, theta = self.frame.to_polar(x, y)
        gr, gt = self.gradient_polar(r, theta)
        return self.frame.rotate(gr, gt, theta)

    def normal_derivative(self, edge, omega, r):
        """Outward normal derivative on the edge ``theta = 0`` or ``theta = omega``."""
        edge = Edge(edge)
        theta = 0.0 if edge is Edge.THETA0 else float(omega)
        _, gt = self.gradient_polar(r, theta)
        return -gt if edge is Edge.THETA0 else gt

    def regularity_sup(self):
        """Supremum (not attained) of the Sobolev orders s with u in H^s."""
        return 1.0 + self.lam


def preset(omega, bc, k, amplitude=1.0, frame=None):
    """Field satisfying homogeneous ``bc`` conditions on both corner edges."""
    bc = BcKind(bc)
    lam = float(laplace_exponent(omega, bc, k))
    if bc is BcKind.NEUMANN_NEUMANN:
        c1, c2 = amplitude, 0.0
    else:
        c1, c2 = 0.0, amplitude
    return LaplaceField(lam, c1, c2, frame or CornerFrame())


def limit_case_field(xi, frame=None):
    """``r^-xi sin(xi theta)``: harmonic, in L^2 for xi < 1, yet not a very weak solution."""
    return LaplaceField(-float(xi), 0.0, -1.0, frame or CornerFrame())


def classify(lam, xi):
    if xi <= 0:
        raise ValidationError(f"xi must be positive, got {xi}")
    if lam > 0:
        return SolutionClass.WEAK
    if -min(1.0, xi) < lam <= 0:
        return SolutionClass.VERY_WEAK
    if xi < 1 and abs(lam + xi) <= 1e-12:
        return SolutionClass.LIMIT_CASE
    return SolutionClass.NOT_VERY_WEAK
