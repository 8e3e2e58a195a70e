"""Singular corner exponents.

Laplace exponents of the three homogeneous boundary-condition presets are
closed form. Stokes exponents with Dirichlet conditions on both edges are the
zeros of

    det(lam) = 4 (sin^2(lam w) - lam^2 sin^2 w)
             = 4 (sin(lam w) - lam sin w) (sin(lam w) + lam sin w),

located with the argument principle on nested rectangles and polished by
Newton's method on the vanishing factor.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .angles import Angle, check_interior_angle
from .errors import (
    NonConvergence,
    NoPositiveRoot,
    RegionBoundaryHitsRoot,
    ValidationError,
)

BOUNDARY_TOL = 1e-8
NEWTON_TOL = 1e-12
MAX_NEWTON = 100


class BcKind(Enum):
    DIRICHLET_DIRICHLET = "dd"
    NEUMANN_NEUMANN = "nn"
    DIRICHLET_NEUMANN = "dn"


class Branch(Enum):
    """Which factor of the determinant vanishes.

    ``MINUS``: sin(lam w) - lam sin w = 0, ``PLUS``: sin(lam w) + lam sin w = 0.
    """

    MINUS = "minus"
    PLUS = "plus"

    @property
    def sign(self):
        return -1.0 if self is Branch.MINUS else 1.0


@dataclass(frozen=True)
class ExponentRoot:
    lam: complex
    omega: float
    branch: Branch
    residual: float

    @property
    def real(self):
        return self.lam.real


@dataclass(frozen=True)
class SearchRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValidationError(f"degenerate search region {self}")

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def size(self):
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z, margin=0.0):
        return (
            self.re_min - margin <= z.real <= self.re_max + margin
            and self.im_min - margin <= z.imag <= self.im_max + margin
        )

    def boundary(self, n):
        """Counterclockwise boundary samples, ``n`` intervals per edge.

        Returns a list of four node arrays (each edge includes both ends).
        """
        t = np.linspace(0.0, 1.0, n + 1)
        a = complex(self.re_min, self.im_min)
        b = complex(self.re_max, self.im_min)
        c = complex(self.re_max, self.im_max)
        d = complex(self.re_min, self.im_max)
        return [p + (q - p) * t for p, q in ((a, b), (b, c), (c, d), (d, a))]

    def split(self, frac):
        """Cut across the longer side at relative position ``frac``."""
        if self.re_max - self.re_min >= self.im_max - self.im_min:
            x = self.re_min + frac * (self.re_max - self.re_min)
            return (
                SearchRegion(self.re_min, x, self.im_min, self.im_max),
                SearchRegion(x, self.re_max, self.im_min, self.im_max),
                (complex(x, self.im_min), complex(x, self.im_max)),
            )
        y = self.im_min + frac * (self.im_max - self.im_min)
        return (
            SearchRegion(self.re_min, self.re_max, self.im_min, y),
            SearchRegion(self.re_min, self.re_max, y, self.im_max),
            (complex(self.re_min, y), complex(self.re_max, y)),
        )


# -- Laplace -----------------------------------------------------------------


def laplace_exponent(omega, bc, k):
    """Exponent of the k-th preset solution for boundary conditions ``bc``.

    Returns a :class:`~fractions.Fraction` when ``omega`` is an exact rational
    multiple of pi (so ``laplace_exponent("3pi/2", DD, 1) == Fraction(2, 3)``),
    otherwise a float.
    """
    bc = BcKind(bc)
    omega = check_interior_angle(omega)
    if int(k) != k or k < 0:
        raise ValidationError(f"k must be a nonnegative integer, got {k!r}")
    k = int(k)
    if k == 0 and bc is not BcKind.NEUMANN_NEUMANN:
        raise ValidationError(f"k = 0 is not admissible for {bc.name}")
    multiple = Fraction(k) if bc is not BcKind.DIRICHLET_NEUMANN else Fraction(2 * k - 1, 2)
    if omega.exact:
        return multiple / omega.pi_multiple
    return float(multiple) * math.pi / omega.radians


# -- Stokes determinant ------------------------------------------------------


def stokes_determinant(lam, omega):
    omega = float(omega)
    return 4.0 * (np.sin(lam * omega) ** 2 - lam**2 * math.sin(omega) ** 2)


def stokes_determinant_derivative(lam, omega):
    omega = float(omega)
    return 4.0 * (omega * np.sin(2.0 * lam * omega) - 2.0 * lam * math.sin(omega) ** 2)


def stokes_determinant_factored(lam, omega):
    omega = float(omega)
    s = math.sin(omega)
    return 4.0 * (np.sin(lam * omega) - lam * s) * (np.sin(lam * omega) + lam * s)


def branch_function(lam, omega, branch):
    omega = float(omega)
    return np.sin(lam * omega) + Branch(branch).sign * lam * math.sin(omega)


def branch_derivative(lam, omega, branch):
    omega = float(omega)
    return omega * np.cos(lam * omega) + Branch(branch).sign * math.sin(omega)


def winding_number(f, df, region, n=512, max_n=2**17):
    """Zeros of ``f`` inside ``region`` counted with multiplicity.

    Trapezoid rule for (1/2 pi i) * contour integral of f'/f, doubling the
    number of points per edge until the rounded value is stable.
    """
    previous = None
    while n <= max_n:
        total = 0.0j
        for z in region.boundary(n):
            g = df(z) / f(z)
            total += np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(z))
        count = total / (2j * math.pi)
        nearest = round(count.real)
        close = abs(count - nearest) < 0.02
        if close and previous == nearest:
            return nearest
        previous = nearest if close else None
        n *= 2
    raise NonConvergence(f"winding number did not stabilise on {region}")


def _min_abs_on(f, points):
    return min(float(np.min(np.abs(f(z)))) for z in points)


def _newton(f, df, z, multiplicity=1):
    for _ in range(MAX_NEWTON):
        fz = f(z)
        dfz = df(z)
        if dfz == 0:
            return None
        step = multiplicity * fz / dfz
        z = z - step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    else:
        return None
    # a few extra iterations to settle at the rounding floor
    for _ in range(2):
        dfz = df(z)
        if dfz != 0:
            z = z - multiplicity * f(z) / dfz
    return complex(z)


_CUTS = (0.5, 0.4637, 0.5371, 0.4129, 0.5813, 0.3571)


def _isolate(f, df, region, count, found, depth=0):
    if count == 0:
        return
    tiny = region.size < 1e-7 * max(1.0, abs(region.center))
    if count == 1 or tiny:
        m = 1 if count == 1 else count
        z = _newton(f, df, region.center, multiplicity=m)
        if z is not None and region.contains(z, margin=1e-9 * max(1.0, abs(z))):
            if abs(z.imag) < 1e-13 * max(1.0, abs(z.real)) and abs(f(complex(z.real))) <= abs(f(z)):
                z = complex(z.real, 0.0)
            found.extend([z] * count)
            return
        if tiny or depth > 200:
            raise NonConvergence(
                f"Newton failed to converge inside {region} after {MAX_NEWTON} iterations"
            )
    for frac in _CUTS:
        left, right, (p, q) = region.split(frac)
        cut = p + (q - p) * np.linspace(0.0, 1.0, 1025)
        # Newton distance estimate |f/f'| flags zeros on or near the cut
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = np.abs(f(cut) / df(cut))
        if not np.all(dist > 2e-3 * abs(q - p)):
            continue
        try:
            n_left = winding_number(f, df, left)
            n_right = winding_number(f, df, right)
        except NonConvergence:
            continue
        if n_left + n_right != count:
            continue
        _isolate(f, df, left, n_left, found, depth + 1)
        _isolate(f, df, right, n_right, found, depth + 1)
        return
    raise NonConvergence(f"could not find a root-free cut through {region}")


def find_stokes_exponents(omega, region):
    """All zeros of the Dirichlet Stokes determinant inside ``region``.

    Each factor is isolated separately, so a point where both factors vanish
    is reported once per branch. Multiple zeros of a single factor appear as
    repeated entries. Raises :class:`RegionBoundaryHitsRoot` when the region
    boundary passes within 1e-8 (in ``|det|``) of a zero.
    """
    w = float(check_interior_angle(omega))
    det_min = _min_abs_on(lambda z: stokes_determinant(z, w), region.boundary(2048))
    if det_min < BOUNDARY_TOL:
        raise RegionBoundaryHitsRoot(
            f"min |det| = {det_min:.3e} on the boundary of {region}"
        )
    total = winding_number(
        lambda z: stokes_determinant(z, w),
        lambda z: stokes_determinant_derivative(z, w),
        region,
    )

    roots = []
    for branch in Branch:
        f = lambda z, b=branch: branch_function(z, w, b)
        df = lambda z, b=branch: branch_derivative(z, w, b)
        count = winding_number(f, df, region)
        found = []
        _isolate(f, df, region, count, found)
        for z in found:
            res = abs(f(z))
            if res > NEWTON_TOL:
                raise NonConvergence(f"branch residual {res:.3e} at lambda = {z}")
            roots.append(ExponentRoot(z, w, branch, float(abs(stokes_determinant(z, w)))))

    if len(roots) != total:
        raise NonConvergence(
            f"found {len(roots)} roots but the determinant winds {total} times"
        )
    roots.sort(key=lambda r: (round(r.lam.real, 12), round(r.lam.imag, 12), r.branch.value))
    return roots


def smallest_positive_exponent(roots):
    """Smallest real part among roots with positive real part."""
    candidates = [r.lam.real for r in roots if r.lam.real > 1e-12]
    if not candidates:
        raise NoPositiveRoot("no root with positive real part")
    return min(candidates)


def refine_stokes_exponent(omega, guess):
    """Newton-polish an approximate exponent on whichever branch fits best."""
    w = float(check_interior_angle(omega))
    guess = complex(guess)
    best = None
    for branch in Branch:
        z = _newton(
            lambda z: branch_function(z, w, branch),
            lambda z: branch_derivative(z, w, branch),
            guess,
        )
        if z is None:
            continue
        res = abs(branch_function(z, w, branch))
        if res <= NEWTON_TOL and (best is None or abs(z - guess) < abs(best.lam - guess)):
            if abs(z.imag) < 1e-13 * max(1.0, abs(z.real)):
                z = complex(z.real, 0.0)
            best = ExponentRoot(z, w, branch, float(abs(stokes_determinant(z, w))))
    if best is None:
        raise NonConvergence(f"no exponent found near {guess}")
    return best


__all__ = [
    "Angle",
    "BcKind",
    "Branch",
    "ExponentRoot",
    "SearchRegion",
    "branch_derivative",
    "branch_function",
    "find_stokes_exponents",
    "laplace_exponent",
    "refine_stokes_exponent",
    "smallest_positive_exponent",
    "stokes_determinant",
    "stokes_determinant_derivative",
    "stokes_determinant_factored",
    "winding_number",
]
