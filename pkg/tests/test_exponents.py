import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import optimize

from cornerfields.angles import Angle
from cornerfields.errors import (
    NoPositiveRoot,
    RegionBoundaryHitsRoot,
    ValidationError,
)
from cornerfields.exponents import (
    BcKind,
    Branch,
    ExponentRoot,
    SearchRegion,
    branch_function,
    find_stokes_exponents,
    laplace_exponent,
    refine_stokes_exponent,
    smallest_positive_exponent,
    stokes_determinant,
    stokes_determinant_derivative,
    stokes_determinant_factored,
    winding_number,
)

L_CORNER = 1.5 * math.pi


def l_corner_oracle():
    # sin(3 pi lam / 2) - lam changes sign on [0.5, 0.6]
    return optimize.bisect(lambda t: math.sin(1.5 * math.pi * t) - t, 0.5, 0.6, xtol=1e-15)


# -- Laplace -----------------------------------------------------------------


def test_laplace_exponent_l_corner_is_exact():
    lam = laplace_exponent("3pi/2", BcKind.DIRICHLET_DIRICHLET, 1)
    assert lam == Fraction(2, 3)
    assert isinstance(lam, Fraction)


@pytest.mark.parametrize(
    "omega, bc, k, expected",
    [
        ("3pi/2", "dd", 1, Fraction(2, 3)),
        ("pi", "dd", 1, Fraction(1)),
        ("3pi/2", "dn", 1, Fraction(1, 3)),
        ("3pi/2", "nn", 0, Fraction(0)),
        ("2pi", "dd", 1, Fraction(1, 2)),
        ("pi/2", "dn", 2, Fraction(3)),
    ],
)
def test_laplace_exponent_table(omega, bc, k, expected):
    assert laplace_exponent(omega, bc, k) == expected


def test_laplace_exponent_float_angle():
    lam = laplace_exponent(2.0, "dd", 3)
    assert isinstance(lam, float)
    assert lam == pytest.approx(3 * math.pi / 2.0, rel=1e-15)


@pytest.mark.parametrize("bc", ["dd", "dn"])
def test_laplace_exponent_rejects_k0(bc):
    with pytest.raises(ValidationError):
        laplace_exponent("3pi/2", bc, 0)


@pytest.mark.parametrize("omega", [0.0, -1.0, 7.0, "3pi"])
def test_laplace_exponent_rejects_bad_angle(omega):
    with pytest.raises(ValidationError):
        laplace_exponent(omega, "dd", 1)


def test_angle_parse_forms():
    assert Angle.parse("3pi/2").pi_multiple == Fraction(3, 2)
    assert Angle.parse("3*pi/2") == Angle.parse("3pi/2")
    assert Angle.parse("pi").radians == math.pi
    assert Angle.parse("0.5pi").pi_multiple == Fraction(1, 2)
    assert Angle.parse("1.25").pi_multiple is None
    assert float(Angle.parse("3pi/2")) == pytest.approx(4.71238898038469, abs=1e-14)


# -- determinant ---------------------------------------------------------------


@pytest.mark.parametrize(
    "lam, omega, expected",
    [(1.0, math.pi / 2, 0.0), (0.5, math.pi, 4.0), (2 / 3, L_CORNER, -16 / 9)],
)
def test_determinant_examples(lam, omega, expected):
    assert stokes_determinant(lam, omega) == pytest.approx(expected, abs=1e-14)


def test_determinant_factorization_on_a_million_points():
    rng = np.random.default_rng(0)
    n = 10**6
    lam = rng.uniform(-4, 4, n) + 1j * rng.uniform(-2, 2, n)
    omegas = rng.uniform(1e-3, 2 * math.pi, 50)
    for chunk, omega in zip(np.array_split(lam, len(omegas)), omegas):
        det = stokes_determinant(chunk, omega)
        fac = stokes_determinant_factored(chunk, omega)
        assert np.max(np.abs(det - fac) / (1 + np.abs(det))) <= 1e-12


def test_determinant_derivative_matches_complex_step():
    rng = np.random.default_rng(1)
    lam = rng.uniform(0, 3, 200) + 1j * rng.uniform(-1, 1, 200)
    h = 1e-6
    for omega in (0.7, math.pi, L_CORNER, 2 * math.pi):
        fd = (stokes_determinant(lam + h, omega) - stokes_determinant(lam - h, omega)) / (2 * h)
        exact = stokes_determinant_derivative(lam, omega)
        assert np.max(np.abs(fd - exact) / (1 + np.abs(exact))) < 1e-7


def test_lambda_one_is_always_a_root():
    for omega in np.linspace(0.05, 2 * math.pi, 97):
        assert abs(stokes_determinant(1.0, omega)) < 1e-13


# -- root finding ----------------------------------------------------------------


def test_l_corner_root_matches_bisection_oracle():
    roots = find_stokes_exponents(L_CORNER, SearchRegion(0.1, 0.9, -0.1, 0.1))
    assert len(roots) == 1
    root = roots[0]
    assert abs(root.lam.imag) == 0.0
    assert root.lam.real == pytest.approx(l_corner_oracle(), abs=1e-9)
    assert root.lam.real == pytest.approx(0.544483737, abs=1e-9)
    assert root.residual <= 1e-12
    # sin(lam w) - lam = 0 with sin w = -1 is the "+" factor sin(lam w) + lam sin w
    assert root.branch is Branch.PLUS
    assert abs(branch_function(root.lam, L_CORNER, root.branch)) <= 1e-12


def test_flat_angle_roots():
    roots = find_stokes_exponents(math.pi, SearchRegion(0.5, 2.5, -0.1, 0.1))
    values = sorted(r.lam.real for r in roots)
    # sin w = 0: both factors vanish, each root is reported once per branch
    assert values == pytest.approx([1, 1, 2, 2], abs=1e-12)
    assert {r.branch for r in roots} == {Branch.MINUS, Branch.PLUS}


def test_crack_roots():
    roots = find_stokes_exponents(2 * math.pi, SearchRegion(0.2, 1.2, -0.1, 0.1))
    assert sorted(r.lam.real for r in roots) == pytest.approx([0.5, 0.5, 1, 1], abs=1e-12)


def test_l_corner_wide_region():
    roots = find_stokes_exponents(L_CORNER, SearchRegion(0.05, 3.95, -2.95, 2.95))
    real = sorted(r.lam.real for r in roots if r.lam.imag == 0)
    assert real == pytest.approx([0.544483736782464, 0.908529189846099, 1.0], abs=1e-12)
    assert len(roots) == 11


def test_roots_come_in_conjugate_pairs():
    for omega in (0.8, math.pi / 2, 2.5, L_CORNER, 5.9):
        roots = find_stokes_exponents(omega, SearchRegion(0.05, 5.05, -3.1, 3.1))
        lams = np.array([r.lam for r in roots])
        for z in lams:
            assert np.min(np.abs(lams - np.conj(z))) < 1e-10


def test_roots_satisfy_branch_equation():
    for omega in (0.8, math.pi / 2, 2.5, L_CORNER, 5.9):
        for r in find_stokes_exponents(omega, SearchRegion(0.05, 5.05, -3.1, 3.1)):
            assert abs(branch_function(r.lam, omega, r.branch)) <= 1e-12
            assert r.residual <= 1e-10


def test_winding_consistency_on_random_regions():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 20:
        omega = rng.uniform(0.3, 2 * math.pi)
        a, b = np.sort(rng.uniform(-1.0, 4.0, 2))
        c, d = np.sort(rng.uniform(-2.5, 2.5, 2))
        if b - a < 0.2 or d - c < 0.2:
            continue
        region = SearchRegion(a, b, c, d)
        try:
            roots = find_stokes_exponents(omega, region)
        except RegionBoundaryHitsRoot:
            continue
        count = winding_number(
            lambda z: stokes_determinant(z, omega),
            lambda z: stokes_determinant_derivative(z, omega),
            region,
        )
        assert len(roots) == count
        assert all(region.contains(r.lam, margin=1e-12) for r in roots)
        checked += 1


def test_right_angle_smallest_root_against_grid_oracle():
    omega = math.pi / 2
    roots = find_stokes_exponents(omega, SearchRegion(0.5, 4.0, -3.0, 3.0))
    xi = smallest_positive_exponent(roots)
    assert xi == pytest.approx(1.0, abs=1e-12)
    # independent oracle: Newton from the minima of |det| on a coarse grid
    re, im = np.meshgrid(np.linspace(0.55, 3.95, 341), np.linspace(-2.95, 2.95, 591))
    z = re + 1j * im
    mag = np.abs(stokes_determinant(z, omega))
    found = set()
    for i, j in zip(*np.nonzero(mag < 0.2)):
        w = z[i, j]
        for _ in range(60):
            w -= stokes_determinant(w, omega) / stokes_determinant_derivative(w, omega)
        if abs(stokes_determinant(w, omega)) < 1e-12 and 0.5 < w.real < 4 and abs(w.imag) < 3:
            found.add((round(w.real, 9), round(abs(w.imag), 9)))
    assert min(f[0] for f in found) == pytest.approx(xi, abs=1e-9)
    complex_pair = [r.lam for r in roots if r.lam.imag > 0]
    assert len(complex_pair) == 1
    assert complex_pair[0] == pytest.approx(2.739593356324596 + 1.1190245343424166j, abs=1e-12)
    assert (round(complex_pair[0].real, 9), round(complex_pair[0].imag, 9)) in found


def test_boundary_through_root_is_rejected():
    with pytest.raises(RegionBoundaryHitsRoot):
        find_stokes_exponents(math.pi, SearchRegion(1.0, 1.5, -0.1, 0.1))


def test_degenerate_region_rejected():
    with pytest.raises(ValidationError):
        SearchRegion(1.0, 1.0, -1.0, 1.0)


def test_smallest_positive_exponent():
    roots = [
        ExponentRoot(complex(1.0), L_CORNER, Branch.MINUS, 0.0),
        ExponentRoot(complex(0.5445), L_CORNER, Branch.PLUS, 0.0),
        ExponentRoot(complex(-0.3), L_CORNER, Branch.PLUS, 0.0),
    ]
    assert smallest_positive_exponent(roots) == 0.5445
    with pytest.raises(NoPositiveRoot):
        smallest_positive_exponent(roots[2:])


def test_refine_from_rough_guess():
    root = refine_stokes_exponent(L_CORNER, 0.55)
    assert root.lam.real == pytest.approx(l_corner_oracle(), abs=1e-12)
    assert root.lam.imag == 0.0
