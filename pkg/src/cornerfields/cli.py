"""Command-line front end: ``cornerfields <subcommand> [options]``.

Exit status is 0 on success, 2 for invalid input and 3 when a numerical
procedure fails to converge.
"""

import argparse
import math
import os
import sys

import numpy as np

from .angles import Angle, check_interior_angle
from .config import RunConfig, emit_table, merge, parse_config, read_points
from .cutoff import CutoffProfile, Smoothness, laplace_rhs, stokes_rhs
from .errors import NumericalError, ValidationError
from .exponents import BcKind, SearchRegion, find_stokes_exponents, laplace_exponent, refine_stokes_exponent
from .fem import ManufacturedProblem, iter_convergence, limit_case_study
from .laplace import LaplaceField, preset
from .pairing import TestFunctionV, area_pairing, arc_integral, default_eps_sequence, extrapolate_to_zero
from .stokes import StokesField, dirichlet_field

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

ROOT_SCHEMA = ["re(lambda)", "im(lambda)", "branch", "residual"]
DEFAULT_REGION = (0.05, 3.95, -2.95, 2.95)
DEFAULT_R0, DEFAULT_R1 = 0.25, 0.5


def _pick(*values):
    for v in values:
        if v is not None:
            return v
    return None


def _table_path(cfg, name):
    if cfg.out is None:
        return None
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _profile(cfg):
    return CutoffProfile(
        _pick(cfg.r0, DEFAULT_R0),
        _pick(cfg.r1, DEFAULT_R1),
        _pick(cfg.profile, Smoothness.C2_QUINTIC),
    )


def _stokes_field(cfg, args):
    if cfg.lam is None:
        raise ValidationError("lambda: required for Stokes fields")
    if getattr(args, "coeffs", None):
        try:
            coeffs = tuple(float(c) for c in args.coeffs.split(","))
        except ValueError:
            raise ValidationError(f"coeffs: expected four numbers, got {args.coeffs!r}") from None
        return StokesField(cfg.lam, coeffs)
    if getattr(args, "dirichlet", True):
        root = refine_stokes_exponent(cfg.omega, cfg.lam)
        field = dirichlet_field(cfg.omega, root)
        if field.is_complex:
            raise ValidationError("lambda: complex exponent; only real fields are tabulated")
        return field
    return StokesField(cfg.lam)


# -- subcommands ---------------------------------------------------------------


def cmd_exponents(cfg, args):
    if cfg.problem == "laplace":
        bc = _pick(cfg.bc, BcKind.DIRICHLET_DIRICHLET)
        count = _pick(cfg.k, 4)
        start = 0 if bc is BcKind.NEUMANN_NEUMANN else 1
        rows = [
            (float(laplace_exponent(cfg.omega, bc, k)), 0.0, bc.value, 0.0)
            for k in range(start, start + count)
        ]
    else:
        bounds = [_pick(getattr(cfg, name), d) for name, d in zip(("re_min", "re_max", "im_min", "im_max"), DEFAULT_REGION)]
        roots = find_stokes_exponents(cfg.omega, SearchRegion(*bounds))
        rows = [(r.lam.real, r.lam.imag, r.branch.value, r.residual) for r in roots]
    emit_table(rows, ROOT_SCHEMA, _table_path(cfg, "exponents.csv"))


def cmd_eval_laplace(cfg, args):
    x, y = read_points(args.points)
    bc = _pick(cfg.bc, BcKind.DIRICHLET_DIRICHLET)
    field = preset(cfg.omega, bc, _pick(cfg.k, 1), _pick(cfg.amplitude, 1.0))
    u = field(x, y)
    ux, uy = field.gradient(x, y)
    emit_table(zip(x, y, u, ux, uy), ["x", "y", "u", "ux", "uy"], _table_path(cfg, "laplace.csv"))


def cmd_eval_stokes(cfg, args):
    x, y = read_points(args.points)
    field = _stokes_field(cfg, args)
    u1, u2 = field.velocity(x, y)
    p = field.pressure(x, y)
    cols = [np.real(c) for c in (u1, u2, p)]
    emit_table(zip(x, y, *cols), ["x", "y", "u1", "u2", "p"], _table_path(cfg, "stokes.csv"))


def cmd_rhs(cfg, args):
    x, y = read_points(args.points)
    profile = _profile(cfg)
    if cfg.problem == "laplace":
        bc = _pick(cfg.bc, BcKind.DIRICHLET_DIRICHLET)
        field = preset(cfg.omega, bc, _pick(cfg.k, 1), _pick(cfg.amplitude, 1.0))
        f = laplace_rhs(field, profile, x, y)
        emit_table(zip(x, y, f), ["x", "y", "f"], _table_path(cfg, "rhs.csv"))
    else:
        f1, f2, g = stokes_rhs(_stokes_field(cfg, args), profile, x, y)
        cols = [np.real(c) for c in (f1, f2, g)]
        emit_table(zip(x, y, *cols), ["x", "y", "f1", "f2", "g"], _table_path(cfg, "rhs.csv"))


def cmd_pairing(cfg, args):
    omega = float(cfg.omega)
    xi = _pick(cfg.xi, math.pi / omega)
    lam = _pick(cfg.lam, -xi)
    # default u = r^lam sin(|lam| theta); for lam = -xi this is the limit-case field
    c1 = _pick(args.c1, 0.0)
    c2 = _pick(args.c2, -1.0 if lam < 0 else 1.0)
    u = LaplaceField(lam, c1, c2)
    v = TestFunctionV(xi, _profile(cfg))
    eps = default_eps_sequence(v.profile)
    arcs = [arc_integral(u, v, omega, e) for e in eps]
    limit = extrapolate_to_zero(arcs)
    area = area_pairing(u, v, omega, tol=_pick(cfg.tol, 1e-10))
    emit_table([("arc_limit", limit), ("area_pairing", area)], ["quantity", "value"], _table_path(cfg, "defect.csv"))
    if cfg.out is None:
        sys.stdout.write("\n")
    emit_table(zip(eps, arcs), ["eps", "arc_integral"], _table_path(cfg, "pairing.csv"))


def cmd_fem(cfg, args):
    omega = check_interior_angle(cfg.omega)
    if not math.isclose(float(omega), 1.5 * math.pi, rel_tol=1e-14):
        raise ValidationError("omega: the L-shaped domain has omega = 3pi/2")
    levels = _pick(cfg.levels, 4)
    rtol = _pick(cfg.tol, 1e-10)
    n0 = args.n0
    if args.case == "limit":
        ns = [n0 * 2**k for k in range(levels)]
        rows, uh = limit_case_study(ns, radius=0.1, xi=math.pi / float(omega), rtol=rtol)
        emit_table([(r.level, r.corner_max) for r in rows], ["level", "corner_max"], _table_path(cfg, "fem_limit.csv"))
    else:
        bc = _pick(cfg.bc, BcKind.DIRICHLET_DIRICHLET)
        problem = ManufacturedProblem.from_field(preset(omega, bc, _pick(cfg.k, 1)))
        rows = []
        for row, uh in iter_convergence(problem, levels, n0, rtol):
            rows.append((row.level, row.h, row.l2, row.h1, row.rate_l2, row.rate_h1))
        emit_table(rows, ["level", "h", "l2", "h1", "rate_l2", "rate_h1"], _table_path(cfg, "fem_convergence.csv"))
    if cfg.out is not None:
        nodes = uh.mesh.nodes
        emit_table(zip(nodes[:, 0], nodes[:, 1], uh.values), ["x", "y", "uh"], _table_path(cfg, "solution.csv"))


# -- argument parsing ------------------------------------------------------------


def _common(p, *names):
    """Options shared by several subcommands; they override the config file."""
    if "omega" in names:
        p.add_argument("--omega", help="interior angle: radians or e.g. 3pi/2")
    if "problem" in names:
        p.add_argument("--problem", choices=["laplace", "stokes"])
    if "bc" in names:
        p.add_argument("--bc", choices=[b.value for b in BcKind])
    if "k" in names:
        p.add_argument("--k", type=int)
    if "lambda" in names:
        p.add_argument("--lambda", dest="lam", type=float)
    if "points" in names:
        p.add_argument("--points", required=True, help="CSV file with x,y columns")
    if "cutoff" in names:
        p.add_argument("--r0", type=float)
        p.add_argument("--r1", type=float)
        p.add_argument("--profile", choices=[s.value for s in Smoothness])


def build_parser():
    parser = argparse.ArgumentParser(prog="cornerfields", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value run configuration")
    parser.add_argument("--out", help="directory for CSV output (default: stdout)")
    parser.add_argument("--tol", type=float, help="solver / quadrature tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="corner exponents for an interior angle")
    _common(p, "omega", "problem", "bc")
    p.add_argument("--count", dest="k", type=int, help="number of Laplace exponents")
    for name in ("re-min", "re-max", "im-min", "im-max"):
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("eval-laplace", help="evaluate a Laplace corner solution")
    _common(p, "omega", "bc", "k", "points")
    p.add_argument("--amplitude", type=float)
    p.set_defaults(func=cmd_eval_laplace)

    p = sub.add_parser("eval-stokes", help="evaluate a Stokes corner solution")
    _common(p, "omega", "lambda", "points")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--dirichlet", action="store_true", help="refine lambda and use the no-slip combination")
    mode.add_argument("--coeffs", help="four basis coefficients c1,c2,c3,c4")
    p.set_defaults(func=cmd_eval_stokes)

    p = sub.add_parser("rhs", help="right-hand side of a cut-off corner solution")
    _common(p, "omega", "problem", "bc", "k", "lambda", "points", "cutoff")
    p.add_argument("--coeffs", help="Stokes basis coefficients (default: no-slip combination)")
    p.set_defaults(func=cmd_rhs, dirichlet=True)

    p = sub.add_parser("pairing", help="Green-formula defect of a Laplace corner function")
    _common(p, "omega", "lambda", "cutoff")
    p.add_argument("--xi", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("fem", help="P1 studies on the L-shaped domain")
    _common(p, "omega", "bc", "k")
    p.add_argument("--case", choices=["limit", "convergence"], required=True)
    p.add_argument("--levels", type=int)
    p.add_argument("--n0", type=int, default=8, help="divisions per unit length on level 0")
    p.set_defaults(func=cmd_fem)
    return parser


def _config_from(args):
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ValidationError(f"config: cannot read {args.config}: {exc.strerror}") from None
    overrides = {}
    for name in ("problem", "lam", "k", "amplitude", "r0", "r1", "xi", "tol", "levels", "out", "re_min", "re_max", "im_min", "im_max"):
        overrides[name] = getattr(args, name, None)
    if getattr(args, "omega", None) is not None:
        overrides["omega"] = Angle.parse(args.omega)
    if getattr(args, "bc", None) is not None:
        overrides["bc"] = BcKind(args.bc)
    if getattr(args, "profile", None) is not None:
        overrides["profile"] = Smoothness(args.profile)
    return merge(cfg, **overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from(args)
        args.func(cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
