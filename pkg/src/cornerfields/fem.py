"""Piecewise linear Galerkin solver for the Poisson problem with Dirichlet data.

Used to check two things on the L-shaped domain: the discrete solution for
boundary datum ``g = r^-2/3 sin(2 theta / 3)`` stays bounded at the corner,
and errors for corner solutions of known regularity decay at the predicted
rates.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .cutoff import laplace_rhs
from .errors import EmptyBall, SolverStall, ValidationError
from .laplace import LaplaceField, limit_case_field
from .mesh import TriMesh, build_lshape_mesh

VERTEX = (0.0, 0.0)


def triangle_rule(n):
    """Collapsed Gauss rule on the reference triangle, exact to degree 2n - 2.

    Returns barycentric coordinates ``(npts, 3)`` and weights summing to 1/2.
    The collapsed vertex is barycentric coordinate 0.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    S, T = np.meshgrid(x, x, indexing="ij")
    WS, WT = np.meshgrid(w, w, indexing="ij")
    s, t = S.ravel(), T.ravel()
    bary = np.stack([1 - s, s * (1 - t), s * t], axis=1)
    return bary, (WS * WT).ravel() * s


@dataclass
class DiscreteField:
    mesh: TriMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValidationError("one value per mesh node is required")

    def element_gradients(self):
        return _element_gradients(self.mesh, self.values)


def _barycentric_gradients(mesh):
    p = mesh.nodes[mesh.triangles]
    area = mesh.areas()
    grads = np.empty((len(p), 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = (p[:, j, 1] - p[:, k, 1]) / (2 * area)
        grads[:, i, 1] = (p[:, k, 0] - p[:, j, 0]) / (2 * area)
    return grads, area


def _element_gradients(mesh, values):
    grads, _ = _barycentric_gradients(mesh)
    return np.einsum("eij,ei->ej", grads, values[mesh.triangles])


def stiffness_matrix(mesh):
    grads, area = _barycentric_gradients(mesh)
    local = np.einsum("eik,ejk->eij", grads, grads) * area[:, None, None]
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_nodes
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def load_vector(mesh, f, order=4):
    if f is None:
        return np.zeros(mesh.n_nodes)
    bary, w = triangle_rule(order)
    p = mesh.nodes[mesh.triangles]
    X = np.einsum("qi,eid->eqd", bary, p)
    fx = np.asarray(f(X[..., 0], X[..., 1]), dtype=float)
    area = mesh.areas()
    local = np.einsum("eq,qi,q->ei", fx, bary, w) * (2 * area)[:, None]
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_nodes)


def _at_vertex(nodes, vertex=VERTEX):
    return np.hypot(nodes[:, 0] - vertex[0], nodes[:, 1] - vertex[1]) < 1e-14


def interpolate(mesh, g, nodes=None, vertex_value=None):
    """Nodal values of ``g``; if ``vertex_value`` is given it replaces the
    value at the corner node (where ``g`` may be singular)."""
    idx = np.arange(mesh.n_nodes) if nodes is None else np.asarray(nodes)
    pts = mesh.nodes[idx]
    out = np.empty(len(idx))
    corner = _at_vertex(pts) if vertex_value is not None else np.zeros(len(idx), bool)
    out[corner] = vertex_value if vertex_value is not None else 0.0
    if np.any(~corner):
        out[~corner] = g(pts[~corner, 0], pts[~corner, 1])
    return out


def pcg(matrix, rhs, rtol=1e-10, maxiter=None):
    """Conjugate gradients with Jacobi preconditioning."""
    n = matrix.shape[0]
    if not np.any(rhs):
        return np.zeros(n)
    maxiter = 20 * n if maxiter is None else maxiter
    precond = sparse.diags(1.0 / matrix.diagonal())
    x, info = spla.cg(matrix, rhs, rtol=rtol, atol=0.0, maxiter=maxiter, M=precond)
    if info != 0:
        raise SolverStall(f"CG did not reach relative residual {rtol} in {maxiter} iterations")
    return x


def solve_dirichlet(mesh, f=None, g=None, vertex_value=None, rtol=1e-10):
    """P1 Galerkin solution of ``-Lap u = f``, ``u = g`` (nodal interpolation)."""
    K = stiffness_matrix(mesh)
    F = load_vector(mesh, f)
    bnd = mesh.boundary_nodes
    inner = np.setdiff1d(np.arange(mesh.n_nodes), bnd)
    u = np.zeros(mesh.n_nodes)
    if g is not None:
        u[bnd] = interpolate(mesh, g, bnd, vertex_value)
    rhs = F[inner] - K[inner][:, bnd] @ u[bnd]
    u[inner] = pcg(K[inner][:, inner].tocsr(), rhs, rtol)
    return DiscreteField(mesh, u)


def _gradient_callable(exact, gradient):
    if gradient is not None:
        return gradient
    if hasattr(exact, "gradient"):
        return exact.gradient
    raise ValidationError("an exact gradient is required for the H1 error")


def _vertex_subtriangles(a, b, c, levels):
    """Dyadic split of triangle (a, b, c) toward ``a``; last entry is the
    innermost triangle, to be integrated with a rule collapsed at ``a``."""
    out = []
    for _ in range(levels):
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        out += [(ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        b, c = ab, ca
    out.append((a, b, c))
    return out


def h1_error(field, exact, gradient=None, order=4, vertex=VERTEX, vertex_levels=24):
    """``(||u - u_h||_L2, |u - u_h|_H1)`` by elementwise Gauss quadrature.

    Elements touching ``vertex`` are subdivided dyadically toward it and the
    innermost piece uses an order-8 rule collapsed at the vertex, so no
    quadrature point ever lands on a singularity.
    """
    mesh = field.mesh
    grad = _gradient_callable(exact, gradient)
    G = field.element_gradients()
    t = mesh.triangles
    p = mesh.nodes[t]
    U = field.values[t]
    corner = _at_vertex(mesh.nodes, vertex)
    touching = np.any(corner[t], axis=1)

    bary, w = triangle_rule(order)
    reg = ~touching
    X = np.einsum("qi,eid->eqd", bary, p[reg])
    uh = np.einsum("qi,ei->eq", bary, U[reg])
    ux, uy = grad(X[..., 0], X[..., 1])
    area2 = 2 * mesh.areas()[reg]
    l2 = np.sum(((exact(X[..., 0], X[..., 1]) - uh) ** 2 @ w) * area2)
    h1 = np.sum((((ux - G[reg, 0:1]) ** 2 + (uy - G[reg, 1:2]) ** 2) @ w) * area2)

    fine_bary, fine_w = triangle_rule(max(order, 8))
    for e in np.flatnonzero(touching):
        k = int(np.flatnonzero(corner[t[e]])[0])
        order_idx = [k, (k + 1) % 3, (k + 2) % 3]
        a, b, c = p[e][order_idx]
        ua = U[e][k]
        for tri in _vertex_subtriangles(a, b, c, vertex_levels):
            tri = np.array(tri)
            d1, d2 = tri[1] - tri[0], tri[2] - tri[0]
            ar2 = abs(d1[0] * d2[1] - d1[1] * d2[0])
            Xs = fine_bary @ tri
            uh = ua + (Xs - a) @ G[e]
            gx, gy = grad(Xs[:, 0], Xs[:, 1])
            l2 += ar2 * np.dot(fine_w, (exact(Xs[:, 0], Xs[:, 1]) - uh) ** 2)
            h1 += ar2 * np.dot(fine_w, (gx - G[e, 0]) ** 2 + (gy - G[e, 1]) ** 2)
    return math.sqrt(l2), math.sqrt(h1)


def corner_pole_indicator(field, radius, vertex=VERTEX):
    """Largest ``|u_h|`` over nodes closer than ``radius`` to the corner."""
    nodes = field.mesh.nodes
    near = np.hypot(nodes[:, 0] - vertex[0], nodes[:, 1] - vertex[1]) < radius
    if not np.any(near):
        raise EmptyBall(f"no mesh node within {radius} of the corner")
    return float(np.max(np.abs(field.values[near])))


# -- studies -----------------------------------------------------------------


@dataclass
class ManufacturedProblem:
    name: str
    exact: Callable
    gradient: Callable
    source: Optional[Callable] = None

    @classmethod
    def from_field(cls, field, name=None):
        return cls(name or f"corner lam={field.lam:g}", field, field.gradient)

    @classmethod
    def smooth_quadratic(cls):
        return cls(
            "x^2 - y^2",
            lambda x, y: x * x - y * y,
            lambda x, y: (2 * x, -2 * y),
        )

    @classmethod
    def cutoff(cls, field, profile, name=None):
        """``eta u`` with ``-Lap(eta u)`` as source and zero boundary data."""

        def exact(x, y):
            r, th = field.frame.to_polar(x, y)
            return profile(r) * field.eval_polar(r, th)

        def gradient(x, y):
            r, th = field.frame.to_polar(x, y)
            eta, d1, _ = profile.derivatives(r)
            u = field.eval_polar(r, th)
            gr, gt = field.gradient_polar(r, th)
            return field.frame.rotate(d1 * u + eta * gr, eta * gt, th)

        return cls(
            name or f"cut-off corner lam={field.lam:g}",
            exact,
            gradient,
            lambda x, y: laplace_rhs(field, profile, x, y),
        )


@dataclass
class ConvergenceRow:
    level: int
    n: int
    h: float
    l2: float
    h1: float
    rate_l2: float = math.nan
    rate_h1: float = math.nan


def iter_convergence(problem, levels, n0=8, rtol=1e-10):
    """Yield ``(row, u_h)`` per level; see :func:`convergence_study`."""
    if levels < 3:
        raise ValidationError("a convergence study needs at least three levels")
    prev = None
    for level in range(levels):
        n = n0 * 2**level
        mesh = build_lshape_mesh(n)
        mesh.level = level
        uh = solve_dirichlet(mesh, problem.source, problem.exact, vertex_value=0.0, rtol=rtol)
        l2, h1 = h1_error(uh, problem.exact, problem.gradient)
        row = ConvergenceRow(level, n, mesh.h(), l2, h1)
        if prev is not None:
            row.rate_l2 = math.log2(prev.l2 / l2)
            row.rate_h1 = math.log2(prev.h1 / h1)
        prev = row
        yield row, uh


def convergence_study(problem, levels, n0=8, rtol=1e-10):
    """Solve on ``n0 * 2^k`` meshes, ``k < levels``; rates are log2 of error ratios."""
    return [row for row, _ in iter_convergence(problem, levels, n0, rtol)]


@dataclass
class LimitCaseRow:
    level: int
    n: int
    corner_max: float
    interpolant_max: float


def limit_case_study(ns=(8, 16, 32, 64), radius=0.1, xi=2.0 / 3.0, rtol=1e-10):
    """Discrete solutions for ``g = r^-xi sin(xi theta)`` next to its interpolant."""
    g = limit_case_field(xi)
    rows = []
    for level, n in enumerate(ns):
        mesh = build_lshape_mesh(n)
        mesh.level = level
        uh = solve_dirichlet(mesh, None, g, vertex_value=0.0, rtol=rtol)
        interp = DiscreteField(mesh, interpolate(mesh, g, vertex_value=0.0))
        rows.append(
            LimitCaseRow(
                level,
                n,
                corner_pole_indicator(uh, radius),
                corner_pole_indicator(interp, radius),
            )
        )
    return rows, uh
