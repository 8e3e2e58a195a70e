"""Triangulations of the L-shaped domain (-1, 1)^2 minus [0, 1] x [-1, 0].

The reentrant corner sits at the origin with its edges along the positive
x-axis (theta = 0) and the negative y-axis (theta = 3pi/2).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

L_SHAPE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (0.0, -1.0))


@dataclass(frozen=True)
class PolygonDomain:
    vertices: tuple = L_SHAPE
    corner: int = 0

    def interior_angle(self, index=None):
        i = self.corner if index is None else index
        v = np.asarray(self.vertices, dtype=float)
        prev, here, nxt = v[i - 1], v[i], v[(i + 1) % len(v)]
        a = math.atan2(*(nxt - here)[::-1])
        b = math.atan2(*(prev - here)[::-1])
        return (b - a) % (2 * math.pi)

    def signed_area(self):
        v = np.asarray(self.vertices, dtype=float)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass
class TriMesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary_nodes: np.ndarray
    level: int = 0

    @property
    def n_nodes(self):
        return len(self.nodes)

    def edges(self):
        """Unique edges as sorted node pairs, with the number of adjacent triangles."""
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0, return_counts=True)

    def areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def h(self):
        edges, _ = self.edges()
        return float(np.max(np.linalg.norm(self.nodes[edges[:, 0]] - self.nodes[edges[:, 1]], axis=1)))

    def min_angle(self):
        p = self.nodes[self.triangles]
        worst = math.pi
        for k in range(3):
            a = p[:, (k + 1) % 3] - p[:, k]
            b = p[:, (k + 2) % 3] - p[:, k]
            cos = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            worst = min(worst, float(np.min(np.arccos(np.clip(cos, -1, 1)))))
        return worst


def _boundary_from_edges(mesh_nodes, triangles):
    t = triangles
    e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)
    return np.unique(edges[counts == 1])


def build_lshape_mesh(n):
    """Criss-cross mesh: each of the ``n x n`` cells per unit square is cut
    into four triangles by its diagonals."""
    if int(n) != n or n < 2:
        raise ValidationError(f"need an integer n >= 2, got {n}")
    n = int(n)
    # integer coordinates in units of 1/(2n): grid nodes even, centres odd
    index = {}
    coords = []

    def node(i, j):
        key = (i, j)
        k = index.get(key)
        if k is None:
            k = index[key] = len(coords)
            coords.append(key)
        return k

    tris = []
    for cj in range(-n, n):
        for ci in range(-n, n):
            if ci >= 0 and cj < 0:
                continue
            x0, y0 = 2 * ci, 2 * cj
            ll, lr = node(x0, y0), node(x0 + 2, y0)
            ur, ul = node(x0 + 2, y0 + 2), node(x0, y0 + 2)
            c = node(x0 + 1, y0 + 1)
            tris += [(ll, lr, c), (lr, ur, c), (ur, ul, c), (ul, ll, c)]
    nodes = np.array(coords, dtype=float) / (2 * n)
    triangles = np.array(tris, dtype=np.int64)
    return TriMesh(nodes, triangles, _boundary_from_edges(nodes, triangles), level=0)


def refine(mesh):
    """Red refinement: every triangle is split into four similar ones."""
    t = mesh.triangles
    e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    edges, inverse = np.unique(e, axis=0, return_inverse=True)
    inverse = inverse.reshape(3, -1).T + len(mesh.nodes)
    mids = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
    nodes = np.vstack([mesh.nodes, mids])
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    ab, bc, ca = inverse[:, 0], inverse[:, 1], inverse[:, 2]
    tris = np.concatenate(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ]
    )
    return TriMesh(nodes, tris, _boundary_from_edges(nodes, tris), level=mesh.level + 1)


def lshape_node_count(n):
    """Closed-form node count of :func:`build_lshape_mesh`."""
    return (2 * n + 1) ** 2 - n * n + 3 * n * n
