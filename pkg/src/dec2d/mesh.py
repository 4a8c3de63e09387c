"""Oriented 2D simplicial complexes, cochains and incidence operators.

Conventions
-----------
* Edges are stored as sorted vertex pairs ``(i, j)`` with ``i < j`` and
  oriented from ``i`` to ``j``.
* Triangles are stored as sorted vertex triples together with a sign in
  ``triangle_orientation``; ``+1`` means the sorted order is the positive
  (counterclockwise for planar meshes) orientation.  Two-cochain values
  always refer to the positively oriented triangle.
* Local edge ``i`` of a triangle is the edge opposite its ``i``-th sorted
  vertex.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DegenerateTriangle,
    DegreeMismatch,
    DuplicateTriangle,
    InvalidDegree,
    MeshError,
    NonManifold,
)

__all__ = [
    "SimplicialComplex2",
    "Cochain",
    "build_complex",
    "coboundary",
    "is_symmetric",
    "write_coo_text",
]

# boundary of sorted [p, q, r] is [q, r] - [p, r] + [p, q]
_LOCAL_EDGE_SIGN = np.array([1, -1, 1])
_LOCAL_EDGE_VERTS = np.array([[1, 2], [0, 2], [0, 1]])


class SimplicialComplex2:
    """Immutable oriented 2D simplicial complex with vertex coordinates.

    Use :func:`build_complex` to construct one; the constructor assumes
    validated, normalized input.
    """

    def __init__(self, vertex_coords, triangles, orientation):
        self.vertex_coords = vertex_coords
        self.triangles = triangles
        self.triangle_orientation = orientation
        self._derive_edges()
        self._cache = {}
        self.metadata = {}
        for arr in (self.vertex_coords, self.triangles, self.triangle_orientation,
                    self.edges, self.tri_edges, self.edge_to_triangles,
                    self.boundary_edges, self.boundary_vertices):
            arr.setflags(write=False)

    def _derive_edges(self):
        tris = self.triangles
        local = tris[:, _LOCAL_EDGE_VERTS]  # (N2, 3, 2)
        flat = local.reshape(-1, 2)
        edges, inverse, counts = np.unique(flat, axis=0, return_inverse=True,
                                           return_counts=True)
        inverse = inverse.reshape(-1)
        if np.any(counts > 2):
            bad = edges[counts > 2]
            raise NonManifold(f"edge {tuple(bad[0])} belongs to more than two triangles")
        self.edges = edges
        self.tri_edges = inverse.reshape(-1, 3)
        e2t = -np.ones((len(edges), 2), dtype=np.int64)
        fill = np.zeros(len(edges), dtype=np.int64)
        tri_ids = np.repeat(np.arange(len(tris)), 3)
        for e, t in zip(inverse, tri_ids):
            e2t[e, fill[e]] = t
            fill[e] += 1
        self.edge_to_triangles = e2t
        self.boundary_edges = counts == 1
        bv = np.zeros(len(self.vertex_coords), dtype=bool)
        bv[edges[self.boundary_edges].ravel()] = True
        self.boundary_vertices = bv

    # counts -----------------------------------------------------------
    @property
    def n0(self):
        return len(self.vertex_coords)

    @property
    def n1(self):
        return len(self.edges)

    @property
    def n2(self):
        return len(self.triangles)

    def count(self, k):
        if k not in (0, 1, 2):
            raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")
        return (self.n0, self.n1, self.n2)[k]

    @property
    def euler_characteristic(self):
        return self.n0 - self.n1 + self.n2

    @property
    def embedding_dim(self):
        return self.vertex_coords.shape[1]

    @property
    def is_planar(self):
        c = self.vertex_coords
        return c.shape[1] == 2 or bool(np.all(c[:, 2] == 0.0))

    @property
    def planar_coords(self):
        if not self.is_planar:
            raise MeshError("complex is not planar")
        return self.vertex_coords[:, :2]

    def oriented_triangles(self):
        """Vertex triples listed in their positive orientation."""
        t = np.array(self.triangles)
        neg = self.triangle_orientation < 0
        t[neg] = t[neg][:, [0, 2, 1]]
        return t

    def triangle_points(self, t):
        return self.vertex_coords[self.triangles[t]]

    def edge_lengths(self):
        p = self.vertex_coords
        return np.linalg.norm(p[self.edges[:, 1]] - p[self.edges[:, 0]], axis=1)

    def local_edge_signs(self):
        """(N2, 3) incidence signs of each triangle on its local edges."""
        return self.triangle_orientation[:, None] * _LOCAL_EDGE_SIGN[None, :]

    def cached(self, key, factory):
        """Memoize a derived quantity on this (immutable) complex."""
        try:
            return self._cache[key]
        except KeyError:
            val = self._cache[key] = factory()
            return val

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex2):
            return NotImplemented
        return (np.array_equal(self.vertex_coords, other.vertex_coords)
                and np.array_equal(self.triangles, other.triangles)
                and np.array_equal(self.triangle_orientation, other.triangle_orientation))

    __hash__ = object.__hash__

    def __repr__(self):
        return (f"SimplicialComplex2(N0={self.n0}, N1={self.n1}, N2={self.n2}, "
                f"chi={self.euler_characteristic}, planar={self.is_planar})")


def _signed_area2(p):
    """Twice the signed area of planar triangles p (N, 3, 2)."""
    return ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))


def build_complex(vertex_coords, triangle_triples):
    """Validate and normalize raw mesh data into a :class:`SimplicialComplex2`.

    Parameters
    ----------
    vertex_coords : array_like, shape (N0, 2) or (N0, 3)
    triangle_triples : array_like of int, shape (N2, 3)

    Raises
    ------
    NonManifold, DegenerateTriangle, DuplicateTriangle, MeshError
    """
    coords = np.array(vertex_coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] not in (2, 3):
        raise MeshError("vertex coordinates must have shape (N, 2) or (N, 3)")
    if len(coords) < 3:
        raise MeshError("a complex needs at least 3 vertices")
    if not np.all(np.isfinite(coords)):
        raise MeshError("vertex coordinates must be finite")
    tris = np.array(triangle_triples, dtype=np.int64).reshape(-1, 3)
    if len(tris) == 0:
        raise MeshError("a complex needs at least one triangle")
    if tris.min() < 0 or tris.max() >= len(coords):
        raise MeshError("triangle index out of range")
    tris = np.sort(tris, axis=1)
    if np.any(tris[:, 0] == tris[:, 1]) or np.any(tris[:, 1] == tris[:, 2]):
        raise MeshError("triangle with repeated vertex index")
    order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))
    tris = tris[order]
    dup = np.all(tris[1:] == tris[:-1], axis=1)
    if np.any(dup):
        raise DuplicateTriangle(f"triangle {tuple(tris[1:][dup][0])} listed twice")

    pts = coords[tris]
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    planar = coords.shape[1] == 2 or bool(np.all(coords[:, 2] == 0.0))
    if coords.shape[1] == 2:
        cross = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])[:, None]
    else:
        cross = np.cross(e1, e2)
    area2 = np.linalg.norm(cross, axis=1)
    maxside2 = np.max([np.sum(e1 ** 2, 1), np.sum(e2 ** 2, 1),
                       np.sum((pts[:, 2] - pts[:, 1]) ** 2, 1)], axis=0)
    bad = area2 <= 2e-14 * maxside2
    if np.any(bad):
        raise DegenerateTriangle(f"triangle {tuple(tris[bad][0])} has zero area")

    if planar:
        orient = np.where(_signed_area2(pts[:, :, :2]) > 0, 1, -1)
        cplx = SimplicialComplex2(coords, tris, orient.astype(np.int64))
        _check_consistent(cplx)
        return cplx
    cplx = SimplicialComplex2(coords, tris, np.ones(len(tris), dtype=np.int64))
    orient = _propagate_orientation(cplx, cross)
    return SimplicialComplex2(coords, tris, orient)


def _check_consistent(cplx):
    signs = cplx.local_edge_signs()
    acc = np.zeros(cplx.n1, dtype=np.int64)
    np.add.at(acc, cplx.tri_edges.ravel(), signs.ravel())
    interior = ~cplx.boundary_edges
    if np.any(acc[interior] != 0):
        e = np.flatnonzero(interior & (acc != 0))[0]
        raise MeshError(f"triangles overlap across edge {tuple(cplx.edges[e])}")


def _propagate_orientation(cplx, normals):
    """Consistent orientation for an embedded surface by breadth-first search."""
    n2 = cplx.n2
    orient = np.zeros(n2, dtype=np.int64)
    for start in range(n2):
        if orient[start]:
            continue
        orient[start] = 1 if normals[start, -1] >= 0 else -1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for li, e in enumerate(cplx.tri_edges[t]):
                s_t = orient[t] * _LOCAL_EDGE_SIGN[li]
                for u in cplx.edge_to_triangles[e]:
                    if u < 0 or u == t:
                        continue
                    lu = int(np.flatnonzero(cplx.tri_edges[u] == e)[0])
                    want = -s_t * _LOCAL_EDGE_SIGN[lu]
                    if orient[u] == 0:
                        orient[u] = want
                        queue.append(u)
                    elif orient[u] != want:
                        raise NonManifold("surface is not orientable")
    return orient


def coboundary(cplx, k):
    """Signed incidence operator ``d_k : C^k -> C^{k+1}`` as a sparse matrix."""
    if k not in (0, 1):
        raise InvalidDegree(f"coboundary is defined for k in (0, 1), got {k}")

    def make():
        if k == 0:
            n1 = cplx.n1
            rows = np.repeat(np.arange(n1), 2)
            cols = cplx.edges.ravel()
            vals = np.tile([-1, 1], n1)
            return sp.csr_matrix((vals, (rows, cols)), shape=(n1, cplx.n0), dtype=np.int64)
        rows = np.repeat(np.arange(cplx.n2), 3)
        cols = cplx.tri_edges.ravel()
        vals = cplx.local_edge_signs().ravel()
        return sp.csr_matrix((vals, (rows, cols)), shape=(cplx.n2, cplx.n1), dtype=np.int64)

    return cplx.cached(("d", k), make)


@dataclass(frozen=True, eq=False)
class Cochain:
    """Real values on the oriented k-simplices of a complex."""

    complex: SimplicialComplex2
    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise InvalidDegree(f"degree must be 0, 1 or 2, got {self.degree}")
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if len(vals) != self.complex.count(self.degree):
            raise DegreeMismatch(
                f"{self.degree}-cochain needs {self.complex.count(self.degree)} values, "
                f"got {len(vals)}")
        object.__setattr__(self, "values", vals)

    def _check(self, other):
        if other.complex is not self.complex or other.degree != self.degree:
            raise DegreeMismatch("cochains live on different spaces")

    def __add__(self, other):
        self._check(other)
        return Cochain(self.complex, self.degree, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Cochain(self.complex, self.degree, self.values - other.values)

    def __mul__(self, scalar):
        return Cochain(self.complex, self.degree, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Cochain(self.complex, self.degree, -self.values)

    def d(self):
        """Coboundary; the coboundary of a 2-cochain is empty."""
        if self.degree == 2:
            raise InvalidDegree("no coboundary on 2-cochains in a 2D complex")
        return Cochain(self.complex, self.degree + 1,
                       coboundary(self.complex, self.degree) @ self.values)

    def to_dict(self):
        return {"degree": self.degree, "values": [float(v) for v in self.values]}


def is_symmetric(A, rtol=1e-14):
    """Symmetry check ``|A - A^T|_max <= rtol * |A|_max``."""
    if sp.issparse(A):
        diff = abs(A - A.T)
        dmax = diff.max() if diff.nnz else 0.0
        amax = abs(A).max() if A.nnz else 0.0
    else:
        A = np.asarray(A)
        dmax = np.max(np.abs(A - A.T)) if A.size else 0.0
        amax = np.max(np.abs(A)) if A.size else 0.0
    return bool(dmax <= rtol * amax)


def write_coo_text(A, path):
    """Write a matrix as ``row col value`` lines (0-based indices)."""
    coo = sp.coo_matrix(A)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}\n")
