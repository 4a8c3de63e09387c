"""Triangle metrics, circumcentric dual measures and mesh classification.

All quantities are intrinsic: they depend only on edge-vector dot products,
so planar meshes and embedded surfaces are handled by the same code.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateTriangle, SpecInvalid

__all__ = [
    "TriangleGeometry",
    "DualMeasures",
    "MeshQualityReport",
    "triangle_geometry",
    "delta_T",
    "shape_constants",
    "mesh_geometry",
    "signed_dual_measures",
    "classify_mesh",
    "mesh_size",
]


@dataclass(frozen=True)
class TriangleGeometry:
    angles: tuple      # (A, B, C) at vertices 0, 1, 2
    sides: tuple       # (a, b, c), side opposite the same-letter angle
    area: float
    circumradius: float
    inradius: float
    circumcenter: tuple
    delta_T: float
    abs_delta_T: float


def _corner_terms(p):
    """Dot products, areas and lengths for stacked triangles p (N, 3, dim).

    Returns ``dots[:, i]`` = <p_j - p_i, p_k - p_i>, ``area`` and squared
    side lengths ``l2[:, i]`` of the side opposite vertex i.
    """
    p = np.asarray(p, dtype=float)
    dots = np.empty(p.shape[:2])
    l2 = np.empty(p.shape[:2])
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        u = p[:, j] - p[:, i]
        v = p[:, k] - p[:, i]
        dots[:, i] = np.einsum("nd,nd->n", u, v)
        w = p[:, k] - p[:, j]
        l2[:, i] = np.einsum("nd,nd->n", w, w)
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    if p.shape[2] == 2:
        area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    else:
        area = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
    return dots, area, l2


def _delta_terms(sin, cos):
    """sin A sin B cos C / sin^2 C with C running over the three vertices."""
    out = np.empty_like(sin)
    for c in range(3):
        a, b = (c + 1) % 3, (c + 2) % 3
        out[..., c] = sin[..., a] * sin[..., b] * cos[..., c] / sin[..., c] ** 2
    return out


def triangle_geometry(coords):
    """Metric data of one triangle given its three vertex coordinates.

    Works for points in the plane or in 3-space.

    Raises
    ------
    DegenerateTriangle
        if the area is below ``1e-14 * (max side)**2``.
    """
    p = np.asarray(coords, dtype=float).reshape(1, 3, -1)
    dots, area, l2 = _corner_terms(p)
    mu = float(area[0])
    if not mu > 1e-14 * float(l2.max()):
        raise DegenerateTriangle("triangle has (numerically) zero area")
    sides = np.sqrt(l2[0])
    angles = np.arctan2(2.0 * mu, dots[0])
    R = float(np.prod(sides) / (4.0 * mu))
    r = float(2.0 * mu / np.sum(sides))
    w = l2[0] * (2.0 * dots[0])
    center = (w @ p[0]) / w.sum()
    terms = _delta_terms(np.sin(angles), np.cos(angles))
    return TriangleGeometry(
        angles=tuple(float(x) for x in angles),
        sides=tuple(float(x) for x in sides),
        area=mu,
        circumradius=R,
        inradius=r,
        circumcenter=tuple(float(x) for x in center),
        delta_T=float(terms.min()),
        abs_delta_T=float(np.abs(terms).min()),
    )


def delta_T(tri):
    """Signed acuteness constant of a triangle.

    ``min`` over the three choices of C of ``sin A sin B cos C / sin^2 C``;
    zero for right triangles and negative for obtuse ones.  ``tri`` is a
    :class:`TriangleGeometry` or an array of three angles.
    """
    angles = np.asarray(tri.angles if isinstance(tri, TriangleGeometry) else tri, dtype=float)
    return float(_delta_terms(np.sin(angles), np.cos(angles)).min())


def shape_constants(tri):
    """The three equivalent shape-regularity measures of a triangle."""
    angles = np.asarray(tri.angles if isinstance(tri, TriangleGeometry) else tri, dtype=float)
    s = np.sin(angles)
    return {
        "r_over_R": float(2.0 * np.prod(s) / np.sum(s)),
        "area_over_R2": float(2.0 * np.prod(s)),
        "min_angle": float(angles.min()),
    }


def mesh_geometry(cplx):
    """Per-triangle arrays for a whole complex (cached).

    Keys: ``area`` (N2,), ``angles``/``cot``/``l2`` (N2, 3) indexed by the
    local (sorted) vertex, ``circumradius`` (N2,), ``circumcenter`` (N2, dim).
    """
    def make():
        p = cplx.vertex_coords[cplx.triangles]
        dots, area, l2 = _corner_terms(p)
        angles = np.arctan2(2.0 * area[:, None], dots)
        cot = dots / (2.0 * area[:, None])
        R = np.sqrt(np.prod(l2, axis=1)) / (4.0 * area)
        w = l2 * (2.0 * dots)
        center = np.einsum("ni,nid->nd", w, p) / w.sum(axis=1)[:, None]
        return {"area": area, "angles": angles, "cot": cot, "l2": l2,
                "circumradius": R, "circumcenter": center}
    return cplx.cached("geometry", make)


def mesh_size(cplx):
    """Mesh size h: the largest triangle circumradius."""
    return float(mesh_geometry(cplx)["circumradius"].max())


@dataclass
class DualMeasures:
    corner_areas: np.ndarray    # (N2, 3) signed dual area of each corner
    vertex_areas: np.ndarray    # (N0,) signed |*v|
    edge_lengths: np.ndarray    # (N1,) primal |e|
    dual_lengths: np.ndarray    # (N1,) signed |*e|
    circumcenters: np.ndarray   # (N2, dim)
    star0_positive: bool
    star1_positive: bool

    @property
    def dual_ratio(self):
        """|*e| / |e| per edge, the DEC 1-form Hodge star diagonal."""
        return self.dual_lengths / self.edge_lengths


def signed_dual_measures(cplx):
    """Signed circumcentric dual areas and lengths of a complex.

    Corner areas use ``(l_j^2 cot j + l_k^2 cot k) / 8``; dual edge lengths
    use ``|e| (cot t1 + cot t2) / 2`` with one term on boundary edges.  The
    cotangent form stays finite at right angles.
    """
    def make():
        g = mesh_geometry(cplx)
        cot, l2 = g["cot"], g["l2"]
        corner = np.empty_like(cot)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            corner[:, i] = (l2[:, j] * cot[:, j] + l2[:, k] * cot[:, k]) / 8.0
        varea = np.zeros(cplx.n0)
        np.add.at(varea, cplx.triangles.ravel(), corner.ravel())
        ratio = np.zeros(cplx.n1)
        # local edge i is opposite local vertex i
        np.add.at(ratio, cplx.tri_edges.ravel(), 0.5 * cot.ravel())
        elen = cplx.edge_lengths()
        return DualMeasures(
            corner_areas=corner,
            vertex_areas=varea,
            edge_lengths=elen,
            dual_lengths=ratio * elen,
            circumcenters=g["circumcenter"],
            star0_positive=bool(np.all(varea > 0)),
            star1_positive=bool(np.all(ratio > 0)),
        )
    return cplx.cached("dual", make)


@dataclass
class MeshQualityReport:
    acute: bool
    uniformly_acute: bool
    boundary_acute: bool
    uniformly_boundary_acute: bool
    delaunay: bool
    nondegenerate_delaunay: bool
    uniformly_delaunay: bool
    shape_regular: bool
    dec_regular: bool
    curvature_bounded: bool
    delta_0: float
    delta_pi: float
    delta_half_pi: float
    delta_half_pi_boundary: float
    min_delta_T: float
    curvature_N: float
    max_valence: int
    h: float
    max_boundary_defect: float
    min_boundary_defect: float
    violations: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


DEFAULT_TOLERANCES = {
    "delta0_min": 0.1,
    "delta_pi_min": 0.05,
    "delta_half_pi_min": 0.05,
    "curvature_max": math.pi,
    "angle_eps": 1e-10,
}


def opposite_angle_sums(cplx):
    """Sum of the angles opposite each edge (one angle on boundary edges)."""
    ang = mesh_geometry(cplx)["angles"]
    s = np.zeros(cplx.n1)
    np.add.at(s, cplx.tri_edges.ravel(), ang.ravel())
    return s


def classify_mesh(cplx, tolerances=None):
    """Evaluate the ten geometric mesh conditions and their margins.

    ``tolerances`` may override entries of :data:`DEFAULT_TOLERANCES`.  The
    uniform flags compare measured margins against the ``*_min`` thresholds;
    strict inequalities must hold with margin ``angle_eps``.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise SpecInvalid(f"unknown tolerance keys: {sorted(unknown)}")
        tol.update(tolerances)
    eps = tol["angle_eps"]

    g = mesh_geometry(cplx)
    ang = g["angles"]
    half_pi = 0.5 * math.pi
    interior = ~cplx.boundary_edges
    sums = opposite_angle_sums(cplx)

    max_angle = float(ang.max())
    delta_0 = float(ang.min())
    bnd_mask = cplx.boundary_edges[cplx.tri_edges]
    bnd_angles = ang[bnd_mask]
    max_bnd = float(bnd_angles.max()) if bnd_angles.size else 0.0
    int_sums = sums[interior]
    max_sum = float(int_sums.max()) if int_sums.size else 0.0

    s = np.sin(ang)
    terms = _delta_terms(s, np.cos(ang))
    min_dT = float(terms.min())

    # angle sums around vertices
    vsum = np.zeros(cplx.n0)
    np.add.at(vsum, cplx.triangles.ravel(), ang.ravel())
    valence = np.bincount(cplx.triangles.ravel(), minlength=cplx.n0)
    inner_v = ~cplx.boundary_vertices
    defects = 2 * math.pi - vsum[inner_v]
    curvature_N = float(-defects.min()) if defects.size else 0.0
    bdef = math.pi - vsum[cplx.boundary_vertices]

    viol = {
        "non_acute_triangles": np.flatnonzero(ang.max(axis=1) >= half_pi - eps).tolist(),
        "boundary_non_acute_edges": np.flatnonzero(
            cplx.boundary_edges & (sums >= half_pi - eps)).tolist(),
        "non_delaunay_edges": np.flatnonzero(interior & (sums > math.pi + eps)).tolist(),
        "degenerate_delaunay_edges": np.flatnonzero(
            interior & (sums >= math.pi - eps)).tolist(),
        "small_angle_triangles": np.flatnonzero(
            ang.min(axis=1) < tol["delta0_min"]).tolist(),
    }

    acute = max_angle < half_pi - eps
    boundary_acute = max_bnd < half_pi - eps
    nondeg = bool(np.all(int_sums < math.pi - eps))
    shape_regular = delta_0 >= tol["delta0_min"]
    h = float(g["circumradius"].max())
    return MeshQualityReport(
        acute=bool(acute),
        uniformly_acute=bool(half_pi - max_angle >= tol["delta_half_pi_min"]),
        boundary_acute=bool(boundary_acute),
        uniformly_boundary_acute=bool(half_pi - max_bnd >= tol["delta_half_pi_min"]),
        delaunay=bool(np.all(int_sums <= math.pi + eps)),
        nondegenerate_delaunay=nondeg,
        uniformly_delaunay=bool(math.pi - max_sum >= tol["delta_pi_min"]),
        shape_regular=bool(shape_regular),
        dec_regular=bool(shape_regular and nondeg),
        curvature_bounded=bool(curvature_N <= tol["curvature_max"]),
        delta_0=delta_0,
        delta_pi=float(math.pi - max_sum),
        delta_half_pi=float(half_pi - max_angle),
        delta_half_pi_boundary=float(half_pi - max_bnd),
        min_delta_T=min_dT,
        curvature_N=curvature_N,
        max_valence=int(valence.max()),
        h=h,
        max_boundary_defect=float(bdef.max()) if bdef.size else 0.0,
        min_boundary_defect=float(bdef.min()) if bdef.size else 0.0,
        violations=viol,
    )
