"""de Rham map (integration onto cochains) and lowest-order Whitney map."""
import numpy as np

from .errors import InvalidDegree, OutOfTriangle, QuadratureFailure
from .geometry import mesh_geometry
from .mesh import Cochain
from .quadrature import LINE_POINTS, LINE_WEIGHTS, TRIANGLE_BARY, TRIANGLE_WEIGHTS

__all__ = ["barycentric_gradients", "de_rham_map", "whitney_evaluate"]


def barycentric_gradients(cplx):
    """Gradients of the barycentric coordinates, shape (N2, 3, dim).

    Index ``[t, i]`` is the gradient of the coordinate of the i-th sorted
    vertex of triangle t, taken in the triangle's plane.
    """
    def make():
        p = cplx.vertex_coords[cplx.triangles]
        E = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # (N, dim, 2)
        G = np.einsum("ndi,ndj->nij", E, E)
        pinv = np.linalg.solve(G, np.transpose(E, (0, 2, 1)))      # (N, 2, dim)
        grads = np.empty((len(p), 3, p.shape[2]))
        grads[:, 1:] = pinv
        grads[:, 0] = -pinv[:, 0] - pinv[:, 1]
        return grads
    return cplx.cached("bary_grads", make)


def _finite(vals):
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("form evaluated to a non-finite value")
    return vals


def de_rham_map(form, degree, cplx):
    """Integrate an analytic form over the oriented simplices of ``cplx``.

    ``form`` is called with an array of points, shape (n, dim), and returns
    values of shape (n,) for degrees 0 and 2 (scalar, or density against the
    area form) and (n, dim) for degree 1 (vector proxy).  Edge integrals use
    5-point Gauss; triangle integrals the degree-4 symmetric rule.
    """
    p = cplx.vertex_coords
    if degree == 0:
        vals = _finite(form(p)).reshape(-1)
        return Cochain(cplx, 0, vals)
    if degree == 1:
        a = p[cplx.edges[:, 0]]
        b = p[cplx.edges[:, 1]]
        t = b - a
        pts = a[:, None, :] + LINE_POINTS[None, :, None] * t[:, None, :]
        F = _finite(form(pts.reshape(-1, p.shape[1]))).reshape(len(a), len(LINE_POINTS), -1)
        vals = np.einsum("nqd,nd,q->n", F, t, LINE_WEIGHTS)
        return Cochain(cplx, 1, vals)
    if degree == 2:
        tri = p[cplx.triangles]
        pts = np.einsum("qi,nid->nqd", TRIANGLE_BARY, tri)
        f = _finite(form(pts.reshape(-1, p.shape[1]))).reshape(len(tri), -1)
        area = mesh_geometry(cplx)["area"]
        return Cochain(cplx, 2, area * (f @ TRIANGLE_WEIGHTS))
    raise InvalidDegree(f"degree must be 0, 1 or 2, got {degree}")


def whitney_evaluate(cochain, triangle_id, barycentric_point):
    """Value of the Whitney interpolant of ``cochain`` at a point of a triangle.

    The barycentric coordinates refer to the triangle's sorted vertices.
    Returns a scalar for degrees 0 and 2 and a vector for degree 1.
    """
    lam = np.asarray(barycentric_point, dtype=float).reshape(3)
    if np.any(lam < -1e-12) or np.any(lam > 1 + 1e-12) or abs(lam.sum() - 1) > 1e-12:
        raise OutOfTriangle(f"barycentric point {lam} is outside the triangle")
    cplx = cochain.complex
    t = int(triangle_id)
    if cochain.degree == 0:
        return float(cochain.values[cplx.triangles[t]] @ lam)
    if cochain.degree == 2:
        area = mesh_geometry(cplx)["area"][t]
        return float(cochain.values[t] / area)
    grads = barycentric_gradients(cplx)[t]
    val = np.zeros(grads.shape[1])
    # local edge i joins sorted vertices (a, b) with a < b, oriented a -> b
    for i, (a, b) in enumerate(((1, 2), (0, 2), (0, 1))):
        c = cochain.values[cplx.tri_edges[t, i]]
        val += c * (lam[a] * grads[b] - lam[b] * grads[a])
    return val
