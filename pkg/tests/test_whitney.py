import numpy as np
import pytest

from dec2d import Cochain, build_complex, de_rham_map, whitney_evaluate
from dec2d.errors import OutOfTriangle, QuadratureFailure

from oracles import bary_gradients, segment_integral, triangle_integral, whitney_1form


def test_constant_zero_form(delaunay_meshes):
    c = delaunay_meshes["random_l0"]
    v = de_rham_map(lambda p: np.full(len(p), 2.5), 0, c).values
    assert np.all(v == 2.5)


def test_exact_one_form_of_linear_function(delaunay_meshes):
    c = delaunay_meshes["square_l2"]
    f = lambda p: 3 * p[:, 0] - 2 * p[:, 1] + 1
    grad = lambda p: np.tile([3.0, -2.0], (len(p), 1))
    v = de_rham_map(grad, 1, c).values
    fv = f(c.vertex_coords)
    assert np.allclose(v, fv[c.edges[:, 1]] - fv[c.edges[:, 0]], atol=1e-13)


def test_area_form_on_right_triangle():
    c = build_complex([[0, 0], [1, 0], [0, 1]], [(0, 1, 2)])
    assert de_rham_map(lambda p: np.ones(len(p)), 2, c).values[0] == pytest.approx(0.5, abs=1e-15)


def test_de_rham_matches_independent_quadrature(delaunay_meshes):
    c = delaunay_meshes["random_l0"]
    form = lambda p: np.c_[np.sin(p[:, 1]), p[:, 0] ** 3]
    v = de_rham_map(form, 1, c).values
    for e, (a, b) in enumerate(c.edges[:20]):
        pa, pb = c.vertex_coords[a], c.vertex_coords[b]
        ref = segment_integral(lambda q: form(q[None])[0] @ (pb - pa), pa, pb)
        assert v[e] == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_whitney_basis_kronecker_at_vertices(square_diag):
    c = square_diag
    for j in range(c.n0):
        e = np.zeros(c.n0)
        e[j] = 1
        for t in range(c.n2):
            for i in range(3):
                lam = np.eye(3)[i]
                assert whitney_evaluate(Cochain(c, 0, e), t, lam) == float(c.triangles[t, i] == j)


def test_rw_identity_by_quadrature(delaunay_meshes, rng):
    """Integrating the Whitney interpolant over each simplex returns the cochain."""
    c = delaunay_meshes["random_l0"]
    x = rng.standard_normal(c.n1)
    y = rng.standard_normal(c.n2)
    for t in range(c.n2):
        p = c.vertex_coords[c.triangles[t]]
        tri_area = triangle_integral(lambda q, lam: 1.0, p)
        val2 = triangle_integral(
            lambda q, lam: whitney_evaluate(Cochain(c, 2, y), t, lam), p)
        assert val2 == pytest.approx(y[t], rel=1e-12)
        assert tri_area > 0
        # line integral of the 1-form interpolant along each local edge
        for i, (a, b) in enumerate(((1, 2), (0, 2), (0, 1))):
            e = c.tri_edges[t, i]
            pa, pb = p[a], p[b]

            def along(q):
                lam = np.linalg.solve(np.vstack([p.T, np.ones(3)]), np.r_[q, 1.0])
                lam = np.clip(lam, 0, 1)
                lam /= lam.sum()
                return whitney_evaluate(Cochain(c, 1, x), t, lam) @ (pb - pa)
            assert segment_integral(along, pa, pb) == pytest.approx(x[e], rel=1e-10, abs=1e-12)


def test_basis_one_cochain_line_integral(unit_equilateral):
    c = unit_equilateral
    p = c.vertex_coords[c.triangles[0]]
    g = bary_gradients(p)
    for i, (a, b) in enumerate(((1, 2), (0, 2), (0, 1))):
        e = np.zeros(3)
        e[c.tri_edges[0, i]] = 1
        lam = np.zeros(3)
        lam[a] = lam[b] = 0.5
        w = whitney_evaluate(Cochain(c, 1, e), 0, lam)
        assert np.allclose(w, whitney_1form(lam, g, a, b))
        assert w @ (p[b] - p[a]) == pytest.approx(1.0, abs=1e-14)


def test_errors(unit_equilateral):
    c = unit_equilateral
    with pytest.raises(OutOfTriangle):
        whitney_evaluate(Cochain(c, 0, np.zeros(3)), 0, [1.2, -0.1, -0.1])
    with pytest.raises(QuadratureFailure):
        de_rham_map(lambda p: np.full(len(p), np.nan), 2, c)
