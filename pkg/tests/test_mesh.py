import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dec2d import Cochain, build_complex, coboundary, is_symmetric
from dec2d.errors import DegenerateTriangle, DegreeMismatch, DuplicateTriangle, NonManifold

from oracles import dense_incidence


def test_square_split_by_diagonal(square_diag):
    c = square_diag
    assert (c.n0, c.n1, c.n2) == (4, 5, 2)
    assert c.boundary_edges.sum() == 4
    assert c.euler_characteristic == 1


def test_single_triangle(unit_equilateral):
    c = unit_equilateral
    assert c.n1 == 3
    assert c.boundary_edges.all()
    assert c.euler_characteristic == 1


def test_three_triangles_on_one_edge():
    pts = [[0, 0], [1, 0], [0.5, 1], [0.5, -1], [0.5, 2]]
    with pytest.raises(NonManifold):
        build_complex(pts, [(0, 1, 2), (0, 1, 3), (0, 1, 4)])


def test_duplicate_and_degenerate_rejected():
    pts = [[0, 0], [1, 0], [0, 1], [2, 0]]
    with pytest.raises(DuplicateTriangle):
        build_complex(pts, [(0, 1, 2), (2, 1, 0)])
    with pytest.raises(DegenerateTriangle):
        build_complex(pts, [(0, 1, 3)])


def test_edges_are_canonical(delaunay_meshes):
    for c in delaunay_meshes.values():
        assert np.all(c.edges[:, 0] < c.edges[:, 1])


def test_planar_orientation_ccw(delaunay_meshes):
    for c in delaunay_meshes.values():
        p = c.vertex_coords[c.oriented_triangles()]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        assert np.all(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] > 0)


def test_coboundary_matches_dense_oracle(delaunay_meshes):
    for c in delaunay_meshes.values():
        d0, d1 = dense_incidence(c.edges, c.oriented_triangles(), c.n0)
        assert np.array_equal(coboundary(c, 0).toarray(), d0)
        assert np.array_equal(coboundary(c, 1).toarray(), d1)


def test_dd_is_zero(delaunay_meshes, annulus_family):
    meshes = list(delaunay_meshes.values()) + [m.complex for m in annulus_family[:2]]
    for c in meshes:
        dd = coboundary(c, 1) @ coboundary(c, 0)
        assert dd.count_nonzero() == 0


def test_d0_rows_and_single_edge(square_diag):
    d0 = coboundary(square_diag, 0).toarray()
    assert np.all((d0 == 1).sum(1) == 1) and np.all((d0 == -1).sum(1) == 1)
    f = np.array([3.0, 5.0, 11.0, 17.0])
    df = Cochain(square_diag, 0, f).d().values
    for (a, b), v in zip(square_diag.edges, df):
        assert v == f[b] - f[a]


def test_cochain_arithmetic_checks(square_diag, unit_equilateral):
    a = Cochain(square_diag, 1, np.ones(5))
    assert np.array_equal((2 * a - a).values, np.ones(5))
    with pytest.raises(DegreeMismatch):
        Cochain(square_diag, 1, np.ones(4))
    with pytest.raises(DegreeMismatch):
        a + Cochain(unit_equilateral, 1, np.ones(3))


def test_is_symmetric():
    A = np.array([[1.0, 2.0], [2.0, 1.0]])
    assert is_symmetric(A)
    A[0, 1] += 1e-10
    assert not is_symmetric(A)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_reordering_triangles_gives_equal_complex(seed):
    from dec2d import delaunay_triangulate
    rng = np.random.default_rng(seed)
    pts = rng.random((12, 2))
    c = delaunay_triangulate(pts)
    tris = c.triangles[rng.permutation(c.n2)][:, ::-1]
    c2 = build_complex(c.vertex_coords, tris.tolist())
    assert c2 == c
    assert c2.euler_characteristic == 1
