import numpy as np
import pytest

from dec2d import (Cochain, betti_numbers, coboundary, dec_hodge_star, feec_mass_matrix,
                   harmonic_basis, hodge_decompose, pi_h_map)
from dec2d.errors import InvalidDegree, NotClosed
from dec2d.harmonic import pi_h_rank

from oracles import dense_incidence


def _betti_by_rank(c):
    d0, d1 = dense_incidence(c.edges, c.oriented_triangles(), c.n0)
    r0, r1 = np.linalg.matrix_rank(d0), np.linalg.matrix_rank(d1)
    return c.n0 - r0, c.n1 - r0 - r1, c.n2 - r1


def test_betti_numbers_match_rank_oracle(delaunay_meshes, annulus_family, octahedron, torus):
    cases = list(delaunay_meshes.values()) + [annulus_family[0].complex, octahedron, torus]
    for c in cases:
        assert betti_numbers(c) == _betti_by_rank(c)
    assert betti_numbers(annulus_family[1].complex) == (1, 1, 0)
    assert betti_numbers(octahedron) == (1, 0, 1)
    assert betti_numbers(torus) == (1, 2, 1)


def test_dimensions(square_family, annulus_family):
    sq = square_family[1].complex
    assert harmonic_basis(sq, 1, "dec").dimension == 0
    for m in annulus_family[:3]:
        for fl in ("dec", "feec"):
            assert harmonic_basis(m.complex, 1, fl).dimension == 1


def test_k0_basis_is_normalized_constant(square_family):
    c = square_family[0].complex
    for fl in ("dec", "feec"):
        h = harmonic_basis(c, 0, fl)
        v = h.vectors[:, 0]
        assert np.ptp(v) == pytest.approx(0, abs=1e-14)
        M = dec_hodge_star(c, 0).matrix if fl == "dec" else feec_mass_matrix(c, 0).matrix
        assert v @ (M @ v) == pytest.approx(1.0)


def test_basis_is_harmonic(annulus_family, torus):
    cases = [(annulus_family[1].complex, "dec"), (annulus_family[1].complex, "feec"),
             (torus, "feec")]
    for c, fl in cases:
        H = harmonic_basis(c, 1, fl).vectors
        M = (dec_hodge_star(c, 1) if fl == "dec" else feec_mass_matrix(c, 1)).matrix
        d0 = coboundary(c, 0).astype(float)
        d1 = coboundary(c, 1).astype(float)
        assert np.abs(d1 @ H).max() < 1e-10
        assert np.abs(d0.T @ (M @ H)).max() < 1e-10
        assert H.T @ (M @ H) == pytest.approx(np.eye(H.shape[1]), abs=1e-10)


def test_closed_surface_k2(octahedron):
    for fl in ("dec", "feec"):
        h = harmonic_basis(octahedron, 2, fl)
        assert h.dimension == 1


def test_decompose_exact(annulus_family, rng):
    c = annulus_family[1].complex
    u = Cochain(c, 0, rng.standard_normal(c.n0)).d()
    uB, up, uH = hodge_decompose(u, "feec")
    assert np.allclose(uB.values, u.values, rtol=0, atol=1e-10 * np.abs(u.values).max())
    assert np.abs(up.values).max() < 1e-10 and np.abs(uH.values).max() < 1e-10


def test_decompose_harmonic(annulus_family):
    c = annulus_family[1].complex
    p = harmonic_basis(c, 1, "dec").basis[0]
    uB, up, uH = hodge_decompose(p, "dec")
    assert np.allclose(uH.values, p.values, atol=1e-10)


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("fl", ["dec", "feec"])
def test_decompose_pythagoras(annulus_family, rng, k, fl):
    c = annulus_family[1].complex
    u = Cochain(c, k, rng.standard_normal(c.count(k)))
    parts = hodge_decompose(u, fl)
    M = (dec_hodge_star(c, k) if fl == "dec" else feec_mass_matrix(c, k)).matrix
    n2 = lambda x: x.values @ (M @ x.values)
    assert sum(n2(x) for x in parts) == pytest.approx(n2(u), rel=1e-10)
    assert np.allclose(sum((x.values for x in parts), np.zeros(c.count(k))), u.values)


def test_closed_cochains_have_equal_gradient_pairings(annulus_family, torus, rng):
    """d0^T (M1_F - *1_D) z = 0 for every closed 1-cochain z.

    A closed cochain is exact on each triangle and the lumping identity holds
    triangle by triangle, so DEC and FEEC harmonic 1-forms coincide.
    """
    from dec2d.harmonic import _tree_cotree_generators
    for c in (annulus_family[1].complex, torus):
        d0 = coboundary(c, 0).astype(float)
        Z = np.c_[_tree_cotree_generators(c), d0 @ rng.standard_normal((c.n0, 2))]
        assert np.abs(coboundary(c, 1) @ Z).max() < 1e-12
        diff = feec_mass_matrix(c, 1).matrix - dec_hodge_star(c, 1).matrix
        assert np.abs(d0.T @ (diff @ Z)).max() <= 1e-12 * np.abs(Z).max() * abs(diff).max()


def test_pi_h_identity_and_rank(annulus_family):
    for m in annulus_family[:3]:
        c = m.complex
        p = harmonic_basis(c, 1, "dec").basis[0]
        q = pi_h_map(p)
        assert np.allclose(q.values, p.values, atol=1e-12)
        assert pi_h_rank(c, 1) == 1


def test_pi_h_rejects_non_closed(square_family, rng):
    c = square_family[0].complex
    with pytest.raises(NotClosed):
        pi_h_map(Cochain(c, 1, rng.standard_normal(c.n1)))


def test_invalid_degree(square_diag):
    with pytest.raises(InvalidDegree):
        harmonic_basis(square_diag, 3, "dec")
