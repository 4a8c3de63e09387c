import math

import numpy as np
import pytest

from dec2d import FamilySpec, classify_mesh, generate_family
from dec2d.errors import SpecInvalid
from dec2d.families import degenerate_pair, kite_in_square, parse_family


def test_square_counts_grow_by_four(square_family):
    n2 = [m.complex.n2 for m in square_family]
    # frozen after generation with the default seed
    assert n2 == [36, 170, 594, 2340]
    ratios = np.array(n2[1:]) / np.array(n2[:-1])
    assert np.all((ratios > 3.3) & (ratios < 5.0))
    assert ratios[-1] == pytest.approx(4.0, rel=0.05)
    hs = [m.h for m in square_family]
    assert np.all(np.diff(hs) < 0)
    assert hs[-1] / hs[0] == pytest.approx(1 / 8, rel=0.3)


def test_square_min_angle(square_family):
    for m in square_family:
        r = classify_mesh(m.complex)
        assert r.delta_0 >= math.radians(20)
        assert r.dec_regular


def test_annulus_euler_characteristic(annulus_family):
    for m in annulus_family:
        assert m.complex.euler_characteristic == 0
        assert m.complex.n0 - m.complex.n1 + m.complex.n2 == 0


def test_acute_family(acute_family):
    for m in acute_family:
        r = classify_mesh(m.complex)
        assert r.acute and r.uniformly_acute and r.dec_regular


def test_determinism():
    a = generate_family(FamilySpec("square", levels=2, seed=3))
    b = generate_family(FamilySpec("square", levels=2, seed=3))
    assert all(x.complex == y.complex for x, y in zip(a, b))
    c = generate_family(FamilySpec("square", levels=2, seed=4))
    assert not np.array_equal(a[1].complex.vertex_coords, c[1].complex.vertex_coords)


def test_saddle_is_a_surface():
    fam = generate_family(FamilySpec("surface_saddle", levels=2))
    for m in fam:
        c = m.complex
        assert c.embedding_dim == 3
        x, y, z = c.vertex_coords.T
        assert np.allclose(z, (x - 0.5) * (y - 0.5))


def test_criss_cross_family_degenerate():
    fam = generate_family(FamilySpec("square", "criss_cross", levels=2))
    for m in fam:
        r = classify_mesh(m.complex)
        assert r.delaunay and not r.nondegenerate_delaunay


def test_parse_family():
    s = parse_family("annulus:structured_perturbed:0.1", levels=2)
    assert (s.domain, s.kind, s.perturbation, s.levels) == ("annulus", "structured_perturbed", 0.1, 2)
    for bad in ("", "disk", "square:hex", "square::x", "square:structured_perturbed:0.9",
                "a:b:c:d"):
        with pytest.raises(SpecInvalid):
            parse_family(bad)


def test_spec_validation_field_paths():
    with pytest.raises(SpecInvalid, match="family.levels"):
        generate_family(FamilySpec(levels=0))
    with pytest.raises(SpecInvalid, match="criss_cross"):
        generate_family(FamilySpec("annulus", "criss_cross"))


def test_degenerate_pair_geometry():
    for eps in (0.1, 1e-3):
        c = degenerate_pair(eps)
        assert tuple(c.edges[0]) == (0, 1)
        r = classify_mesh(c)
        assert r.delta_pi == pytest.approx(eps, rel=1e-9)


def test_kite_shared_edge():
    c = kite_in_square(0.01)
    a, b = c.metadata["shared_edge"]
    assert [a, b] in c.edges.tolist()
    assert c.boundary_edges.sum() == 8
