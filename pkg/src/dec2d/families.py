"""Refinement families of triangulations and small fixture meshes.

Structured families jitter lattice points and retriangulate with the
Delaunay triangulator; a level is regenerated with a shifted seed when it
misses the quality targets (min angle, boundary acuteness, strict Delaunay).
"""
import math
from dataclasses import dataclass

import numpy as np

from .delaunay import delaunay_triangulate
from .errors import SpecInvalid
from .geometry import classify_mesh, mesh_geometry, mesh_size
from .mesh import SimplicialComplex2, build_complex

__all__ = [
    "FamilyMember",
    "FamilySpec",
    "generate_family",
    "parse_family",
    "equilateral_lattice",
    "criss_cross_lattice",
    "degenerate_pair",
    "angle_pair",
    "kite_in_square",
]

DOMAINS = ("square", "annulus", "surface_saddle", "triangle")
KINDS = ("structured_perturbed", "random_delaunay", "criss_cross")
MIN_ANGLE = math.radians(20.0)
MAX_ATTEMPTS = 25


@dataclass(frozen=True)
class FamilySpec:
    domain: str = "square"
    kind: str = "structured_perturbed"
    levels: int = 4
    perturbation: float = 0.2
    seed: int = 0
    base: int = 4          # lattice subdivisions per unit length at level 0

    def validate(self):
        if self.domain not in DOMAINS:
            raise SpecInvalid(f"family.domain: unknown domain {self.domain!r}")
        if self.kind not in KINDS:
            raise SpecInvalid(f"family.kind: unknown kind {self.kind!r}")
        if self.kind == "criss_cross" and self.domain not in ("square", "surface_saddle"):
            raise SpecInvalid("family.kind: criss_cross is only defined on the square")
        if int(self.levels) < 1:
            raise SpecInvalid("family.levels: must be >= 1")
        if not 0.0 <= float(self.perturbation) < 0.8:
            raise SpecInvalid("family.perturbation: must lie in [0, 0.8)")
        if int(self.base) < 2:
            raise SpecInvalid("family.base: must be >= 2")
        return self


@dataclass(frozen=True)
class FamilyMember:
    level: int
    h: float
    complex: SimplicialComplex2
    attempts: int = 1


def parse_family(text, **overrides):
    """Parse ``domain[:kind[:perturbation]]`` into a :class:`FamilySpec`."""
    parts = [p for p in str(text).split(":")]
    if not parts or not parts[0]:
        raise SpecInvalid("family: empty specification")
    fields = {"domain": parts[0]}
    if len(parts) > 1 and parts[1]:
        fields["kind"] = parts[1]
    if len(parts) > 2 and parts[2]:
        try:
            fields["perturbation"] = float(parts[2])
        except ValueError:
            raise SpecInvalid(f"family.perturbation: not a number: {parts[2]!r}") from None
    if len(parts) > 3:
        raise SpecInvalid(f"family: too many fields in {text!r}")
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return FamilySpec(**fields).validate()


def _as_spec(spec):
    if isinstance(spec, FamilySpec):
        return spec.validate()
    if isinstance(spec, str):
        return parse_family(spec)
    try:
        return FamilySpec(**dict(spec)).validate()
    except TypeError as exc:
        raise SpecInvalid(f"family: {exc}") from None


# ---------------------------------------------------------------- point sets

def _jitter(rng, count, radius):
    """Uniform samples from the disk of the given radius."""
    r = radius * np.sqrt(rng.uniform(size=count))
    th = rng.uniform(0, 2 * math.pi, size=count)
    return np.c_[r * np.cos(th), r * np.sin(th)]


def _lattice_h(n):
    """Circumradius of the equilateral lattice triangle with side 1/n."""
    return 1.0 / (n * math.sqrt(3.0))


def _square_points(n, rng, pert):
    """Staggered rows on [0,1]^2, nearly equilateral; returns points, boundary loop."""
    ny = max(2, 2 * round(n / math.sqrt(3.0)))     # even, row height ~ sqrt(3)/(2n)
    pts, on_bnd = [], []
    for j in range(ny + 1):
        y = j / ny
        if j % 2 == 0:
            xs = [i / n for i in range(n + 1)]
        else:
            xs = [0.0] + [(i + 0.5) / n for i in range(n)] + [1.0]
        for x in xs:
            pts.append((x, y))
            on_bnd.append(j in (0, ny) or x in (0.0, 1.0))
    pts = np.array(pts)
    on_bnd = np.array(on_bnd)
    if pert > 0:
        pts[~on_bnd] += _jitter(rng, int((~on_bnd).sum()), pert * _lattice_h(n))
    loop = _square_loop(pts)
    return pts, [loop]


def _square_loop(pts):
    """Counterclockwise boundary loop of the points lying on the unit square."""
    idx = []
    for side, key in (
            (np.isclose(pts[:, 1], 0.0), lambda i: pts[i, 0]),
            (np.isclose(pts[:, 0], 1.0), lambda i: pts[i, 1]),
            (np.isclose(pts[:, 1], 1.0), lambda i: -pts[i, 0]),
            (np.isclose(pts[:, 0], 0.0), lambda i: -pts[i, 1])):
        ids = sorted(np.flatnonzero(side).tolist(), key=key)
        for i in ids:
            if not idx or idx[-1] != i:
                idx.append(i)
    if idx[0] == idx[-1]:
        idx.pop()
    return idx


def _random_square_points(n, rng):
    edge = np.arange(n) / n
    bnd = np.concatenate([
        np.c_[edge, np.zeros(n)], np.c_[np.ones(n), edge],
        np.c_[1 - edge, np.ones(n)], np.c_[np.zeros(n), 1 - edge]])
    count = int(round(n * n * 2 / math.sqrt(3.0)))
    inner, r_min = [], 0.35 / n
    while len(inner) < count:
        cand = rng.uniform(r_min, 1 - r_min, size=(count, 2))
        inner.extend(cand.tolist())
    pts = np.vstack([bnd, np.array(inner[:count])])
    return pts, [list(range(len(bnd)))]


def _annulus_points(n, rng, pert, r_in=0.5, r_out=1.0):
    m = max(1, round((r_out - r_in) * n * 2 / math.sqrt(3.0)))
    pts, ring_of = [], []
    for j in range(m + 1):
        r = r_in + (r_out - r_in) * j / m
        cnt = max(6, round(2 * math.pi * r * n))
        off = 0.5 * (j % 2)
        th = 2 * math.pi * (np.arange(cnt) + off) / cnt
        pts.extend(np.c_[r * np.cos(th), r * np.sin(th)].tolist())
        ring_of.extend([j] * cnt)
    pts = np.array(pts)
    ring_of = np.array(ring_of)
    free = (ring_of > 0) & (ring_of < m)
    if pert > 0 and free.any():
        pts[free] += _jitter(rng, int(free.sum()), pert * _lattice_h(n))
    outer = np.flatnonzero(ring_of == m).tolist()
    inner = np.flatnonzero(ring_of == 0).tolist()[::-1]
    return pts, [outer, inner]


def _triangle_points(n, rng, pert):
    """Equilateral lattice on the triangle (0,0), (1,0), (1/2, sqrt(3)/2)."""
    pts, on_bnd = [], []
    s3 = math.sqrt(3.0) / 2
    for j in range(n + 1):
        for i in range(n + 1 - j):
            pts.append(((i + 0.5 * j) / n, s3 * j / n))
            on_bnd.append(i == 0 or j == 0 or i + j == n)
    pts = np.array(pts)
    on_bnd = np.array(on_bnd)
    if pert > 0:
        pts[~on_bnd] += _jitter(rng, int((~on_bnd).sum()), pert * _lattice_h(n))
    return pts, None


def equilateral_lattice(n=4):
    """Unperturbed equilateral lattice on an equilateral triangle."""
    pts, _ = _triangle_points(int(n), None, 0.0)
    return delaunay_triangulate(pts)


def criss_cross_lattice(n=4, lift=None):
    """Square lattice split into right triangles with alternating diagonals.

    Every diagonal has two opposite right angles, so the mesh is Delaunay
    but degenerate.
    """
    n = int(n)
    x, y = np.meshgrid(np.linspace(0, 1, n + 1), np.linspace(0, 1, n + 1))
    pts = np.c_[x.ravel(), y.ravel()]
    tris = []
    for j in range(n):
        for i in range(n):
            a, b = j * (n + 1) + i, j * (n + 1) + i + 1
            c, d = a + n + 1, b + n + 1
            if (i + j) % 2 == 0:
                tris += [(a, b, d), (a, d, c)]
            else:
                tris += [(a, b, c), (b, d, c)]
    if lift is not None:
        pts = np.c_[pts, lift(pts)]
    return build_complex(pts, tris)


def _apex_height(half_base, angle):
    """Distance from base midpoint giving apex ``angle`` over a base."""
    return half_base / math.tan(0.5 * angle)


def angle_pair(angle_above, angle_below):
    """Two triangles on the edge (0,0)-(1,0) with given opposite apex angles."""
    t1 = _apex_height(0.5, angle_above)
    t2 = _apex_height(0.5, angle_below)
    pts = [(0.0, 0.0), (1.0, 0.0), (0.5, t1), (0.5, -t2)]
    return build_complex(pts, [(0, 1, 2), (0, 3, 1)])


def degenerate_pair(eps):
    """Symmetric two-triangle mesh whose opposite angles sum to pi - eps.

    The shared edge joins vertices 0 and 1 and is edge index 0.
    """
    a = 0.5 * (math.pi - float(eps))
    return angle_pair(a, a)


def kite_in_square(eps, half_width=0.2):
    """Unit square mesh containing a near-degenerate pair around (1/2, 1/2).

    The interior edge P-Q has opposite angles each (pi - eps)/2.
    """
    t = _apex_height(half_width, 0.5 * (math.pi - float(eps)))
    pts = np.array([
        [0, 0], [0.5, 0], [1, 0], [1, 0.5], [1, 1], [0.5, 1], [0, 1], [0, 0.5],
        [0.5 - half_width, 0.5], [0.5 + half_width, 0.5], [0.5, 0.5 + t], [0.5, 0.5 - t],
    ], dtype=float)
    cplx = delaunay_triangulate(pts, [list(range(8))])
    cplx.metadata["shared_edge"] = (8, 9)
    return cplx


# ---------------------------------------------------------------- families

def _acceptable(cplx, require_quality):
    if not require_quality:
        return True
    if cplx.metadata.get("degenerate_delaunay"):
        return False
    if float(mesh_geometry(cplx)["angles"].min()) < MIN_ANGLE:
        return False
    rep = classify_mesh(cplx)
    return rep.boundary_acute and rep.nondegenerate_delaunay


def _one_level(spec, n, seed):
    rng = np.random.default_rng(seed)
    pert = float(spec.perturbation)
    if spec.kind == "criss_cross":
        return criss_cross_lattice(n)
    if spec.domain in ("square", "surface_saddle"):
        if spec.kind == "random_delaunay":
            pts, loops = _random_square_points(n, rng)
        else:
            pts, loops = _square_points(n, rng, pert)
    elif spec.domain == "annulus":
        if spec.kind == "random_delaunay":
            pts, loops = _annulus_points(n, rng, 0.45)
        else:
            pts, loops = _annulus_points(n, rng, pert)
    else:
        pts, loops = _triangle_points(n, rng, pert if spec.kind != "random_delaunay" else 0.45)
    return delaunay_triangulate(pts, loops)


def _lift(cplx):
    lifted = build_complex(np.c_[cplx.vertex_coords, _saddle(cplx.vertex_coords)],
                           cplx.triangles)
    lifted.metadata.update(cplx.metadata)
    return lifted


def _saddle(p):
    return (p[:, 0] - 0.5) * (p[:, 1] - 0.5)


def generate_family(spec):
    """Generate a refinement family with h halving from level to level.

    Parameters
    ----------
    spec : FamilySpec, mapping or str
        ``domain`` is one of square, annulus, surface_saddle, triangle;
        ``kind`` is structured_perturbed, random_delaunay or criss_cross.

    Returns
    -------
    list of FamilyMember
        Ordered coarse to fine; ``h`` is the maximum circumradius.
    """
    spec = _as_spec(spec)
    quality = spec.kind == "structured_perturbed"
    out = []
    for level in range(int(spec.levels)):
        n = int(spec.base) * 2 ** level
        for attempt in range(MAX_ATTEMPTS):
            seed = [int(spec.seed), level, attempt]
            cplx = _one_level(spec, n, seed)
            if spec.kind == "criss_cross" or _acceptable(cplx, quality):
                break
        else:
            raise SpecInvalid(
                f"level {level}: no acceptable mesh after {MAX_ATTEMPTS} attempts; "
                "reduce the perturbation")
        if spec.domain == "surface_saddle":
            # quality targets refer to the planar parameter mesh
            cplx = _lift(cplx)
        out.append(FamilyMember(level, mesh_size(cplx), cplx, attempt + 1))
    return out
