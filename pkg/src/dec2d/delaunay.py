"""Incremental (Bowyer-Watson) Delaunay triangulation with boundary polygons.

After insertion the triangulation is cleaned by Lawson flips, clipped to the
boundary polygons and checked for the polygon edges.  Cocircular quads are
resolved deterministically: the diagonal with the smaller lowest endpoint
index wins and the result is flagged ``degenerate_delaunay``.
"""
import math

import numpy as np

from .errors import AllCollinear, ConstraintViolation, MeshError
from .mesh import build_complex

__all__ = ["delaunay_triangulate", "incircle", "orient2d"]

COCIRCULAR_TOL = 1e-10   # |angle sum - pi| below this is treated as cocircular


def orient2d(a, b, c):
    """Twice the signed area of (a, b, c); positive when counterclockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def incircle(a, b, c, d):
    """Return (det, permanent); det > 0 iff d is inside the circle of CCW abc."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    perm = (alift * (abs(bdx * cdy) + abs(cdx * bdy))
            + blift * (abs(cdx * ady) + abs(adx * cdy))
            + clift * (abs(adx * bdy) + abs(bdx * ady)))
    return det, perm


def _inside_circle(a, b, c, d):
    det, perm = incircle(a, b, c, d)
    return det > 1e-12 * perm


def _spatial_order(pts):
    n = len(pts)
    lo, hi = pts.min(0), pts.max(0)
    span = np.maximum(hi - lo, 1e-300)
    nb = max(1, int(math.sqrt(n / 2.0)))
    row = np.minimum(((pts[:, 1] - lo[1]) / span[1] * nb).astype(int), nb - 1)
    x = (pts[:, 0] - lo[0]) / span[0]
    key_x = np.where(row % 2 == 0, x, -x)
    return np.lexsort((key_x, row))


class _Triangulation:
    """Mutable triangle soup with neighbor links, CCW vertex order.

    ``nbr[t][i]`` is the triangle across the edge opposite ``tri[t][i]``.
    """

    def __init__(self, pts):
        self.p = pts
        self.tri = []
        self.nbr = []
        self.alive = []
        self.last = 0

    def add(self, a, b, c):
        self.tri.append([a, b, c])
        self.nbr.append([-1, -1, -1])
        self.alive.append(True)
        return len(self.tri) - 1

    def locate(self, q):
        p, tri, nbr = self.p, self.tri, self.nbr
        t = self.last
        if not self.alive[t]:
            t = next(i for i in range(len(tri) - 1, -1, -1) if self.alive[i])
        for _ in range(4 * len(tri) + 10):
            v = tri[t]
            for i in range(3):
                a, b = p[v[(i + 1) % 3]], p[v[(i + 2) % 3]]
                if orient2d(a, b, q) < 0:
                    t = nbr[t][i]
                    break
            else:
                return t
        # walk failed to terminate; fall back to a scan
        for t, v in enumerate(tri):
            if self.alive[t] and all(
                    orient2d(p[v[(i + 1) % 3]], p[v[(i + 2) % 3]], q) >= 0 for i in range(3)):
                return t
        raise MeshError("point location failed")

    def insert(self, vi):
        p, tri, nbr = self.p, self.tri, self.nbr
        q = p[vi]
        start = self.locate(q)
        cavity = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for u in nbr[t]:
                if u >= 0 and u not in cavity:
                    a, b, c = tri[u]
                    if _inside_circle(p[a], p[b], p[c], q):
                        cavity.add(u)
                        stack.append(u)
        while True:
            rim = []
            grow = None
            for t in cavity:
                v = tri[t]
                for i in range(3):
                    u = nbr[t][i]
                    if u in cavity:
                        continue
                    a, b = v[(i + 1) % 3], v[(i + 2) % 3]
                    # near-collinear rim edges would create slivers; absorb the neighbor
                    scale = math.hypot(*(p[b] - p[a])) * math.hypot(*(q - p[a]))
                    if orient2d(p[a], p[b], q) <= 1e-12 * scale:
                        grow = u
                        break
                    rim.append((a, b, u, t))
                if grow is not None:
                    break
            if grow is None:
                break
            if grow < 0:
                raise MeshError("cavity reached the outer hull")
            cavity.add(grow)
        for t in cavity:
            self.alive[t] = False
        by_first, by_second = {}, {}
        new = []
        for a, b, u, old in rim:
            t = self.add(a, b, vi)
            nbr[t][2] = u
            if u >= 0:
                j = nbr[u].index(old)
                nbr[u][j] = t
            by_first[a] = t
            by_second[b] = t
            new.append(t)
        for t in new:
            a, b, _ = tri[t]
            nbr[t][0] = by_first[b]
            nbr[t][1] = by_second[a]
        self.last = new[-1]


def _angle_at(p, v, a, b):
    u = p[a] - p[v]
    w = p[b] - p[v]
    return math.atan2(abs(u[0] * w[1] - u[1] * w[0]), u[0] * w[0] + u[1] * w[1])


def _edge_map(tris):
    emap = {}
    for t, (a, b, c) in enumerate(tris):
        for x, y, opp in ((b, c, a), (c, a, b), (a, b, c)):
            emap.setdefault((min(x, y), max(x, y)), []).append((t, opp))
    return emap


def _flip_pass(p, tris, mode):
    """One sweep of edge flips; returns (number of flips, degenerate seen)."""
    emap = _edge_map(tris)
    flips = 0
    degenerate = False
    dirty = set()
    for (x, y), owners in emap.items():
        if len(owners) != 2:
            continue
        (t1, r), (t2, s) = owners
        if t1 in dirty or t2 in dirty:
            continue
        total = _angle_at(p, r, x, y) + _angle_at(p, s, x, y)
        if mode == "illegal":
            do = total > math.pi + COCIRCULAR_TOL
        else:
            if abs(total - math.pi) > COCIRCULAR_TOL:
                continue
            degenerate = True
            do = min(r, s) < min(x, y)
        if not do:
            continue
        # new triangles (r, x, s) and (s, y, r), oriented counterclockwise
        t_a = [r, x, s] if orient2d(p[r], p[x], p[s]) > 0 else [r, s, x]
        t_b = [s, y, r] if orient2d(p[s], p[y], p[r]) > 0 else [s, r, y]
        if orient2d(p[t_a[0]], p[t_a[1]], p[t_a[2]]) <= 0 or \
                orient2d(p[t_b[0]], p[t_b[1]], p[t_b[2]]) <= 0:
            continue
        tris[t1], tris[t2] = t_a, t_b
        dirty.update((t1, t2))
        flips += 1
    return flips, degenerate


def _fill_hull(p, tris):
    """Close reflex pockets on the boundary left by removing the super triangle."""
    while True:
        count = {}
        for a, b, c in tris:
            for x, y in ((a, b), (b, c), (c, a)):
                key = (min(x, y), max(x, y))
                count[key] = count.get(key, 0) + 1
        nxt = {}
        for a, b, c in tris:
            for x, y in ((a, b), (b, c), (c, a)):
                if count[(min(x, y), max(x, y))] == 1:
                    nxt[x] = y
        added = False
        for a, b in list(nxt.items()):
            c = nxt[b]
            scale = math.hypot(*(p[b] - p[a])) * math.hypot(*(p[c] - p[b]))
            if c != a and orient2d(p[a], p[b], p[c]) < -1e-12 * scale:
                tris.append([a, c, b])
                added = True
                break
        if not added:
            return tris


def _points_in_region(pts, polygons, p):
    """Even-odd containment of points in the union of polygon loops."""
    inside = np.zeros(len(pts), dtype=bool)
    for loop in polygons:
        q = p[np.asarray(loop)]
        x0, y0 = q[:, 0], q[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        for i in range(len(q)):
            cond = (y0[i] > pts[:, 1]) != (y1[i] > pts[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x0[i] + (pts[:, 1] - y0[i]) * (x1[i] - x0[i]) / (y1[i] - y0[i])
            inside ^= cond & (pts[:, 0] < xint)
    return inside


def delaunay_triangulate(points, boundary_polygon=None):
    """Delaunay triangulation of planar points.

    Parameters
    ----------
    points : array_like, shape (n, 2)
    boundary_polygon : list of index loops, optional
        Outer boundary loop followed by hole loops (vertex indices into
        ``points``).  Triangles outside the region are discarded and every
        loop edge must survive as a mesh edge.  Without polygons the convex
        hull is triangulated.

    Returns
    -------
    SimplicialComplex2
        with ``metadata["degenerate_delaunay"]`` set when cocircular quads
        had to be resolved by the tie-break rule.
    """
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise MeshError("need at least 3 planar points")
    centered = pts - pts.mean(0)
    if np.linalg.matrix_rank(centered, tol=1e-12 * np.abs(centered).max()) < 2:
        raise AllCollinear("all points are collinear")
    n = len(pts)
    lo, hi = pts.min(0), pts.max(0)
    mid = 0.5 * (lo + hi)
    big = 64.0 * max(hi - lo)
    sup = np.array([[mid[0] - 2 * big, mid[1] - big],
                    [mid[0] + 2 * big, mid[1] - big],
                    [mid[0], mid[1] + 2 * big]])
    allp = np.vstack([pts, sup])
    T = _Triangulation(allp)
    T.add(n, n + 1, n + 2)
    for vi in _spatial_order(pts):
        T.insert(int(vi))
    tris = [v for v, ok in zip(T.tri, T.alive) if ok and max(v) < n]
    tris = _fill_hull(pts, tris)

    if boundary_polygon is not None:
        arr = np.array(tris)
        cent = pts[arr].mean(axis=1)
        keep = _points_in_region(cent, boundary_polygon, pts)
        tris = [t for t, k in zip(tris, keep) if k]
    while _flip_pass(pts, tris, "illegal")[0]:
        pass
    degenerate = False
    while True:
        flips, deg = _flip_pass(pts, tris, "tie")
        degenerate |= deg
        if not flips:
            break

    used = np.zeros(n, dtype=bool)
    used[np.array(tris).ravel()] = True
    if not used.all():
        raise MeshError(f"{int((~used).sum())} points are not covered by the triangulation")
    cplx = build_complex(pts, tris)
    if boundary_polygon is not None:
        have = {tuple(e) for e in cplx.edges.tolist()}
        for loop in boundary_polygon:
            for a, b in zip(loop, list(loop[1:]) + [loop[0]]):
                if (min(a, b), max(a, b)) not in have:
                    raise ConstraintViolation(f"boundary edge ({a}, {b}) is missing")
    cplx.metadata["degenerate_delaunay"] = bool(degenerate)
    return cplx
