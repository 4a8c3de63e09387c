"""Independent reference computations used by the tests.

Nothing here calls dec2d numerics: quadrature uses a collapsed Gauss-Legendre
rule, dual measures come from explicit polygon areas, Delaunay checks are
brute force.
"""
import numpy as np


def duffy_rule(n=6):
    """Barycentric points and weights (summing to 1) exact to degree 2n-2 on a triangle."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    # (u, v) in the square -> (s, t) = (u, v(1-u)) in the reference triangle
    s = u.ravel()
    t = (v * (1 - u)).ravel()
    weights = (wu * wv * (1 - u)).ravel() * 2.0
    bary = np.c_[1 - s - t, s, t]
    return bary, weights


def triangle_integral(f, p, n=6):
    """Integral of f over the triangle with vertex rows p (3, dim)."""
    bary, w = duffy_rule(n)
    pts = bary @ p
    e1, e2 = p[1] - p[0], p[2] - p[0]
    if p.shape[1] == 2:
        area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    else:
        area = 0.5 * np.linalg.norm(np.cross(e1, e2))
    vals = np.array([f(q, b) for q, b in zip(pts, bary)])
    return area * np.tensordot(w, vals, axes=1)


def segment_integral(f, a, b, n=6):
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    return sum(wi * f(a + xi * (b - a)) for xi, wi in zip(x, w))


def bary_gradients(p):
    """Gradients of barycentric coordinates in the triangle's plane, shape (3, dim)."""
    E = np.stack([p[1] - p[0], p[2] - p[0]], axis=1)        # (dim, 2)
    G = E.T @ E
    pinv = np.linalg.solve(G, E.T)                           # (2, dim)
    return np.vstack([-pinv.sum(0), pinv])


def whitney_1form(bary, grads, a, b):
    return bary[a] * grads[b] - bary[b] * grads[a]


LOCAL_EDGES = ((1, 2), (0, 2), (0, 1))


def feec_blocks_by_quadrature(p):
    """(M0, M1) element mass matrices of the sorted triangle with vertex rows p."""
    g = bary_gradients(p)
    M0 = np.zeros((3, 3))
    M1 = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            M0[i, j] = triangle_integral(lambda q, lam: lam[i] * lam[j], p)
    for i, (a, b) in enumerate(LOCAL_EDGES):
        for j, (c, d) in enumerate(LOCAL_EDGES):
            M1[i, j] = triangle_integral(
                lambda q, lam: whitney_1form(lam, g, a, b) @ whitney_1form(lam, g, c, d), p)
    return M0, M1


def circumcenter(p):
    a, b, c = p
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    ux = ((a @ a) * (b[1] - c[1]) + (b @ b) * (c[1] - a[1]) + (c @ c) * (a[1] - b[1])) / d
    uy = ((a @ a) * (c[0] - b[0]) + (b @ b) * (a[0] - c[0]) + (c @ c) * (b[0] - a[0])) / d
    return np.array([ux, uy])


def shoelace(poly):
    x, y = np.asarray(poly).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def dual_measures_by_polygons(coords, triangles):
    """Signed vertex dual areas and edge dual lengths from planar polygons.

    Each triangle contributes, at vertex v, the signed area of the polygon
    (v, midpoint to next vertex, circumcenter, midpoint to previous vertex)
    and, at each edge, the signed distance from the edge midpoint to the
    circumcenter (positive toward the triangle interior).
    """
    n0 = len(coords)
    areas = np.zeros(n0)
    lengths = {}
    for tri in triangles:
        p = coords[list(tri)]
        if shoelace(p) < 0:
            tri = (tri[0], tri[2], tri[1])
            p = coords[list(tri)]
        c = circumcenter(p)
        for i in range(3):
            v, nx, pv = p[i], p[(i + 1) % 3], p[(i + 2) % 3]
            areas[tri[i]] += shoelace([v, 0.5 * (v + nx), c, 0.5 * (v + pv)])
            a, b = tri[i], tri[(i + 1) % 3]
            m = 0.5 * (p[i] + p[(i + 1) % 3])
            t = p[(i + 1) % 3] - p[i]
            inward = np.array([-t[1], t[0]]) / np.linalg.norm(t)   # left normal of a CCW edge
            key = (min(a, b), max(a, b))
            lengths[key] = lengths.get(key, 0.0) + float((c - m) @ inward)
    return areas, lengths


def empty_circumcircle_violations(coords, triangles, tol):
    """Count (triangle, vertex) pairs with the vertex strictly inside the circumcircle."""
    bad = 0
    for tri in triangles:
        p = coords[list(tri)]
        c = circumcenter(p)
        r2 = np.sum((p[0] - c) ** 2)
        d2 = np.sum((coords - c) ** 2, axis=1)
        d2[list(tri)] = np.inf
        bad += int(np.sum(d2 < r2 - tol))
    return bad


def opposite_angle_sums(coords, triangles):
    """Sum of the angles opposite each interior edge, by direct vector geometry."""
    opp = {}
    for tri in triangles:
        for i in range(3):
            v = coords[tri[i]]
            a, b = coords[tri[(i + 1) % 3]], coords[tri[(i + 2) % 3]]
            u, w = a - v, b - v
            ang = np.arccos(np.clip(u @ w / np.linalg.norm(u) / np.linalg.norm(w), -1, 1))
            key = tuple(sorted((tri[(i + 1) % 3], tri[(i + 2) % 3])))
            opp.setdefault(key, []).append(ang)
    return {k: sum(v) for k, v in opp.items() if len(v) == 2}


def dense_incidence(edges, triangles, n0):
    """d0 and d1 as dense integer matrices built from first principles."""
    d0 = np.zeros((len(edges), n0), dtype=int)
    index = {}
    for e, (a, b) in enumerate(edges):
        d0[e, a] = -1
        d0[e, b] = 1
        index[(a, b)] = e
    d1 = np.zeros((len(triangles), len(edges)), dtype=int)
    for t, (a, b, c) in enumerate(triangles):
        for x, y in ((a, b), (b, c), (c, a)):
            if (x, y) in index:
                d1[t, index[(x, y)]] += 1
            else:
                d1[t, index[(y, x)]] -= 1
    return d0, d1
