"""Discrete harmonic forms, Betti numbers, Hodge decomposition and the Pi_h map.

Harmonic k-forms are ker d_k intersected with the flavor-orthogonal
complement of im d_{k-1}.  For k = 1 closed representatives of the
cohomology classes come from a tree-cotree decomposition; exact parts are
then removed by a weighted least-squares potential solve.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .errors import EigenFailure, IndefiniteStar, InvalidDegree, NotClosed
from .mesh import Cochain, coboundary
from .operators import mass_matrix

__all__ = [
    "HarmonicBasis",
    "betti_numbers",
    "connected_components",
    "harmonic_basis",
    "hodge_decompose",
    "exact_part",
    "pi_h_map",
    "pi_h_rank",
]

RANK_TOL = 1e-8


def connected_components(cplx):
    """Vertex component labels and, per component, whether it has boundary."""
    def make():
        e = cplx.edges
        A = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(cplx.n0, cplx.n0))
        ncomp, labels = csgraph.connected_components(A, directed=False)
        has_bnd = np.zeros(ncomp, dtype=bool)
        has_bnd[labels[cplx.edges[cplx.boundary_edges, 0]]] = True
        return ncomp, labels, has_bnd
    return cplx.cached("components", make)


def betti_numbers(cplx):
    """(b0, b1, b2) from the integer ranks of d0 and d1.

    rank d0 = N0 - #components and rank d1 = N2 - #closed components for an
    orientable manifold complex.
    """
    ncomp, _, has_bnd = connected_components(cplx)
    closed = int((~has_bnd).sum())
    r0 = cplx.n0 - ncomp
    r1 = cplx.n2 - closed
    return ncomp, cplx.n1 - r0 - r1, closed


def _require_pd(cplx, k, flavor):
    op = mass_matrix(cplx, k, flavor)
    if not op.positive_definite:
        raise IndefiniteStar(f"{op.flavor} mass operator of degree {k} is {op.positivity}")
    return op.matrix


@dataclass(frozen=True)
class HarmonicBasis:
    """Flavor-orthonormal basis of discrete harmonic k-cochains (columns)."""
    complex: object
    degree: int
    flavor: str
    vectors: np.ndarray      # shape (N_k, dim)

    @property
    def dimension(self):
        return self.vectors.shape[1]

    @property
    def basis(self):
        return [Cochain(self.complex, self.degree, self.vectors[:, i].copy())
                for i in range(self.dimension)]

    def to_dict(self):
        return {"degree": self.degree, "flavor": self.flavor,
                "basis": [c.values.tolist() for c in self.basis]}


def _potential_solver(cplx, k, flavor):
    """Factorized solver for min_rho |u - d_{k-1} rho|_M, k in {1}.

    One potential per connected component is pinned to zero.
    """
    def make():
        M = _require_pd(cplx, k, flavor)
        d = coboundary(cplx, k - 1).astype(float)
        L = (d.T @ M @ d).tocsc()
        ncomp, labels, _ = connected_components(cplx)
        pinned = np.array([np.flatnonzero(labels == c)[0] for c in range(ncomp)])
        free = np.setdiff1d(np.arange(L.shape[0]), pinned)
        lu = spla.splu(L[free][:, free].tocsc())

        def solve(u):
            rhs = d.T @ (M @ u)
            rho = np.zeros((L.shape[0],) + u.shape[1:])
            rho[free] = lu.solve(np.asarray(rhs[free]))
            return d @ rho
        return solve
    return cplx.cached(("potential", k, str(flavor).upper()), make)


def exact_part(u, flavor):
    """M-orthogonal projection of ``u`` onto im d_{k-1} (k = 1 or 2)."""
    cplx, k = u.complex, u.degree
    if k == 0:
        return Cochain(cplx, 0, np.zeros(cplx.n0))
    if k == 1:
        return Cochain(cplx, 1, _potential_solver(cplx, 1, flavor)(u.values))
    # im d1 is the M2-complement of the harmonic 2-forms
    H = harmonic_basis(cplx, 2, flavor).vectors
    M = _require_pd(cplx, 2, flavor)
    return Cochain(cplx, 2, u.values - H @ (H.T @ (M @ u.values)))


def _tree_cotree_generators(cplx):
    """Closed 1-cochains representing a basis of the first cohomology."""
    n0, n1, n2 = cplx.n0, cplx.n1, cplx.n2
    edges = cplx.edges
    # primal spanning forest by BFS over vertices
    adj = [[] for _ in range(n0)]
    for e, (a, b) in enumerate(edges):
        adj[a].append((b, e))
        adj[b].append((a, e))
    in_tree = np.zeros(n1, dtype=bool)
    seen = np.zeros(n0, dtype=bool)
    for root in range(n0):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, e in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    in_tree[e] = True
                    queue.append(w)

    # dual spanning forest over non-tree edges; node n2 + c is the outside of component c
    ncomp, labels, has_bnd = connected_components(cplx)
    e2t = cplx.edge_to_triangles
    tri_comp = labels[cplx.triangles[:, 0]]
    outside = n2 + labels[edges[:, 0]]
    dual_adj = [[] for _ in range(n2 + ncomp)]
    for e in np.flatnonzero(~in_tree):
        t0, t1 = e2t[e]
        u = t0
        w = t1 if t1 >= 0 else outside[e]
        dual_adj[u].append((w, e))
        dual_adj[w].append((u, e))
    parent_edge = np.full(n2 + ncomp, -1)
    in_cotree = np.zeros(n1, dtype=bool)
    visited = np.zeros(n2 + ncomp, dtype=bool)
    order = []
    roots = [n2 + c if has_bnd[c] else int(np.flatnonzero(tri_comp == c)[0])
             for c in range(ncomp)]
    for root in roots:
        visited[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, e in dual_adj[v]:
                if not visited[w]:
                    visited[w] = True
                    in_cotree[e] = True
                    parent_edge[w] = e
                    queue.append(w)

    gens = np.flatnonzero(~in_tree & ~in_cotree)
    if gens.size == 0:
        return np.zeros((n1, 0))
    Z = np.zeros((n1, gens.size))
    Z[gens, np.arange(gens.size)] = 1.0
    # peel leaves first: fix each triangle's parent cotree edge so d1 z = 0 there
    signs = cplx.local_edge_signs()
    for t in reversed(order):
        if t >= n2 or parent_edge[t] < 0:
            continue
        te = cplx.tri_edges[t]
        sg = signs[t]
        pe = parent_edge[t]
        j = int(np.flatnonzero(te == pe)[0])
        others = [i for i in range(3) if i != j]
        Z[pe] = -(sg[others[0]] * Z[te[others[0]]] + sg[others[1]] * Z[te[others[1]]]) / sg[j]
    return Z


def _orthonormalize(V, M, expected):
    if V.shape[1] == 0:
        return V
    G = V.T @ (M @ V)
    G = 0.5 * (G + G.T)
    w, Q = np.linalg.eigh(G)
    if w[-1] <= 0 or np.sum(w > RANK_TOL * w[-1]) != expected:
        raise EigenFailure(f"harmonic candidates have numerical rank "
                           f"{int(np.sum(w > RANK_TOL * max(w[-1], 0)))}, expected {expected}")
    return V @ (Q / np.sqrt(w))


def harmonic_basis(cplx, k, flavor):
    """Orthonormal basis of ker d_k intersected with (im d_{k-1})^perp in the flavor."""
    if k not in (0, 1, 2):
        raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")
    key = ("harmonic", k, str(flavor).upper())

    def make():
        M = _require_pd(cplx, k, flavor)
        b = betti_numbers(cplx)[k]
        ncomp, labels, has_bnd = connected_components(cplx)
        if k == 0:
            V = np.zeros((cplx.n0, ncomp))
            V[np.arange(cplx.n0), labels] = 1.0
        elif k == 1:
            Z = _tree_cotree_generators(cplx)
            if Z.shape[1]:
                Z = Z - _potential_solver(cplx, 1, flavor)(Z)
            V = Z
        else:
            closed = np.flatnonzero(~has_bnd)
            tri_comp = labels[cplx.triangles[:, 0]]
            Minv = 1.0 / M.diagonal()
            V = np.zeros((cplx.n2, closed.size))
            for i, c in enumerate(closed):
                V[tri_comp == c, i] = Minv[tri_comp == c]
        V = _orthonormalize(V, M, b)
        if V.shape[1] != b:
            raise EigenFailure(f"harmonic dimension {V.shape[1]} differs from Betti number {b}")
        return HarmonicBasis(cplx, k, str(flavor).upper(), V)
    return cplx.cached(key, make)


def hodge_decompose(u, flavor):
    """Split ``u`` into exact, co-exact and harmonic parts ``(u_B, u_perp, u_H)``."""
    cplx, k = u.complex, u.degree
    M = _require_pd(cplx, k, flavor)
    uB = exact_part(u, flavor)
    H = harmonic_basis(cplx, k, flavor).vectors
    rest = u.values - uB.values
    uH = H @ (H.T @ (M @ rest))
    uperp = rest - uH
    if k == 2:
        # ker d2 is everything, so the co-exact part vanishes
        uB = Cochain(cplx, 2, uB.values + uperp)
        uperp = np.zeros_like(uperp)
    return uB, Cochain(cplx, k, uperp), Cochain(cplx, k, uH)


def pi_h_map(p_hat, tol=1e-8):
    """Map a closed (DEC-harmonic) cochain to its FEEC-harmonic part."""
    k = p_hat.degree
    if k < 2:
        dp = p_hat.d().values
        scale = np.abs(p_hat.values).max() if p_hat.values.size else 0.0
        if np.abs(dp).max(initial=0.0) > tol * max(scale, np.finfo(float).tiny):
            raise NotClosed("p_hat is not closed")
    return p_hat - exact_part(p_hat, "FEEC")


def pi_h_rank(cplx, k):
    """Rank of the images of the DEC harmonic basis under Pi_h."""
    Hd = harmonic_basis(cplx, k, "DEC")
    if Hd.dimension == 0:
        return 0
    imgs = np.column_stack([pi_h_map(c).values for c in Hd.basis])
    s = np.linalg.svd(imgs, compute_uv=False)
    return int(np.sum(s > RANK_TOL * s[0]))
