"""DEC diagonal Hodge stars, FEEC Whitney mass matrices and mass lumping."""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDegree
from .geometry import mesh_geometry, signed_dual_measures
from .mesh import coboundary
from .quadrature import TRIANGLE_WEIGHTS
from .whitney import barycentric_gradients

__all__ = [
    "MassOperators",
    "dec_hodge_star",
    "feec_mass_matrix",
    "mass_matrix",
    "local_feec_blocks",
    "scalar_stiffness",
    "lumped_mass_and_star1_check",
]

FLAVORS = ("DEC", "FEEC")
_EDGE_VERTS = ((1, 2), (0, 2), (0, 1))


@dataclass(frozen=True)
class MassOperators:
    flavor: str
    degree: int
    matrix: sp.csr_matrix
    positivity: str   # positive_definite | indefinite | singular

    @property
    def positive_definite(self):
        return self.positivity == "positive_definite"


def _normalize_flavor(flavor):
    f = str(flavor).upper()
    if f not in FLAVORS:
        raise ValueError(f"flavor must be 'dec' or 'feec', got {flavor!r}")
    return f


def _diag_positivity(d):
    scale = np.max(np.abs(d)) if d.size else 1.0
    if np.any(d < -1e-14 * scale):
        return "indefinite"
    if np.any(d <= 1e-14 * scale):
        return "singular"
    return "positive_definite"


def dec_hodge_star(cplx, k):
    """Diagonal DEC Hodge star ``|*s| / |s|`` on k-simplices.

    Indefinite or singular stars are returned with that diagnosis; callers
    that need a norm must check :attr:`MassOperators.positivity`.
    """
    if k not in (0, 1, 2):
        raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")

    def make():
        if k == 0:
            d = signed_dual_measures(cplx).vertex_areas
        elif k == 1:
            d = signed_dual_measures(cplx).dual_ratio
        else:
            d = 1.0 / mesh_geometry(cplx)["area"]
        d = np.array(d)
        return MassOperators("DEC", k, sp.diags(d).tocsr(), _diag_positivity(d))
    return cplx.cached(("star", "DEC", k), make)


def local_feec_blocks(cplx, k):
    """Element mass blocks of the Whitney k-forms, shape (N2, 3, 3) for k < 2.

    Rows/columns follow the local sorted vertices (k=0) or local edges
    (k=1, edge i opposite vertex i, oriented low to high index).
    """
    g = mesh_geometry(cplx)
    mu = g["area"]
    m = mu[:, None, None] * (np.ones((3, 3)) + np.eye(3))[None] / 12.0
    if k == 0:
        return m
    if k != 1:
        raise InvalidDegree("local blocks exist for k = 0, 1")
    # h[i, j] = <d lambda_i, d lambda_j>, closed form in side lengths and cotangents
    h = np.empty((len(mu), 3, 3))
    for i in range(3):
        h[:, i, i] = g["l2"][:, i] / (4.0 * mu ** 2)
        j, kk = (i + 1) % 3, (i + 2) % 3
        h[:, j, kk] = h[:, kk, j] = -g["cot"][:, i] / (2.0 * mu)
    blk = np.empty_like(h)
    for i, (a, b) in enumerate(_EDGE_VERTS):
        for j, (c, d) in enumerate(_EDGE_VERTS):
            blk[:, i, j] = (m[:, a, c] * h[:, b, d] - m[:, a, d] * h[:, b, c]
                            - m[:, b, c] * h[:, a, d] + m[:, b, d] * h[:, a, c])
    return blk


def _assemble(blocks, index, n):
    rows = np.repeat(index, 3, axis=1).ravel()
    cols = np.tile(index, (1, 3)).ravel()
    M = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M.sum_duplicates()
    return M


def feec_mass_matrix(cplx, k):
    """Gram matrix of the lowest-order Whitney k-form basis."""
    if k not in (0, 1, 2):
        raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")

    def make():
        if k == 0:
            M = _assemble(local_feec_blocks(cplx, 0), cplx.triangles, cplx.n0)
        elif k == 1:
            # local sorted orientation coincides with the global edge orientation
            M = _assemble(local_feec_blocks(cplx, 1), cplx.tri_edges, cplx.n1)
        else:
            M = sp.diags(1.0 / mesh_geometry(cplx)["area"]).tocsr()
        M = 0.5 * (M + M.T)
        return MassOperators("FEEC", k, M.tocsr(), "positive_definite")
    return cplx.cached(("star", "FEEC", k), make)


def mass_matrix(cplx, k, flavor):
    """Dispatch to :func:`dec_hodge_star` or :func:`feec_mass_matrix`."""
    if _normalize_flavor(flavor) == "DEC":
        return dec_hodge_star(cplx, k)
    return feec_mass_matrix(cplx, k)


def scalar_stiffness(cplx):
    """Stiffness ``sum_T int_T <d lambda_i, d lambda_j>`` by quadrature.

    Gradients come from the embedded coordinates rather than from angle
    cotangents, so this is an independent route to the same matrix.
    """
    def make():
        grads = barycentric_gradients(cplx)
        area = mesh_geometry(cplx)["area"]
        w = area * TRIANGLE_WEIGHTS.sum()
        blocks = w[:, None, None] * np.einsum("nid,njd->nij", grads, grads)
        return _assemble(blocks, cplx.triangles, cplx.n0)
    return cplx.cached("stiffness", make)


def lumped_mass_and_star1_check(cplx):
    """Lumped 1-form mass matrix and its agreement with the DEC 1-form star.

    Returns a dict with the diagonal matrix ``M1``, ``equals_dec_star1``,
    ``max_rel_diff`` (entrywise, relative to the larger magnitude) and
    ``stiffness_rel_diff`` comparing ``d0^T M1 d0`` with the directly
    assembled stiffness.
    """
    grads = barycentric_gradients(cplx)
    area = mesh_geometry(cplx)["area"]
    vals = np.zeros(cplx.n1)
    for i, (a, b) in enumerate(_EDGE_VERTS):
        hab = np.einsum("nd,nd->n", grads[:, a], grads[:, b])
        np.add.at(vals, cplx.tri_edges[:, i], -area * hab)
    M1 = sp.diags(vals).tocsr()
    star = dec_hodge_star(cplx, 1).matrix.diagonal()
    denom = np.maximum(np.maximum(np.abs(vals), np.abs(star)), np.finfo(float).tiny)
    rel = float(np.max(np.abs(vals - star) / denom))
    d0 = coboundary(cplx, 0).astype(float)
    K = scalar_stiffness(cplx)
    diff = (d0.T @ M1 @ d0 - K).tocoo()
    kmax = float(np.max(np.abs(K.data)))
    kdiff = float(np.max(np.abs(diff.data))) / kmax if diff.nnz else 0.0
    return {
        "M1": M1,
        "equals_dec_star1": rel <= 1e-12,
        "max_rel_diff": rel,
        "stiffness_rel_diff": kdiff,
    }
