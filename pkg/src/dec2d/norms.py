"""DEC and FEEC inner products, norm-equivalence constants and discrepancy studies."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DegreeMismatch, EigenFailure, FamilyNotDECRegular, IndefiniteStarWarning
from .families import FamilyMember, degenerate_pair
from .geometry import classify_mesh, mesh_size
from .mesh import coboundary
from .operators import dec_hodge_star, feec_mass_matrix, mass_matrix
from .report import loglog_slope

__all__ = [
    "inner_product",
    "norm",
    "graph_gram",
    "NormReport",
    "norm_equivalence_constants",
    "DiscrepancyStudy",
    "ip_discrepancy_study",
    "CounterexampleTable",
    "degenerate_pair_counterexample",
    "require_dec_regular",
]


def _mass(cplx, k, flavor, warn=True):
    op = mass_matrix(cplx, k, flavor)
    if warn and not op.positive_definite:
        warnings.warn(f"DEC star of degree {k} is {op.positivity}", IndefiniteStarWarning,
                      stacklevel=3)
    return op.matrix


def inner_product(u, v, flavor, graph=False):
    """Plain or graph inner product of two cochains in the DEC or FEEC flavor."""
    if u.degree != v.degree:
        raise DegreeMismatch(f"degrees differ: {u.degree} vs {v.degree}")
    if u.complex is not v.complex and u.complex != v.complex:
        raise DegreeMismatch("cochains live on different complexes")
    M = _mass(u.complex, u.degree, flavor)
    val = float(u.values @ (M @ v.values))
    if graph and u.degree < 2:
        val += inner_product(u.d(), v.d(), flavor)
    return val


def norm(u, flavor, graph=False):
    return math.sqrt(max(inner_product(u, u, flavor, graph), 0.0))


def graph_gram(cplx, k, flavor):
    """Gram matrix of the graph (V-) inner product on k-cochains."""
    M = mass_matrix(cplx, k, flavor).matrix
    if k == 2:
        return M
    d = coboundary(cplx, k).astype(float)
    return (M + d.T @ mass_matrix(cplx, k + 1, flavor).matrix @ d).tocsr()


@dataclass
class NormReport:
    degree: int
    ratio_min: float
    ratio_max: float
    sample_ratios: np.ndarray
    h: float
    basis_ratio_max: float       # max over basis cochains of |a|_D^2 / |a|_F^2
    dec_positivity: str
    flavors: tuple = ("DEC", "FEEC")

    @property
    def samples_within_bounds(self):
        s = self.sample_ratios
        return bool(np.all(s >= self.ratio_min - 1e-8) and np.all(s <= self.ratio_max + 1e-8))


def norm_equivalence_constants(cplx, k, samples=1000, seed=0):
    """Extreme values of |a|_D^2 / |a|_F^2 from the pencil (*D_k, *F_k).

    Computed densely; ``samples`` random normal cochains give a Monte Carlo
    cross-check.
    """
    D = dec_hodge_star(cplx, k)
    F = feec_mass_matrix(cplx, k).matrix
    Dd = D.matrix.toarray()
    Fd = F.toarray()
    try:
        lam = sla.eigh(Dd, Fd, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(f"pencil eigensolve failed: {exc}") from exc
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((Fd.shape[0], int(samples)))
    num = np.einsum("ij,ij->j", X, D.matrix @ X)
    den = np.einsum("ij,ij->j", X, F @ X)
    basis = D.matrix.diagonal() / F.diagonal()
    return NormReport(
        degree=k,
        ratio_min=float(lam[0]),
        ratio_max=float(lam[-1]),
        sample_ratios=num / den,
        h=mesh_size(cplx),
        basis_ratio_max=float(basis.max()),
        dec_positivity=D.positivity,
    )


def require_dec_regular(members):
    """Raise :class:`FamilyNotDECRegular` unless every mesh is DEC-regular."""
    for i, m in enumerate(members):
        cplx = m.complex if isinstance(m, FamilyMember) else m
        rep = classify_mesh(cplx)
        if not rep.dec_regular:
            bad = {k: v for k, v in rep.violations.items()
                   if k in ("degenerate_delaunay_edges", "small_angle_triangles") and v}
            raise FamilyNotDECRegular(f"level {i} is not DEC-regular", bad)


@dataclass
class DiscrepancyStudy:
    """Normalized DEC-FEEC inner-product gaps per level.

    ``sampled`` is the maximum over random pairs; ``sup`` is the exact
    supremum over all pairs (largest |eigenvalue| of the pencil
    (*D - *F, G_V)).
    """
    degree: int
    h: np.ndarray
    sampled: np.ndarray
    sup: np.ndarray
    slopes: dict = field(default_factory=dict)


def _complexes(family):
    return [m.complex if isinstance(m, FamilyMember) else m for m in family]


def ip_discrepancy_study(family, k, samples=200, seed=0, exact=True):
    """Measure max |<a,b>_D - <a,b>_F| / (|a|_V |b|_V) on each level.

    Random cochains have standard normal entries and are normalized in the
    FEEC graph norm.
    """
    require_dec_regular(family)
    hs, sampled, sups = [], [], []
    for level, cplx in enumerate(_complexes(family)):
        D = dec_hodge_star(cplx, k).matrix
        F = feec_mass_matrix(cplx, k).matrix
        G = graph_gram(cplx, k, "FEEC")
        rng = np.random.default_rng([int(seed), level, k])
        n = F.shape[0]
        A = rng.standard_normal((n, int(samples)))
        B = rng.standard_normal((n, int(samples)))
        A /= np.sqrt(np.einsum("ij,ij->j", A, G @ A))
        B /= np.sqrt(np.einsum("ij,ij->j", B, G @ B))
        diff = np.einsum("ij,ij->j", A, (D - F) @ B)
        hs.append(mesh_size(cplx))
        sampled.append(float(np.max(np.abs(diff))))
        if exact:
            try:
                lam = sla.eigh((D - F).toarray(), G.toarray(), eigvals_only=True)
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise EigenFailure(f"discrepancy pencil failed: {exc}") from exc
            sups.append(float(np.max(np.abs(lam))))
        else:
            sups.append(math.nan)
    study = DiscrepancyStudy(k, np.array(hs), np.array(sampled), np.array(sups))
    for name, vals in (("sampled", study.sampled), ("sup", study.sup)):
        s = loglog_slope(study.h, vals, name)
        if s is not None:
            study.slopes[name] = s.value
    return study


@dataclass
class CounterexampleTable:
    eps: np.ndarray
    norm2_dec: np.ndarray
    norm2_feec: np.ndarray

    @property
    def ratio(self):
        return self.norm2_dec / self.norm2_feec

    @property
    def dec_slope(self):
        return loglog_slope(self.eps, self.norm2_dec).value

    @property
    def feec_variation(self):
        """(max - min) / max of the FEEC norms."""
        f = self.norm2_feec
        return float((f.max() - f.min()) / f.max())


def degenerate_pair_counterexample(eps_list):
    """Norms of the shared-edge unit cochain on two triangles with angle sum pi - eps."""
    eps = np.asarray(eps_list, dtype=float)
    if np.any(eps <= 0) or np.any(np.diff(eps) > 0):
        raise ValueError("eps_list must be positive and decreasing")
    dec, feec = [], []
    for e in eps:
        cplx = degenerate_pair(e)
        idx = int(np.flatnonzero((cplx.edges[:, 0] == 0) & (cplx.edges[:, 1] == 1))[0])
        dec.append(float(dec_hodge_star(cplx, 1).matrix[idx, idx]))
        feec.append(float(feec_mass_matrix(cplx, 1).matrix[idx, idx]))
    return CounterexampleTable(eps, np.array(dec), np.array(feec))
