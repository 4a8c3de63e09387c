"""Mixed Hodge-Laplace solver with natural boundary conditions, DEC and FEEC.

Unknowns are (sigma, u, p) with sigma a (k-1)-cochain, u a k-cochain and p
the coefficients of the harmonic projection.  The bilinear form is

    B(sigma, u, p; tau, v, q) = <sigma, tau> - <d tau, u> + <d sigma, v>
                                + <d u, d v> + <p, v> - <u, q>

with every pairing in one flavor.  Negating the tau and q rows gives the
symmetric indefinite matrix that is factorized.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (EigenFailure, EmptyComplement, IndefiniteStar, InvalidDegree,
                     MissingHarmonicBasis, SingularSystem)
from .geometry import mesh_size
from .harmonic import betti_numbers, connected_components, harmonic_basis
from .mesh import Cochain, coboundary
from .operators import mass_matrix
from .whitney import de_rham_map

__all__ = [
    "MixedSystem",
    "MixedSolution",
    "StabilityReport",
    "assemble_mixed_system",
    "solve_hodge_laplace",
    "poincare_constant",
    "infsup_constant",
    "stability_report",
]

DENSE_LIMIT = 1500


def _flavor(flavor):
    f = str(flavor).upper()
    if f not in ("DEC", "FEEC"):
        raise ValueError(f"flavor must be 'dec' or 'feec', got {flavor!r}")
    return f


def _mass(cplx, k, flavor):
    op = mass_matrix(cplx, k, flavor)
    if not op.positive_definite:
        raise IndefiniteStar(f"{op.flavor} mass operator of degree {k} is {op.positivity}")
    return op.matrix


def _d(cplx, k):
    return coboundary(cplx, k).astype(float)


@dataclass
class MixedSystem:
    """Assembled block system; ``matrix`` is symmetric, ``form_matrix`` is the matrix of B."""
    complex: object
    degree: int
    flavor: str
    harmonic_flavor: str
    matrix: sp.csr_matrix
    form_matrix: sp.csr_matrix
    sizes: tuple                 # (n_sigma, n_u, n_p)
    harmonic: np.ndarray         # columns: harmonic basis in the k-cochains
    mass_k: sp.csr_matrix

    def rhs(self, f):
        """Load vector for f_h (a k-cochain): rows (0, M_k f, 0)."""
        ns, nu, npp = self.sizes
        b = np.zeros(ns + nu + npp)
        b[ns:ns + nu] = self.mass_k @ np.asarray(f, dtype=float)
        return b

    def split(self, x):
        ns, nu, _ = self.sizes
        return x[:ns], x[ns:ns + nu], x[ns + nu:]


def assemble_mixed_system(cplx, k, flavor, harmonic=None):
    """Assemble the mixed Hodge-Laplace system for k-forms.

    Parameters
    ----------
    harmonic : {"dec", "feec"} or HarmonicBasis, optional
        Harmonic space that constrains u and carries p; defaults to the
        solving flavor.
    """
    if k not in (0, 1, 2):
        raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")
    flavor = _flavor(flavor)
    if harmonic is None:
        harmonic = flavor
    if isinstance(harmonic, str):
        hflavor = _flavor(harmonic)
        try:
            H = harmonic_basis(cplx, k, hflavor).vectors
        except IndefiniteStar:
            raise
        except Exception as exc:
            raise MissingHarmonicBasis(f"harmonic basis unavailable: {exc}") from exc
    else:
        hflavor = harmonic.flavor
        H = harmonic.vectors
        if harmonic.degree != k:
            raise MissingHarmonicBasis("harmonic basis has the wrong degree")
    if H.shape[1] != betti_numbers(cplx)[k]:
        raise MissingHarmonicBasis(
            f"harmonic basis has dimension {H.shape[1]}, Betti number is {betti_numbers(cplx)[k]}")

    Mk = _mass(cplx, k, flavor)
    MH = sp.csr_matrix(Mk @ H)
    blocks_B = []     # signs as in B
    if k < 2:
        dk = _d(cplx, k)
        K = (dk.T @ _mass(cplx, k + 1, flavor) @ dk).tocsr()
    else:
        K = sp.csr_matrix((cplx.n2, cplx.n2))
    if k > 0:
        Mkm = _mass(cplx, k - 1, flavor)
        dkm = _d(cplx, k - 1)
        Md = (Mk @ dkm).tocsr()
        blocks_B = [[Mkm, -Md.T, None],
                    [Md, K, MH],
                    [None, -MH.T, None]]
        sizes = (Mkm.shape[0], Mk.shape[0], H.shape[1])
    else:
        blocks_B = [[K, MH], [-MH.T, None]]
        sizes = (0, Mk.shape[0], H.shape[1])
    if sizes[2] == 0:
        blocks_B = [row[:-1] for row in blocks_B[:-1]]
    B = sp.bmat(blocks_B, format="csr")
    n = B.shape[0]
    signs = np.ones(n)
    ns, nu, npp = sizes
    signs[:ns] = -1.0
    signs[ns + nu:] = -1.0
    A = (sp.diags(signs) @ B).tocsr()
    return MixedSystem(cplx, k, flavor, hflavor, A, B, sizes, H, Mk)


@dataclass
class MixedSolution:
    k: int
    flavor: str
    sigma: Cochain               # None for k = 0
    u: Cochain
    p_coeffs: np.ndarray
    residual_norm: float
    system_condition_estimate: float
    harmonic: np.ndarray = field(repr=False, default=None)
    f_h: Cochain = field(repr=False, default=None)

    @property
    def p(self):
        """Harmonic part as a k-cochain."""
        n = self.u.complex.count(self.k)
        if self.harmonic is None or self.harmonic.shape[1] == 0:
            return Cochain(self.u.complex, self.k, np.zeros(n))
        return Cochain(self.u.complex, self.k, self.harmonic @ self.p_coeffs)

    def to_dict(self):
        return {
            "k": self.k, "flavor": self.flavor,
            "sigma": None if self.sigma is None else self.sigma.values.tolist(),
            "u": self.u.values.tolist(), "p_coeffs": self.p_coeffs.tolist(),
            "residual_norm": self.residual_norm,
            "system_condition_estimate": self.system_condition_estimate,
        }


def _factorize(A, system):
    try:
        return spla.splu(A.tocsc())
    except RuntimeError as exc:
        b = betti_numbers(system.complex)[system.degree]
        raise SingularSystem(
            f"factorization failed ({exc}); harmonic dimension {system.sizes[2]}, "
            f"Betti number {b}") from exc


def _cond_estimate(A, lu):
    n = A.shape[0]
    inv = spla.LinearOperator((n, n), matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T"),
                              dtype=float)
    try:
        return float(spla.onenormest(A) * spla.onenormest(inv))
    except Exception:       # estimation is diagnostic only
        return math.nan


def solve_hodge_laplace(cplx, k, f, flavor, harmonic=None, system=None):
    """Solve the mixed problem with natural boundary conditions.

    ``f`` is a k-cochain or an analytic form accepted by
    :func:`~dec2d.whitney.de_rham_map`; it is interpolated once into the
    Whitney space and the load is ``M_k f_h`` in the solving flavor.
    """
    if system is None:
        system = assemble_mixed_system(cplx, k, flavor, harmonic)
    if isinstance(f, Cochain):
        fh = f
    elif callable(f):
        fh = de_rham_map(f, k, cplx)
    else:
        fh = Cochain(cplx, k, np.asarray(f, dtype=float))
    A = system.matrix
    b = system.rhs(fh.values)
    lu = _factorize(A, system)
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("solution is not finite")
    bnorm = np.linalg.norm(b)
    res = float(np.linalg.norm(A @ x - b) / (bnorm if bnorm > 0 else 1.0))
    sig, u, p = system.split(x)
    return MixedSolution(
        k=k, flavor=system.flavor,
        sigma=Cochain(cplx, k - 1, sig) if k > 0 else None,
        u=Cochain(cplx, k, u),
        p_coeffs=p,
        residual_norm=res,
        system_condition_estimate=_cond_estimate(A, lu),
        harmonic=system.harmonic,
        f_h=fh,
    )


def _graph_gram(cplx, k, flavor):
    M = _mass(cplx, k, flavor)
    if k == 2:
        return M.tocsr()
    d = _d(cplx, k)
    return (M + d.T @ _mass(cplx, k + 1, flavor) @ d).tocsr()


def poincare_constant(cplx, k, flavor):
    """Smallest c with |v|_V <= c |dv|_V on the flavor complement of ker d_k.

    Equals sqrt(1 + 1/lambda) with lambda the smallest nonzero eigenvalue of
    the pencil (d_k^T M_{k+1} d_k, M_k).
    """
    if k == 2:
        raise EmptyComplement("ker d_2 is the whole space; the complement is empty")
    if k not in (0, 1):
        raise InvalidDegree(f"degree must be 0, 1 or 2, got {k}")
    flavor = _flavor(flavor)
    M = _mass(cplx, k, flavor)
    Mn = _mass(cplx, k + 1, flavor)
    d = _d(cplx, k)
    A = (d.T @ Mn @ d).tocsr()
    n = A.shape[0]
    ncomp, _, has_bnd = connected_components(cplx)
    rank = cplx.n0 - ncomp if k == 0 else cplx.n2 - int((~has_bnd).sum())
    nker = n - rank
    if rank == 0:
        raise EmptyComplement("d_k vanishes; the complement is empty")
    try:
        if n <= DENSE_LIMIT:
            lam = sla.eigh(A.toarray(), M.toarray(), eigvals_only=True)
            lam_min = float(lam[nker])
        elif k == 0:
            lam = spla.eigsh(A, k=nker + 1, M=M, sigma=-1e-8 * abs(A).max(), which="LM",
                             return_eigenvectors=False)
            lam_min = float(np.sort(lam)[nker])
        else:
            lam_min = _smallest_coexact_eig(d, M, Mn)
    except (np.linalg.LinAlgError, spla.ArpackError, RuntimeError) as exc:
        raise EigenFailure(f"Poincare eigensolve failed: {exc}") from exc
    if not lam_min > 0:
        raise EigenFailure(f"nonpositive eigenvalue {lam_min} on the complement")
    return math.sqrt(1.0 + 1.0 / lam_min)


def _smallest_coexact_eig(d, M, Mn):
    """Smallest nonzero eigenvalue of (d^T Mn d, M) when d is onto.

    The nonzero spectrum equals that of S = Mn^(1/2) d M^-1 d^T Mn^(1/2); S^-1 b
    comes from the saddle system [[M, -d^T s], [s d, 0]] [w; x] = [0; b].
    """
    s = np.sqrt(Mn.diagonal())
    S = sp.diags(s)
    m, n = d.shape
    K = sp.bmat([[M, -(d.T @ S)], [S @ d, None]], format="csc")
    lu = spla.splu(K)

    def apply_inv(b):
        rhs = np.concatenate([np.zeros(n), np.ravel(b)])
        return lu.solve(rhs)[n:]
    op = spla.LinearOperator((m, m), matvec=apply_inv, dtype=float)
    mu = spla.eigsh(op, k=1, which="LA", return_eigenvectors=False)
    return 1.0 / float(mu[0])


def infsup_constant(cplx, k, flavor, harmonic=None, norm_flavor="FEEC"):
    """Inf-sup constant of B in graph norms of ``norm_flavor``.

    With the block-diagonal Gram matrix W, gamma is the smallest singular
    value of W^-1/2 B W^-1/2, i.e. the smallest |eigenvalue| of the symmetric
    pencil (A, W) because the row negation commutes with W.
    """
    system = assemble_mixed_system(cplx, k, flavor, harmonic)
    nf = _flavor(norm_flavor)
    blocks = []
    if k > 0:
        blocks.append(_graph_gram(cplx, k - 1, nf))
    blocks.append(_graph_gram(cplx, k, nf))
    H = system.harmonic
    if H.shape[1]:
        blocks.append(sp.csr_matrix(H.T @ (_mass(cplx, k, nf) @ H)))
    W = sp.block_diag(blocks, format="csr")
    A = system.matrix
    n = A.shape[0]
    try:
        if n <= DENSE_LIMIT:
            lam = sla.eigh(A.toarray(), W.toarray(), eigvals_only=True)
            return float(np.min(np.abs(lam)))
        lam = spla.eigsh(A, k=2, M=W, sigma=0.0, which="LM", return_eigenvectors=False)
        return float(np.min(np.abs(lam)))
    except (np.linalg.LinAlgError, spla.ArpackError, RuntimeError) as exc:
        raise EigenFailure(f"inf-sup eigensolve failed: {exc}") from exc


@dataclass(frozen=True)
class StabilityReport:
    flavor: str
    k: int
    poincare_constant: float
    infsup_constant: float
    h: float


def stability_report(cplx, k, flavor):
    try:
        cp = poincare_constant(cplx, k, flavor)
    except EmptyComplement:
        cp = math.nan
    return StabilityReport(_flavor(flavor), k, cp, infsup_constant(cplx, k, flavor),
                           mesh_size(cplx))
