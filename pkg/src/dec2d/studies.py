"""Study drivers behind the command-line interface."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import (AdmissibilityError, ConfigError, Dec2dError, SolveFailure,
                     UnknownStudy)
from .families import FamilySpec, generate_family, parse_family
from .geometry import classify_mesh, mesh_geometry
from .harmonic import betti_numbers, harmonic_basis, pi_h_map, pi_h_rank
from .norms import (degenerate_pair_counterexample, graph_gram, ip_discrepancy_study,
                    norm_equivalence_constants, require_dec_regular)
from .operators import mass_matrix
from .quadrature import TRIANGLE_BARY, TRIANGLE_WEIGHTS
from .report import StudyResult
from .solver import infsup_constant, poincare_constant, solve_hodge_laplace

__all__ = ["StudyConfig", "run_study", "run_convergence_study", "STUDIES", "LOADS",
           "EXACT_K0"]

STUDIES = ("quality", "norms", "ip-error", "counterexample", "harmonics", "constants",
           "converge")
DEFAULT_EPS = tuple(float(e) for e in np.geomspace(1e-1, 1e-4, 7))
EXACT_SUP_LIMIT = 2500      # largest N_k for the dense discrepancy supremum

_PI = math.pi


def _load0(p):
    return 2 * _PI ** 2 * np.cos(_PI * p[:, 0]) * np.cos(_PI * p[:, 1])


def EXACT_K0(p):
    """Neumann solution of -div grad u = _load0 on the unit square."""
    return np.cos(_PI * p[:, 0]) * np.cos(_PI * p[:, 1])


def _load1(p):
    return np.c_[np.sin(_PI * p[:, 1]), np.sin(_PI * p[:, 0])]


def _load2(p):
    return np.cos(_PI * p[:, 0]) * np.cos(2 * _PI * p[:, 1]) + p[:, 0]


LOADS = {0: _load0, 1: _load1, 2: _load2}


@dataclass
class StudyConfig:
    study: str
    family: object = "square"
    levels: int = 4
    k: tuple = (0, 1, 2)
    flavors: tuple = ("dec", "feec")
    samples: int = 200
    seed: int = 0
    out: str = None
    format: str = "csv"
    eps: tuple = DEFAULT_EPS
    base: int = 4
    jobs: int = 1

    def validate(self):
        if self.study not in STUDIES:
            raise UnknownStudy(f"unknown study {self.study!r}; choose from {', '.join(STUDIES)}")
        for i, k in enumerate(self.k):
            if k not in (0, 1, 2):
                raise ConfigError(f"config.k[{i}]: degree must be 0, 1 or 2, got {k!r}")
        for i, f in enumerate(self.flavors):
            if str(f).lower() not in ("dec", "feec"):
                raise ConfigError(f"config.flavors[{i}]: expected dec or feec, got {f!r}")
        if int(self.levels) < 1:
            raise ConfigError("config.levels: must be >= 1")
        if int(self.samples) < 1:
            raise ConfigError("config.samples: must be >= 1")
        if str(self.format).lower() not in ("csv", "json"):
            raise ConfigError(f"config.format: expected csv or json, got {self.format!r}")
        if int(self.jobs) < 1:
            raise ConfigError("config.jobs: must be >= 1")
        eps = list(self.eps)
        if any(e <= 0 for e in eps) or any(b > a for a, b in zip(eps, eps[1:])):
            raise ConfigError("config.eps: values must be positive and decreasing")
        return self

    def family_spec(self):
        if isinstance(self.family, FamilySpec):
            return self.family
        if isinstance(self.family, str):
            return parse_family(self.family, levels=int(self.levels), seed=int(self.seed),
                                base=int(self.base))
        return FamilySpec(**dict(self.family))

    def echo(self):
        d = asdict(self)
        d["family"] = asdict(self.family_spec()) if self.study != "counterexample" else None
        d["k"] = list(self.k)
        d["flavors"] = list(self.flavors)
        d["eps"] = [float(e) for e in self.eps]
        d.pop("out", None)
        d.pop("jobs", None)
        return d


def _map_levels(config, fn, members):
    """Run ``fn(level, member)`` for every level; rows merged in level order."""
    if int(config.jobs) > 1 and len(members) > 1:
        with ThreadPoolExecutor(max_workers=int(config.jobs)) as pool:
            parts = list(pool.map(lambda lm: fn(*lm), enumerate(members)))
    else:
        parts = [fn(i, m) for i, m in enumerate(members)]
    rows = []
    for part in parts:
        rows.extend(part)
    return rows


def _new_result(config):
    return StudyResult(config.study, provenance={
        "artifact": "dec2d", "version": __version__, "config": config.echo()})


def _study_quality(config, members):
    flags = ("acute", "uniformly_acute", "boundary_acute", "uniformly_boundary_acute",
             "delaunay", "nondegenerate_delaunay", "uniformly_delaunay", "shape_regular",
             "dec_regular", "curvature_bounded")
    consts = ("delta_0", "delta_pi", "delta_half_pi", "delta_half_pi_boundary", "min_delta_T",
              "curvature_N", "max_valence", "h")

    def one(level, m):
        rep = classify_mesh(m.complex)
        rows = [(m.h, f, int(getattr(rep, f))) for f in flags]
        rows += [(m.h, c, getattr(rep, c)) for c in consts]
        return rows
    return _map_levels(config, one, members), []


def _study_norms(config, members):
    def one(level, m):
        rows = []
        delta = classify_mesh(m.complex).min_delta_T
        for k in config.k:
            rep = norm_equivalence_constants(m.complex, k, samples=config.samples,
                                             seed=config.seed)
            p = f"k{k}."
            rows += [(m.h, p + "ratio_min", rep.ratio_min), (m.h, p + "ratio_max", rep.ratio_max),
                     (m.h, p + "basis_ratio_max", rep.basis_ratio_max),
                     (m.h, p + "samples_in_bounds", int(rep.samples_within_bounds))]
            if k == 1 and delta > 0:
                rows.append((m.h, p + "c1_bound", 3 * delta / (1 + 3 * delta)))
        return rows
    return _map_levels(config, one, members), []


def _study_ip(config, members):
    rows, fit = [], []
    for k in config.k:
        exact = members[-1].complex.count(k) <= EXACT_SUP_LIMIT
        st = ip_discrepancy_study(members, k, samples=config.samples, seed=config.seed,
                                  exact=exact)
        for h, a, s in zip(st.h, st.sampled, st.sup):
            rows.append((h, f"k{k}.sampled", a))
            if exact:
                rows.append((h, f"k{k}.sup", s))
        fit += [f"k{k}.sampled"] + ([f"k{k}.sup"] if exact else [])
    return rows, fit


def _study_counterexample(config):
    tab = degenerate_pair_counterexample(config.eps)
    rows = []
    for e, d, f, r in zip(tab.eps, tab.norm2_dec, tab.norm2_feec, tab.ratio):
        rows += [(e, "norm2_dec", d), (e, "norm2_feec", f), (e, "ratio", r)]
    return rows, ["norm2_dec", "norm2_feec", "ratio"]


def harmonic_gap(cplx, k=1):
    """Max over the DEC harmonic basis of |Pi_h p - p|_F / |p|_F.

    Values at round-off level (below 1e-12) are reported as exact zeros.
    """
    M = mass_matrix(cplx, k, "FEEC").matrix
    gap = 0.0
    for p in harmonic_basis(cplx, k, "DEC").basis:
        q = pi_h_map(p)
        e = (q - p).values
        gap = max(gap, math.sqrt(e @ (M @ e) / (p.values @ (M @ p.values))))
    return 0.0 if gap <= 1e-12 else gap


def _study_harmonics(config, members):
    def one(level, m):
        rows = []
        for k in config.k:
            c = m.complex
            p = f"k{k}."
            rows += [(m.h, p + "betti", betti_numbers(c)[k]),
                     (m.h, p + "dim_dec", harmonic_basis(c, k, "DEC").dimension),
                     (m.h, p + "dim_feec", harmonic_basis(c, k, "FEEC").dimension),
                     (m.h, p + "pi_rank", pi_h_rank(c, k)),
                     (m.h, p + "pi_gap", harmonic_gap(c, k))]
        return rows
    return _map_levels(config, one, members), [f"k{k}.pi_gap" for k in config.k]


def _study_constants(config, members):
    def one(level, m):
        rows = []
        for fl in config.flavors:
            for k in config.k:
                p = f"{fl.lower()}.k{k}."
                if k < 2:
                    rows.append((m.h, p + "poincare", poincare_constant(m.complex, k, fl)))
                rows.append((m.h, p + "infsup", infsup_constant(m.complex, k, fl)))
        return rows
    return _map_levels(config, one, members), []


def _feec_l2_error_k0(cplx, uvals, exact):
    """L2 distance between the Whitney interpolant of u and an exact function."""
    p = cplx.vertex_coords[cplx.triangles]
    pts = np.einsum("qi,nid->nqd", TRIANGLE_BARY, p)
    uh = np.einsum("qi,ni->nq", TRIANGLE_BARY, uvals[cplx.triangles])
    ue = exact(pts.reshape(-1, p.shape[2])).reshape(uh.shape)
    area = mesh_geometry(cplx)["area"]
    return math.sqrt(float(np.sum(area * (((uh - ue) ** 2) @ TRIANGLE_WEIGHTS))))


def _vnorm(cplx, k, e):
    G = graph_gram(cplx, k, "FEEC")
    return math.sqrt(max(float(e @ (G @ e)), 0.0))


def _converge_level(config, level, m, square):
    c = m.complex
    rows = []
    for k in config.k:
        try:
            sd = solve_hodge_laplace(c, k, LOADS[k], "DEC")
            sf = solve_hodge_laplace(c, k, LOADS[k], "FEEC")
        except AdmissibilityError:
            raise
        except Dec2dError as exc:
            raise SolveFailure(str(exc), level) from exc
        p = f"k{k}."
        ds = _vnorm(c, k - 1, sd.sigma.values - sf.sigma.values) if k > 0 else 0.0
        du = _vnorm(c, k, sd.u.values - sf.u.values)
        e = sd.p.values - sf.p.values
        dp = math.sqrt(max(float(e @ (mass_matrix(c, k, "FEEC").matrix @ e)), 0.0))
        rows += [(m.h, p + "sigma_diff_V", ds), (m.h, p + "u_diff_V", du),
                 (m.h, p + "p_diff_F", dp), (m.h, p + "combined", ds + du + dp)]
        if k == 0 and square:
            rows.append((m.h, p + "feec_u_L2_error", _feec_l2_error_k0(c, sf.u.values, EXACT_K0)))
        if betti_numbers(c)[k] > 0 and k == 1:
            rows.append((m.h, p + "pi_gap", harmonic_gap(c, k)))
    return rows


def run_convergence_study(config, members=None):
    """DEC-vs-FEEC solution differences per level, with log-log slopes."""
    config.validate()
    if members is None:
        members = generate_family(config.family_spec())
    require_dec_regular(members)
    square = config.family_spec().domain == "square"
    result = _new_result(config)
    result.rows = _map_levels(config, lambda i, m: _converge_level(config, i, m, square),
                              members)
    result.sort_rows()
    result.fit_slopes()
    return result


def run_study(config):
    """Dispatch a configured study and return its :class:`StudyResult`."""
    config.validate()
    if config.study == "converge":
        return run_convergence_study(config)
    result = _new_result(config)
    if config.study == "counterexample":
        rows, fit = _study_counterexample(config)
    else:
        members = generate_family(config.family_spec())
        handler = {
            "quality": _study_quality,
            "norms": _study_norms,
            "ip-error": _study_ip,
            "harmonics": _study_harmonics,
            "constants": _study_constants,
        }[config.study]
        rows, fit = handler(config, members)
    result.rows = [(float(h), m, v) for h, m, v in rows]
    result.sort_rows()
    result.fit_slopes(fit)
    return result
