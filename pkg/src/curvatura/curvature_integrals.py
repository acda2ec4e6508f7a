"""Total mean curvatures of level sets and the hypersurface comparison
identity, with itemized correction terms.

The comparison identity states that for nested level sets of u,

    M_r(outer) - M_r(inner) = (r+1) Int sigma_{r+1}(kappa)
        + Int [ - sum kappa_{i_1}..kappa_{i_{r-1}} K_{i_r n}
                + (1/|grad u|) sum kappa_{i_1}..kappa_{i_{r-2}}
                  |grad u|_{i_{r-1}} R_{i_r i_{r-1} i_r n} ],

with both sums over distinct indices in 1..n-1, prefixes ascending (the
second sum is empty for r <= 1).  The left side is computed by surface
quadrature of sigma_r and the right side by coarea volume quadrature of the
frame-contracted integrand, through disjoint code paths, so their agreement
is evidence rather than tautology.  Index sets for the two sums are
materialized once per (n, r) and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import GeometryError
from .model_manifolds import (
    ModelManifold,
    radial_profile,
    riemann_at,
    unit_sphere_volume,
)
from .level_set_geometry import (
    ScalarField,
    hessian_frame,
    principal_frame,
    div_newton_frame,
)
from .quadrature import (
    QuadratureSpec,
    coarea_volume_integral_multi,
    radial_integral,
    surface_integral,
)
from .symmetric_algebra import binomial, double_factorial, sigma_elementary

MCR_COLUMNS = ("model", "field", "n", "r", "level", "value", "error_estimate", "nodes")
BREAKDOWN_COLUMNS = ("model", "field", "n", "r", "c1", "c2", "lhs", "term_principal",
                     "term_sectional", "term_mixed", "residual", "error_budget", "nodes")


@dataclass(frozen=True)
class MeanCurvatureReport:
    r: int
    value: float
    error_estimate: float
    hypersurface: dict
    node_count: int

    def to_record(self, M: ModelManifold, u: ScalarField) -> dict:
        return {
            "model": M.label, "field": u.kind, "n": M.dim, "r": self.r,
            "level": self.hypersurface.get("level"),
            "value": self.value, "error_estimate": self.error_estimate,
            "nodes": self.node_count,
        }


@dataclass(frozen=True)
class ComparisonBreakdown:
    r: int
    levels: tuple
    lhs: float
    term_principal: float
    term_sectional: float
    term_mixed: float
    residual: float
    error_budget: float
    node_count: int
    meta: dict = field(default_factory=dict)

    @property
    def scale(self) -> float:
        """Reference magnitude for relative residuals.  The lhs itself can be
        identically zero (e.g. r = n-1 in flat space), so the surface values
        and the principal term are folded in."""
        cands = [abs(self.lhs), abs(self.term_principal)]
        cands += [abs(v) for k, v in self.meta.items() if k in ("m_outer", "m_inner")]
        return max(cands + [1e-30])

    def to_record(self) -> dict:
        return {
            "model": self.meta.get("model"), "field": self.meta.get("field"),
            "n": self.meta.get("n"), "r": self.r,
            "c1": self.levels[0], "c2": self.levels[1],
            "lhs": self.lhs, "term_principal": self.term_principal,
            "term_sectional": self.term_sectional, "term_mixed": self.term_mixed,
            "residual": self.residual, "error_budget": self.error_budget,
            "nodes": self.node_count,
        }


def _make_breakdown(r, levels, lhs, terms, budget, nodes, meta) -> ComparisonBreakdown:
    residual = lhs - (terms[0] + terms[1] + terms[2])
    return ComparisonBreakdown(
        r=r, levels=tuple(levels), lhs=lhs,
        term_principal=terms[0], term_sectional=terms[1], term_mixed=terms[2],
        residual=residual, error_budget=budget, node_count=nodes, meta=meta)


# ---------------------------------------------------------------------------
# Index enumeration for the two correction sums (cached per (n, r))
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def sectional_sum_terms(m: int, r: int):
    """First-sum index sets over kappa indices 0..m-1 (m = n-1): ascending
    (r-1)-prefix, distinct free index i_r."""
    if r < 1:
        return ()
    out = []
    for prefix in combinations(range(m), r - 1):
        pset = set(prefix)
        for ir in range(m):
            if ir not in pset:
                out.append((prefix, ir))
    return tuple(out)


@lru_cache(maxsize=None)
def mixed_sum_terms(m: int, r: int):
    """Second-sum index sets: ascending (r-2)-prefix, then the ordered pair
    (i_{r-1}, i_r) of distinct free indices.  Empty for r <= 1."""
    if r < 2:
        return ()
    out = []
    for prefix in combinations(range(m), r - 2):
        pset = set(prefix)
        rem = [x for x in range(m) if x not in pset]
        for irm1 in rem:
            for ir in rem:
                if ir != irm1:
                    out.append((prefix, irm1, ir))
    return tuple(out)


def _kprod(kappa, prefix) -> float:
    prod = 1.0
    for i in prefix:
        prod *= kappa[i]
    return prod


def correction_terms_pointwise(u: ScalarField, M: ModelManifold, p, r: int):
    """(sectional, mixed) correction integrands at a point, by the displayed
    index enumeration in the principal frame."""
    n = M.dim
    hd = hessian_frame(u, M, p)
    pf = principal_frame(hd, M, p)
    if M.family == "euclidean" or (M.family == "constant" and M.a == 0.0):
        return 0.0, 0.0
    rd = riemann_at(M, p, pf.frame_chart)
    kap = pf.kappa
    last = n - 1
    sect = 0.0
    for prefix, ir in sectional_sum_terms(n - 1, r):
        sect -= _kprod(kap, prefix) * rd.K[ir, last]
    mixed = 0.0
    for prefix, irm1, ir in mixed_sum_terms(n - 1, r):
        mixed += (_kprod(kap, prefix) * pf.grad_norm_derivs[irm1]
                  * rd.R[ir, irm1, ir, last])
    mixed /= hd.grad_norm
    return sect, mixed


def comparison_correction_residual(u: ScalarField, M: ModelManifold, p, r: int) -> float:
    """Pointwise residual between the two routes to the correction term:
    the displayed double sum vs <div(T_r), grad u>/|grad u|^{r+1} via the
    curvature contraction.  Exact identity; the residual is roundoff."""
    if r < 1:
        raise ValueError("the correction term needs r >= 1")
    sect, mixed = correction_terms_pointwise(u, M, p, r)
    hd = hessian_frame(u, M, p)
    divT = div_newton_frame(u, M, p, r)
    via_div = float(divT @ hd.grad_frame) / hd.grad_norm ** (r + 1)
    return abs((sect + mixed) - via_div)


# ---------------------------------------------------------------------------
# Total mean curvatures
# ---------------------------------------------------------------------------

def _enclosed_volume(u: ScalarField, M: ModelManifold, level: float,
                     spec: QuadratureSpec, threads: int):
    """|{u < level}| with an exact radial oracle where available.

    Radial fields (including the off-center distance, whose sublevel set is a
    geodesic ball in a homogeneous model) reduce to the 1-d profile integral.
    Other fields integrate the coarea fibration down to a small level and add
    an analytically bounded core.
    """
    n = M.dim
    f, _, _ = radial_profile(M)
    sphere = unit_sphere_volume(n)

    def ball_volume(rad):
        return sphere * radial_integral(lambda t: f(t) ** (n - 1), (0.0, rad))

    rho = u.star_radius(level)
    if rho is not None:
        v = ball_volume(rho)
        return v, 1e-14 * abs(v), 1
    if u.kind == "offcenter":
        # sublevel sets of a distance function are geodesic balls; in the
        # homogeneous families their volume only depends on the radius
        v = ball_volume(level)
        return v, 1e-14 * abs(v), 1
    if u.kind == "quadratic":
        # quadratic levels scale like radius^2, so integrate the coarea
        # profile in s = sqrt(level), where it is smooth down to the core
        from .quadrature import _gl_on, field_partials, pairwise_sum
        from .model_manifolds import metric_diag
        lam_min = min(np.linalg.eigvalsh(u.Q))
        core_radius = 1e-3
        eps_level = 0.5 * core_radius ** 2 * lam_min
        if eps_level >= level:
            raise GeometryError("level too small for the coarea core split")

        def inv_grad(p):
            du = field_partials(u, M, p)
            D = metric_diag(M, p)
            return 1.0 / math.sqrt(float(np.sum(du * du / D)))

        def profile(order):
            s_nodes, s_weights = _gl_on(math.sqrt(eps_level), math.sqrt(level), order)
            parts, errs, nodes = [], 0.0, 0
            for s, w in zip(s_nodes, s_weights):
                res = surface_integral(u, M, s * s, inv_grad, spec, threads)
                parts.append(w * 2.0 * s * res.value)
                errs += abs(w) * 2.0 * s * res.error_estimate
                nodes += res.node_count
            return pairwise_sum(parts), errs, nodes

        val, lerr, nodes = profile(spec.level_order)
        val_lo, _, _ = profile(max(2, spec.level_order // 2))
        core = ball_volume(core_radius)
        err = abs(val - val_lo) + lerr + 0.5 * core
        return val + 0.5 * core, err, nodes
    raise GeometryError(f"no enclosed-volume path for field '{u.kind}'")


def total_mean_curvature(u: ScalarField, M: ModelManifold, level: float, r: int,
                         spec: QuadratureSpec = QuadratureSpec(),
                         threads: int = 1) -> MeanCurvatureReport:
    """M_r of the level set {u = level}; M_{-1} is the enclosed volume."""
    n = M.dim
    if not -1 <= r <= n - 1:
        raise ValueError(f"order r must lie in [-1, {n - 1}], got {r}")
    desc = {"level": level, **u.describe()}
    if r == -1:
        value, err, nodes = _enclosed_volume(u, M, level, spec, threads)
        return MeanCurvatureReport(r=r, value=value, error_estimate=err,
                                   hypersurface=desc, node_count=nodes)

    def integrand(p):
        hd = hessian_frame(u, M, p)
        pf = principal_frame(hd, M, p)
        return sigma_elementary(pf.kappa, r)

    res = surface_integral(u, M, level, integrand, spec, threads)
    return MeanCurvatureReport(r=r, value=res.value, error_estimate=res.error_estimate,
                               hypersurface=desc, node_count=res.node_count)


# ---------------------------------------------------------------------------
# Comparison identity
# ---------------------------------------------------------------------------

def _lhs_and_budget(u, M, levels, r, spec, threads):
    inner = total_mean_curvature(u, M, levels[0], r, spec, threads)
    outer = total_mean_curvature(u, M, levels[1], r, spec, threads)
    lhs = outer.value - inner.value
    err = outer.error_estimate + inner.error_estimate
    meta = {"m_outer": outer.value, "m_inner": inner.value}
    return lhs, err, meta, inner.node_count + outer.node_count


def comparison_rhs(u: ScalarField, M: ModelManifold, levels, r: int,
                   spec: QuadratureSpec = QuadratureSpec(),
                   threads: int = 1) -> ComparisonBreakdown:
    """Both sides of the comparison identity between the level sets at
    levels = (c1, c2), with the right side itemized into the principal,
    sectional, and mixed terms."""
    n = M.dim
    if not 0 <= r <= n - 1:
        raise ValueError(f"order r must lie in [0, {n - 1}], got {r}")
    flat = M.family == "euclidean" or (M.family == "constant" and M.a == 0.0)
    sect_terms = sectional_sum_terms(n - 1, r)
    mix_terms = mixed_sum_terms(n - 1, r)
    last = n - 1

    def integrand(p):
        hd = hessian_frame(u, M, p)
        pf = principal_frame(hd, M, p)
        principal = (r + 1) * sigma_elementary(pf.kappa, r + 1)
        if flat:
            return np.array([principal, 0.0, 0.0])
        rd = riemann_at(M, p, pf.frame_chart)
        kap = pf.kappa
        sect = 0.0
        for prefix, ir in sect_terms:
            sect -= _kprod(kap, prefix) * rd.K[ir, last]
        mixed = 0.0
        for prefix, irm1, ir in mix_terms:
            mixed += (_kprod(kap, prefix) * pf.grad_norm_derivs[irm1]
                      * rd.R[ir, irm1, ir, last])
        mixed /= hd.grad_norm
        return np.array([principal, sect, mixed])

    vals, errs, nodes_rhs = coarea_volume_integral_multi(
        u, M, levels, integrand, spec, 3, threads)
    lhs, lhs_err, meta, nodes_lhs = _lhs_and_budget(u, M, levels, r, spec, threads)
    budget = 10.0 * (lhs_err + float(np.sum(errs)))
    meta.update({"model": M.label, "field": u.kind, "n": n})
    return _make_breakdown(r, levels, lhs, vals, budget, nodes_rhs + nodes_lhs, meta)


def comparison_rhs_constant(u: ScalarField, M: ModelManifold, levels, r: int,
                            spec: QuadratureSpec = QuadratureSpec(),
                            threads: int = 1) -> ComparisonBreakdown:
    """Two-term specialization on a constant-curvature model:

        M_r(outer) - M_r(inner) = (r+1) Int sigma_{r+1} - a (n-r) Int sigma_{r-1}.
    """
    if M.family != "constant":
        raise ValueError("comparison_rhs_constant requires the constant-curvature family")
    n = M.dim
    if not 0 <= r <= n - 1:
        raise ValueError(f"order r must lie in [0, {n - 1}], got {r}")
    a = M.a

    def integrand(p):
        hd = hessian_frame(u, M, p)
        pf = principal_frame(hd, M, p)
        principal = (r + 1) * sigma_elementary(pf.kappa, r + 1)
        sect = 0.0 if r == 0 else -a * (n - r) * sigma_elementary(pf.kappa, r - 1)
        return np.array([principal, sect, 0.0])

    vals, errs, nodes_rhs = coarea_volume_integral_multi(
        u, M, levels, integrand, spec, 3, threads)
    lhs, lhs_err, meta, nodes_lhs = _lhs_and_budget(u, M, levels, r, spec, threads)
    budget = 10.0 * (lhs_err + float(np.sum(errs)))
    meta.update({"model": M.label, "field": u.kind, "n": n, "path": "constant"})
    return _make_breakdown(r, levels, lhs, vals, budget, nodes_rhs + nodes_lhs, meta)


def ricci_comparison(u: ScalarField, M: ModelManifold, levels,
                     spec: QuadratureSpec = QuadratureSpec(),
                     threads: int = 1) -> ComparisonBreakdown:
    """The r = 1 identity with the sectional term contracted as a Ricci
    curvature: M_1(outer) - M_1(inner) = 2 Int sigma_2 - Int Ric(nu)."""
    flat = M.family == "euclidean" or (M.family == "constant" and M.a == 0.0)

    def integrand(p):
        hd = hessian_frame(u, M, p)
        pf = principal_frame(hd, M, p)
        principal = 2.0 * sigma_elementary(pf.kappa, 2)
        if flat:
            return np.array([principal, 0.0, 0.0])
        rd = riemann_at(M, p, pf.frame_chart)
        return np.array([principal, -rd.ricci_n, 0.0])

    vals, errs, nodes_rhs = coarea_volume_integral_multi(
        u, M, levels, integrand, spec, 3, threads)
    lhs, lhs_err, meta, nodes_lhs = _lhs_and_budget(u, M, levels, 1, spec, threads)
    budget = 10.0 * (lhs_err + float(np.sum(errs)))
    meta.update({"model": M.label, "field": u.kind, "n": M.dim, "path": "ricci"})
    return _make_breakdown(1, levels, lhs, vals, budget, nodes_rhs + nodes_lhs, meta)


# ---------------------------------------------------------------------------
# Closed-form corollary quantities
# ---------------------------------------------------------------------------

def solanes_prediction(m: dict, a: float, n: int) -> float:
    """Predicted M_{n-1} from lower-order total mean curvatures in constant
    curvature a:

        M_{n-1} = |S^{n-1}| - sum_{i=1}^{(n - n mod 2)/2}
                  [(2i-1)!! (n-2i-2)!! / (n-2)!!] a^i M_{n-2i-1}.

    m maps the order j to M_j; for even n the j = -1 entry (the enclosed
    volume) is required.
    """
    total = unit_sphere_volume(n)
    for i in range(1, (n - (n % 2)) // 2 + 1):
        j = n - 2 * i - 1
        if j not in m:
            raise ValueError(f"missing M_{j} input for the recursion at n={n}")
        coef = (double_factorial(2 * i - 1) * double_factorial(n - 2 * i - 2)
                / double_factorial(n - 2))
        total -= coef * a ** i * m[j]
    return total


def ball_bound(r: int, rho: float, a: float, n: int) -> float:
    """M_r of the boundary of a radius-rho ball in the constant-curvature-a
    model (Euclidean closed form at a = 0)."""
    if a > 0:
        raise ValueError("ball bounds are for a <= 0")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if not 0 <= r <= n - 1:
        raise ValueError(f"order r must lie in [0, {n - 1}], got {r}")
    if a == 0:
        fval, dval = rho, 1.0
    else:
        s = math.sqrt(-a)
        fval, dval = math.sinh(s * rho) / s, math.cosh(s * rho)
    return binomial(n - 1, r) * unit_sphere_volume(n) \
        * fval ** (n - 1 - r) * dval ** r


def m1_volume_bound(a: float, vol: float, n: int):
    """Volume lower bounds for the total first mean curvature:
    -(n-1) a vol in general, and additionally -4 a vol when n = 3."""
    if vol < 0:
        raise ValueError("volume must be nonnegative")
    general = -(n - 1) * a * vol
    dim3 = -4.0 * a * vol if n == 3 else None
    return general, dim3
