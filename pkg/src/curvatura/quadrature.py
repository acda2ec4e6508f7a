"""Deterministic quadrature over level-set hypersurfaces and the regions
between them.

Level sets are parameterized by rays from the chart base point (all supported
fields have star-shaped level sets about it): along the ray with direction
angles theta, the radius rho(theta) solving u = c is found by bracketing
bisection then Newton polish, and the surface measure of the radial graph is

    dA = f(rho)^{n-1} sqrt(det ghat(theta)) * (|grad u| / d_rho u) dtheta,

with f the radial scale of the chart (f = rho in Cartesian charts) and ghat
the round metric of S^{n-1} in iterated spherical angles.  Angular nodes are
Gauss-Legendre tensor products, with polar angles pulled a fixed margin off
the axis.  Volume integrals between two levels use the coarea fibration
(Gauss-Legendre across levels, 1/|grad u|-weighted surface rule inside).

Reductions are fixed-order pairwise sums over the node index, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GeometryError
from .model_manifolds import ModelManifold, metric_diag, radial_profile
from .level_set_geometry import ScalarField, sphere_direction

_ROOT_BISECT_WIDTH = 1e-6
_ROOT_NEWTON_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """Orders of the tensor-product rule.

    angular_orders: either one order broadcast to every angle or a tuple with
    one Gauss-Legendre order per angle; level_order: nodes across the level
    interval of coarea integrals; margin: polar-axis exclusion in radians.
    """
    angular_orders: tuple = (16,)
    level_order: int = 8
    margin: float = 1e-6

    def __post_init__(self):
        orders = self.angular_orders
        if isinstance(orders, int):
            orders = (orders,)
        object.__setattr__(self, "angular_orders", tuple(int(o) for o in orders))
        if any(o < 2 for o in self.angular_orders) or self.level_order < 2:
            raise ValueError("all quadrature orders must be >= 2")
        if not 0.0 < self.margin <= 1e-3:
            raise ValueError("margin must lie in (0, 1e-3]")

    def angular_for(self, n: int) -> tuple:
        if len(self.angular_orders) == 1:
            return self.angular_orders * (n - 1)
        if len(self.angular_orders) != n - 1:
            raise ValueError(
                f"need {n - 1} angular orders for dim {n}, got {len(self.angular_orders)}")
        return self.angular_orders

    def coarser(self) -> "QuadratureSpec":
        """Companion rule with halved orders, used for error estimates."""
        return QuadratureSpec(
            angular_orders=tuple(max(2, o // 2) for o in self.angular_orders),
            level_order=max(2, self.level_order // 2),
            margin=self.margin,
        )


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    node_count: int


def pairwise_sum(values) -> float:
    """Fixed-order pairwise summation (binary tree over the index range)."""
    vals = np.asarray(values, dtype=float)

    def rec(lo, hi):
        if hi - lo <= 8:
            s = 0.0
            for k in range(lo, hi):
                s += vals[k]
            return s
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    if vals.size == 0:
        return 0.0
    return rec(0, vals.size)


def _pairwise_sum_rows(rows: np.ndarray) -> np.ndarray:
    """Pairwise sum down axis 0 of a 2-d array, componentwise."""

    def rec(lo, hi):
        if hi - lo <= 8:
            s = np.zeros(rows.shape[1])
            for k in range(lo, hi):
                s += rows[k]
            return s
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    if rows.shape[0] == 0:
        return np.zeros(rows.shape[1])
    return rec(0, rows.shape[0])


@lru_cache(maxsize=None)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _gl_on(a: float, b: float, order: int):
    x, w = _leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@lru_cache(maxsize=None)
def _angular_grid(n: int, orders: tuple, margin: float):
    """All angular nodes of S^{n-1} with weights including sqrt(det ghat).

    Returns (angles array N x (n-1), weights length N); node order is the
    lexicographic product order, which fixes the reduction order.
    """
    per_nodes, per_weights = [], []
    for m in range(n - 2):
        x, w = _gl_on(margin, math.pi - margin, orders[m])
        per_weights.append(w * np.sin(x) ** (n - 2 - m))
        per_nodes.append(x)
    x, w = _gl_on(0.0, 2.0 * math.pi, orders[n - 2])
    per_nodes.append(x)
    per_weights.append(w)
    grids = np.meshgrid(*per_nodes, indexing="ij")
    wgrids = np.meshgrid(*per_weights, indexing="ij")
    angles = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.ones(angles.shape[0])
    for wg in wgrids:
        weights = weights * wg.ravel()
    return angles, weights


def ray_point(M: ModelManifold, rho: float, angles) -> np.ndarray:
    """Chart point at radius rho along the ray with the given angles."""
    if M.chart == "polar":
        return np.concatenate(([rho], angles))
    return rho * sphere_direction(angles)


def field_partials(u: ScalarField, M: ModelManifold, p) -> np.ndarray:
    """Chart coordinate partials of u, analytic when the field offers them,
    otherwise first-order central differences."""
    if u.analytic:
        return u.partials(M, p)
    from .level_set_geometry import fd_steps
    p = np.asarray(p, dtype=float)
    h = 1e-5 * (1.0 + float(np.linalg.norm(p)))
    steps = fd_steps(M, p, h)
    du = np.zeros(M.dim)
    for i in range(M.dim):
        q = p.copy(); q[i] += steps[i]
        up = u.value(M, q)
        q = p.copy(); q[i] -= steps[i]
        um = u.value(M, q)
        du[i] = (up - um) / (2 * steps[i])
    return du


def find_level_radius(u: ScalarField, M: ModelManifold, level: float, angles) -> float:
    """Radius along the ray where u = level (bisection then Newton).

    Fields radial about the base point short-circuit to the exact radius.
    """
    sr = u.star_radius(level)
    if sr is not None:
        return sr

    def f(rho):
        return u.value(M, ray_point(M, rho, angles)) - level

    lo = 1e-9
    flo = f(lo)
    if flo >= 0:
        raise GeometryError(
            f"level {level:g} does not enclose the ray origin (u - c = {flo:.3e} at r=0+)")
    hi = 0.25
    fhi = f(hi)
    while fhi < 0:
        hi *= 2.0
        if hi > M.working_radius:
            raise GeometryError(
                f"no crossing of level {level:g} found within the working radius")
        fhi = f(hi)
    while hi - lo > _ROOT_BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm < 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    rho = 0.5 * (lo + hi)
    hder = 1e-7 * (1.0 + rho)
    for _ in range(20):
        fr = f(rho)
        der = (f(rho + hder) - f(rho - hder)) / (2 * hder)
        if der <= 0:
            break
        step = fr / der
        rho -= step
        if rho <= lo - _ROOT_BISECT_WIDTH or rho >= hi + _ROOT_BISECT_WIDTH:
            rho = min(max(rho, lo), hi)
        if abs(step) <= _ROOT_NEWTON_TOL * max(1.0, rho) and \
           abs(fr) <= _ROOT_NEWTON_TOL * max(1.0, abs(level)):
            break
    if abs(f(rho)) > 1e-9 * max(1.0, abs(level)):
        # refuse a half-resolved crossing rather than degrade the quadrature
        raise GeometryError(
            f"root polish failed at angles {np.asarray(angles).tolist()}: "
            f"|u - c| = {abs(f(rho)):.3e}")
    return rho


def _radial_scale(M: ModelManifold, rho: float, n: int) -> float:
    if M.chart == "polar":
        f, _, _ = radial_profile(M)
        return f(rho) ** (n - 1)
    return rho ** (n - 1)


def _surface_node(u, M, level, angles, w_angle):
    """(point, surface weight, |grad u|) for one angular node of a level set."""
    n = M.dim
    rho = find_level_radius(u, M, level, angles)
    p = ray_point(M, rho, angles)
    du = field_partials(u, M, p)
    D = metric_diag(M, p)
    grad_norm = math.sqrt(float(np.sum(du * du / D)))
    if M.chart == "polar":
        u_rho = du[0]
    else:
        u_rho = float(sphere_direction(angles) @ du)
    if u_rho <= 0:
        raise GeometryError(
            f"u is not increasing along the ray at the crossing (angles {angles})")
    w = w_angle * _radial_scale(M, rho, n) * grad_norm / u_rho
    return p, w, grad_norm


def _map_nodes(fn, count, threads):
    """Evaluate fn(k) for k in range(count), storing by index (deterministic
    for any worker count)."""
    if threads <= 1 or count < 16:
        return [fn(k) for k in range(count)]
    out = [None] * count
    chunk = max(8, count // (8 * threads))

    def run(lo):
        for k in range(lo, min(lo + chunk, count)):
            out[k] = fn(k)

    with ThreadPoolExecutor(max_workers=threads) as ex:
        list(ex.map(run, range(0, count, chunk)))
    return out


def _surface_values(u, M, level, integrand, spec, n_comp, threads):
    """Weighted integrand rows (one per angular node) and the node count."""
    n = M.dim
    angles, weights = _angular_grid(n, spec.angular_for(n), spec.margin)

    def node(k):
        p, w, _ = _surface_node(u, M, level, angles[k], weights[k])
        val = integrand(p)
        return w * np.atleast_1d(np.asarray(val, dtype=float))

    rows = np.array(_map_nodes(node, angles.shape[0], threads))
    return rows.reshape(angles.shape[0], n_comp)


def _cap_bound(M: ModelManifold, spec: QuadratureSpec, value: float) -> float:
    """Analytic bound on the measure omitted by the polar-axis margin.

    The relative measure of each excluded cap is below margin^2, so the
    systematic part of the error (invisible to order halving) is bounded by
    (number of polar angles) * margin^2 * |value|."""
    return (M.dim - 2) * spec.margin ** 2 * abs(value)


def surface_integral(u: ScalarField, M: ModelManifold, level: float,
                     integrand, spec: QuadratureSpec,
                     threads: int = 1) -> IntegralResult:
    """Integral of a pointwise function over the level set {u = level}.

    The error estimate is the difference against the next-lower (halved)
    order companion rule plus the analytic polar-cap omission bound.
    """
    rows = _surface_values(u, M, level, integrand, spec, 1, threads)
    value = pairwise_sum(rows[:, 0])
    rows_lo = _surface_values(u, M, level, integrand, spec.coarser(), 1, threads)
    value_lo = pairwise_sum(rows_lo[:, 0])
    err = abs(value - value_lo) + _cap_bound(M, spec, value)
    return IntegralResult(value=value, error_estimate=err,
                          node_count=rows.shape[0])


def _coarea_values(u, M, levels, integrand, spec, n_comp, threads):
    n = M.dim
    c1, c2 = levels
    angles, weights = _angular_grid(n, spec.angular_for(n), spec.margin)
    t_nodes, t_weights = _gl_on(c1, c2, spec.level_order)
    n_ang = angles.shape[0]

    def node(k):
        lev, ka = divmod(k, n_ang)
        p, w, grad_norm = _surface_node(u, M, t_nodes[lev], angles[ka], weights[ka])
        val = integrand(p)
        w_vol = w * t_weights[lev] / grad_norm
        return w_vol * np.atleast_1d(np.asarray(val, dtype=float))

    count = len(t_nodes) * n_ang
    rows = np.array(_map_nodes(node, count, threads))
    return rows.reshape(count, n_comp)


def coarea_volume_integral(u: ScalarField, M: ModelManifold, levels,
                           integrand, spec: QuadratureSpec,
                           threads: int = 1) -> IntegralResult:
    """Integral of a pointwise function over the region {c1 < u < c2},
    computed as a level integral of 1/|grad u|-weighted surface integrals."""
    c1, c2 = levels
    if not c1 < c2:
        raise ValueError(f"levels must satisfy c1 < c2, got ({c1}, {c2})")
    rows = _coarea_values(u, M, levels, integrand, spec, 1, threads)
    value = pairwise_sum(rows[:, 0])
    rows_lo = _coarea_values(u, M, levels, integrand, spec.coarser(), 1, threads)
    value_lo = pairwise_sum(rows_lo[:, 0])
    err = abs(value - value_lo) + _cap_bound(M, spec, value)
    return IntegralResult(value=value, error_estimate=err,
                          node_count=rows.shape[0])


def coarea_volume_integral_multi(u, M, levels, integrand, spec, n_comp,
                                 threads: int = 1):
    """Vector-valued coarea integral sharing one pass of pointwise work.

    Returns (values, error_estimates, node_count) as arrays of length n_comp.
    """
    c1, c2 = levels
    if not c1 < c2:
        raise ValueError(f"levels must satisfy c1 < c2, got ({c1}, {c2})")
    rows = _coarea_values(u, M, levels, integrand, spec, n_comp, threads)
    values = _pairwise_sum_rows(rows)
    rows_lo = _coarea_values(u, M, levels, integrand, spec.coarser(), n_comp, threads)
    values_lo = _pairwise_sum_rows(rows_lo)
    errs = np.abs(values - values_lo)
    errs = errs + (M.dim - 2) * spec.margin ** 2 * np.abs(values)
    return values, errs, rows.shape[0]


def radial_integral(g, bounds, order: int = 16, tol: float = 1e-12,
                    max_order: int = 4096) -> float:
    """1-D Gauss-Legendre integral, doubling the order until two successive
    values differ by less than tol (relative); warns if the cap is hit."""
    a, b = bounds
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("bounds must be finite")
    prev = None
    val = 0.0
    while order <= max_order:
        x, w = _gl_on(a, b, order)
        val = pairwise_sum([wk * g(xk) for xk, wk in zip(x, w)])
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        order *= 2
    warnings.warn(f"radial_integral hit the order cap {max_order} without "
                  f"meeting tol={tol:g}; last delta {abs(val - prev):.3e}")
    return val
