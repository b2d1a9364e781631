"""Analytic side: the model functions f_{n,m}, the Chern–Weil residue, toric volumes.

Differential identities are checked pointwise through real finite
differences in mpmath, so rounding never competes with the O(h^2)
truncation error of the central schemes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath
import numpy as np
from scipy import integrate

from .lattice import (intersect, limit_closed_form, node_sum, self_intersection_closed_form,
                      toric_self_intersection, toric_tower)
from .numbers import coprime_tornheim
from .report import Report, fmt
from .surface import _as_level, cusp_count


@dataclass(frozen=True)
class PuncturedBidisk:
    u: complex
    v: complex

    def __post_init__(self):
        if self.u == 0 or self.v == 0:
            raise ValueError("u and v must be nonzero")
        if abs(self.u * self.v) >= 1:
            raise ValueError("point must satisfy |uv| < 1")


def _log_sq(z):
    # log(z conj(z)) = 2 log|z|
    return 2 * mpmath.log(abs(mpmath.mpc(z)))


def f_nm(n: int, m: int, u, v):
    """(1/nm) log|u|^2 log|v|^2 / (n log|u|^2 + m log|v|^2)."""
    if gcd(n, m) != 1 or n < 1 or m < 1:
        raise ValueError("(n, m) must be coprime positive integers")
    lu, lv = _log_sq(u), _log_sq(v)
    denom = n * lu + m * lv
    if denom == 0:
        raise ZeroDivisionError(f"n log|u|^2 + m log|v|^2 vanishes at ({u}, {v})")
    return lu * lv / (n * m * denom)


def pullback_identity_residual(n: int, m: int, s, t):
    """f_{n,m}(st, t) - log|t|^2 / (nm(n+m)) - f_{n,n+m}(s, t)."""
    PuncturedBidisk(s, t)
    PuncturedBidisk(s * t, t)
    return f_nm(n, m, s * t, t) - _log_sq(t) / (n * m * (n + m)) - f_nm(n, n + m, s, t)


def complex_hessian(func, u, v, h=1e-4):
    """(f_{u ubar}, f_{v vbar}, f_{u vbar}) by central differences in real coordinates.

    Steps are relative: ``h |u|`` in the u-plane and ``h |v|`` in the v-plane.
    """
    u, v = mpmath.mpc(u), mpmath.mpc(v)
    hu, hv = h * abs(u), h * abs(v)
    if hu == 0 or hv == 0:
        raise ValueError("finite-difference step underflow")
    f0 = func(u, v)

    def at(du=0, dv=0):
        return func(u + du, v + dv)

    def second(d, step, which):
        p = at(**{which: d})
        q = at(**{which: -d})
        return (p - 2 * f0 + q) / step**2

    def mixed(du, dv, su, sv):
        return (at(du, dv) - at(du, -dv) - at(-du, dv) + at(-du, -dv)) / (4 * su * sv)

    i = mpmath.mpc(0, 1)
    fxx1 = second(hu, hu, "du")
    fyy1 = second(i * hu, hu, "du")
    fxx2 = second(hv, hv, "dv")
    fyy2 = second(i * hv, hv, "dv")
    fx1x2 = mixed(hu, hv, hu, hv)
    fy1y2 = mixed(i * hu, i * hv, hu, hv)
    fx1y2 = mixed(hu, i * hv, hu, hv)
    fy1x2 = mixed(i * hu, hv, hu, hv)
    f_uu = (fxx1 + fyy1) / 4
    f_vv = (fxx2 + fyy2) / 4
    f_uv = (fx1x2 + fy1y2 + i * (fx1y2 - fy1x2)) / 4
    return f_uu, f_vv, f_uv


def wedge_vanishing_residual(n: int, m: int, u, v, h=1e-4, dps: int = 40):
    """|f_{u ubar} f_{v vbar} - f_{u vbar} f_{v ubar}| and its natural scale.

    Returns ``(residual, scale)``; the wedge square of ddbar f vanishes
    exactly, so ``residual / scale`` is pure truncation error, O(h^2).
    """
    with mpmath.workdps(dps):
        f_uu, f_vv, f_uv = complex_hessian(lambda a, b: f_nm(n, m, a, b), u, v, h)
        f_vu = mpmath.conj(f_uv)
        residual = abs(f_uu * f_vv - f_uv * f_vu)
        scale = abs(f_uu * f_vv) + abs(f_uv * f_vu)
    return residual, scale


def loglog_growth_probe(n: int, m: int, v0=math.exp(-1), r0=None, samples: int = 2000,
                        seed: int = 0) -> Report:
    """Sample |f_{n,m}| on {|u| <= r0, |v| = |v0|} against 2K / (n^2 m).

    K = |log|v0|^2|.  The bound needs n |log|u|^2| >= 2 m K on the region,
    which is enforced on r0 (the default sits just inside that region).
    """
    k = abs(float(_log_sq(v0)))
    if r0 is None:
        r0 = math.exp(-m * k / n - 1)
    if n * (-2 * math.log(r0)) < 2 * m * k:
        raise ValueError("region too large for the growth estimate (need n|log|u|^2| >= 2mK)")
    bound = 2 * k / (n * n * m)
    rng = np.random.default_rng(seed)
    # log-uniform radii reach deep into the boundary
    radii = r0 * np.exp(-rng.uniform(0, 40, samples))
    angles = rng.uniform(0, 2 * np.pi, (samples, 2))
    worst = 0.0
    for r, (a, b) in zip(radii, angles):
        val = abs(float(f_nm(n, m, complex(r * np.cos(a), r * np.sin(a)),
                             complex(abs(v0) * np.cos(b), abs(v0) * np.sin(b)))))
        worst = max(worst, val)
    return Report("loglog-growth", fmt(bound), fmt(worst), fmt(bound), worst <= bound,
                  details={"n": n, "m": m, "K": fmt(k), "samples": samples, "seed": seed})


# ---------------------------------------------------------------------------
# Chern–Weil residue

def residue_antiderivative(a, t):
    """Antiderivative of 2 a^2 t / (t + a)^4 in t, vanishing at -infinity."""
    w = t + a
    return 2 * a * a * (-1 / (2 * w * w) + a / (3 * w**3))


def residue_closed_form(epsilon):
    """I(eps) from the antiderivative; equals -1/6 for every eps."""
    a = 2 * mpmath.log(mpmath.mpf(epsilon))
    return residue_antiderivative(a, a)


def residue_truncation(a: float, target: float = 1e-8) -> tuple[float, float]:
    """Cut T with the analytic tail beyond t = a - T below ``target``.

    On t <= a - T put w = t + a, |w| >= W = T + 2|a| and |t| <= |w| + |a|, so
    the tail is at most 2 a^2 (1 / (2 W^2) + |a| / (3 W^3)).
    """
    abs_a = abs(a)
    big_w = 2 * abs_a
    while True:
        tail = 2 * a * a * (1 / (2 * big_w**2) + abs_a / (3 * big_w**3))
        if tail < target:
            return big_w - 2 * abs_a, tail
        big_w *= 2


def residue_integral(epsilon: float, level=None) -> float:
    """I(eps) = int_0^eps 2 (log eps^2)^2 log r^2 2r dr / ((log r^2 + log eps^2)^4 r^2).

    Evaluated after t = log r^2 as int_{-inf}^{a} 2 a^2 t / (t + a)^4 dt with
    a = log eps^2, truncated at a - T and split into dyadic pieces in |t + a|.
    With ``level`` the result carries the 16 / N^2 prefactor.
    """
    if not 0 < epsilon < 1 / math.e:
        raise ValueError("epsilon must lie in (0, 1/e)")
    a = 2 * math.log(epsilon)
    cut, _ = residue_truncation(a)

    def integrand(t):
        return 2 * a * a * t / (t + a) ** 4

    # breakpoints where |t + a| doubles, from 2|a| outwards
    edges = [a]
    width = 2 * abs(a)
    while edges[-1] > a - cut:
        edges.append(max(a - cut, -width - a))
        width *= 2
    total = 0.0
    for hi, lo in zip(edges, edges[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
        total += val
    if level is not None:
        total *= 16 / _as_level(level).n ** 2
    return total


def residue_consistency(level, epsilon: float = 0.01) -> Report:
    """Reassemble bdv^2 = C·C + (boundary residues) exactly and by quadrature.

    Each of the N p_N double points contributes two faces, each worth
    (16 / N^2) * (-1/6).
    """
    lv = _as_level(level)
    n, p = lv.n, cusp_count(lv)
    points = n * p
    per_face = Fraction(16, n * n) * Fraction(-1, 6)
    exact_total = points * 2 * per_face
    cc = self_intersection_closed_form(lv)
    target = limit_closed_form(lv)
    exact_ok = cc + exact_total == target
    quad_total = points * 2 * residue_integral(epsilon, lv)
    quad_err = abs(quad_total - float(exact_total))
    budget = points * 1e-6
    return Report(
        "residue-consistency",
        fmt(target),
        fmt(cc + exact_total),
        "0",
        bool(exact_ok and quad_err <= budget),
        details={"C.C": fmt(cc), "residue_total": fmt(exact_total),
                 "quadrature_total": repr(quad_total), "quadrature_error": repr(quad_err),
                 "quadrature_budget": repr(budget), "epsilon": repr(epsilon)},
    )


# ---------------------------------------------------------------------------
# Toric analogue

def psi_can(u, v):
    return min(0, u, v)


def psi_sing(u, v):
    """Conic support function of the singular metric on O(1) over P^2."""
    if u >= 0 and v >= 0:
        if u + v == 0:
            return 0 * u
        return u * v / (u + v)
    return min(u, v)


def delta_sing_membership(x, y) -> bool:
    """x, y >= 0, x + y <= 1 and sqrt(x) + sqrt(y) >= 1.

    Under the first two conditions the last is equivalent to
    4xy >= (1 - x - y)^2, which stays exact for rational input.
    """
    if x < 0 or y < 0 or x + y > 1:
        return False
    return 4 * x * y >= (1 - x - y) ** 2


def support_dominates(x, y, directions: int = 360, slack: float = 1e-12) -> bool:
    """x u + y v >= Psi_sing(u, v) on the unit circle (enough by 1-homogeneity)."""
    for k in range(directions):
        th = 2 * math.pi * k / directions
        u, v = math.cos(th), math.sin(th)
        if x * u + y * v < psi_sing(u, v) - slack:
            return False
    return True


def toric_volume_exact() -> Fraction:
    """2 Vol(Delta_sing) = 2 (1/2 - int_0^1 (1 - sqrt x)^2 dx).

    The antiderivative x - 4/3 x^{3/2} + x^2 / 2 at x = 1 gives 1/6.
    """
    removed = Fraction(1) - Fraction(4, 3) + Fraction(1, 2)
    return 2 * (Fraction(1, 2) - removed)


def toric_volume_quadrature(panels: int = 10_000, order: int = 4) -> float:
    """Composite Gauss–Legendre for 2 int_0^1 (2 sqrt x - 2x) dx.

    x = s^2 turns the integrand into the polynomial 4 s^2 - 4 s^3 on [0, 1].
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    x = s * s
    integrand = (2 * np.sqrt(x) - 2 * x) * 2 * s
    return float(2 * np.sum(w * integrand))


def toric_volume_montecarlo(samples: int = 1_000_000, seed: int = 0, batch: int = 100_000):
    """Hit-or-miss estimate of 2 Vol(Delta_sing) on the unit square; returns (value, sigma)."""
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        pts = rng.random((size, 2))
        x, y = pts[:, 0], pts[:, 1]
        inside = (x + y <= 1) & (4 * x * y >= (1 - x - y) ** 2)
        hits += int(inside.sum())
        done += size
    p = hits / samples
    return 2 * p, 2 * math.sqrt(p * (1 - p) / samples)


def toric_volume_check(method: str = "exact", budget: int | None = None, seed: int = 0,
                       tol: float | None = None, depth: int = 6) -> Report:
    """2 Vol(Delta_sing) against 2/3, plus the tower side div(x0)^2 - 1/3."""
    target = Fraction(2, 3)
    base = toric_tower()
    dv0 = intersect(base.div, base.div)
    tower_limit = dv0 - Fraction(1, 3)
    tower_depth = toric_self_intersection(depth)
    cop = coprime_tornheim(300)
    tower_ok = (dv0 == 1 and tower_limit == target and tower_depth == 1 - node_sum(depth)
                and cop.contains(mpmath.mpf(1) / 3))
    details = {"method": method, "tower_dv0_sq": fmt(dv0), "tower_limit": fmt(tower_limit),
               f"tower_depth_{depth}": fmt(tower_depth), "tower_ok": tower_ok}
    if method == "exact":
        value = toric_volume_exact()
        return Report("toric-volume", fmt(target), fmt(value), "0", tower_ok and value == target,
                      details=details)
    if method == "quadrature":
        panels = budget or 10_000
        value = toric_volume_quadrature(panels)
        bound = 1e-8 if tol is None else tol
        err = abs(value - 2 / 3)
        details.update(budget=panels, abs_error=repr(err))
        return Report("toric-volume", fmt(target), repr(value), repr(bound),
                      bool(tower_ok and err <= bound), details=details)
    if method == "montecarlo":
        samples = budget or 1_000_000
        value, sigma = toric_volume_montecarlo(samples, seed)
        bound = 3 * sigma if tol is None else tol
        err = abs(value - 2 / 3)
        details.update(budget=samples, seed=seed, abs_error=repr(err), sigma=repr(sigma))
        return Report("toric-volume", fmt(target), repr(value), repr(bound),
                      bool(tower_ok and err <= bound), details=details)
    raise ValueError(f"unknown method {method!r}")
