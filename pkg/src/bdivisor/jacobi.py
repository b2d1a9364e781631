"""Jacobi-form side: dimension formula, theta_{1,1}, the invariant metric.

The theta series is evaluated with mpmath.  Its terms satisfy
``|t_n| <= exp(-pi eta x^2 + 2 pi |y| |x|)`` with ``x = n + 1/2``, and past
the point where consecutive bounds shrink by a ratio ``r < 1`` the tail is
dominated by a geometric series; the truncation index is the first one that
pushes that series below the requested tolerance.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .numbers import HURWITZ_KRONECKER, divisors, hurwitz_class_number, is_squarefree, square_part
from .report import Report, fmt
from .surface import _as_level, cusp_count, fractional_part
from .lattice import limit_closed_form


@dataclass(frozen=True)
class ModularPoint:
    tau: complex
    z: complex

    def __post_init__(self):
        if mpmath.im(self.tau) <= 0:
            raise ValueError(f"tau must lie in the upper half-plane, got {self.tau}")

    @property
    def eta(self):
        return mpmath.im(self.tau)

    @property
    def y(self):
        return mpmath.im(self.z)


@dataclass(frozen=True)
class GroupElement:
    """Element [(a b; c d), (lam, mu)] of SL2(Z) ⋉ Z^2."""

    a: int = 1
    b: int = 0
    c: int = 0
    d: int = 1
    lam: int = 0
    mu: int = 0

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("matrix must have determinant 1")

    def in_gamma(self, n: int) -> bool:
        return (self.a % n == 1 % n and self.d % n == 1 % n
                and self.b % n == 0 and self.c % n == 0)

    def act(self, pt: ModularPoint) -> ModularPoint:
        tau, z = mpmath.mpc(pt.tau), mpmath.mpc(pt.z)
        j = self.c * tau + self.d
        return ModularPoint((self.a * tau + self.b) / j, (z + self.lam * tau + self.mu) / j)


@dataclass(frozen=True)
class WeightIndex:
    k: int = 4
    m: int = 4


class ThetaRangeError(ArithmeticError):
    """Raised when Im(tau) is too small for a trustworthy evaluation."""


def theta_terms(pt: ModularPoint, tol) -> int:
    """Truncation K such that the terms with |n + 1/2| > K contribute < tol."""
    eta = float(pt.eta)
    y = abs(float(pt.y))
    tol = float(tol)
    k = 0
    while True:
        x = k + 0.5
        ratio = -math.pi * eta * (2 * x + 1) + 2 * math.pi * y
        if ratio < 0:
            log_tail = math.log(2) - math.pi * eta * x * x + 2 * math.pi * y * x - math.log1p(-math.exp(ratio))
            if log_tail < math.log(tol):
                return k
        k += 1
        if k > 10**6:
            raise ThetaRangeError("theta series truncation did not converge")


def theta11(pt: ModularPoint, tol=1e-30):
    """theta_{1,1}(tau, z) = sum_n exp(pi i tau (n+1/2)^2 + 2 pi i (z+1/2)(n+1/2)).

    Sums the terms with -K-1 <= n <= K, which leaves an absolute error below tol.
    """
    if pt.eta <= 0:
        raise ValueError("tau must have positive imaginary part")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if pt.eta < 1e-4:
        raise ThetaRangeError(f"Im(tau) = {pt.eta} is too close to the real axis")
    k = theta_terms(pt, tol)
    # working precision follows the requested tolerance
    dps = max(mpmath.mp.dps, int(-math.log10(float(tol))) + 10)
    with mpmath.workdps(dps):
        tau, z = mpmath.mpc(pt.tau), mpmath.mpc(pt.z)
        pi_i = mpmath.pi * 1j
        half = mpmath.mpf(1) / 2
        terms = []
        for n in range(-k - 1, k + 1):
            x = n + half
            terms.append(mpmath.exp(pi_i * tau * x * x + 2 * pi_i * (z + half) * x))
        value = mpmath.fsum(terms)
    return value


def invariant_norm_sq(f_value, pt: ModularPoint, wi: WeightIndex = WeightIndex()):
    """|f|^2 exp(-4 pi m y^2 / eta) eta^k."""
    eta, y = pt.eta, pt.y
    return abs(f_value) ** 2 * mpmath.exp(-4 * mpmath.pi * wi.m * y * y / eta) * eta**wi.k


def theta8_norm_sq(pt: ModularPoint, tol=1e-30):
    return invariant_norm_sq(theta11(pt, tol) ** 8, pt, WeightIndex(4, 4))


def check_invariance(g: GroupElement, pt: ModularPoint, tol=1e-9, dps: int = 40) -> Report:
    """Relative change of ||theta^8||^2 between pt and g.pt."""
    with mpmath.workdps(dps):
        before = theta8_norm_sq(pt)
        moved = g.act(pt)
        if moved.eta < 1e-4:
            raise ThetaRangeError(f"transformed point has Im(tau) = {moved.eta}")
        after = theta8_norm_sq(moved)
        if before < 1e-8:
            raise ValueError("base point too close to a zero of theta")
        rel = abs(after - before) / before
    return Report("theta-invariance", fmt(before), fmt(after), fmt(tol), bool(rel <= tol),
                  details={"rel_diff": fmt(rel), "element": [g.a, g.b, g.c, g.d, g.lam, g.mu]})


def random_group_elements(count: int, seed: int, base: ModularPoint, min_eta=0.02, word=4):
    """Deterministic words in S and T^k with a lattice translation attached.

    Elements sending ``base`` too close to the real axis are skipped.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, b, c, d = 1, 0, 0, 1
        for _ in range(rng.randint(1, word)):
            if rng.random() < 0.5:
                a, b, c, d = b, -a, d, -c  # right multiply by S = (0 -1; 1 0)
            else:
                t = rng.choice([-2, -1, 1, 2])
                a, b, c, d = a, a * t + b, c, c * t + d
        g = GroupElement(a, b, c, d, rng.randint(-2, 2), rng.randint(-2, 2))
        if g.act(base).eta >= min_eta:
            out.append(g)
    return out


def vanishing_order_oracle(n: int, nu: int) -> Fraction:
    """min over integers k of N/2 k^2 + (N/2 + nu) k + N/8 + nu/2, by enumeration."""
    bound = 2 + -(-nu // n)
    return min(Fraction(n, 2) * k * k + (Fraction(n, 2) + nu) * k + Fraction(n, 8) + Fraction(nu, 2)
               for k in range(-bound, bound + 1))


def vanishing_order(level, nu: int) -> Fraction:
    """Multiplicity of theta_{1,1} along Theta_{1,nu}, from the fractional-part closed form."""
    n = _as_level(level).n
    if not 0 <= nu <= n:
        raise ValueError(f"nu must lie in [0, {n}], got {nu}")
    e = fractional_part(Fraction(-nu, n))
    value = Fraction(n, 2) * (e * e - e) + Fraction(n, 8) - Fraction(nu * nu, 2 * n)
    oracle = vanishing_order_oracle(n, nu)
    if value != oracle:
        raise AssertionError(f"closed form {value} != enumeration {oracle} at N={n}, nu={nu}")
    return value


def divisor_coefficient(level, nu: int) -> Fraction:
    """Coefficient of Theta_nu in div(theta^8) rebuilt from theta and the metric.

    Eight times the vanishing order of theta plus the 4 nu^2 / N picked up from
    the exp(-4 pi m y^2 / eta) factor.
    """
    n = _as_level(level).n
    return 8 * vanishing_order(n, nu) + Fraction(4 * nu * nu, n)


@dataclass(frozen=True)
class DimensionReport:
    level: int
    ell: int
    dim: Fraction
    ratio: Fraction

    @property
    def target(self) -> Fraction:
        return limit_closed_form(self.level)

    @property
    def gap(self) -> Fraction:
        return self.target - self.ratio


class ConventionViolation(ArithmeticError):
    """The dimension formula produced a non-integral or negative value."""


def discriminant_sum(k: int, convention: str = HURWITZ_KRONECKER) -> Fraction:
    """Sum of H(|Delta|) over negative divisors Delta of k with k/Delta squarefree."""
    return sum((hurwitz_class_number(d, convention) for d in divisors(k) if is_squarefree(k // d)),
               Fraction(0))


def dim_cusp(level, ell: int, convention: str = HURWITZ_KRONECKER) -> DimensionReport:
    """dim J^cusp_{4l,4l}(Gamma(N)) from the closed formula, valid when N | 4l."""
    lv = _as_level(level)
    n, p = lv.n, cusp_count(lv)
    if ell < 1 or (4 * ell) % n:
        raise ValueError(f"need N | 4l, got N={n}, l={ell}")
    k = 16 * ell // n
    dim = p * (Fraction(8 * n * ell * ell, 3) - n * ell - Fraction(n, 4) * square_part(k)
               - Fraction(n, 2) * discriminant_sum(k, convention))
    if dim.denominator != 1 or dim < 0:
        raise ConventionViolation(f"dimension {dim} for N={n}, l={ell} under {convention}")
    return DimensionReport(n, ell, dim, dim / Fraction(ell * ell, 2))


def default_gap_bound(ell: int) -> Fraction:
    return Fraction(50, ell)


def hilbert_samuel_check(level, ell_list, convention: str = HURWITZ_KRONECKER,
                         gap_bound=default_gap_bound) -> Report:
    """dim / (l^2 / 2) against 16 N p_N / 3 along increasing l.

    Passes when every dimension is a non-negative integer, the gaps decrease
    and each |gap| is within ``gap_bound(l)``.
    """
    lv = _as_level(level)
    rows = [dim_cusp(lv, ell, convention) for ell in sorted(ell_list)]
    gaps = [r.gap for r in rows]
    decreasing = all(abs(b) < abs(a) for a, b in zip(gaps, gaps[1:]))
    within = [abs(r.gap) <= gap_bound(r.ell) for r in rows]
    target = limit_closed_form(lv)
    return Report(
        "hilbert-samuel",
        fmt(target),
        fmt(rows[-1].ratio),
        fmt(gap_bound(rows[-1].ell)),
        bool(decreasing and all(within)),
        details={
            "rows": [{"ell": r.ell, "dim": fmt(r.dim), "ratio": fmt(r.ratio), "gap": fmt(r.gap),
                      "gap_float": repr(float(r.gap)), "bound": fmt(gap_bound(r.ell)),
                      "within_bound": ok}
                     for r, ok in zip(rows, within)],
            "gaps_decreasing": decreasing,
        },
    )
