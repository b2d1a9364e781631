"""Special-function backends: even zeta values, Tornheim sums, class numbers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import mpmath

# series work must not lose the 1e-6 .. 1e-8 tail bounds to rounding
DEFAULT_DPS = 50


def zeta_even(s: int, dps: int = DEFAULT_DPS):
    """zeta(s) for even 2 <= s <= 12 from the Bernoulli closed form."""
    if s % 2 or not 2 <= s <= 12:
        raise ValueError(f"zeta_even needs an even s in [2, 12], got {s}")
    with mpmath.workdps(dps + 10):
        k = s // 2
        b = mpmath.bernfrac(s)
        bern = mpmath.mpf(b[0]) / b[1]
        # returned at the working precision, not rounded to the caller's context
        return (-1) ** (k + 1) * bern * (2 * mpmath.pi) ** s / (2 * mpmath.factorial(s))


def _tail(window: int):
    # 2 zeta(2) / (3 W^3); derivation in bdivisor.lattice
    return 2 * zeta_even(2) / (3 * mpmath.mpf(window) ** 3)


@dataclass(frozen=True)
class TornheimResult:
    partial_sum: object  # mpf
    terms_window: int
    tail_bound: object  # mpf

    def contains(self, value) -> bool:
        return self.partial_sum <= value <= self.partial_sum + self.tail_bound


def _window_sums(window: int, coprime: bool, dps: int):
    """Cumulative sums over max(n, m) = w for w = 1..window."""
    out = [mpmath.mpf(0)]
    with mpmath.workdps(dps + 10):
        one = mpmath.mpf(1)
        acc = mpmath.mpf(0)
        for w in range(1, window + 1):
            shell = []
            for m in range(1, w):
                if not coprime or gcd(w, m) == 1:
                    shell.append(2 * one / (w * m * (w + m)) ** 2)
            if w == 1:
                shell.append(one / 4)
            acc += mpmath.fsum(shell)
            out.append(+acc)
    return out


def tornheim_222(window: int, dps: int = DEFAULT_DPS) -> TornheimResult:
    """Partial sum of zeta(2,2;2) = sum 1/(n^2 m^2 (n+m)^2) over n, m <= window."""
    if window < 1:
        raise ValueError("window must be positive")
    return _tornheim(window, False, dps)


def coprime_tornheim(window: int, dps: int = DEFAULT_DPS) -> TornheimResult:
    """Coprime-restricted partial sum; the full series equals 1/3."""
    if window < 1:
        raise ValueError("window must be positive")
    return _tornheim(window, True, dps)


def _tornheim(window, coprime, dps):
    with mpmath.workdps(dps + 10):
        total = _window_sums(window, coprime, dps)[window]
        if not coprime:
            # shells skip the diagonal n = m > 1 (not coprime)
            total += mpmath.fsum(mpmath.mpf(1) / (4 * mpmath.mpf(n) ** 6) for n in range(2, window + 1))
        return TornheimResult(+total, window, _tail(window))


def mobius_factorization_check(window: int, dps: int = DEFAULT_DPS) -> dict:
    """Check full = sum_d d^-6 * coprime(W // d) exactly, and full ≈ zeta(6) * coprime.

    The first relation is an identity of finite sums (write each pair as
    ``d * (n', m')`` with ``d = gcd``), so it must hold to working precision.
    The second compares the two truncations within their combined tails.
    """
    with mpmath.workdps(dps + 10):
        cop = _window_sums(window, True, dps)
        full = tornheim_222(window, dps)
        sieve = mpmath.fsum(cop[window // d] / mpmath.mpf(d) ** 6 for d in range(1, window + 1))
        identity_err = abs(full.partial_sum - sieve)
        z6 = zeta_even(6, dps)
        tail = _tail(window)
        cross_err = abs(full.partial_sum - z6 * cop[window])
        cross_budget = max(tail, z6 * tail)
    return {
        "identity_error": identity_err,
        "identity_ok": identity_err <= mpmath.mpf(10) ** (-(dps - 5)),
        "cross_error": cross_err,
        "cross_budget": cross_budget,
        "cross_ok": cross_err <= cross_budget,
    }


def square_part(n: int) -> int:
    """Largest d with d^2 | n."""
    if n <= 0:
        raise ValueError("square_part needs a positive integer")
    d, out, p = n, 1, 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            out *= p
        while d % p == 0:
            d //= p
        p += 1
    return out


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


HURWITZ_KRONECKER = "hurwitz-kronecker"


@dataclass(frozen=True)
class HurwitzValue:
    discriminant_arg: int
    value: Fraction


def reduced_forms(k: int):
    """Reduced positive definite forms (a, b, c) with b^2 - 4ac = -k.

    Reduced means |b| <= a <= c, with b >= 0 when |b| = a or a = c.
    Non-primitive forms are included.
    """
    forms = []
    a = 1
    while 3 * a * a <= k:
        for b in range(-a + 1, a + 1):
            num = b * b + k
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def hurwitz_class_number(k: int, convention: str = HURWITZ_KRONECKER) -> Fraction:
    """Weighted count of reduced forms of discriminant -k.

    Forms equivalent to a(x^2 + y^2) weigh 1/2, forms equivalent to
    a(x^2 + xy + y^2) weigh 1/3; H(0) = -1/12 and H(k) = 0 for k = 1, 2 mod 4.
    """
    if convention != HURWITZ_KRONECKER:
        raise ValueError(f"unknown class number convention {convention!r}")
    if k < 0:
        raise ValueError("hurwitz_class_number needs k >= 0")
    if k == 0:
        return Fraction(-1, 12)
    if k % 4 in (1, 2):
        return Fraction(0)
    total = Fraction(0)
    for a, b, c in reduced_forms(k):
        if b == 0 and a == c:
            total += Fraction(1, 2)
        elif a == b == c:
            total += Fraction(1, 3)
        else:
            total += 1
    return total


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def is_squarefree(n: int) -> bool:
    return square_part(abs(n)) == 1
