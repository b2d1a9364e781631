"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line; the conftest hook repeats them
in the terminal summary.  ``python3 tests/test_acceptance.py`` runs the same
checks without pytest.
"""
import json
import subprocess
import sys
import time
from fractions import Fraction
from itertools import combinations
from math import gcd

import mpmath
import pytest

from bdivisor import analysis, jacobi, lattice, numbers
from bdivisor.surface import base_model, c_coefficient_identity, cusp_count, jacobi_divisor

RESULTS = {}


def record(label, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
    RESULTS[label] = line
    print(line)
    assert ok, line


def p_n(n):
    # index / 2N from an independent prime factorisation
    idx = n**3
    m, p = n, 2
    while m > 1:
        if m % p == 0:
            idx = idx * (p * p - 1) // (p * p)
            while m % p == 0:
                m //= p
        p += 1
    return idx // (2 * n)


def mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def test_criterion_1_c_squared():
    t = time.perf_counter()
    c = jacobi_divisor(base_model(4))
    first = lattice.intersect(c, c) == 136
    bad = []
    for n in range(3, 31):
        d = jacobi_divisor(base_model(n))
        if lattice.intersect(d, d) != Fraction(16 * (n * n + 1) * p_n(n), 3 * n):
            bad.append(n)
    record("criterion 1: C.C = 136 (N=4) and 16(N^2+1)p_N/(3N) for N in 3..30",
           first and not bad, f"failures={bad} t={time.perf_counter() - t:.2f}s")


def test_criterion_2_oracle_equivalence():
    t = time.perf_counter()
    bad = [(n, d) for n in (3, 4, 5) for d in range(6)
           if lattice.recursion_self_intersection(n, d) != lattice.lattice_self_intersection(n, d)]
    elapsed = time.perf_counter() - t
    record("criterion 2: recursion == lattice for N in {3,4,5}, d <= 5",
           not bad and elapsed < 30, f"failures={bad} t={elapsed:.2f}s")


def test_criterion_3_limit():
    t = time.perf_counter()
    est = lattice.bdv_limit(4, 200)
    lo, hi = est.interval
    ok_interval = hi - lo < 1e-4 and lo <= 128 <= hi
    bad = [n for n in range(3, 31)
           if Fraction(16 * (n * n + 1) * p_n(n), 3 * n) - Fraction(16 * p_n(n), 3 * n)
           != Fraction(16 * n * p_n(n), 3)]
    elapsed = time.perf_counter() - t
    record("criterion 3: bdv_limit(4, 200) encloses 128 with width < 1e-4; identity N in 3..30",
           ok_interval and not bad and elapsed < 10,
           f"interval=[{mpmath.nstr(lo, 12)}, {mpmath.nstr(hi, 12)}] t={elapsed:.2f}s")


def test_criterion_4_tornheim():
    t = time.perf_counter()
    cop = numbers.coprime_tornheim(300)
    full = numbers.tornheim_222(300)
    with mpmath.workdps(60):
        z6_third = mpmath.pi**6 / 945 / 3
        ok = (cop.contains(mpmath.mpf(1) / 3) and cop.tail_bound < 1e-6
              and full.contains(z6_third) and full.tail_bound < 1e-6)
    elapsed = time.perf_counter() - t
    record("criterion 4: coprime sum encloses 1/3, full sum encloses zeta(6)/3 (window 300)",
           ok and elapsed < 5, f"tail={mpmath.nstr(cop.tail_bound, 4)} t={elapsed:.2f}s")


def test_criterion_5_residue():
    t = time.perf_counter()
    vals = [analysis.residue_integral(e) for e in (1e-1, 1e-2, 1e-3)]
    each = all(abs(v + 1 / 6) <= 1e-6 for v in vals)
    spread = max(abs(a - b) for a, b in combinations(vals, 2))
    # bookkeeping: C.C plus N p_N points x 2 faces x (16/N^2)(-1/6)
    n, p = 4, p_n(4)
    cc = Fraction(16 * (n * n + 1) * p, 3 * n)
    booked = cc + n * p * 2 * Fraction(16, n * n) * Fraction(-1, 6)
    rep = analysis.residue_consistency(4)
    elapsed = time.perf_counter() - t
    record("criterion 5: |I(eps) + 1/6| <= 1e-6, spread <= 2e-6, 136 - 8 = 128",
           each and spread <= 2e-6 and cc == 136 and booked == 128 and rep.passed
           and rep.computed == "128/1" and elapsed < 5,
           f"max_err={max(abs(v + 1 / 6) for v in vals):.2e} t={elapsed:.2f}s")


def test_criterion_6_toric():
    t = time.perf_counter()
    exact = analysis.toric_volume_exact()
    quad = analysis.toric_volume_quadrature(10_000)
    tower = lattice.toric_tower()
    dv0 = lattice.intersect(tower.div, tower.div)
    tower_side = dv0 - Fraction(1, 3)
    deep = lattice.toric_self_intersection(6)
    elapsed = time.perf_counter() - t
    record("criterion 6: 2Vol(Delta_sing) = 2/3 exact, quadrature 1e-8, tower side 2/3",
           exact == Fraction(2, 3) and abs(quad - 2 / 3) <= 1e-8 and dv0 == 1
           and tower_side == Fraction(2, 3) and deep == 1 - lattice.node_sum(6) and elapsed < 10,
           f"quad_err={abs(quad - 2 / 3):.1e} t={elapsed:.2f}s")


def test_criterion_7_hilbert_samuel():
    t = time.perf_counter()
    rows = [jacobi.dim_cusp(4, ell) for ell in (25, 50, 100)]
    integral = all(r.dim.denominator == 1 and r.dim >= 0 for r in rows)
    gaps = [abs(r.ratio - 128) for r in rows]
    within = [g <= Fraction(50, r.ell) for g, r in zip(gaps, rows)]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    elapsed = time.perf_counter() - t
    detail = ", ".join(f"l={r.ell}: |gap|={float(g):.4f} vs {50 / r.ell:.2f}"
                       for r, g in zip(rows, gaps))
    record("criterion 7: N=4, |ratio - 128| <= 50/l for l in {25, 50, 100}, gaps decreasing",
           integral and all(within) and decreasing and elapsed < 5, detail)


def test_criterion_8_vanishing():
    bad, bad_c = [], []
    for n in range(3, 13):
        for nu in range(n + 1):
            if jacobi.vanishing_order(n, nu) != jacobi.vanishing_order_oracle(n, nu):
                bad.append((n, nu))
            lhs, rhs = c_coefficient_identity(n, nu)
            # restate the right side here rather than trusting the helper
            if lhs != rhs or rhs != Fraction(4 * nu * nu, n) - 4 * nu:
                bad_c.append((n, nu))
    record("criterion 8: vanishing orders == oracle and c-coefficient identity, N in 3..12",
           not bad and not bad_c, f"failures={bad + bad_c}")


def test_criterion_9_analytic():
    import math
    import random
    t = time.perf_counter()
    rng = random.Random(0)
    worst = 0
    for n in range(1, 11):
        for m in range(1, 11):
            if gcd(n, m) != 1:
                continue
            for _ in range(100):
                s = complex(*(rng.uniform(-0.6, 0.6) for _ in range(2)))
                t_ = complex(*(rng.uniform(-0.6, 0.6) for _ in range(2)))
                if s == 0 or t_ == 0:
                    continue
                worst = max(worst, abs(analysis.pullback_identity_residual(n, m, s, t_)))
    wedge_ok = True
    for (n, m), (u, v) in (((1, 1), (math.exp(-1), math.exp(-2))), ((1, 2), (0.2, 0.1))):
        r1, s1 = analysis.wedge_vanishing_residual(n, m, u, v, 1e-4)
        r2, s2 = analysis.wedge_vanishing_residual(n, m, u, v, 5e-5)
        wedge_ok &= r1 / s1 <= 1e-5 and 3 <= (r1 / s1) / (r2 / s2) <= 5
    base = jacobi.ModularPoint(0.1 + 1.1j, 0.3 + 0.2j)
    odd = all(abs(jacobi.theta11(jacobi.ModularPoint(tau, z)) + jacobi.theta11(jacobi.ModularPoint(tau, -z)))
              <= 1e-9 for tau, z in ((0.1 + 1.1j, 0.3 + 0.2j), (-0.4 + 0.7j, 0.15 - 0.05j)))
    invariant = all(jacobi.check_invariance(g, base, 1e-9).passed
                    for g in jacobi.random_group_elements(20, 0, base))
    elapsed = time.perf_counter() - t
    record("criterion 9: pullback <= 1e-10, wedge second order, theta odd and invariant",
           worst <= 1e-10 and wedge_ok and odd and invariant and elapsed < 30,
           f"pullback_max={float(worst):.1e} t={elapsed:.2f}s")


def _verify_all(tmp_path, tag):
    out = tmp_path / f"{tag}.json"
    proc = subprocess.run([sys.executable, "-m", "bdivisor", "verify-all", "--out", str(out)],
                          capture_output=True, text=True)
    doc = json.loads(out.read_text())
    for r in doc["reports"]:
        r.pop("runtime_ms")
    return proc.returncode, doc


@pytest.fixture(scope="module")
def two_runs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("verify")
    return _verify_all(tmp, "a"), _verify_all(tmp, "b")


def test_criterion_10_determinism(two_runs):
    (code_a, doc_a), (code_b, doc_b) = two_runs
    record("criterion 10a: verify-all reports identical across runs (timing removed)",
           doc_a == doc_b and code_a == code_b, f"schema={doc_a['schema']}")


def test_criterion_10_exit_code(two_runs):
    (code_a, doc_a), _ = two_runs
    failing = [r["check_name"] for r in doc_a["reports"] if not r["pass"]]
    record("criterion 10b: verify-all exits 0", code_a == 0, f"exit={code_a} failing={failing}")


if __name__ == "__main__":
    import pathlib
    import tempfile

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_") and "10" not in k]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    with tempfile.TemporaryDirectory() as d:
        runs = (_verify_all(pathlib.Path(d), "a"), _verify_all(pathlib.Path(d), "b"))
        for fn in (test_criterion_10_determinism, test_criterion_10_exit_code):
            try:
                fn(runs)
            except AssertionError:
                pass
    sys.exit(0 if all(line.startswith("PASS") for line in RESULTS.values()) else 1)
