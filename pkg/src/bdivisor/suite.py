"""Named check groups shared by the CLI subcommands and ``verify-all``.

Every group takes a :class:`RunConfig` and returns a list of reports.  The
groups are plain module-level functions so a process pool can run them.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from math import gcd

import mpmath

from . import analysis, jacobi, lattice, numbers
from .report import Report, exact_report, fmt, timed
from .surface import (ZERO_SECTION, Level, base_model, cusp_count, fiber, genus, index_gamma,
                      jacobi_divisor, c_coefficient_identity)

# classical genera of X(N), used as a fixed table
KNOWN_GENUS = {3: 0, 4: 0, 5: 0, 6: 1, 7: 3, 8: 5}


@dataclass(frozen=True)
class RunConfig:
    level: int = 4
    depth: int = 6
    window: int = 300
    tol: str | None = None
    precision: int = 50
    seed: int = 0
    output_format: str = "json"
    ell: tuple[int, ...] | None = None
    panels: int = 10_000
    samples: int = 1_000_000

    def validate(self) -> "RunConfig":
        Level(self.level)
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if self.precision < 30:
            raise ValueError("precision must be >= 30 digits")
        if self.tol is not None:
            try:
                t = float(self.tol)
            except ValueError:
                raise ValueError(f"tolerance {self.tol!r} is not a number") from None
            if not t > 0 or math.isinf(t):
                raise ValueError("tolerance must be a positive real")
        if self.output_format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        return self

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else float(self.tol)

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["ell"] = list(self.ell) if self.ell else None
        return out


def _bool_report(name, ok, target="true", computed=None, **details):
    return Report(name, target, fmt(bool(ok)) if computed is None else computed, "0", bool(ok),
                  details=details)


# ---------------------------------------------------------------------------
# subcommand groups

def sl2_order(n: int) -> int:
    """|SL2(Z/N)| by brute-force enumeration."""
    count = 0
    for a in range(n):
        for d in range(n):
            ad = a * d
            for b in range(n):
                for c in range(n):
                    if (ad - b * c) % n == 1 % n:
                        count += 1
    return count


def surface_checks(cfg: RunConfig) -> list[Report]:
    n = cfg.level
    p = cusp_count(n)
    model = base_model(n)
    out = []
    if n <= 12:
        out.append(exact_report(f"surface/index[N={n}]", sl2_order(n), index_gamma(n)))
    out.append(exact_report(f"surface/cusps[N={n}]", Fraction(index_gamma(n), 2 * n), p))
    if n in KNOWN_GENUS:
        out.append(exact_report(f"surface/genus[N={n}]", KNOWN_GENUS[n], genus(n)))
    out.append(exact_report(f"surface/components[N={n}]", 1 + n * p, len(model.components)))
    out.append(_bool_report(f"surface/form-symmetric[N={n}]", model.form.is_symmetric()))
    fiber_class = {fiber(1, nu): Fraction(1) for nu in range(n)}
    ff = model.form.pair(fiber_class, fiber_class)
    out.append(exact_report(f"surface/fiber-square[N={n}]", 0, ff))
    fh = model.form.pair(fiber_class, {ZERO_SECTION: Fraction(1)})
    out.append(exact_report(f"surface/fiber-section[N={n}]", 1, fh))
    orth = all(model.form.pair(fiber_class, {fiber(1, nu): Fraction(1)}) == 0 for nu in range(n))
    out.append(_bool_report(f"surface/fiber-components-orthogonal[N={n}]", orth))
    return out


def tower_checks(cfg: RunConfig) -> list[Report]:
    n = cfg.level
    out = []
    for d in range(cfg.depth + 1):
        out.append(exact_report(f"tower/oracle[N={n},d={d}]",
                                lattice.recursion_self_intersection(n, d),
                                lattice.lattice_self_intersection(n, d)))
    est = lattice.bdv_limit(n, cfg.window)
    lo, hi = est.interval
    width_bound = cfg.tolerance(1e-4)
    out.append(Report(f"tower/limit[N={n},M={est.window}]", fmt(est.target),
                      fmt(mpmath.mpf(est.estimate.numerator) / est.estimate.denominator),
                      fmt(hi - lo), bool(est.contains_target and hi - lo < width_bound),
                      details={"interval": [fmt(lo), fmt(hi)], "width_bound": repr(width_bound)}))
    cc = lattice.self_intersection_closed_form(n)
    out.append(exact_report(f"tower/closed-form[N={n}]", lattice.limit_closed_form(n),
                            cc - Fraction(16 * cusp_count(n), 3 * n), cc=cc))
    return out


def zeta_checks(cfg: RunConfig) -> list[Report]:
    w = cfg.window
    budget = cfg.tolerance(1e-6)
    cop = numbers.coprime_tornheim(w, cfg.precision)
    full = numbers.tornheim_222(w, cfg.precision)
    third = mpmath.mpf(1) / 3
    z6 = numbers.zeta_even(6, cfg.precision) / 3
    out = [
        Report(f"zeta/coprime[W={w}]", "1/3", fmt(cop.partial_sum), fmt(cop.tail_bound),
               bool(cop.contains(third) and cop.tail_bound < budget),
               details={"budget": repr(budget)}),
        Report(f"zeta/tornheim[W={w}]", fmt(z6), fmt(full.partial_sum), fmt(full.tail_bound),
               bool(full.contains(z6) and full.tail_bound < budget),
               details={"budget": repr(budget)}),
    ]
    mob = numbers.mobius_factorization_check(min(w, 200), cfg.precision)
    out.append(Report("zeta/mobius-factorisation", "0", fmt(mob["identity_error"]),
                      fmt(mob["cross_budget"]), bool(mob["identity_ok"] and mob["cross_ok"]),
                      details={"cross_error": fmt(mob["cross_error"])}))
    return out


def default_ells(level: int) -> tuple[int, ...]:
    """Values near 25, 50, 100 that satisfy N | 4l."""
    step = level // gcd(level, 4)
    return tuple(step * -(-target // step) for target in (25, 50, 100))


def dim_checks(cfg: RunConfig) -> list[Report]:
    ells = cfg.ell or default_ells(cfg.level)
    return [jacobi.hilbert_samuel_check(cfg.level, ells)]


THETA_BASE = jacobi.ModularPoint(0.1 + 1.1j, 0.3 + 0.2j)
ODDNESS_POINTS = [(0.1 + 1.1j, 0.3 + 0.2j), (-0.4 + 0.7j, 0.15 - 0.05j), (0.25 + 2j, 0.8 + 0.5j)]


def theta_checks(cfg: RunConfig) -> list[Report]:
    tol = cfg.tolerance(1e-9)
    out = []
    worst = mpmath.mpf(0)
    with mpmath.workdps(cfg.precision):
        for tau, z in ODDNESS_POINTS:
            a = jacobi.theta11(jacobi.ModularPoint(tau, z))
            b = jacobi.theta11(jacobi.ModularPoint(tau, -z))
            worst = max(worst, abs(a + b) / abs(a))
        zero = abs(jacobi.theta11(jacobi.ModularPoint(0.1 + 1.1j, 0)))
    out.append(Report("theta/oddness", "0", fmt(worst), repr(tol), bool(worst <= tol and zero <= tol),
                      details={"theta_at_z0": fmt(zero)}))
    elements = jacobi.random_group_elements(20, cfg.seed, THETA_BASE)
    rels = []
    for g in elements:
        r = jacobi.check_invariance(g, THETA_BASE, tol, cfg.precision)
        rels.append(mpmath.mpf(r.details["rel_diff"]))
    worst = max(rels)
    out.append(Report(f"theta/invariance[seed={cfg.seed}]", "0", fmt(worst, 6), repr(tol),
                      bool(worst <= tol), details={"elements": len(elements)}))
    return out


def vanishing_checks(cfg: RunConfig) -> list[Report]:
    mismatches, c_fail = [], []
    for n in range(3, 13):
        for nu in range(n + 1):
            try:
                jacobi.vanishing_order(n, nu)
            except AssertionError:
                mismatches.append([n, nu])
            lhs, rhs = c_coefficient_identity(n, nu)
            if lhs != rhs:
                c_fail.append([n, nu])
    # the divisor coefficients recovered from theta agree with C on the base model
    n = cfg.level
    div = jacobi_divisor(base_model(n))
    coeff_fail = [nu for nu in range(n) if jacobi.divisor_coefficient(n, nu) != div[fiber(1, nu)]]
    return [
        Report("vanishing/closed-vs-oracle", "0", str(len(mismatches)), "0", not mismatches,
               details={"range": "N in [3..12], nu in [0..N]", "mismatches": mismatches}),
        Report("vanishing/c-coefficient", "0", str(len(c_fail)), "0", not c_fail,
               details={"failures": c_fail}),
        Report(f"vanishing/divisor-coefficients[N={n}]", "0", str(len(coeff_fail)), "0",
               not coeff_fail, details={"failures": coeff_fail}),
    ]


RESIDUE_EPS = (1e-1, 1e-2, 1e-3)


def residue_checks(cfg: RunConfig) -> list[Report]:
    tol = cfg.tolerance(1e-6)
    out = []
    values = []
    for eps in RESIDUE_EPS:
        v = analysis.residue_integral(eps)
        values.append(v)
        err = abs(v + 1 / 6)
        out.append(Report(f"residue/integral[eps={eps!r}]", "-1/6", repr(v), repr(tol), err <= tol,
                          details={"method": "quadrature", "value": repr(v), "target": "-1/6",
                                   "abs_error": repr(err), "budget": repr(tol)}))
    spread = max(abs(a - b) for a, b in combinations(values, 2))
    out.append(Report("residue/epsilon-independence", "0", repr(spread), repr(2 * tol),
                      spread <= 2 * tol))
    rc = analysis.residue_consistency(cfg.level)
    if cfg.tol is not None:
        budget = float(rc.details["quadrature_budget"]) / 1e-6 * tol
        rc.passed = bool(rc.computed == rc.target and float(rc.details["quadrature_error"]) <= budget)
        rc.details["quadrature_budget"] = repr(budget)
    rc.check_name = f"residue/consistency[N={cfg.level}]"
    out.append(rc)
    return out


def toric_checks(cfg: RunConfig) -> list[Report]:
    out = []
    ex = analysis.toric_volume_check("exact", depth=cfg.depth)
    ex.check_name = "toric/volume-exact"
    out.append(ex)
    qd = analysis.toric_volume_check("quadrature", cfg.panels, tol=cfg.tolerance(1e-8), depth=cfg.depth)
    qd.check_name = "toric/volume-quadrature"
    out.append(qd)
    mc = analysis.toric_volume_check("montecarlo", cfg.samples, cfg.seed,
                                     tol=None if cfg.tol is None else float(cfg.tol), depth=cfg.depth)
    mc.check_name = "toric/volume-montecarlo"
    out.append(mc)
    x = y = Fraction(1, 4)
    dual = analysis.delta_sing_membership(x, y) and analysis.support_dominates(float(x), float(y))
    out.append(_bool_report("toric/support-duality[(1/4,1/4)]", dual, directions=360))
    return out


def analytic_checks(cfg: RunConfig) -> list[Report]:
    """Pullback sweep, wedge residual order, growth probes."""
    out = []
    tol = cfg.tolerance(1e-10)
    rng = random.Random(cfg.seed)
    worst = mpmath.mpf(0)
    pairs = [(n, m) for n in range(1, 11) for m in range(1, 11) if gcd(n, m) == 1]
    with mpmath.workdps(cfg.precision):
        for n, m in pairs:
            for _ in range(100):
                s = mpmath.mpc(mpmath.rect(rng.uniform(0.01, 0.9), rng.uniform(0, 2 * math.pi)))
                t = mpmath.mpc(mpmath.rect(rng.uniform(0.01, 0.9), rng.uniform(0, 2 * math.pi)))
                worst = max(worst, abs(analysis.pullback_identity_residual(n, m, s, t)))
    out.append(Report("analytic/pullback-sweep", "0", fmt(worst, 6), repr(tol), bool(worst <= tol),
                      details={"pairs": len(pairs), "points_per_pair": 100, "seed": cfg.seed}))
    wedge_tol = cfg.tolerance(1e-5)
    for (n, m), (u, v) in (((1, 1), (math.exp(-1), math.exp(-2))), ((1, 2), (0.2, 0.1))):
        r1, s1 = analysis.wedge_vanishing_residual(n, m, u, v, 1e-4)
        r2, s2 = analysis.wedge_vanishing_residual(n, m, u, v, 5e-5)
        rel1, rel2 = r1 / s1, r2 / s2
        ratio = rel1 / rel2
        ok = rel1 <= wedge_tol and 3 <= ratio <= 5
        out.append(Report(f"analytic/wedge[{n},{m}]", "0", fmt(rel1, 6), repr(wedge_tol), bool(ok),
                          details={"halved_step_ratio": fmt(ratio, 6)}))
    for n, m in ((1, 1), (2, 1)):
        rep = analysis.loglog_growth_probe(n, m, r0=math.exp(-3), seed=cfg.seed)
        rep.check_name = f"analytic/growth[{n},{m}]"
        out.append(rep)
    return out


GROUPS = {
    "surface": [surface_checks],
    "tower": [tower_checks],
    "zeta": [zeta_checks],
    "dim": [dim_checks],
    "theta-check": [theta_checks, vanishing_checks],
    "residue": [residue_checks],
    "toric": [toric_checks],
}


# ---------------------------------------------------------------------------
# acceptance criteria, in the fixed configurations they are stated for

def criterion_1(cfg: RunConfig) -> list[Report]:
    m4 = base_model(4)
    c4 = jacobi_divisor(m4)
    out = [exact_report("C1/self-intersection[N=4]", 136, lattice.intersect(c4, c4))]
    bad = []
    for n in range(3, 31):
        c = jacobi_divisor(base_model(n))
        if lattice.intersect(c, c) != Fraction(16 * (n * n + 1) * cusp_count(n), 3 * n):
            bad.append(n)
    out.append(Report("C1/closed-form[N=3..30]", "0", str(len(bad)), "0", not bad,
                      details={"failures": bad}))
    return out


def criterion_2(cfg: RunConfig) -> list[Report]:
    bad = []
    for n in (3, 4, 5):
        for d in range(6):
            if lattice.recursion_self_intersection(n, d) != lattice.lattice_self_intersection(n, d):
                bad.append([n, d])
    return [Report("C2/recursion-vs-lattice[N=3,4,5;d<=5]", "0", str(len(bad)), "0", not bad,
                   details={"failures": bad})]


def criterion_3(cfg: RunConfig) -> list[Report]:
    out = tower_checks(replace(cfg, level=4, depth=0, window=200))[1:2]
    out[0].check_name = "C3/limit[N=4,M=200]"
    bad = [n for n in range(3, 31)
           if lattice.self_intersection_closed_form(n) - Fraction(16 * cusp_count(n), 3 * n)
           != Fraction(16 * n * cusp_count(n), 3)]
    out.append(Report("C3/closed-form-identity[N=3..30]", "0", str(len(bad)), "0", not bad,
                      details={"failures": bad}))
    return out


def criterion_4(cfg: RunConfig) -> list[Report]:
    out = zeta_checks(replace(cfg, window=300))[:2]
    for r in out:
        r.check_name = "C4/" + r.check_name.split("/", 1)[1]
    return out


def criterion_5(cfg: RunConfig) -> list[Report]:
    out = residue_checks(replace(cfg, level=4))
    for r in out:
        r.check_name = "C5/" + r.check_name.split("/", 1)[1]
    return out


def criterion_6(cfg: RunConfig) -> list[Report]:
    out = toric_checks(cfg)[:2]
    for r in out:
        r.check_name = "C6/" + r.check_name.split("/", 1)[1]
    return out


def criterion_7(cfg: RunConfig) -> list[Report]:
    rep = jacobi.hilbert_samuel_check(4, (25, 50, 100))
    rep.check_name = "C7/hilbert-samuel[N=4,l=25,50,100]"
    return [rep]


def criterion_8(cfg: RunConfig) -> list[Report]:
    out = vanishing_checks(replace(cfg, level=4))[:2]
    for r in out:
        r.check_name = "C8/" + r.check_name.split("/", 1)[1]
    return out


def criterion_9(cfg: RunConfig) -> list[Report]:
    out = analytic_checks(cfg)[:3] + theta_checks(cfg)
    for r in out:
        r.check_name = "C9/" + r.check_name.split("/", 1)[1]
    return out


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


def run_group(func, cfg: RunConfig) -> list[Report]:
    """Run one group at the configured precision, stamping the elapsed time."""
    with timed() as box, mpmath.workdps(cfg.precision):
        reports = func(cfg)
    share = box[0] // max(len(reports), 1)
    for r in reports:
        r.runtime_ms = share
    return reports
