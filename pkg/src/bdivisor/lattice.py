"""Q-divisors, blow-ups at singular points and the b-divisor self-intersection.

Divisors on blown-up models are written in the orthogonal basis made of the
pullbacks of base components and the total transforms of exceptional
curves.  In that basis pullback is the identity on coefficients, the form is
``base form ⊕ diag(-1, ..., -1)``, and a blow-up at a point of type ``(n, m)``
and multiplicity ``mu`` just appends ``-mu / (n m (n + m))`` times the new
exceptional class.

Two independent routes to the self-intersection after blowing up every
singular point down to a given Stern–Brocot depth are provided:

* :func:`recursion_self_intersection` uses only the scalar drop
  ``mu^2 / (n^2 m^2 (n + m)^2)`` per blow-up and the closed form of ``C·C``;
* :func:`lattice_self_intersection` materialises every model and calls
  :func:`intersect` on the resulting divisor.

Tail majorant used by :func:`bdv_limit`
---------------------------------------
For ``T(n, m) = 1 / (n^2 m^2 (n + m)^2)`` and ``n = max(n, m)`` we have
``(n + m)^2 >= n^2`` so ``T(n, m) <= 1 / (n^4 m^2)``.  Summing over the pairs
with ``max(n, m) > M`` (each counted once from the side of its larger entry,
hence the factor 2 which also over-counts the diagonal)::

    sum_{max > M} T <= 2 * sum_{n > M} n^-4 * sum_{m >= 1} m^-2
                    <= 2 * zeta(2) * integral_M^inf x^-4 dx
                     = 2 * zeta(2) / (3 M^3).

Restricting to coprime pairs only removes positive terms.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Iterator

import mpmath

from .surface import (
    ZERO_SECTION,
    ComponentId,
    Level,
    SingularPoint,
    SurfaceModel,
    _as_level,
    _frac,
    base_model,
    cusp_count,
    exceptional,
    jacobi_divisor,
    toric_seed_model,
)


class ModelMismatch(ValueError):
    pass


class QDivisor:
    """Exact-rational formal sum of components on one model."""

    __slots__ = ("model_ref", "coeffs", "model")

    def __init__(self, model_ref, coeffs: dict, model: SurfaceModel | None = None):
        self.model_ref = model_ref
        self.coeffs = {k: _frac(v) for k, v in coeffs.items() if v != 0}
        self.model = model
        if model is not None:
            unknown = [c for c in self.coeffs if c not in model.component_set]
            if unknown:
                raise KeyError(f"components {unknown} not on model")

    @classmethod
    def of(cls, model: SurfaceModel, coeffs: dict) -> "QDivisor":
        return cls(model.key, coeffs, model)

    def _same(self, other: "QDivisor"):
        if self.model_ref != other.model_ref:
            raise ModelMismatch("divisors live on different models")

    def __add__(self, other: "QDivisor") -> "QDivisor":
        self._same(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return QDivisor(self.model_ref, out, self.model)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, scalar) -> "QDivisor":
        s = Fraction(scalar)
        return QDivisor(self.model_ref, {k: v * s for k, v in self.coeffs.items()}, self.model)

    __rmul__ = __mul__

    def __getitem__(self, cid: ComponentId) -> Fraction:
        return self.coeffs.get(cid, Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, QDivisor) and self.model_ref == other.model_ref
                and self.coeffs == other.coeffs)

    def __repr__(self):
        terms = " + ".join(f"{v}*{k}" for k, v in sorted(self.coeffs.items()))
        return f"QDivisor({terms or '0'})"

    def pullback(self, model: SurfaceModel) -> "QDivisor":
        """Total transform onto a model higher up the same tower."""
        if model.blowup_history[: len(self._history())] != self._history():
            raise ModelMismatch("target model does not dominate this one")
        return QDivisor(model.key, self.coeffs, model)

    def _history(self):
        return self.model.blowup_history if self.model is not None else ()


def intersect(d1: QDivisor, d2: QDivisor) -> Fraction:
    """Exact intersection number of two divisors on the same model."""
    d1._same(d2)
    model = d1.model or d2.model
    if model is None:
        raise ModelMismatch("divisor is not attached to a model")
    return model.form.pair(d1.coeffs, d2.coeffs)


def curve_divisor(model: SurfaceModel, cid: ComponentId, scale=1) -> QDivisor:
    """Class of the strict transform of a curve, as a divisor."""
    return QDivisor.of(model, {k: v * scale for k, v in model.curve_class(cid).items()})


@dataclass(frozen=True)
class SternBrocotNode:
    pair: tuple[int, int]
    depth: int = 0

    @property
    def contribution(self) -> Fraction:
        n, m = self.pair
        return Fraction(1, (n * m * (n + m)) ** 2)

    def children(self) -> tuple["SternBrocotNode", "SternBrocotNode"]:
        n, m = self.pair
        return (SternBrocotNode((n + m, m), self.depth + 1),
                SternBrocotNode((n, n + m), self.depth + 1))


def stern_brocot(depth: int, root=(1, 1)) -> Iterator[SternBrocotNode]:
    """Nodes of depth <= ``depth``, breadth first, ``(n+m, m)`` before ``(n, n+m)``."""
    queue = deque([SternBrocotNode(tuple(root), 0)])
    while queue:
        node = queue.popleft()
        yield node
        if node.depth < depth:
            queue.extend(node.children())


def node_sum(depth: int) -> Fraction:
    """S(depth): sum of 1/(n^2 m^2 (n+m)^2) over the tree down to ``depth``."""
    if depth < 0:
        return Fraction(0)
    return sum((node.contribution for node in stern_brocot(depth)), Fraction(0))


@dataclass(frozen=True)
class TowerState:
    model: SurfaceModel
    div: QDivisor
    self_int: Fraction
    frontier: tuple[SingularPoint, ...]

    def check(self) -> "TowerState":
        actual = intersect(self.div, self.div)
        if actual != self.self_int:
            raise AssertionError(f"running self-intersection {self.self_int} != {actual}")
        return self


def start_tower(model: SurfaceModel, div: QDivisor, points=None) -> TowerState:
    frontier = tuple(model.singular_points if points is None else points)
    return TowerState(model, div, intersect(div, div), frontier)


def jacobi_tower(level, seeds: int | None = None) -> TowerState:
    """Tower state on E(N) carrying C; ``seeds`` limits the initial frontier."""
    model = base_model(level)
    points = model.singular_points if seeds is None else model.singular_points[:seeds]
    return start_tower(model, jacobi_divisor(model), points)


def toric_tower() -> TowerState:
    """Tower on P^2 carrying div(x0) = L0 with the unit (1,1) seed."""
    model = toric_seed_model()
    return start_tower(model, QDivisor.of(model, {ComponentId("L", 0): 1}))


def blow_up(state: TowerState, point: SingularPoint, check: bool = True) -> TowerState:
    """Blow up a frontier point and update the divisor of theta^8.

    The new divisor is the pullback minus ``mu / (n m (n + m))`` times the new
    exceptional class; the point is replaced at the end of the frontier by
    its two children of types ``(n+m, m)`` and ``(n, n+m)``.
    """
    if point not in state.frontier:
        raise ValueError("point is not in the frontier")
    model = state.model
    a, b = point.at
    if model.curve_intersection(a, b) != 1:
        raise ValueError(f"{a} and {b} do not cross transversally")

    serial = 1 + max((s for _, s in model.blowup_history), default=0)
    e = exceptional(serial)
    centers = dict(model.centers_on)
    centers[a] = tuple(centers.get(a, ())) + (serial,)
    centers[b] = tuple(centers.get(b, ())) + (serial,)
    n, m = point.type
    mu = point.multiplicity
    child_b = SingularPoint((e, b), (n + m, m), mu, point.depth + 1)
    child_a = SingularPoint((a, e), (n, n + m), mu, point.depth + 1)
    points = tuple(p for p in model.singular_points if p != point) + (child_b, child_a)
    new_model = SurfaceModel(
        model.level,
        model.components + (e,),
        model.form.extended([(e, e, -1)]),
        points,
        model.blowup_history + ((point, serial),),
        centers,
    )
    coeffs = dict(state.div.coeffs)
    coeffs[e] = -mu / (n * m * (n + m))
    div = QDivisor(new_model.key, coeffs, new_model)
    frontier = tuple(p for p in state.frontier if p != point) + (child_b, child_a)
    new = TowerState(new_model, div, state.self_int - point.contribution, frontier)
    return new.check() if check else new


def mild_blow_up(state: TowerState) -> TowerState:
    """Blow-up at a mild point: the divisor is the plain pullback.

    Only the bookkeeping changes (a fresh exceptional class with zero
    coefficient); the self-intersection is untouched.
    """
    model = state.model
    serial = 1 + max((s for _, s in model.blowup_history), default=0)
    e = exceptional(serial)
    new_model = replace(model, components=model.components + (e,),
                        form=model.form.extended([(e, e, -1)]),
                        blowup_history=model.blowup_history + ((None, serial),))
    div = QDivisor(new_model.key, state.div.coeffs, new_model)
    return TowerState(new_model, div, state.self_int, state.frontier)


def run_tower(state: TowerState, depth: int, check: bool = True) -> TowerState:
    """Blow up frontier points breadth first until every point deeper than ``depth`` is left."""
    while state.frontier and state.frontier[0].depth <= depth:
        state = blow_up(state, state.frontier[0], check=check)
    return state


def self_intersection_closed_form(level) -> Fraction:
    """C·C = 16 (N^2 + 1) p_N / (3N)."""
    lv = _as_level(level)
    return Fraction(16 * (lv.n**2 + 1) * cusp_count(lv), 3 * lv.n)


def limit_closed_form(level) -> Fraction:
    """bdv(theta^8)^2 = 16 N p_N / 3."""
    lv = _as_level(level)
    return Fraction(16 * lv.n * cusp_count(lv), 3)


def recursion_self_intersection(level, depth: int) -> Fraction:
    """Self-intersection after blowing up all singular points down to ``depth``.

    Scalar route only: closed-form C·C minus ``(16 p_N / N) * S(depth)``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    lv = _as_level(level)
    return self_intersection_closed_form(lv) - Fraction(16 * cusp_count(lv), lv.n) * node_sum(depth)


class BudgetExceeded(RuntimeError):
    pass


def lattice_self_intersection(level, depth: int, single_seed: bool = True,
                              budget: int = 20000) -> Fraction:
    """Same quantity as :func:`recursion_self_intersection`, through the lattice.

    With ``single_seed`` only the tower over one double point is
    materialised; the other ``N p_N - 1`` points are congruent to it, so their
    total drop is that one's drop times ``N p_N - 1``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    lv = _as_level(level)
    seeds_total = lv.n * cusp_count(lv)
    seeds = 1 if single_seed else seeds_total
    if seeds * (2 ** (depth + 1) - 1) > budget:
        raise BudgetExceeded(f"{seeds} seeds to depth {depth} exceeds {budget} blow-ups")
    start = jacobi_tower(lv, seeds=1 if single_seed else None)
    end = run_tower(start, depth)
    value = intersect(end.div, end.div)
    if single_seed:
        drop = intersect(start.div, start.div) - value
        value -= (seeds_total - 1) * drop
    return value


def toric_self_intersection(depth: int) -> Fraction:
    """div(x0)^2 on P^2 after the unit-seed tower to ``depth``, via the lattice."""
    end = run_tower(toric_tower(), depth)
    return intersect(end.div, end.div)


def coprime_partial_sum(window: int) -> Fraction:
    """Exact sum of 1/(n^2 m^2 (n+m)^2) over coprime 1 <= n, m <= window."""
    # accumulate over a common denominator per row to keep Fraction work small
    total = Fraction(0)
    for n in range(1, window + 1):
        row = Fraction(0)
        for m in range(1, window + 1):
            if gcd(n, m) == 1:
                row += Fraction(1, (m * (n + m)) ** 2)
        total += row / (n * n)
    return total


def tail_majorant(window: int):
    """Upper bound 2 zeta(2) / (3 M^3) on the sum over max(n, m) > M, as an mpf."""
    return 2 * mpmath.zeta(2) / (3 * mpmath.mpf(window) ** 3)


@dataclass(frozen=True)
class LimitEstimate:
    level: int
    window: int
    estimate: Fraction
    tail_bound: object  # mpf
    target: Fraction

    @property
    def interval(self):
        return (mpmath.mpf(self.estimate.numerator) / self.estimate.denominator - self.tail_bound,
                mpmath.mpf(self.estimate.numerator) / self.estimate.denominator)

    @property
    def contains_target(self) -> bool:
        lo, hi = self.interval
        t = mpmath.mpf(self.target.numerator) / self.target.denominator
        return lo <= t <= hi


def bdv_limit(level, tail_M: int) -> LimitEstimate:
    """Enclosure of the b-divisor self-intersection from a truncated coprime sum.

    ``estimate`` is exact; the true limit lies in
    ``[estimate - tail_bound, estimate]``.
    """
    if tail_M < 2:
        raise ValueError("tail_M must be >= 2")
    lv = _as_level(level)
    scale = Fraction(16 * cusp_count(lv), lv.n)
    estimate = self_intersection_closed_form(lv) - scale * coprime_partial_sum(tail_M)
    bound = (mpmath.mpf(scale.numerator) / scale.denominator) * tail_majorant(tail_M)
    return LimitEstimate(lv.n, tail_M, estimate, bound, limit_closed_form(lv))


def curve_pairing(level, curve: ComponentId = ZERO_SECTION, scale=1) -> Fraction:
    """bdv(theta^8) · bdv(curve) for a curve not contained in the boundary.

    The zero section misses every double point of the boundary, so the
    pairing is already reached on the base model.
    """
    if curve.in_boundary:
        raise ValueError(f"{curve} lies in the boundary divisor; pairing not supported")
    model = base_model(level)
    return intersect(jacobi_divisor(model), curve_divisor(model, curve, scale))


def convergence_table(level, depth: int) -> list[dict]:
    """Rows of (depth, nodes, S, self_int, gap to the limit), exact."""
    lv = _as_level(level)
    target = limit_closed_form(lv)
    rows = []
    s = Fraction(0)
    nodes = 0
    current = -1
    for node in stern_brocot(depth):
        if node.depth != current:
            if current >= 0:
                rows.append(_row(lv, current, nodes, s, target))
            current = node.depth
        nodes += 1
        s += node.contribution
    rows.append(_row(lv, current, nodes, s, target))
    return rows


def _row(lv: Level, depth, nodes, s, target):
    value = self_intersection_closed_form(lv) - Fraction(16 * cusp_count(lv), lv.n) * s
    return {"depth": depth, "nodes": nodes, "S": s, "self_int": value, "gap": value - target}
