"""Combinatorial model of the universal elliptic surface E(N).

The base model carries the zero section ``H`` and, over each of the ``p_N``
cusps, an N-gon of rational curves ``Theta/j/nu``.  Intersection numbers are
exact :class:`fractions.Fraction` values throughout, so blown-up models with
fractional divisor coefficients need no change of number type.

Blow-ups themselves live in :mod:`bdivisor.lattice`; this module only knows
how to describe a model and how to hand out the base one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, NamedTuple


def _prime_divisors(n: int) -> list[int]:
    primes = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    return primes


@dataclass(frozen=True)
class Level:
    """The level N >= 3 of the principal congruence subgroup."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise TypeError(f"level must be an integer, got {self.n!r}")
        if self.n < 3:
            raise ValueError(f"level N must be >= 3 (Gamma(N) torsion-free), got {self.n}")

    @property
    def index(self) -> int:
        return index_gamma(self)

    @property
    def cusps(self) -> int:
        return cusp_count(self)


def _as_level(level) -> Level:
    return level if isinstance(level, Level) else Level(level)


def index_gamma(level) -> int:
    """[SL2(Z) : Gamma(N)] = N^3 prod_{p | N} (1 - 1/p^2), computed exactly."""
    n = _as_level(level).n
    value = Fraction(n**3)
    for p in _prime_divisors(n):
        value *= Fraction(p * p - 1, p * p)
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral index {value} for N={n}")
    return int(value)


def _integral(value: Fraction, what: str, n: int) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"{what} is not integral for N={n}: {value}")
    return int(value)


def cusp_count(level) -> int:
    """Number of cusps p_N = index / (2N)."""
    lv = _as_level(level)
    return _integral(Fraction(index_gamma(lv), 2 * lv.n), "cusp count", lv.n)


def genus(level) -> int:
    """Genus of X(N): 1 + (N - 6) p_N / 12."""
    lv = _as_level(level)
    return _integral(1 + Fraction(lv.n - 6, 12) * cusp_count(lv), "genus", lv.n)


def arithmetic_genus(level) -> int:
    """Arithmetic genus of E(N): N p_N / 12 - 1."""
    lv = _as_level(level)
    return _integral(Fraction(lv.n * cusp_count(lv), 12) - 1, "arithmetic genus", lv.n)


class ComponentId(NamedTuple):
    """Structural tag of a curve (or exceptional class) on a model.

    ``kind`` is one of ``"H"`` (zero section), ``"Theta"`` (fiber component
    ``Theta_{j,nu}``), ``"E"`` (exceptional curve with serial ``a``) or
    ``"L"`` (coordinate line ``a`` of the toric seed surface).
    """

    kind: str
    a: int = 0
    b: int = 0

    def __str__(self):
        if self.kind == "H":
            return "H"
        if self.kind == "Theta":
            return f"Theta/{self.a}/{self.b}"
        return f"{self.kind}/{self.a}"

    @classmethod
    def parse(cls, text: str) -> "ComponentId":
        parts = text.split("/")
        if parts == ["H"]:
            return ZERO_SECTION
        if parts[0] == "Theta" and len(parts) == 3:
            return fiber(int(parts[1]), int(parts[2]))
        if parts[0] in ("E", "L") and len(parts) == 2:
            return cls(parts[0], int(parts[1]))
        raise ValueError(f"unrecognised component tag {text!r}")

    @property
    def in_boundary(self) -> bool:
        """True for curves lying in the boundary divisor D."""
        return self.kind in ("Theta", "E")


ZERO_SECTION = ComponentId("H")


def fiber(j: int, nu: int) -> ComponentId:
    return ComponentId("Theta", j, nu)


def exceptional(serial: int) -> ComponentId:
    return ComponentId("E", serial)


def toric_line(i: int) -> ComponentId:
    return ComponentId("L", i)


class IntersectionForm:
    """Sparse symmetric exact-rational bilinear form on component classes."""

    __slots__ = ("_adj", "_int_cache")

    def __init__(self, entries: Iterable[tuple[ComponentId, ComponentId, Fraction]] = ()):
        self._adj: dict[ComponentId, dict[ComponentId, Fraction]] = {}
        self._int_cache = None
        for a, b, value in entries:
            self._set(a, b, _frac(value))

    def _set(self, a, b, value: Fraction):
        self._int_cache = None
        if value == 0:
            self._adj.get(a, {}).pop(b, None)
            self._adj.get(b, {}).pop(a, None)
            return
        self._adj.setdefault(a, {})[b] = value
        self._adj.setdefault(b, {})[a] = value

    def __call__(self, a: ComponentId, b: ComponentId) -> Fraction:
        return self._adj.get(a, {}).get(b, Fraction(0))

    def row(self, a: ComponentId) -> dict[ComponentId, Fraction]:
        return self._adj.get(a, {})

    def extended(self, entries) -> "IntersectionForm":
        """A copy with additional entries; the original is left untouched."""
        new = IntersectionForm()
        new._adj = {k: dict(v) for k, v in self._adj.items()}
        for a, b, value in entries:
            new._set(a, b, _frac(value))
        return new

    def entries(self):
        """Each unordered pair once, in a canonical order."""
        seen = []
        for a in sorted(self._adj):
            for b in sorted(self._adj[a]):
                if a <= b:
                    seen.append((a, b, self._adj[a][b]))
        return seen

    def is_symmetric(self) -> bool:
        return all(self._adj.get(b, {}).get(a) == v
                   for a, row in self._adj.items() for b, v in row.items())

    def pair(self, x: dict, y: dict) -> Fraction:
        """Bilinear pairing of two sparse coefficient maps.

        Everything is scaled to integers first; Fraction arithmetic term by
        term dominates the cost on large models otherwise.
        """
        if len(y) < len(x):
            x, y = y, x
        lx, xi = _scaled(x)
        ly, yi = _scaled(y)
        if self._int_cache is None:
            den = 1
            for row in self._adj.values():
                for v in row.values():
                    den = den * v.denominator // gcd(den, v.denominator)
            self._int_cache = (den, {a: {b: v.numerator * (den // v.denominator) for b, v in row.items()}
                                     for a, row in self._adj.items()})
        lf, adj = self._int_cache
        total = 0
        for a, ca in xi.items():
            row = adj.get(a)
            if not row:
                continue
            if len(row) <= len(yi):
                s = sum(q * yi[b] for b, q in row.items() if b in yi)
            else:
                s = sum(row[b] * cb for b, cb in yi.items() if b in row)
            total += ca * s
        return Fraction(total, lx * ly * lf)


def _frac(value) -> Fraction:
    return value if type(value) is Fraction else Fraction(value)


def _scaled(coeffs: dict) -> tuple[int, dict]:
    """(L, {k: L * c}) with L the lcm of the denominators."""
    den = 1
    for c in coeffs.values():
        d = c.denominator
        den = den * d // gcd(den, d)
    return den, {k: c.numerator * (den // c.denominator) for k, c in coeffs.items()}


@dataclass(frozen=True)
class SingularPoint:
    """A non-mild point where the metric has a codimension-two singularity.

    ``at`` is an ordered pair ``(A, B)`` of crossing curves: in local
    coordinates ``(u, v)`` with ``A = {u = 0}`` and ``B = {v = 0}`` the type
    ``(n, m)`` attaches ``n`` to ``log|u|^2`` and ``m`` to ``log|v|^2``.
    """

    at: tuple[ComponentId, ComponentId]
    type: tuple[int, int]
    multiplicity: Fraction
    depth: int = 0

    def __post_init__(self):
        n, m = self.type
        if n < 1 or m < 1 or gcd(n, m) != 1:
            raise ValueError(f"type must be a coprime pair of positive integers, got {self.type}")
        if Fraction(self.multiplicity) <= 0:
            raise ValueError("multiplicity must be positive")
        if self.at[0] == self.at[1]:
            raise ValueError("a singular point lies on two distinct curves")
        object.__setattr__(self, "multiplicity", _frac(self.multiplicity))

    @property
    def contribution(self) -> Fraction:
        """Drop of the self-intersection caused by blowing up this point."""
        n, m = self.type
        return self.multiplicity**2 / (n * m * (n + m)) ** 2

    def to_json(self) -> dict:
        return {
            "components": [str(c) for c in self.at],
            "type": list(self.type),
            "multiplicity": fraction_str(self.multiplicity),
            "depth": self.depth,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SingularPoint":
        a, b = (ComponentId.parse(s) for s in data["components"])
        return cls((a, b), tuple(data["type"]), parse_fraction(data["multiplicity"]),
                   data.get("depth", 0))


@dataclass(frozen=True, eq=False)
class SurfaceModel:
    """One smooth birational model in the tower over E(N).

    ``form`` is the intersection form on the *basis* classes: base components
    together with the total transforms of exceptional curves, so that the
    form stays block diagonal.  ``centers_on`` records for each curve the
    exceptional serials whose centres lay on it; the class of the strict
    transform of a curve is its basis class minus those exceptional classes.
    """

    level: Level | None
    components: tuple[ComponentId, ...]
    form: IntersectionForm
    singular_points: tuple[SingularPoint, ...]
    blowup_history: tuple[tuple[SingularPoint, int], ...] = ()
    centers_on: dict = field(default_factory=dict, compare=False)

    @property
    def key(self) -> tuple:
        """Identity of the model; divisors remember it."""
        lv = self.level.n if self.level else 0
        return (lv, tuple((p.at if p is not None else None, s) for p, s in self.blowup_history))

    @cached_property
    def component_set(self) -> frozenset:
        return frozenset(self.components)

    @property
    def is_base(self) -> bool:
        return not self.blowup_history

    def curve_class(self, cid: ComponentId) -> dict[ComponentId, Fraction]:
        """Class of the strict transform of ``cid`` in the basis."""
        if cid not in self.component_set:
            raise KeyError(f"{cid} is not a component of this model")
        cls = {cid: Fraction(1)}
        for serial in self.centers_on.get(cid, ()):
            cls[exceptional(serial)] = cls.get(exceptional(serial), Fraction(0)) - 1
        return cls

    def curve_intersection(self, a: ComponentId, b: ComponentId) -> Fraction:
        if not (self.centers_on.get(a) or self.centers_on.get(b)):
            if a not in self.component_set or b not in self.component_set:
                raise KeyError(f"{a} or {b} is not a component of this model")
            return self.form(a, b)
        return self.form.pair(self.curve_class(a), self.curve_class(b))

    def check(self):
        """Raise if a singular point does not sit on a transverse crossing."""
        if not self.form.is_symmetric():
            raise ValueError("intersection form is not symmetric")
        for p in self.singular_points:
            a, b = p.at
            if self.curve_intersection(a, b) != 1:
                raise ValueError(f"{a} and {b} do not cross transversally")
        return self

    def to_json(self) -> dict:
        return {
            "level": self.level.n if self.level else None,
            "components": [str(c) for c in self.components],
            "intersections": [[str(a), str(b), fraction_str(v)] for a, b, v in self.form.entries()],
            "singular_points": [p.to_json() for p in self.singular_points],
            "blowups": [{"point": p.to_json() if p is not None else None, "serial": s}
                        for p, s in self.blowup_history],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceModel":
        history = tuple((SingularPoint.from_json(h["point"]) if h["point"] else None, h["serial"])
                        for h in data.get("blowups", []))
        centers: dict = {}
        for p, serial in history:
            for c in (p.at if p is not None else ()):
                centers.setdefault(c, []).append(serial)
        form = IntersectionForm((ComponentId.parse(a), ComponentId.parse(b), parse_fraction(v))
                                for a, b, v in data["intersections"])
        return cls(
            Level(data["level"]) if data["level"] is not None else None,
            tuple(ComponentId.parse(c) for c in data["components"]),
            form,
            tuple(SingularPoint.from_json(p) for p in data["singular_points"]),
            history,
            {k: tuple(v) for k, v in centers.items()},
        )


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    return Fraction(text)


def base_model(level) -> SurfaceModel:
    """The toroidal compactification E(N) before any blow-up."""
    lv = _as_level(level)
    n, p = lv.n, cusp_count(lv)
    comps = [ZERO_SECTION]
    entries = [(ZERO_SECTION, ZERO_SECTION, Fraction(-n * p, 12))]
    points = []
    minus_two, one, mult = Fraction(-2), Fraction(1), Fraction(4, n)
    for j in range(1, p + 1):
        ring = [fiber(j, nu) for nu in range(n)]
        for nu in range(n):
            nxt = ring[(nu + 1) % n]
            comps.append(ring[nu])
            entries.append((ring[nu], ring[nu], minus_two))
            # each unordered neighbouring pair once; N >= 3 keeps them distinct
            entries.append((ring[nu], nxt, one))
            # chart W^0_{j,nu}: Theta_{nu+1} = {u=0}, Theta_nu = {v=0}
            points.append(SingularPoint((nxt, ring[nu]), (1, 1), mult))
        entries.append((ZERO_SECTION, ring[0], one))
    return SurfaceModel(lv, tuple(comps), IntersectionForm(entries), tuple(points)).check()


def toric_seed_model() -> SurfaceModel:
    """P^2 with its three coordinate lines and one singular point of type (1,1), multiplicity 1.

    The point is ``{x1 = 0} ∩ {x2 = 0}``, where the conic metric of the toric
    analogue is singular.  Line ``L/i`` is ``{x_i = 0}``.
    """
    lines = [toric_line(i) for i in range(3)]
    entries = [(a, b, 1) for i, a in enumerate(lines) for b in lines[i:]]
    point = SingularPoint((lines[1], lines[2]), (1, 1), Fraction(1))
    return SurfaceModel(None, tuple(lines), IntersectionForm(entries), (point,)).check()


def jacobi_divisor(model: SurfaceModel):
    """The divisor C = 8H + sum_{j,nu} (N - 4 nu + 4 nu^2 / N) Theta_{j,nu} of theta_{1,1}^8."""
    from .lattice import QDivisor

    if model.level is None or not model.is_base:
        raise ValueError("jacobi_divisor is defined on the base model of E(N) only")
    n = model.level.n
    coeffs = {ZERO_SECTION: Fraction(8)}
    by_nu = [n - 4 * nu + Fraction(4 * nu * nu, n) for nu in range(n)]
    for c in model.components:
        if c.kind == "Theta":
            coeffs[c] = by_nu[c.b]
    return QDivisor(model.key, {k: v for k, v in coeffs.items() if v != 0}, model)


def fractional_part(x: Fraction) -> Fraction:
    """x - floor(x), exact."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def c_coefficient_identity(n: int, nu: int) -> tuple[Fraction, Fraction]:
    """Both sides of 4N(e^2(-nu/N) - e(-nu/N)) = 4 nu^2 / N - 4 nu."""
    e = fractional_part(Fraction(-nu, n))
    return 4 * n * (e * e - e), Fraction(4 * nu * nu, n) - 4 * nu
