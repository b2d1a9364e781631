"""JSON-serialisable verification records."""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

SCHEMA = "bdivisor-report/1"


def fmt(value, digits: int = 20) -> str:
    """Canonical text for exact rationals ("p/q"), floats and mpf values."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, Fraction)):
        f = Fraction(value)
        return f"{f.numerator}/{f.denominator}"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, digits)
    if isinstance(value, complex) or isinstance(value, mpmath.mpc):
        return f"{fmt(value.real, digits)}{'+' if value.imag >= 0 else '-'}{fmt(abs(value.imag), digits)}j"
    return str(value)


@dataclass
class Report:
    check_name: str
    target: str
    computed: str
    bound: str
    passed: bool
    runtime_ms: int = 0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


@contextmanager
def timed():
    """Yields a one-element list that receives the elapsed milliseconds."""
    box = [0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = int((time.perf_counter() - start) * 1000)


def exact_report(name: str, target, computed, **details) -> Report:
    return Report(name, fmt(target), fmt(computed), "0", Fraction(target) == Fraction(computed),
                  details={k: fmt(v) for k, v in details.items()})


def numeric_report(name: str, target, computed, bound, digits: int = 20, **details) -> Report:
    err = abs(computed - target)
    return Report(name, fmt(target, digits), fmt(computed, digits), fmt(bound, digits),
                  bool(err <= bound),
                  details={"abs_error": fmt(err, digits), **{k: fmt(v, digits) for k, v in details.items()}})
