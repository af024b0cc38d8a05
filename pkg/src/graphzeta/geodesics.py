"""Primitive closed geodesics and the truncated Euler product for log Z."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fields
from .errors import BudgetExceeded, ValidationError
from .graph import Multigraph
from .local_system import LocalSystem, dart_operator, monodromy
from .poly import FormalSeries

DEFAULT_BUDGET = 10**8


def canonical_rotation(darts) -> tuple[int, ...]:
    """Lexicographically minimal rotation of a cyclic dart word."""
    w = tuple(darts)
    return min(w[i:] + w[:i] for i in range(len(w)))


def is_primitive(darts) -> bool:
    w = tuple(darts)
    n = len(w)
    return all(w != w[p:] + w[:p] for p in range(1, n) if n % p == 0)


@dataclass(frozen=True)
class ClosedGeodesic:
    darts: tuple[int, ...]
    primitive: bool

    @property
    def length(self) -> int:
        return len(self.darts)

    @classmethod
    def from_walk(cls, g: Multigraph, darts) -> "ClosedGeodesic":
        w = tuple(darts)
        if not w:
            raise ValidationError("empty walk")
        for a, b in zip(w, w[1:] + w[:1]):
            if g.head(a) != g.tail(b):
                raise ValidationError(f"darts {a} and {b} are not consecutive")
            if b == a ^ 1:
                raise ValidationError(f"walk backtracks at dart {a}")
        return cls(canonical_rotation(w), is_primitive(w))

    def rotations(self) -> list[tuple[int, ...]]:
        w = self.darts
        return [w[i:] + w[:i] for i in range(len(w))]


def _branching(g: Multigraph) -> int:
    return max(max(g.degrees()) - 1, 1)


def check_budget(g: Multigraph, max_len: int, budget: int | None) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if max_len < 1:
        raise ValidationError("max length must be >= 1")
    cost = _branching(g) ** max_len * g.m
    if cost > budget:
        raise BudgetExceeded(f"q^L * m = {cost} exceeds budget {budget}")


def enumerate_primitive(g: Multigraph, max_len: int, budget: int | None = None) -> list[ClosedGeodesic]:
    """Every primitive closed geodesic class of length <= ``max_len``, once each.

    Depth-first over non-backtracking words whose first dart is their minimum;
    a closed word is kept only if it is its own minimal rotation.
    """
    check_budget(g, max_len, budget)
    low = [v for v in range(g.n) if g.degree(v) < 2]
    if low:
        raise ValidationError(f"vertex {low[0]} has degree < 2")
    found: list[ClosedGeodesic] = []
    for start in range(g.dart_count):
        origin = g.tail(start)
        word = [start]

        def extend():
            last = word[-1]
            if g.head(last) == origin and start != last ^ 1:
                w = tuple(word)
                if canonical_rotation(w) == w and is_primitive(w):
                    found.append(ClosedGeodesic(w, True))
            if len(word) == max_len:
                return
            for nxt in g.successors(last):
                if nxt < start:
                    continue
                word.append(nxt)
                extend()
                word.pop()

        extend()
    found.sort(key=lambda c: (c.length, c.darts))
    return found


def euler_product_log_series(ls: LocalSystem, max_len: int, budget: int | None = None) -> FormalSeries:
    """Coefficients of ``log Z(u)`` through ``u**max_len`` from the product over primitive classes.

    ``log det(1 - u^l m) = -sum_k tr(m^k) u^(l k) / k``.
    """
    zero = fields.convert(0, ls.kind)
    coeffs = [zero] * (max_len + 1)
    if ls.dim == 0:
        return FormalSeries(coeffs, max_len)
    for geo in enumerate_primitive(ls.base, max_len, budget):
        m = monodromy(ls, geo)
        power = m
        k = 1
        while geo.length * k <= max_len:
            tr = sum(power.diagonal(), zero)
            coeffs[geo.length * k] = coeffs[geo.length * k] - tr / k
            power = power @ m
            k += 1
    return FormalSeries(coeffs, max_len)


def walk_trace_series(ls: LocalSystem, max_len: int, budget: int | None = None) -> list:
    """``[N_1, ..., N_L]`` with ``N_k = tr(B^k)`` for the twisted dart operator."""
    check_budget(ls.base, max_len, budget)
    zero = fields.convert(0, ls.kind)
    if ls.dim == 0:
        return [zero] * max_len
    b = dart_operator(ls).matrix
    out = []
    power = b
    for _ in range(max_len):
        out.append(sum(power.diagonal(), zero))
        power = power @ b
    return out


def log_series_from_traces(traces, kind: str = fields.RATIONAL) -> FormalSeries:
    """``log Z(u) = -sum_k N_k u^k / k``."""
    zero = fields.convert(0, kind)
    return FormalSeries([zero] + [-n / Fraction(k) if kind != fields.FLOAT else -n / k
                                  for k, n in enumerate(traces, start=1)], len(traces))


def geodesic_lines(ls: LocalSystem, max_len: int, budget: int | None = None) -> list[dict]:
    """One record per primitive class: length, darts, trace of monodromy."""
    zero = fields.convert(0, ls.kind)
    out = []
    for geo in enumerate_primitive(ls.base, max_len, budget):
        tr = sum(monodromy(ls, geo).diagonal(), zero) if ls.dim else zero
        out.append({"length": geo.length, "darts": list(geo.darts), "trace": fields.format_scalar(tr)})
    return out


def mobius(n: int) -> int:
    result, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            result = -result
        k += 1
    if m > 1:
        result = -result
    return result


def primitive_count_from_walks(walk_counts: list[int], k: int) -> Fraction:
    """Number of primitive classes of length ``k`` from marked closed-walk counts ``M_1..``."""
    total = sum(mobius(k // d) * walk_counts[d - 1] for d in range(1, k + 1) if k % d == 0)
    return Fraction(total, k)
