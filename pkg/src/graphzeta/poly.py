"""Exact univariate polynomials, truncated power series, and polynomial determinants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import fields
from .errors import ValidationError


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class ExactPoly:
    """Polynomial in ``u`` with coefficients ``coeffs[k]`` of ``u**k``; trailing zeros trimmed."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence = ()):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c) -> "ExactPoly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=Fraction(1)) -> "ExactPoly":
        return cls([Fraction(0)] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ExactPoly):
            other = ExactPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, ExactPoly) else ExactPoly([other])
        n = max(len(self), len(other))
        return ExactPoly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-(other if isinstance(other, ExactPoly) else ExactPoly([other])))

    def __rsub__(self, other):
        return ExactPoly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, ExactPoly):
            return ExactPoly([c * other for c in self.coeffs])
        if not self or not other:
            return ExactPoly()
        out = [Fraction(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return ExactPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValidationError("negative power of a polynomial")
        result, base = ExactPoly([Fraction(1)]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "ExactPoly") -> tuple["ExactPoly", "ExactPoly"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [Fraction(0)] * max(len(rem) - len(other) + 1, 1)
        lead = other.coeffs[-1]
        for k in range(len(rem) - len(other), -1, -1):
            c = rem[k + len(other) - 1] / lead
            quo[k] = c
            if not _is_zero(c):
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return ExactPoly(quo), ExactPoly(rem)

    def __call__(self, u):
        acc = Fraction(0) if not isinstance(u, (float, complex)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def shift(self, k: int) -> "ExactPoly":
        """Multiply by ``u**k``."""
        return ExactPoly([Fraction(0)] * k + list(self.coeffs))

    def to_json(self) -> list:
        return [fields.format_scalar(c) for c in self.coeffs]

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            terms.append(f"({c})" + ("" if k == 0 else f"*u^{k}"))
        return "ExactPoly(" + (" + ".join(terms) or "0") + ")"


@dataclass(frozen=True)
class FormalSeries:
    """Power series truncated after ``u**order``."""

    coeffs: tuple
    order: int

    def __init__(self, coeffs: Sequence, order: int):
        cs = list(coeffs)[: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)

    @classmethod
    def from_poly(cls, p: ExactPoly, order: int) -> "FormalSeries":
        return cls(p.coeffs, order)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = min(self.order, other.order)
        return FormalSeries([self[k] + other[k] for k in range(n + 1)], n)

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return FormalSeries([c * other for c in self.coeffs], self.order)
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if _is_zero(self[i]):
                continue
            for j in range(n + 1 - i):
                out[i + j] = out[i + j] + self[i] * other[j]
        return FormalSeries(out, n)

    def derivative(self) -> "FormalSeries":
        return FormalSeries([k * self[k] for k in range(1, self.order + 1)], self.order - 1)

    def log(self) -> "FormalSeries":
        """Logarithm of a series with constant term 1, via ``f g' = f'``."""
        if self[0] != 1:
            raise ValidationError(f"log needs constant term 1, got {self[0]}")
        n = self.order
        # g' = f'/f, solved term by term: (k g_k) = k f_k - sum_{j<k} j g_j f_{k-j}
        g = [Fraction(0)] * (n + 1)
        for k in range(1, n + 1):
            acc = k * self[k]
            for j in range(1, k):
                if not _is_zero(g[j]):
                    acc = acc - j * g[j] * self[k - j]
            g[k] = acc / k
        return FormalSeries(g, n)

    def exp(self) -> "FormalSeries":
        if self[0] != 0:
            raise ValidationError("exp needs constant term 0")
        n = self.order
        f = [Fraction(0)] * (n + 1)
        f[0] = Fraction(1)
        for k in range(1, n + 1):
            acc = Fraction(0)
            for j in range(1, k + 1):
                if not _is_zero(self[j]):
                    acc = acc + j * self[j] * f[k - j]
            f[k] = acc / k
        return FormalSeries(f, n)

    def to_json(self) -> list:
        return [fields.format_scalar(c) for c in self.coeffs]


def series_log(p: ExactPoly, order: int) -> FormalSeries:
    """``log p`` through ``u**order``; requires ``p(0) = 1``."""
    if p[0] != 1:
        raise ValidationError(f"series_log needs p(0) = 1, got {p[0]}")
    return FormalSeries.from_poly(p, order).log()


# ---------------------------------------------------------------------------
# determinants of polynomial matrices


def interpolation_nodes(count: int) -> list[int]:
    """``0, 1, -1, 2, -2, ...``"""
    out = [0]
    k = 1
    while len(out) < count:
        out.append(k)
        if len(out) < count:
            out.append(-k)
        k += 1
    return out


def interpolate(nodes: Sequence, values: Sequence) -> ExactPoly:
    """Exact Newton interpolation through ``(nodes[i], values[i])``."""
    n = len(nodes)
    coef = list(values)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / Fraction(nodes[i] - nodes[i - j])
    # expand Newton form into monomial coefficients
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (u - nodes[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [shifted[k] - nodes[i] * poly[k] for k in range(n)]
        poly[0] = poly[0] + coef[i]
    return ExactPoly(poly)


def matrix_poly_det(mats: Sequence[np.ndarray], degree_bound: int | None = None) -> ExactPoly:
    """Determinant of ``mats[0] + mats[1] u + mats[2] u^2 + ...``.

    Exact arrays go through evaluation at integer nodes and Newton
    interpolation.  Float arrays are evaluated on a circle and recovered by an
    inverse DFT.
    """
    size = mats[0].shape[0]
    if size == 0:
        return ExactPoly([Fraction(1)])
    if degree_bound is None:
        degree_bound = size * (len(mats) - 1)
    npts = degree_bound + 1
    if mats[0].dtype != object:
        radius = 1.0
        nodes = radius * np.exp(2j * np.pi * np.arange(npts) / npts)
        vals = np.array([np.linalg.det(sum(m * z ** k for k, m in enumerate(mats))) for z in nodes])
        coeffs = np.fft.fft(vals) / npts
        coeffs = coeffs / radius ** np.arange(npts)
        scale = max(np.max(np.abs(coeffs)), 1.0)
        coeffs[np.abs(coeffs) <= 1e-12 * scale] = 0
        return ExactPoly([complex(c) for c in coeffs])
    nodes = interpolation_nodes(npts)
    values = []
    for z in nodes:
        m = mats[0].copy()
        zk = 1
        for k in range(1, len(mats)):
            zk *= z
            if zk:
                m = m + mats[k] * zk
        values.append(fields.det(m))
    return interpolate(nodes, values)


def poly_det(m) -> ExactPoly:
    """Determinant of a square matrix whose entries are ExactPoly (or scalars)."""
    m = np.asarray(m, dtype=object)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("poly_det needs a square matrix")
    n = m.shape[0]
    if n == 0:
        return ExactPoly([Fraction(1)])
    entries = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        entries[idx] = x if isinstance(x, ExactPoly) else ExactPoly([x])
    maxdeg = max(max(e.degree for e in entries.flat), 0)
    mats = []
    for k in range(maxdeg + 1):
        mk = np.empty(m.shape, dtype=object)
        for idx, e in np.ndenumerate(entries):
            mk[idx] = e[k]
        mats.append(mk)
    bound = sum(max((e.degree for e in row), default=0) for row in entries)
    return matrix_poly_det(mats, max(bound, 0))


def cofactor_det(m):
    """Leibniz expansion; an independent oracle for small matrices."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    total = ExactPoly() if any(isinstance(x, ExactPoly) for x in m.flat) else Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term = m[i, j] * term
        total = total + term
    return total
