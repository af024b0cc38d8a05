"""Coefficient fields: exact rationals, exact Gaussian rationals, complex floats.

Exact matrices are numpy object arrays holding ``Fraction`` or
``GaussianRational`` entries; float matrices are ``complex128`` arrays.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational

import numpy as np

from .errors import ValidationError

RATIONAL = "rational"
GAUSSIAN = "gaussian"
FLOAT = "float"
KINDS = (RATIONAL, GAUSSIAN, FLOAT)


class GaussianRational:
    """Exact complex number a + b*i with rational parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = Fraction(real)
        self.imag = Fraction(imag)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, Rational):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.real + other.real, self.imag + other.imag)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.real - other.real, self.imag - other.imag)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.real, self.imag, other.real, other.imag
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        norm = other.real * other.real + other.imag * other.imag
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        num = self * other.conjugate()
        return GaussianRational(num.real / norm, num.imag / norm)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        result, base = GaussianRational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.real, -self.imag)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.real == other.real and self.imag == other.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self):
        if self.imag == 0:
            return str(self.real)
        sign = "+" if self.imag >= 0 else "-"
        return f"{self.real}{sign}{abs(self.imag)}i"


def parse_rational(text) -> Fraction:
    """Parse a ``"p/q"`` string or an integer into a Fraction."""
    if isinstance(text, bool):
        raise ValidationError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if isinstance(text, str):
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {text!r}") from exc
        return value
    raise ValidationError(f"not a rational: {text!r}")


def format_scalar(x):
    """Serialize a scalar: exact values as ``"p/q"`` strings, floats with 17 digits."""
    if isinstance(x, GaussianRational):
        return [str(x.real), str(x.imag)]
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return [format(x.real, ".17g"), format(x.imag, ".17g")]
    return format(float(x), ".17g")


def kind_of(values) -> str:
    """Smallest field containing every value in ``values``."""
    kind = RATIONAL
    for v in values:
        if isinstance(v, (bool, np.bool_)):
            raise ValidationError(f"not a number: {v!r}")
        if isinstance(v, Rational):
            continue
        if isinstance(v, GaussianRational):
            if v.imag != 0:
                kind = GAUSSIAN
            continue
        return FLOAT
    return kind


def convert(x, kind: str):
    """Coerce a scalar into the representation used for ``kind``."""
    if kind == FLOAT:
        return complex(x)
    if kind == GAUSSIAN:
        return x if isinstance(x, GaussianRational) else GaussianRational(Fraction(x))
    if isinstance(x, GaussianRational):
        if x.imag != 0:
            raise ValidationError("complex value in rational field")
        return x.real
    return Fraction(x)


def as_matrix(rows, kind: str) -> np.ndarray:
    """Build a matrix in the array representation of ``kind``."""
    if kind == FLOAT:
        return np.array(rows, dtype=complex)
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape(len(rows), -1)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = convert(v, kind)
    return out


def identity(r: int, kind: str) -> np.ndarray:
    if kind == FLOAT:
        return np.eye(r, dtype=complex)
    one, zero = convert(1, kind), convert(0, kind)
    out = np.empty((r, r), dtype=object)
    out.fill(zero)
    for i in range(r):
        out[i, i] = one
    return out


def zeros(shape, kind: str) -> np.ndarray:
    if kind == FLOAT:
        return np.zeros(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(convert(0, kind))
    return out


_conj = np.frompyfunc(lambda x: x.conjugate(), 1, 1)


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose, exact for object arrays."""
    if m.dtype == object:
        return _conj(m).T if m.size else m.T.copy()
    return m.conj().T


def is_unitary(m: np.ndarray, tol: float = 1e-12) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    prod = dagger(m) @ m
    if m.dtype == object:
        r = m.shape[0]
        return all(prod[i, j] == (1 if i == j else 0) for i in range(r) for j in range(r))
    return bool(np.max(np.abs(prod - np.eye(m.shape[0])), initial=0.0) <= tol)


def matrices_equal(a: np.ndarray, b: np.ndarray, tol: float = 0.0) -> bool:
    if a.shape != b.shape:
        return False
    if a.dtype == object and b.dtype == object:
        return all(x == y for x, y in zip(a.flat, b.flat))
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return bool(np.max(np.abs(diff), initial=0.0) <= tol)


def _bareiss(mat: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination on an integer matrix."""
    n = len(mat)
    if n == 0:
        return 1
    a = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _gauss_det(m: np.ndarray):
    """Determinant by pivoted elimination over an exact field."""
    n = m.shape[0]
    a = [list(row) for row in m]
    det = convert(1, GAUSSIAN) if any(isinstance(x, GaussianRational) for x in m.flat) else Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return det * 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        akk = a[k][k]
        det = det * akk
        for i in range(k + 1, n):
            f = a[i][k] / akk
            if f != 0:
                rowi, rowk = a[i], a[k]
                for j in range(k + 1, n):
                    rowi[j] = rowi[j] - f * rowk[j]
    return det


def det(m: np.ndarray):
    """Determinant: exact for object arrays, LAPACK for float arrays."""
    if m.shape == (0, 0):
        return Fraction(1) if m.dtype == object else 1.0 + 0j
    if m.dtype != object:
        return complex(np.linalg.det(m))
    if all(isinstance(x, Rational) for x in m.flat):
        # clear denominators row by row, then fraction-free elimination
        scale = Fraction(1)
        rows = []
        for row in m:
            lcm = reduce(math.lcm, (Fraction(x).denominator for x in row), 1)
            scale /= lcm
            rows.append([int(Fraction(x) * lcm) for x in row])
        return _bareiss(rows) * scale
    return _gauss_det(m)
