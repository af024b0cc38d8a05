"""The L2 side: tree heat traces, the closed-form L2-determinant, and the cover-sequence harness.

Every certified bound here uses the crude norm estimate ``||Delta|| <= 2(q+1)``
and the fact that off-diagonal deck contributions, and closed geodesics, start
at the girth.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import mpmath
import numpy as np

from . import fields
from .covers import CoverGraph, lift_local_system
from .errors import BudgetExceeded, IdentityFailure, ValidationError
from .graph import Multigraph, check_regular, girth
from .local_system import LocalSystem, trivial_local_system, twisted_laplacian

TREE_BUDGET = 5000
EXACT_VERTEX_THRESHOLD = 200
PRECISION_DIGITS = 50

DEVIATION_NOTE = ("cover sequences stand in for a tower: bounds are keyed on girth, "
                  "random covers are permutation covers and need not be normal")


# ---------------------------------------------------------------------------
# regular tree


@dataclass(frozen=True)
class TreeReturnTable:
    """``deltas[k] = <x|Delta^k|x>`` on the ``(q+1)``-regular tree."""

    q: int
    order: int
    deltas: tuple[int, ...]
    adjacency_returns: tuple[int, ...] = ()


def tree_return_counts(q: int, order: int) -> TreeReturnTable:
    """Diagonal entries of Laplacian powers on the tree by DP over distance from the root.

    Radial functions stay radial under ``A``:
    ``(A f)(0) = (q+1) f(1)`` and ``(A f)(d) = f(d-1) + q f(d+1)``.
    """
    if q < 1:
        raise ValidationError("tree branching q must be >= 1")
    if order < 0:
        raise ValidationError("order must be >= 0")
    if order > TREE_BUDGET:
        raise BudgetExceeded(f"order {order} exceeds tree budget {TREE_BUDGET}")
    size = order + 2

    def apply_adj(f):
        g = [0] * size
        g[0] = (q + 1) * f[1]
        for d in range(1, size - 1):
            g[d] = f[d - 1] + q * f[d + 1]
        return g

    f = [0] * size
    f[0] = 1
    a = [0] * size
    a[0] = 1
    deltas, returns = [1], [1]
    for _ in range(order):
        af = apply_adj(f)
        f = [(q + 1) * x - y for x, y in zip(f, af)]
        a = apply_adj(a)
        deltas.append(f[0])
        returns.append(a[0])
    return TreeReturnTable(q, order, tuple(deltas), tuple(returns))


def _exp_tail_bound(x: float, order: int) -> float:
    """Lagrange bound on ``sum_{k > order} x^k / k!`` for ``x >= 0``."""
    if x == 0:
        return 0.0
    return float(mpmath.mpf(x) ** (order + 1) / mpmath.factorial(order + 1) * mpmath.exp(x))


def gamma_heat_trace(q: int, n: int, r: int, t, order: int,
                     table: TreeReturnTable | None = None) -> tuple[float, float]:
    """``tr_Gamma exp(-t Delta) = n r sum_k (-t)^k delta_k / k!``, truncated, plus its tail bound."""
    if table is None or table.order < order or table.q != q:
        table = tree_return_counts(q, order)
    if n * r == 0:
        return 0.0, 0.0
    texact = Fraction(t) if not isinstance(t, Rational) else Fraction(t)
    total = Fraction(0)
    term = Fraction(1)
    for k in range(order + 1):
        if k:
            term = term * (-texact) / k
        total += term * table.deltas[k]
    value = float(n * r * total)
    tail = n * r * _exp_tail_bound(2 * (q + 1) * abs(float(t)), order)
    return value, tail


# ---------------------------------------------------------------------------
# closed form


def lambda_of_u(q: int, u):
    """``lambda_u = q u + 1/u - q - 1``."""
    if u == 0:
        raise ValidationError("u must be nonzero")
    if isinstance(u, Rational):
        u = Fraction(u)
    return q * u + 1 / u - q - 1


def u_of_lambda(q: int, lam):
    """Small root of ``q u^2 - (lambda + q + 1) u + 1 = 0``, in ``(0, 1/sqrt q)``.

    That interval maps onto ``lambda > -(sqrt q - 1)^2``; anything at or below
    is rejected.
    """
    s = lam + q + 1
    if not (s > 0 and s * s > 4 * q):
        raise ValidationError(f"lambda = {lam} outside the certified domain lambda > -(sqrt({q}) - 1)^2")
    if isinstance(lam, Rational):
        disc = Fraction(s) ** 2 - 4 * q
        num, den = disc.numerator, disc.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return (Fraction(s) - Fraction(rn, rd)) / (2 * q)
        # u = 2 / (s + sqrt(disc)) avoids cancellation
        return 2 / (float(s) + math.sqrt(float(disc)))
    return 2 / (s + math.sqrt(s * s - 4 * q))


def check_u_domain(q: int, u) -> None:
    if not (u > 0 and q * u * u < 1):
        raise ValidationError(f"u = {u} outside the certified domain 0 < u < 1/sqrt({q})")


def l2det_closed_exponents(q: int, n: int, r: int) -> tuple[Fraction, int]:
    """Exponents ``(a, b)`` with ``det_Gamma(Delta + lambda_u) = (1 - u^2)^a u^b``."""
    return Fraction(-(q - 1) * n * r, 2), -n * r


def l2det_closed(q: int, n: int, r: int, u):
    """``(1 - u^2)^(-(q-1) n r / 2) u^(-n r)``; exact for rational ``u`` when the exponent is integral."""
    if q < 2:
        raise ValidationError("closed-form L2-determinant needs q >= 2")
    check_u_domain(q, u)
    a, b = l2det_closed_exponents(q, n, r)
    if isinstance(u, Rational) and a.denominator == 1:
        u = Fraction(u)
        return (1 - u * u) ** int(a) * u ** b
    return mpmath.power(1 - mpmath.mpf(u) ** 2, mpmath.mpf(a)) * mpmath.power(mpmath.mpf(u), b)


def zeta_reg_det(m: np.ndarray, tol: float = 1e-10) -> float:
    """``exp(-zeta'(0))`` for ``zeta(s) = sum lambda_i^-s``, i.e. ``exp(sum log lambda_i)``."""
    m = np.asarray(m, dtype=complex if np.iscomplexobj(m) else float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("matrix must be square")
    scale = max(np.max(np.abs(m), initial=0.0), 1.0)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * scale:
        raise ValidationError("matrix is not self-adjoint")
    eig = np.linalg.eigvalsh(m)
    if eig.size and eig.min() <= tol:
        raise ValidationError(f"non-positive eigenvalue {eig.min():.3e}")
    return float(np.exp(np.sum(np.log(eig))))


def spectral_zeta(m: np.ndarray, s: complex) -> complex:
    """``zeta_M(s) = sum lambda_i^-s`` for a positive-definite matrix."""
    eig = np.linalg.eigvalsh(np.asarray(m))
    return complex(np.sum(eig.astype(complex) ** (-s)))


def normalized_root(value, n: int):
    """N-th root with phase ``arg(value)/N`` (principal argument); positive reals map to positive reals."""
    if value == 0:
        raise ValidationError("cannot take the root of zero")
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        if isinstance(value, mpmath.mpf) and value > 0:
            return mpmath.root(value, n)
        return mpmath.power(abs(value), mpmath.mpf(1) / n) * mpmath.expj(mpmath.arg(value) / n)
    if isinstance(value, Rational):
        value = mpmath.mpf(value.numerator) / value.denominator
        if value > 0:
            return mpmath.root(value, n)
        return mpmath.power(abs(value), mpmath.mpf(1) / n) * mpmath.expj(mpmath.pi / n)
    z = complex(value)
    if z.imag == 0 and z.real > 0:
        return z.real ** (1.0 / n)
    return abs(z) ** (1.0 / n) * cmath.exp(1j * cmath.phase(z) / n)


# ---------------------------------------------------------------------------
# cover-sequence harness


def geodesic_tail(m_base: int, r: int, q: int, u, girth_: int) -> mpmath.mpf:
    """``2 m r sum_{k >= g} (q u)^k / k``; infinite when ``q u >= 1``."""
    x = q * _to_mpf(abs(u))
    if x >= 1:
        return mpmath.inf
    head = mpmath.fsum(x ** k / k for k in range(1, girth_))
    return 2 * m_base * r * (-mpmath.log(1 - x) - head)


def _index(cover: CoverGraph, base: Multigraph) -> int:
    if cover.total.n % base.n:
        raise ValidationError("cover does not sit over the given base")
    return cover.total.n // base.n


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass
class ConvergenceRow:
    index: int
    girth: int
    value: mpmath.mpf
    target: mpmath.mpf
    error: mpmath.mpf
    certified_bound: mpmath.mpf
    normal: bool = True

    @property
    def within_bound(self) -> bool:
        return self.error <= self.certified_bound


@dataclass
class ConvergenceReport:
    u: Fraction
    q: int
    rows: list[ConvergenceRow]
    note: str = DEVIATION_NOTE
    extra: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "girth", "value", "target", "error", "certified_bound"])
        for row in self.rows:
            w.writerow([row.index, row.girth] + [mpmath.nstr(x, 17, strip_zeros=False)
                                                  if mpmath.isfinite(x) else "inf"
                                                  for x in (row.value, row.target, row.error,
                                                            row.certified_bound)])
        return buf.getvalue()


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GRAPHZETA_THREADS", "1")))
    except ValueError:
        return 1


def _det_shifted_laplacian(ls: LocalSystem, lam, exact_threshold: int):
    lap = twisted_laplacian(ls).matrix
    size = lap.shape[0]
    if ls.base.n <= exact_threshold and ls.kind != fields.FLOAT:
        return fields.det(lap + fields.identity(size, ls.kind) * lam)
    with mpmath.workdps(PRECISION_DIGITS):
        mat = mpmath.matrix([[_to_mpf(x) if not isinstance(x, complex) else mpmath.mpc(x)
                              for x in row] for row in lap])
        for i in range(size):
            mat[i, i] += _to_mpf(lam)
        return mpmath.det(mat)


def convergence_experiment(g: Multigraph, covers: Sequence[CoverGraph], u,
                           exact_threshold: int = EXACT_VERTEX_THRESHOLD) -> ConvergenceReport:
    """Compare ``det(Delta_j + lambda_u)^(1/index)`` with the closed-form L2-determinant.

    ``value / target = Z_j(u)^(1/index)``, and ``|log Z_j(u)| / index`` is at
    most the geodesic tail from the girth on, which gives the certified bound
    ``target * (exp(tail) - 1)``.
    """
    q = check_regular(g)
    u = Fraction(u) if isinstance(u, (Rational, str)) else u
    check_u_domain(q, u)
    r = 1
    lam = lambda_of_u(q, u)
    base_ls = trivial_local_system(g)

    def run(cover: CoverGraph) -> ConvergenceRow:
        idx = _index(cover, g)
        ls = lift_local_system(base_ls, cover) if cover.base == g else trivial_local_system(cover.total)
        det = _det_shifted_laplacian(ls, lam, exact_threshold)
        if det == 0:
            raise IdentityFailure("singular Delta + lambda_u with lambda_u > 0")
        value = normalized_root(det, idx)
        target = _to_mpf(l2det_closed(q, g.n, r, u))
        error = abs(value - target)
        g_j = girth(cover.total)
        tail = geodesic_tail(g.m, r, q, u, g_j)
        bound = target * (mpmath.exp(tail) - 1) if mpmath.isfinite(tail) else mpmath.inf
        return ConvergenceRow(idx, g_j, value, target, error, bound, cover.is_normal)

    # mpmath precision is process-global: set it once around the whole pool
    with mpmath.workdps(PRECISION_DIGITS), ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(run, covers))
    return ConvergenceReport(Fraction(u), q, rows)


@dataclass
class ZetaRootRow:
    index: int
    girth: int
    zeta_value: Fraction
    value: mpmath.mpf
    deviation: mpmath.mpf
    certified_bound: mpmath.mpf


def zeta_tends_to_one(covers: Sequence[CoverGraph], u, base: Multigraph | None = None,
                      ls: LocalSystem | None = None) -> list[ZetaRootRow]:
    """``Z_j(u)^(1/index)`` per cover, with ``|value - 1| <= exp(tail) - 1``."""
    from .zeta import bass_zeta

    base = covers[0].base if base is None else base
    q = check_regular(base)
    u = Fraction(u) if isinstance(u, (Rational, str)) else u
    if not (u != 0 and q * abs(u) < 1):
        raise ValidationError(f"u = {u} outside 0 < |u| < 1/{q}")
    ls = trivial_local_system(base) if ls is None else ls
    rows = []
    for cover in covers:
        idx = _index(cover, base)
        lifted = lift_local_system(ls, cover) if cover.base == base else \
            trivial_local_system(cover.total, ls.dim)
        z = bass_zeta(lifted)(u)
        with mpmath.workdps(PRECISION_DIGITS):
            value = normalized_root(z, idx)
            g_j = girth(cover.total)
            tail = geodesic_tail(base.m, ls.dim, q, u, g_j)
            rows.append(ZetaRootRow(idx, g_j, z, value, abs(value - 1), mpmath.exp(tail) - 1))
    return rows


def heat_tail_constant(q: int, n: int, r: int, girth_: int) -> float:
    """``c_j = n r sum_{k >= g} (2(q+1))^k / k!``."""
    x = mpmath.mpf(2 * (q + 1))
    with mpmath.workdps(PRECISION_DIGITS):
        head = mpmath.fsum(x ** k / mpmath.factorial(k) for k in range(girth_))
        return float(n * r * (mpmath.exp(x) - head))


@dataclass(frozen=True)
class HeatDiff:
    lhs: float
    rhs: float
    c: float
    girth: int
    t: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def cover_heat_trace(cover_graph: Multigraph, t: float) -> float:
    """``tr exp(-t Delta)`` for the untwisted Laplacian, from its eigenvalues."""
    lap = np.asarray(twisted_laplacian(trivial_local_system(cover_graph)).matrix, dtype=float)
    return float(np.sum(np.exp(-t * np.linalg.eigvalsh(lap))))


def heat_diff_bound(cover: CoverGraph, t, order: int = 40, base: Multigraph | None = None,
                    table: TreeReturnTable | None = None, check: bool = True) -> HeatDiff:
    """Check ``|tr exp(-t Delta_j)/index - tr_Gamma exp(-t Delta)| <= c_j |t|``.

    The left side carries the tree-series truncation tail and a float rounding
    allowance for the eigenvalue route.
    """
    base = cover.base if base is None else base
    q = check_regular(base)
    tf = float(t)
    if abs(tf) > 1:
        raise ValidationError("heat bound is certified for |t| <= 1")
    idx = _index(cover, base)
    g_j = girth(cover.total)
    if tf == 0:
        return HeatDiff(0.0, 0.0, heat_tail_constant(q, base.n, 1, g_j), g_j, 0.0)
    tree_value, tail = gamma_heat_trace(q, base.n, 1, t, order, table)
    cover_value = cover_heat_trace(cover.total, tf) / idx
    rounding = 1e-12 * base.n * max(1.0, 2 * (q + 1) * abs(tf))
    lhs = abs(cover_value - tree_value) + tail + rounding
    c = heat_tail_constant(q, base.n, 1, g_j)
    out = HeatDiff(lhs, c * abs(tf), c, g_j, tf)
    if check and not out.holds:
        raise IdentityFailure(f"heat bound fails: {lhs} > {out.rhs}")
    return out
