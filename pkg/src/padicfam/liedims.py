"""Graded dimensions of unipotent fundamental groups and depth thresholds.

Two curve types are supported: the thrice-punctured line, whose
fundamental group Lie algebra is free of rank 2, and a projective curve
of genus ``g >= 2`` (one-relator surface group).  Everything here is an
exact integer or rational; analytic envelopes are returned as
:class:`~padicfam.exactnum.BoundValue`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

from .exactnum import (
    DEFAULT_DIGITS,
    BoundValue,
    DomainError,
    divisors,
    mobius,
    strict_ceiling_with_retry,
)


class ConsistencyError(ArithmeticError):
    """A quantity that must be an integer came out fractional."""


@dataclass(frozen=True)
class PuncturedLine:
    """P^1 minus {0, 1, oo}."""

    def __str__(self) -> str:
        return "p1"


@dataclass(frozen=True)
class ProjectiveGenus:
    g: int

    def __post_init__(self):
        if self.g < 2:
            raise DomainError(f"projective curves need genus >= 2, got {self.g}")

    def __str__(self) -> str:
        return f"genus:{self.g}"


CurveType = Union[PuncturedLine, ProjectiveGenus]


def parse_curve(spec: str) -> CurveType:
    """Parse ``"p1"`` or ``"genus:g"``."""
    spec = spec.strip().lower()
    if spec in ("p1", "punctured", "p1-0-1-inf"):
        return PuncturedLine()
    if spec.startswith("genus:"):
        try:
            g = int(spec.split(":", 1)[1])
        except ValueError:
            raise DomainError(f"bad genus in {spec!r}") from None
        return ProjectiveGenus(g)
    raise DomainError(f"unknown curve spec {spec!r}")


@lru_cache(maxsize=None)
def power_sums(curve: CurveType, N: int) -> tuple[int, ...]:
    """``a_0 .. a_N`` with ``sum_{k|n} k e_k = a_n``.

    For genus g, ``a_m = alpha_+^m + alpha_-^m`` is produced by the integer
    recurrence ``a_m = 2g a_{m-1} - a_{m-2}``; no floating powers.
    """
    if isinstance(curve, PuncturedLine):
        return tuple(2**m for m in range(N + 1))
    g = curve.g
    a = [2, 2 * g]
    while len(a) <= N:
        a.append(2 * g * a[-1] - a[-2])
    return tuple(a[: N + 1])


@dataclass(frozen=True)
class GradedDims:
    curve: CurveType
    depth: int
    e: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        """1-based access: ``dims[n]`` is e_n."""
        if not 1 <= n <= self.depth:
            raise IndexError(n)
        return self.e[n - 1]

    def total(self, n: int | None = None) -> int:
        return sum(self.e[: self.depth if n is None else n])


@lru_cache(maxsize=None)
def _graded(curve: CurveType, N: int) -> tuple[int, ...]:
    a = power_sums(curve, N)
    out = []
    for n in range(1, N + 1):
        s = sum(mobius(d) * a[n // d] for d in divisors(n))
        if s % n:
            raise ConsistencyError(f"Moebius sum {s} not divisible by n={n}")
        out.append(s // n)
    return tuple(out)


def graded_dims(curve: CurveType, N: int) -> GradedDims:
    """Exact e_1..e_N by Möbius inversion of the power sums."""
    if N < 1:
        raise DomainError("depth must be >= 1")
    return GradedDims(curve, N, _graded(curve, N))


def alpha_plus(g: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    G = BoundValue.exact(g, digits)
    return G + (G * G - 1).sqrt()


def alpha_minus(g: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    G = BoundValue.exact(g, digits)
    return G - (G * G - 1).sqrt()


def dim_envelope(curve: CurveType, n: int, digits: int = DEFAULT_DIGITS) -> tuple[BoundValue, BoundValue]:
    """Analytic ``(lower, upper)`` with ``lower <= e_n <= upper``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    N = BoundValue.exact(n, digits)
    rootn = N.sqrt()
    if isinstance(curve, PuncturedLine):
        two = BoundValue.exact(2, digits)
        upper = two**N / N
        lower = upper - two ** (N / 2 + 1) / rootn
        return lower, upper
    if n < 2:
        raise DomainError("the genus envelope needs n >= 2")
    ap, am = alpha_plus(curve.g, digits), alpha_minus(curve.g, digits)
    upper = ap**N / N
    half = N / 2
    lower = (ap**N + am**N) / N - 2 * (ap**half + am**half) / rootn
    return lower, upper


# --------------------------------------------------------------------------
# complex conjugation character


@dataclass(frozen=True)
class ConjugationChar:
    g: int
    depth: int
    chi_c: tuple[Fraction, ...]
    v_fixed: tuple[Fraction, ...]
    rhs: str = "closed-form"

    def integral(self) -> bool:
        return all(v.denominator == 1 for v in self.v_fixed)


def _filip_rhs(n: int, rhs: str) -> Fraction:
    # (i^n + (-i)^n) / n, or 0 throughout for the "zero" reading
    if rhs == "zero" or n % 2:
        return Fraction(0)
    return Fraction(2 * (-1) ** (n // 2), n)


def filip_chi(g: int, N: int, rhs: str = "closed-form", strict: bool = True) -> ConjugationChar:
    """Character of complex conjugation on the graded pieces, genus g.

    Solves the divisor recursion
    ``sum_{k|n} (1/k) chi^{(k)}_{n/k}(c) = (i^n + (-i)^n)/n`` where
    ``chi^{(k)}_m(c)`` is ``chi_m(c)`` for odd k and ``e_m`` for even k
    (``c^2 = 1``).  ``rhs="zero"`` uses a zero right-hand side for even n
    instead; its fixed-space dimensions are generally not integers, so
    pass ``strict=False`` to inspect them.
    """
    if g < 2:
        raise DomainError("genus must be >= 2")
    if rhs not in ("closed-form", "zero"):
        raise DomainError(f"unknown rhs {rhs!r}")
    e = graded_dims(ProjectiveGenus(g), N).e
    chi: list[Fraction] = []
    for n in range(1, N + 1):
        acc = _filip_rhs(n, rhs)
        for k in divisors(n):
            if k == 1:
                continue
            m = n // k
            term = chi[m - 1] if k % 2 else Fraction(e[m - 1])
            acc -= term / k
        chi.append(acc)
    fixed = tuple((Fraction(e[i]) + chi[i]) / 2 for i in range(N))
    out = ConjugationChar(g, N, tuple(chi), fixed, rhs)
    if strict and not out.integral():
        bad = next(i + 1 for i, v in enumerate(fixed) if v.denominator != 1)
        raise ConsistencyError(f"dim V_{bad}^c = {fixed[bad - 1]} is not an integer")
    return out


def chi_envelope(g: int, n: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """``alpha_+^{n/2+1} + alpha_-^{n/2+1}``."""
    ap, am = alpha_plus(g, digits), alpha_minus(g, digits)
    ex = BoundValue.exact(Fraction(n, 2) + 1, digits)
    return ap**ex + am**ex


# --------------------------------------------------------------------------
# defect profiles


@dataclass(frozen=True)
class DefectProfile:
    """Per-level and cumulative ``e_i - d_i``.

    ``exact`` profiles hold true values; otherwise ``per_level`` are
    certified lower bounds and ``d`` the matching upper bounds on d_i.
    """

    curve: CurveType
    rank: int
    depth: int
    d: tuple
    per_level: tuple
    defect: tuple
    exact: bool
    label: str = ""

    def first_positive(self) -> int | None:
        for n, v in enumerate(self.defect, start=1):
            if _positive(v):
                return n
        return None


def _positive(v) -> bool:
    if isinstance(v, BoundValue):
        return v.certainly_gt(0)
    return v > 0


def defect_profile(curve: CurveType, r: int, N: int, variant: str = "refined", digits: int = DEFAULT_DIGITS) -> DefectProfile:
    """Dimension defects ``sum_{i<=n} (e_i - d_i)``.

    For the punctured line the profile is exact: ``d_1 = r``, ``d_i = e_i``
    for odd ``i > 1`` and ``d_i = 0`` for even ``i``.  For projective
    curves only lower bounds exist.  ``variant="refined"`` uses the exact
    conjugation-fixed dimensions; ``variant="analytic"`` uses the closed-form
    envelope in alpha_+-.
    """
    if r < 0:
        raise DomainError("rank must be non-negative")
    e = graded_dims(curve, N).e
    if isinstance(curve, PuncturedLine):
        d = [r] + [e[i - 1] if i % 2 else 0 for i in range(2, N + 1)]
        per = [e[i] - d[i] for i in range(N)]
        cum = [sum(per[: n + 1]) for n in range(N)]
        return DefectProfile(curve, r, N, tuple(d), tuple(per), tuple(cum), True, "exact")

    g = curve.g
    if variant == "refined":
        fixed = filip_chi(g, N).v_fixed
        per = [Fraction(e[0] - r)] + [fixed[i] for i in range(1, N)]
        d = [Fraction(r)] + [Fraction(e[i]) - fixed[i] for i in range(1, N)]
        cum, acc = [], Fraction(0)
        for v in per:
            acc += v
            cum.append(acc)
        return DefectProfile(curve, r, N, tuple(d), tuple(per), tuple(cum), False, "refined lower bound")
    if variant == "analytic":
        ap, am = alpha_plus(g, digits), alpha_minus(g, digits)
        per_b = [BoundValue.exact(e[0] - r, digits)]
        for n in range(2, N + 1):
            Nn = BoundValue.exact(n, digits)
            half = Nn / 2
            lb = (ap**Nn + am**Nn) / (2 * Nn) - (ap ** (half + 1) + am ** (half + 1)) / 2 - (ap**half + am**half) / Nn.sqrt()
            per_b.append(lb)
        d_b = [BoundValue.exact(r, digits)] + [BoundValue.exact(e[i], digits) - per_b[i] for i in range(1, N)]
        cum_b, acc_b = [], BoundValue.exact(0, digits)
        for v in per_b:
            acc_b = acc_b + v
            cum_b.append(acc_b)
        return DefectProfile(curve, r, N, tuple(d_b), tuple(per_b), tuple(cum_b), False, "analytic lower bound")
    raise DomainError(f"unknown variant {variant!r}")


# --------------------------------------------------------------------------
# depth thresholds


def _alpha_power_exceeds(g: int, n: int, bound: int) -> bool:
    """Exact test of ``alpha_+^n > bound`` for integer bound."""
    D = g * g - 1
    u, v = 1, 0  # alpha_+^k = u + v sqrt(D)
    for _ in range(n):
        u, v = g * u + D * v, u + g * v
    rest = bound - u
    if rest < 0:
        return True
    return v * v * D > rest * rest


def _punctured_paper_threshold(r: int, digits: int) -> BoundValue:
    R = BoundValue.exact(r, digits)
    log2 = BoundValue.exact(2, digits).log()
    return 1 + (R.log() + (R.log() + log2).log()) / log2


def _genus_paper_threshold(g: int, r: int, digits: int) -> BoundValue:
    R = BoundValue.exact(r, digits)
    log2 = BoundValue.exact(2, digits).log()
    lr = R.log()
    return (lr + log2 + (lr + log2).log()) / alpha_plus(g, digits).log()


class DepthThreshold(NamedTuple):
    exact_min: int
    paper_bound: int
    threshold: BoundValue


def min_depth(curve: CurveType, r: int, digits: int = DEFAULT_DIGITS) -> DepthThreshold:
    """Least depth with positive defect, and the closed-form depth bound.

    Punctured line: ``r = 2s`` with ``s >= 1``; ``exact_min`` comes from the
    exact defect profile.  Genus g: ``exact_min`` is the least n with
    ``alpha_+^n / n > 2r``, decided exactly in Z[sqrt(g^2-1)].
    """
    if isinstance(curve, PuncturedLine):
        if r < 2 or r % 2:
            raise DomainError("punctured line needs r = 2s with s >= 1")
        n = 1
        while True:
            prof = defect_profile(curve, r, n)
            if prof.defect[-1] > 0:
                break
            n += 1
        ceil, thr = strict_ceiling_with_retry(lambda d: _punctured_paper_threshold(r, d), digits)
        return DepthThreshold(n, ceil, thr)
    if r < 1:
        raise DomainError("genus case needs r >= 1")
    n = 1
    while not _alpha_power_exceeds(curve.g, n, 2 * r * n):
        n += 1
    ceil, thr = strict_ceiling_with_retry(lambda d: _genus_paper_threshold(curve.g, r, d), digits)
    return DepthThreshold(n, ceil, thr)
