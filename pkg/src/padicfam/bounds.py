"""Explicit non-density thresholds and classical comparison constants.

Every function returns :class:`BoundReport` rows.  A row states a
threshold ``T`` for a strict inequality ``n > T`` and the least integer
``min_n`` satisfying it.  Rational thresholds are exact ``Fraction``s;
thresholds involving logarithms are enclosures, and ``min_n`` is then
taken from the upper endpoint so it is never under-reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exactnum import (
    DEFAULT_DIGITS,
    BoundValue,
    DomainError,
    floor_plus_one,
    format_bound,
    strict_ceiling_with_retry,
)
from .liedims import alpha_plus


class ValidityError(DomainError):
    """Parameters outside the window where a formula is defined."""


Threshold = Union[Fraction, BoundValue, None]


@dataclass(frozen=True)
class FamilyParams:
    g: int
    s: int = 0
    r: int = 0
    d: int = 0
    d0: int = 0
    gonality: Optional[int] = None
    cv_product: Optional[Fraction] = None

    def __post_init__(self):
        if self.g < 2:
            raise ValidityError("genus must be >= 2")
        if min(self.s, self.r, self.d, self.d0) < 0:
            raise ValidityError("s, r, d, d0 must be non-negative")


@dataclass(frozen=True)
class BoundReport:
    name: str
    threshold: Threshold
    min_n: Optional[int]
    valid: bool
    notes: str = ""
    anchor: str = ""

    def threshold_str(self) -> str:
        return format_threshold(self.threshold)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "threshold": self.threshold_str(),
            "min_n": self.min_n,
            "valid": self.valid,
            "notes": self.notes,
            "anchor": self.anchor,
        }


def format_threshold(t: Threshold) -> str:
    if t is None:
        return "undefined"
    if isinstance(t, BoundValue):
        return format_bound(t)
    t = Fraction(t)
    return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


def _exact_row(name: str, t: Fraction, anchor: str, valid: bool = True, notes: str = "", floor_one: bool = False) -> BoundReport:
    n = floor_plus_one(t)
    if floor_one:
        n = max(n, 1)
    return BoundReport(name, Fraction(t), n, valid, notes, anchor)


def _enclosed_row(name: str, build, digits: int, anchor: str, valid: bool, notes: str = "") -> BoundReport:
    n, val = strict_ceiling_with_retry(build, digits)
    return BoundReport(name, val, n, valid, notes, anchor)


# --------------------------------------------------------------------------
# rank-r points in families


def thm1_smooth(p: FamilyParams) -> BoundReport:
    """Smooth families: ``(s + (r-d)(g-r)) / (g-r-1)``, for ``r <= g-2``."""
    g, s, r, d = p.g, p.s, p.r, p.d
    if r > g - 2:
        raise ValidityError(f"r = {r} exceeds g-2 = {g - 2}")
    t = Fraction(s + (r - d) * (g - r), g - r - 1)
    return _exact_row("thm1-smooth", t, "smooth family bound", floor_one=True)


def thm1_stable(p: FamilyParams, variant: str = "statement") -> BoundReport:
    """Stable families, counting edge and vertex disks of the dual graph.

    ``variant="statement"`` uses ``(r+1)``; ``variant="proposition"`` uses
    ``(r-d+1)`` as in the per-disk estimates.
    """
    g, s, r = p.g, p.s, p.r
    if r > g - 3:
        raise ValidityError(f"r = {r} exceeds g-3 = {g - 3}")
    if variant == "statement":
        k = r + 1
    elif variant == "proposition":
        k = r - p.d + 1
    else:
        raise DomainError(f"unknown variant {variant!r}")
    edge = Fraction(k * (g - 1 - r) + s, g - r - 2)
    vertex = Fraction(k * (g - r) + s, g - r - 1)
    t = edge * 3 * g + vertex * 2 * g
    note = "" if variant == "statement" else "uses (r-d+1)"
    return _exact_row("thm1-stable", t, "stable family bound", notes=note)


def mg_bound(g: int, r: int, _tamper: int = 0) -> BoundReport:
    """Rank ``<= r`` points on the moduli of n-pointed genus g curves.

    When ``r = g-3`` the threshold must equal ``21 g^2 - 30 g``; a mismatch
    raises ``ArithmeticError``.
    """
    if g < 3:
        raise ValidityError("need g >= 3 so that 0 <= r <= g-3 is non-empty")
    rep = thm1_stable(FamilyParams(g=g, s=3 * g - 3, r=r))
    notes = ""
    if r == g - 3:
        closed = 21 * g * g - 30 * g + _tamper
        if rep.threshold != closed:
            raise ArithmeticError(f"Cor Mg identity fails at g={g}: {rep.threshold} != {closed}")
        notes = "equals 21g^2-30g"
    return BoundReport("mg", rep.threshold, rep.min_n, True, notes, "Cor Mg")


def stoll_zp(g: int, s: int, r: int) -> BoundReport:
    """Linear bound ``(g r + s) / (g - 1)`` predicted by Zilber-Pink."""
    if g < 2:
        raise ValidityError("genus must be >= 2")
    return _exact_row("stoll-zp", Fraction(g * r + s, g - 1), "Zilber-Pink linear bound")


def padic_zp_check(g: int, n: int, r: int, dimV: int) -> bool:
    """Hypotheses of the p-adic Zilber-Pink statement for simple abelian varieties."""
    if n <= 0:
        raise DomainError("n must be positive")
    if not r > g * (n - min(n, g)):
        return False
    return Fraction(dimV) <= Fraction(r, n) - Fraction(r * (n * g - r), n * g * g)


# --------------------------------------------------------------------------
# subexponential bounds


def _sunit_value(s: int, digits: int) -> BoundValue:
    t = BoundValue.exact(2 * s, digits)
    l2 = BoundValue.exact(2, digits).log()
    lt = t.log()
    return 59 * t ** ((lt + lt.log()) / l2 + 5) * lt


def sunit_bound(s: int, digits: int = DEFAULT_DIGITS) -> BoundReport:
    """n-tuples of S-unit solutions, S of rank s."""
    if s < 1:
        raise ValidityError("s must be >= 1")
    valid = s > 5
    return _enclosed_row(
        "sunit",
        lambda d: _sunit_value(s, d),
        digits,
        "S-unit bound",
        valid,
        "" if valid else "outside s > 5",
    )


def _twist_value(g: int, r: int, cv, variant: str, digits: int) -> BoundValue:
    R = BoundValue.exact(r, digits)
    a = alpha_plus(g, digits)
    la = a.log()
    lr = R.log()
    l2 = BoundValue.exact(2, digits).log()
    expo = (lr + lr.log() + l2) / la + 4
    if variant == "final":
        expo = expo + 4
    return 3 * BoundValue.exact(cv, digits) * R**expo * lr * a**3


def twist_bound(g: int, r: int, cv_product=1, variant: str = "statement", digits: int = DEFAULT_DIGITS) -> BoundReport:
    """Isotrivial families of genus g, rank r (conditional on Bloch-Kato).

    ``variant="final"`` adds 4 to the exponent, matching the form obtained
    at the end of the depth estimate.
    """
    if g < 2:
        raise ValidityError("genus must be >= 2")
    if r < 2:
        raise ValidityError("r must be >= 2")
    if variant not in ("statement", "final"):
        raise DomainError(f"unknown variant {variant!r}")
    cv = Fraction(cv_product)
    if cv <= 0:
        raise ValidityError("cv_product must be positive")
    valid = r > 11 * g
    return _enclosed_row(
        "twist" if variant == "statement" else "twist-final",
        lambda d: _twist_value(g, r, cv, variant, d),
        digits,
        "twist bound",
        valid,
        "" if valid else "outside r > 11g",
    )


# --------------------------------------------------------------------------
# comparison constants


def classical_rows(s_or_r: Optional[int] = None, g: Optional[int] = None, digits: int = DEFAULT_DIGITS) -> list[BoundReport]:
    rows: list[BoundReport] = []
    if s_or_r is not None:
        s = s_or_r
        if s < 0:
            raise DomainError("rank must be non-negative")
        rows.append(_exact_row("evertse", Fraction(3 * 7 ** (2 * s + 3)), "Evertse", notes="upper bound on #X(S)"))
        rows.append(_exact_row("silverman", Fraction(7**s), "Silverman", notes="growth factor 7^r, constant omitted"))
        if s >= 2:
            def est(dd: int) -> BoundValue:
                S = BoundValue.exact(s, dd)
                return (3 * (S / S.log()).sqrt()).exp()

            rows.append(
                _enclosed_row("est", est, digits, "EST", True, "lower-bound envelope, constant unnormalized (c=1, eps=1)")
            )
        else:
            rows.append(BoundReport("est", None, None, False, "undefined for s < 2 (log s <= 0)", "EST"))
    if g is not None:
        if g < 2:
            raise ValidityError("genus must be >= 2")
        krzb = Fraction(84 * g * g - 98 * g + 28)
        rows.append(_exact_row("krzb", krzb, "KRZB", notes="#C(Q) bound, rank < g-2"))
        if g >= 3:
            mg = Fraction(21 * g * g - 30 * g)
            rows.append(_exact_row("mg-closed", mg, "Cor Mg", notes="r = g-3"))
            rows.append(BoundReport("krzb/mg", krzb / mg, None, True, "ratio of the two rows", "Cor Mg"))
    return rows


# --------------------------------------------------------------------------
# bad reduction


def stable_graph_caps(g: int) -> tuple[int, int]:
    """Maximal vertex and edge counts of a stable graph of genus g."""
    if g < 2:
        raise ValidityError("genus must be >= 2")
    return 2 * g - 2, 3 * g - 3


def bad_reduction_rows(g: int, s: int, r: int, d: int) -> list[BoundReport]:
    if g - r - 2 <= 0:
        raise ValidityError(f"edge disks need g-r-2 > 0 (g={g}, r={r})")
    k = r - d + 1
    vertex = Fraction(k * (g - r) + s, g - r - 1)
    edge = Fraction(k * (g - 1 - r) + s, g - r - 2)
    nv, ne = stable_graph_caps(g)
    return [
        _exact_row("vertex", vertex, "vertex disk bound"),
        _exact_row("edge", edge, "edge disk bound"),
        _exact_row("assembly", edge * 3 * g + vertex * 2 * g, "stable family bound", notes="3g edges, 2g vertices"),
        _exact_row("assembly-tight", edge * ne + vertex * nv, "stable graph caps", notes=f"{ne} edges, {nv} vertices"),
    ]


def gonality_check(g: int, r: int, d: int, gamma: int) -> tuple[bool, Fraction]:
    if g - r - 1 <= 0:
        raise ValidityError("g - r - 1 must be positive")
    if r < min(d, g - 1):
        raise ValidityError("r >= min(d, g-1) fails")
    bound = Fraction((r - d) * (g - r), g - r - 1)
    return gamma >= bound, bound


def degeneracy_codim(g: int, n: int, d0: int, r: int) -> int:
    """Codimension of the rank <= r locus of n+d0 vectors in a g-dim space."""
    if r < 0 or r > min(n + d0, g):
        raise DomainError(f"r must lie in [0, min(n+d0, g)] = [0, {min(n + d0, g)}]")
    return (n + d0 - r) * (g - r)
