"""Dimension counts for moduli of maps between filtered affine spaces.

A shape ``(d; e)`` records the graded dimensions of a source and target
filtered affine space.  The parameter space of filtered maps from the
first to the second is an affine space of dimension ``J(d; e)``; this
module computes ``J`` exactly, an analytic upper bound for it, and the
resulting number of copies needed before the image of a product of such
maps is forced into a proper closed subscheme.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exactnum import (
    DEFAULT_DIGITS,
    BoundValue,
    DomainError,
    PrecisionError,
    enclose,
    floor_plus_one,
)


class Infeasible(ValueError):
    """The target is not larger than the source, so no bound exists."""


class WeightConvention(enum.Enum):
    WEIGHTED = "weighted"
    UNWEIGHTED = "unweighted"

    @classmethod
    def parse(cls, s: "str | WeightConvention") -> "WeightConvention":
        if isinstance(s, cls):
            return s
        try:
            return cls(str(s).lower())
        except ValueError:
            raise DomainError(f"unknown weight convention {s!r}") from None


@dataclass(frozen=True)
class FilteredShape:
    d: tuple[int, ...]
    e: tuple[int, ...]

    def __init__(self, d: Sequence[int], e: Sequence[int]):
        d, e = tuple(int(x) for x in d), tuple(int(x) for x in e)
        if len(d) != len(e) or not d:
            raise DomainError("d and e must be non-empty and of equal length")
        if min(d) < 0 or min(e) < 0:
            raise DomainError("dimensions must be non-negative")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return len(self.d)


def _multichoose(d: int, m: int) -> int:
    # binom(d + m - 1, m): monomials of degree m in d variables
    if m == 0:
        return 1
    if d == 0:
        return 0
    return math.comb(d + m - 1, m)


@lru_cache(maxsize=None)
def _count(d: tuple[int, ...], j: int, weighted: bool) -> int:
    n = len(d)

    @lru_cache(maxsize=None)
    def go(k: int, rest: int) -> int:
        # variables of weight k+1, k+2, ...; rest = weight still to place
        if rest == 0:
            return 1
        if k == n:
            return 0
        w = k + 1 if weighted else 1
        total = 0
        for m in range(rest // w + 1):
            c = _multichoose(d[k], m)
            if c:
                total += c * go(k + 1, rest - m * w)
        return total

    return go(0, j)


def count_Dj(shape: FilteredShape, j: int, conv: WeightConvention | str = WeightConvention.WEIGHTED) -> int:
    """``D_j``: number of monomials of (weighted) degree exactly j."""
    if j < 0:
        raise DomainError("j must be non-negative")
    conv = WeightConvention.parse(conv)
    return _count(shape.d, j, conv is WeightConvention.WEIGHTED)


def cumulative_D(shape: FilteredShape, i: int, conv: WeightConvention | str = WeightConvention.WEIGHTED) -> int:
    return sum(count_Dj(shape, j, conv) for j in range(i + 1))


def J_exact(shape: FilteredShape, conv: WeightConvention | str = WeightConvention.WEIGHTED) -> int:
    """``J = sum_i e_i * sum_{j<=i} D_j``."""
    conv = WeightConvention.parse(conv)
    total, cum = 0, 0
    for i in range(1, shape.n + 1):
        if i == 1:
            cum = count_Dj(shape, 0, conv) + count_Dj(shape, 1, conv)
        else:
            cum += count_Dj(shape, i, conv)
        total += shape.e[i - 1] * cum
    return total


def J_upper(r, alpha, beta, n: int, digits: int = DEFAULT_DIGITS) -> BoundValue:
    """Closed-form upper bound for J when ``d_1 = r``, ``d_i <= alpha^i``
    and ``e_i <= beta^i / i``.

    The formula splits on the sign of ``r - 2 e alpha``; an enclosure that
    cannot decide the sign raises :class:`PrecisionError`.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    R, A, B = enclose(r, digits), enclose(alpha, digits), enclose(beta, digits)
    if not B.certainly_gt(1):
        raise DomainError("beta > 1 fails")
    if not A.certainly_gt(1):
        raise DomainError("alpha > 1 fails")
    E = 2 * BoundValue.e(digits) * A
    n1 = BoundValue.exact(n + 1, digits)
    n2 = BoundValue.exact(n + 2, digits)
    Bn = B**n1
    if R.certainly_gt(E):
        t1 = Bn * R**n2 / ((R - E) * (B - 1) * (R - 1))
        t2 = E**n2 * Bn / ((B - 1) * (R - E) * (E * B - 1))
        return t1 + t2
    if R.certainly_lt(E):
        if not (B * R).certainly_gt(1):
            raise DomainError("beta * r > 1 fails")
        t1 = Bn * E**n2 / ((E - R) * (B - 1) * (E - 1))
        t2 = Bn * R**n2 / ((B - 1) * (E - R) * (B * R - 1))
        return t1 + t2
    raise PrecisionError("r is within enclosure width of 2*e*alpha; case split undecidable")


def nondensity_threshold(shape: FilteredShape, conv: WeightConvention | str = WeightConvention.WEIGHTED) -> int:
    """Least N with ``N > J / sum(e_i - d_i)``."""
    gap = sum(shape.e) - sum(shape.d)
    if gap <= 0:
        raise Infeasible(f"sum(e) - sum(d) = {gap} is not positive")
    return floor_plus_one(Fraction(J_exact(shape, conv), gap))


# --------------------------------------------------------------------------
# the S-unit assembly: J_upper <= (2r)^(n+2) <= 59 r^(...) log r


@dataclass(frozen=True)
class JChain:
    r: int
    n_real: BoundValue
    n_int: int
    j_upper: BoundValue
    power: BoundValue  # (2r)^(n_real + 2)
    display: BoundValue  # 59 r^((log r + log log r)/log 2 + 5) log r
    first_holds: bool
    second_holds: bool

    @property
    def ratio(self) -> BoundValue:
        """display / power: slack absorbed by the constant 59."""
        return self.display / self.power


def jestimate_chain(r: int, digits: int = DEFAULT_DIGITS) -> JChain:
    """Evaluate the chain of estimates behind the S-unit bound at rank r."""
    if r < 3:
        raise DomainError("r >= 3 needed for log log r > 0")
    R = BoundValue.exact(r, digits)
    l2 = BoundValue.exact(2, digits).log()
    lr = R.log()
    llr = lr.log()
    n_real = 2 + (lr + llr + l2 / lr) / l2
    lo_floor = math.floor(n_real.lower_fraction())
    if lo_floor != math.floor(n_real.upper_fraction()):
        raise PrecisionError("depth enclosure straddles an integer")
    n_int = max(1, lo_floor)
    ju = J_upper(r, 2, 2, n_int, digits)
    power = (2 * R) ** (n_real + 2)
    display = 59 * R ** ((lr + llr) / l2 + 5) * lr
    return JChain(
        r,
        n_real,
        n_int,
        ju,
        power,
        display,
        first_holds=not ju.certainly_gt(power),
        second_holds=power.certainly_lt(display),
    )


# --------------------------------------------------------------------------
# brute-force oracle


def monomial_count_bruteforce(d: Sequence[int], max_weight: int, weighted: bool = True) -> int:
    """Count monomials of weighted degree <= max_weight by enumeration.

    Variables of level k (there are ``d[k-1]`` of them) carry weight k.
    Independent of the multichoose recursion; used as a test oracle.
    """
    weights = []
    for k, dk in enumerate(d, start=1):
        weights.extend([k if weighted else 1] * dk)

    def go(idx: int, budget: int) -> int:
        if idx == len(weights):
            return 1
        w = weights[idx]
        return sum(go(idx + 1, budget - m * w) for m in range(budget // w + 1))

    return go(0, max_weight)


def J_bruteforce(shape: FilteredShape, weighted: bool = True) -> int:
    return sum(shape.e[i - 1] * monomial_count_bruteforce(shape.d, i, weighted) for i in range(1, shape.n + 1))
