"""Exact integer/rational helpers and outward-rounded real enclosures.

Exact values are plain ``int`` / ``fractions.Fraction``.  Anything that
needs a logarithm or a square root is carried as a :class:`BoundValue`,
a closed interval computed with mpmath's interval context, so that an
integer threshold derived from it is never silently off by one.
"""

from __future__ import annotations

import decimal
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import mpmath
from mpmath import iv
from mpmath.libmp import to_rational

DEFAULT_DIGITS = 50

Rational = Union[int, Fraction]


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class PrecisionError(ArithmeticError):
    """An enclosure is too wide to decide the requested question."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


# --------------------------------------------------------------------------
# elementary number theory


def _factor(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=4096)
def mobius(n: int) -> int:
    """Möbius function by trial division."""
    if n < 1:
        raise DomainError(f"mobius needs n >= 1, got {n}")
    fac = _factor(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple[int, ...]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


def divisors(n: int) -> list[int]:
    if n < 1:
        raise DomainError(f"divisors needs n >= 1, got {n}")
    return list(_divisors(n))


def valuation(n: Rational, p: int) -> int | None:
    """p-adic valuation of a nonzero rational; ``None`` for zero."""
    q = as_fraction(n)
    if q == 0:
        return None
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def floor_plus_one(t: Rational) -> int:
    """Least integer strictly greater than an exact rational."""
    return math.floor(as_fraction(t)) + 1


# --------------------------------------------------------------------------
# enclosures


@contextmanager
def _ivdps(digits: int):
    # mpmath's interval context keeps precision as global state
    old = iv.prec
    iv.dps = digits
    try:
        yield
    finally:
        iv.prec = old


def _to_iv(x, digits: int):
    with _ivdps(digits):
        if isinstance(x, BoundValue):
            return x._iv
        if isinstance(x, Fraction):
            return iv.mpf(x.numerator) / iv.mpf(x.denominator)
        if isinstance(x, int):
            return iv.mpf(x)
        if isinstance(x, str):
            q = Fraction(x)
            return iv.mpf(q.numerator) / iv.mpf(q.denominator)
        if isinstance(x, float):
            # floats are taken at face value (exactly representable)
            return iv.mpf(x)
    raise TypeError(f"cannot enclose {x!r}")


@dataclass(frozen=True, eq=False)
class BoundValue:
    """Closed real interval ``[lower, upper]`` at a working digit count."""

    _iv: object
    digits: int = DEFAULT_DIGITS

    # construction -------------------------------------------------------
    @classmethod
    def exact(cls, x, digits: int = DEFAULT_DIGITS) -> "BoundValue":
        return cls(_to_iv(x, digits), digits)

    @classmethod
    def interval(cls, lo, hi, digits: int = DEFAULT_DIGITS) -> "BoundValue":
        a, b = _to_iv(lo, digits), _to_iv(hi, digits)
        lo_t, hi_t = a._mpi_[0], b._mpi_[1]
        if _mpf_fraction(lo_t) > _mpf_fraction(hi_t):
            raise DomainError("lower > upper")
        with _ivdps(digits):
            v = iv.mpf([mpmath.mp.make_mpf(lo_t), mpmath.mp.make_mpf(hi_t)])
        return cls(v, digits)

    @classmethod
    def e(cls, digits: int = DEFAULT_DIGITS) -> "BoundValue":
        with _ivdps(digits):
            return cls(+iv.e, digits)

    # endpoints ----------------------------------------------------------
    # endpoints are taken from the raw binary tuples, so no rounding happens
    @property
    def lower(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._iv._mpi_[0])

    @property
    def upper(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._iv._mpi_[1])

    def lower_fraction(self) -> Fraction:
        return _mpf_fraction(self._iv._mpi_[0])

    def upper_fraction(self) -> Fraction:
        return _mpf_fraction(self._iv._mpi_[1])

    @property
    def width(self) -> mpmath.mpf:
        with mpmath.workdps(self.digits + 10):
            return self.upper - self.lower

    def relative_width(self) -> mpmath.mpf:
        with mpmath.workdps(self.digits + 10):
            m = max(abs(self.lower), abs(self.upper))
            return self.width / m if m else self.width

    def contains(self, x) -> bool:
        """True if the exact rational (or enclosure) ``x`` lies inside."""
        if isinstance(x, BoundValue):
            return self.lower <= x.lower and x.upper <= self.upper
        q = as_fraction(x)
        return self.lower_fraction() <= q <= self.upper_fraction()

    def certainly_lt(self, other) -> bool:
        o = other if isinstance(other, BoundValue) else BoundValue.exact(other, self.digits)
        return self.upper < o.lower

    def certainly_gt(self, other) -> bool:
        o = other if isinstance(other, BoundValue) else BoundValue.exact(other, self.digits)
        return self.lower > o.upper

    def midpoint(self) -> mpmath.mpf:
        with mpmath.workdps(self.digits + 10):
            return (self.lower + self.upper) / 2

    # arithmetic ---------------------------------------------------------
    def _bin(self, other, fn) -> "BoundValue":
        d = max(self.digits, other.digits if isinstance(other, BoundValue) else 0)
        a, b = _to_iv(self, d), _to_iv(other, d)
        with _ivdps(d):
            return BoundValue(fn(a, b), d)

    def __add__(self, o):
        return self._bin(o, lambda a, b: a + b)

    def __radd__(self, o):
        return self._bin(o, lambda a, b: b + a)

    def __sub__(self, o):
        return self._bin(o, lambda a, b: a - b)

    def __rsub__(self, o):
        return self._bin(o, lambda a, b: b - a)

    def __mul__(self, o):
        return self._bin(o, lambda a, b: a * b)

    def __rmul__(self, o):
        return self._bin(o, lambda a, b: b * a)

    def __truediv__(self, o):
        return self._bin(o, lambda a, b: a / b)

    def __rtruediv__(self, o):
        return self._bin(o, lambda a, b: b / a)

    def __pow__(self, o):
        return self._bin(o, lambda a, b: a**b)

    def __neg__(self):
        with _ivdps(self.digits):
            return BoundValue(-self._iv, self.digits)

    def _unary(self, fn) -> "BoundValue":
        with _ivdps(self.digits):
            return BoundValue(fn(self._iv), self.digits)

    def log(self) -> "BoundValue":
        if not self.lower > 0:
            raise DomainError("log of a non-positive enclosure")
        return self._unary(iv.log)

    def sqrt(self) -> "BoundValue":
        if self.lower < 0:
            raise DomainError("sqrt of a negative enclosure")
        return self._unary(iv.sqrt)

    def exp(self) -> "BoundValue":
        return self._unary(iv.exp)

    def with_digits(self, digits: int) -> "BoundValue":
        return BoundValue(self._iv, digits)

    # integer questions --------------------------------------------------
    def strict_ceiling(self) -> int:
        """Least integer strictly above the enclosed value.

        Raises :class:`PrecisionError` when the enclosure straddles an integer.
        """
        lo_f = math.floor(self.lower_fraction())
        hi_f = math.floor(self.upper_fraction())
        if lo_f != hi_f:
            raise PrecisionError(f"enclosure {self} straddles the integer {hi_f}")
        return hi_f + 1

    def __repr__(self) -> str:
        return format_bound(self)


def _mpf_fraction(t) -> Fraction:
    # the gmpy backend hands back mpz; keep Fractions on plain ints
    p, q = to_rational(t)
    return Fraction(int(p), int(q))


def _directed_decimal(x: Fraction, sig: int, up: bool) -> str:
    """``x`` to ``sig`` significant digits, rounded toward +inf if ``up``."""
    if x == 0:
        return "0"
    a = abs(x)
    e = len(str(a.numerator // a.denominator)) - 1 if a >= 1 else -len(str(a.denominator // a.numerator))
    while Fraction(10) ** e > a:
        e -= 1
    while Fraction(10) ** (e + 1) <= a:
        e += 1
    shift = sig - 1 - e
    scaled = x * Fraction(10) ** shift
    n = math.ceil(scaled) if up else math.floor(scaled)
    d = decimal.Decimal(n).scaleb(-shift)
    text = format(d, "f") if -30 <= e <= 30 else format(d, "e")
    if "." in text and "e" not in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_bound(b: BoundValue, shown: int = 20) -> str:
    """``[lo,hi]@digits`` with the endpoints rounded outward to ``shown`` digits."""
    lo = _directed_decimal(b.lower_fraction(), shown, up=False)
    hi = _directed_decimal(b.upper_fraction(), shown, up=True)
    return f"[{lo},{hi}]@{b.digits}"


def enclose(x, digits: int = DEFAULT_DIGITS) -> BoundValue:
    return x if isinstance(x, BoundValue) else BoundValue.exact(x, digits)


def strict_ceiling_with_retry(build: Callable[[int], BoundValue], digits: int = DEFAULT_DIGITS) -> tuple[int, BoundValue]:
    """Evaluate ``build(digits)``; on an ambiguous ceiling retry once at twice the digits."""
    val = build(digits)
    try:
        return val.strict_ceiling(), val
    except PrecisionError:
        val = build(2 * digits)
        return val.strict_ceiling(), val


# --------------------------------------------------------------------------


def loglog_threshold(x, y, digits: int = DEFAULT_DIGITS, check: bool = True) -> BoundValue:
    """Enclosure of ``(log y + log log y) / log x``.

    Under ``x > 1``, ``y > e`` and ``log x > 1 + log log y / log y`` every
    integer ``m`` above the returned value satisfies ``x**m / m > y``.
    With ``check=False`` the formula is evaluated without the hypotheses
    (it then carries no guarantee).
    """
    X, Y = enclose(x, digits), enclose(y, digits)
    if check:
        if not X.certainly_gt(1):
            raise DomainError("x > 1 fails")
        if not Y.certainly_gt(BoundValue.e(digits)):
            raise DomainError("y > e fails")
    ly = Y.log()
    lly = ly.log()
    lx = X.log()
    if check and not lx.certainly_gt(1 + lly / ly):
        raise DomainError("log(x) > 1 + log(log(y))/log(y) fails")
    return (ly + lly) / lx
