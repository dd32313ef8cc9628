"""Truncated p-adic numbers, truncated power series and p-adic matrices.

Scalars use an absolute-precision model: a :class:`PadicScalar` is an
element of ``Z_p`` known modulo ``p**N``.  Addition and multiplication keep
the smaller precision; dividing by ``p**k * unit`` costs ``k`` digits.

Series are multivariate and truncated at a total-degree cap.  The cap
behaves like a precision too: it is the largest degree at which the
coefficients are known, so ``f + g`` has cap ``min(f.cap, g.cap)``,
differentiation lowers the cap by one and integration raises it by one.
Optionally a series carries formal symbols ``L_1..L_m`` standing for
``log t_i``; they enter polynomially and do not count toward the degree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactnum import DomainError, PrecisionError, valuation


class IntegrabilityError(ArithmeticError):
    """A 1-form or connection fails the integrability condition."""


def _check_prime(p: int) -> None:
    if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise DomainError(f"{p} is not prime")


def ilog(k: int, p: int) -> int:
    """Largest e with p**e <= k (k >= 1)."""
    e = 0
    while k >= p:
        k //= p
        e += 1
    return e


# --------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class PadicScalar:
    """Element of Z_p known modulo p**N; ``value`` is reduced."""

    p: int
    N: int
    value: int

    def __post_init__(self):
        if self.N < 0:
            raise PrecisionError("negative absolute precision")
        object.__setattr__(self, "value", self.value % self.p**self.N)

    @classmethod
    def from_rational(cls, q, p: int, N: int) -> "PadicScalar":
        q = Fraction(q)
        if q.denominator % p == 0:
            raise DomainError(f"{q} is not a {p}-adic integer")
        mod = p**N
        return cls(p, N, q.numerator * pow(q.denominator, -1, mod) % mod if N else 0)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def valuation(self) -> Optional[int]:
        """Exact valuation, or ``None`` when zero to the known precision."""
        if self.value == 0:
            return None
        return valuation(self.value, self.p)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.N > 0 and self.value % self.p != 0

    def _other(self, o) -> "PadicScalar":
        if isinstance(o, PadicScalar):
            if o.p != self.p:
                raise DomainError("mixing different primes")
            return o
        # exact rationals carry unlimited precision
        return PadicScalar.from_rational(o, self.p, self.N)

    def __add__(self, o):
        o = self._other(o)
        return PadicScalar(self.p, min(self.N, o.N), self.value + o.value)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.N, -self.value)

    def __sub__(self, o):
        return self + (-self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        o = self._other(o)
        return PadicScalar(self.p, min(self.N, o.N), self.value * o.value)

    __rmul__ = __mul__

    def inv(self) -> "PadicScalar":
        if self.is_zero():
            raise PrecisionError("inverse of an element that is zero to precision")
        if not self.is_unit():
            raise DomainError("inverse of a non-unit is not in Z_p")
        return PadicScalar(self.p, self.N, pow(self.value, -1, self.modulus))

    def __truediv__(self, o):
        o = self._other(o) if not isinstance(o, int) else o
        if isinstance(o, int):
            return self.div_int(o)
        if o.is_zero():
            raise PrecisionError("division by an element that is zero to precision")
        k = o.valuation
        va = self.valuation
        newN = min(self.N, o.N) - k
        if newN <= 0:
            raise PrecisionError(f"division by p^{k} exhausts precision {min(self.N, o.N)}")
        if va is not None and va < k:
            raise DomainError("quotient is not a p-adic integer")
        unit = o.value // self.p**k
        num = self.value // self.p**k if va is not None else 0
        return PadicScalar(self.p, newN, num * pow(unit, -1, self.p**newN))

    def div_int(self, k: int) -> "PadicScalar":
        """Division by an exact nonzero integer."""
        if k == 0:
            raise ZeroDivisionError("division by zero")
        vk = valuation(k, self.p)
        newN = self.N - vk
        if newN < 0:
            raise PrecisionError(f"division by {k} exhausts precision {self.N}")
        va = self.valuation
        if va is not None and va < vk:
            raise DomainError("quotient is not a p-adic integer")
        u = k // self.p**vk
        num = self.value // self.p**vk if va is not None else 0
        mod = self.p**newN
        return PadicScalar(self.p, newN, num * pow(u, -1, mod) if newN else 0)

    def lift(self) -> int:
        return self.value

    def reduce(self, N: int) -> "PadicScalar":
        if N > self.N:
            raise PrecisionError("cannot raise precision")
        return PadicScalar(self.p, N, self.value)

    def agrees(self, o) -> bool:
        """Equality modulo the smaller of the two precisions."""
        o = self._other(o)
        n = min(self.N, o.N)
        return (self.value - o.value) % self.p**n == 0

    def __str__(self) -> str:
        return format_padic(self)


def format_padic(a: PadicScalar) -> str:
    """``u*p^v+O(p^N)``; ``O(p^N)`` for zero."""
    if a.is_zero():
        return f"O({a.p}^{a.N})"
    v = a.valuation
    u = a.value // a.p**v
    head = str(u) if v == 0 else f"{u}*{a.p}^{v}"
    return f"{head}+O({a.p}^{a.N})"


def parse_padic(s: str, p: int) -> PadicScalar:
    s = s.strip()
    if "O(" not in s:
        raise DomainError(f"missing precision in {s!r}")
    head, _, tail = s.rpartition("O(")
    base, _, N = tail.rstrip(")").partition("^")
    if int(base) != p:
        raise DomainError(f"prime mismatch in {s!r}")
    N = int(N)
    head = head.rstrip("+").strip()
    if not head:
        return PadicScalar(p, N, 0)
    u, _, pv = head.partition("*")
    v = int(pv.split("^")[1]) if pv else 0
    return PadicScalar(p, N, int(u) * p**v)


def padic_arith(op: str, a: PadicScalar, b: Optional[PadicScalar] = None) -> PadicScalar:
    if op == "inv":
        return a.inv()
    if b is None:
        raise DomainError(f"{op} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise DomainError(f"unknown op {op!r}")


def padic_log(u: PadicScalar) -> PadicScalar:
    """p-adic logarithm of a 1-unit.

    Terms ``(u-1)^k / k`` are summed exactly as rationals until every later
    term has valuation ``k v - log_p k >= N``.  Since ``log`` is an isometry
    on ``1 + pZ_p`` (p odd), the result is known to the input precision.
    """
    p, N = u.p, u.N
    x = u.value - 1
    if N == 0:
        return PadicScalar(p, 0, 0)
    if x % p:
        raise DomainError("padic_log needs u = 1 mod p")
    if p == 2 and N >= 2 and x % 4:
        raise DomainError("for p = 2 the series needs u = 1 mod 4")
    if x % p**N == 0:
        return PadicScalar(p, N, 0)
    v = valuation(x, p)
    total = Fraction(0)
    k = 1
    power = Fraction(1)
    while True:
        power *= x
        if k * v - ilog(k, p) >= N:
            # k v - log_p k is non-decreasing in k when v >= 1
            break
        total += (-1) ** (k + 1) * power / k
        k += 1
    return PadicScalar.from_rational(total, p, N)


# --------------------------------------------------------------------------
# coefficient rings


class Ring:
    tag = "?"

    def coerce(self, c):
        raise NotImplementedError

    def is_zero(self, c) -> bool:
        raise NotImplementedError

    def div_int(self, c, k: int):
        raise NotImplementedError

    def fmt(self, c) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError


class RationalRing(Ring):
    tag = "QQ"

    def coerce(self, c):
        if isinstance(c, PadicScalar):
            raise DomainError("p-adic coefficient in a rational series")
        return Fraction(c)

    def is_zero(self, c) -> bool:
        return c == 0

    def div_int(self, c, k: int):
        return c / k

    def fmt(self, c) -> str:
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"

    def parse(self, s: str):
        return Fraction(s)

    def __eq__(self, o):
        return isinstance(o, RationalRing)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalRing()


@dataclass(frozen=True, eq=True)
class PadicRing(Ring):
    p: int
    N: int
    tag = "Zp"

    def __post_init__(self):
        _check_prime(self.p)

    def coerce(self, c):
        if isinstance(c, PadicScalar):
            if c.p != self.p:
                raise DomainError("prime mismatch")
            return c.reduce(min(c.N, self.N))
        return PadicScalar.from_rational(c, self.p, self.N)

    def is_zero(self, c) -> bool:
        return c.is_zero()

    def div_int(self, c, k: int):
        return c.div_int(k)

    def fmt(self, c) -> str:
        return format_padic(c)

    def parse(self, s: str):
        return parse_padic(s, self.p)


AnyRing = Union[RationalRing, PadicRing]


# --------------------------------------------------------------------------
# truncated series


Key = tuple


class TruncSeries:
    """Polynomial truncation of a power series in ``t_1..t_m``.

    ``terms`` maps exponent tuples to coefficients.  With ``logs=True``
    a key has length ``2m``; its last ``m`` entries are the exponents of
    ``L_1..L_m``.  Only the first ``m`` entries count toward the cap.
    """

    __slots__ = ("ring", "names", "cap", "terms", "logs")

    def __init__(self, names: Sequence[str], cap: int, terms: Optional[Mapping] = None, ring: AnyRing = QQ, logs: bool = False):
        if cap < 0:
            raise DomainError("cap must be >= 0")
        self.ring = ring
        self.names = tuple(names)
        self.cap = cap
        self.logs = logs
        m = len(self.names)
        width = 2 * m if logs else m
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(int(x) for x in k)
            if len(k) != width or min(k, default=0) < 0:
                raise DomainError(f"bad exponent {k} for {width} slots")
            if sum(k[:m]) > cap:
                continue
            c = ring.coerce(c)
            if not ring.is_zero(c):
                clean[k] = clean[k] + c if k in clean else c
                if ring.is_zero(clean[k]):
                    del clean[k]
        self.terms = clean

    # construction -------------------------------------------------------
    def _like(self, terms, cap=None, logs=None) -> "TruncSeries":
        return TruncSeries(self.names, self.cap if cap is None else cap, terms, self.ring, self.logs if logs is None else logs)

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def width(self) -> int:
        return 2 * self.m if self.logs else self.m

    def zero_key(self) -> Key:
        return (0,) * self.width

    @classmethod
    def constant(cls, c, names, cap, ring: AnyRing = QQ, logs: bool = False) -> "TruncSeries":
        w = 2 * len(names) if logs else len(names)
        return cls(names, cap, {(0,) * w: c}, ring, logs)

    @classmethod
    def variable(cls, i: int, names, cap, ring: AnyRing = QQ, logs: bool = False) -> "TruncSeries":
        w = 2 * len(names) if logs else len(names)
        k = [0] * w
        k[i] = 1
        return cls(names, cap, {tuple(k): 1}, ring, logs)

    @classmethod
    def log_symbol(cls, i: int, names, cap, ring: AnyRing = QQ) -> "TruncSeries":
        m = len(names)
        k = [0] * (2 * m)
        k[m + i] = 1
        return cls(names, cap, {tuple(k): 1}, ring, True)

    @classmethod
    def from_poly(cls, coeffs: Mapping, names, cap, ring: AnyRing = QQ) -> "TruncSeries":
        return cls(names, cap, coeffs, ring)

    def zero(self) -> "TruncSeries":
        return self._like({})

    def one(self) -> "TruncSeries":
        return self._like({self.zero_key(): 1})

    # inspection ---------------------------------------------------------
    def tdeg(self, k: Key) -> int:
        return sum(k[: self.m])

    def coeff(self, k: Sequence[int]):
        k = tuple(k)
        if len(k) == self.m and self.logs:
            k = k + (0,) * self.m
        return self.terms.get(k, self.ring.coerce(0))

    def constant_term(self):
        return self.terms.get(self.zero_key(), self.ring.coerce(0))

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> Optional[int]:
        """Lowest t-degree present, ``None`` for the zero series."""
        return min((self.tdeg(k) for k in self.terms), default=None)

    def degree(self) -> Optional[int]:
        return max((self.tdeg(k) for k in self.terms), default=None)

    def has_logs(self) -> bool:
        return self.logs and any(any(k[self.m :]) for k in self.terms)

    def homogeneous(self, d: int) -> "TruncSeries":
        return self._like({k: c for k, c in self.terms.items() if self.tdeg(k) == d})

    def truncate(self, cap: int) -> "TruncSeries":
        if cap > self.cap:
            raise DomainError("truncate cannot raise the cap")
        return self._like(self.terms, cap=cap)

    def is_constant(self) -> bool:
        return all(k == self.zero_key() for k in self.terms)

    # compatibility --------------------------------------------------------
    def _coerce_other(self, o) -> "TruncSeries":
        if isinstance(o, TruncSeries):
            if o.names != self.names:
                raise DomainError(f"variable mismatch {self.names} vs {o.names}")
            if o.ring != self.ring:
                raise DomainError(f"ring mismatch {self.ring!r} vs {o.ring!r}")
            if o.logs != self.logs:
                return o.with_logs() if self.logs else o
            return o
        return self._like({self.zero_key(): o})

    def with_logs(self) -> "TruncSeries":
        if self.logs:
            return self
        pad = (0,) * self.m
        return TruncSeries(self.names, self.cap, {k + pad: c for k, c in self.terms.items()}, self.ring, True)

    def _align(self, o):
        o = self._coerce_other(o)
        a = self.with_logs() if o.logs and not self.logs else self
        return a, o

    # arithmetic -----------------------------------------------------------
    def __add__(self, o):
        a, b = self._align(o)
        t = dict(a.terms)
        for k, c in b.terms.items():
            t[k] = t[k] + c if k in t else c
        return a._like(t, cap=min(a.cap, b.cap))

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, o):
        a, b = self._align(o)
        return a + (-b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, TruncSeries):
            c = self.ring.coerce(o)
            return self._like({k: v * c for k, v in self.terms.items()})
        a, b = self._align(o)
        cap = min(a.cap, b.cap)
        m = a.m
        t: dict = {}
        for k1, c1 in a.terms.items():
            d1 = sum(k1[:m])
            for k2, c2 in b.terms.items():
                if d1 + sum(k2[:m]) > cap:
                    continue
                k = tuple(x + y for x, y in zip(k1, k2))
                c = c1 * c2
                t[k] = t[k] + c if k in t else c
        return a._like(t, cap=cap)

    def __rmul__(self, o):
        return self * o

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale_div(self, k: int) -> "TruncSeries":
        return self._like({key: self.ring.div_int(c, k) for key, c in self.terms.items()})

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse of a series with unit constant term."""
        if self.has_logs():
            raise DomainError("inverse of a series containing log symbols")
        c0 = self.constant_term()
        if self.ring.is_zero(c0):
            raise DomainError("constant term is zero; not a unit")
        if isinstance(self.ring, PadicRing):
            inv0 = c0.inv()
        else:
            inv0 = 1 / c0
        h = self * inv0 - 1  # order >= 1
        out = self.one()
        term = self.one()
        for _ in range(self.cap):
            term = term * (-h)
            if term.is_zero():
                break
            out = out + term
        return out * inv0

    def __truediv__(self, o):
        if isinstance(o, TruncSeries):
            return self * o.inverse()
        if isinstance(o, int):
            return self.scale_div(o)
        return self * (1 / Fraction(o) if self.ring == QQ else self.ring.coerce(o).inv())

    # calculus -------------------------------------------------------------
    def diff(self, i: int) -> "TruncSeries":
        """Partial derivative in ``t_i``; the cap drops by one."""
        m = self.m
        t: dict = {}

        def put(k, c):
            t[k] = t[k] + c if k in t else c

        for k, c in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                put(tuple(kk), c * k[i])
            if self.logs and k[m + i]:
                if k[i] == 0:
                    raise DomainError("d/dt of a log symbol leaves the power-series ring; use euler()")
                kk = list(k)
                kk[i] -= 1
                kk[m + i] -= 1
                put(tuple(kk), c * k[m + i])
        return self._like(t, cap=max(self.cap - 1, 0))

    def euler(self, i: int) -> "TruncSeries":
        """``theta_i = t_i d/dt_i``; ``theta_i L_i = 1``.  Keeps the cap."""
        m = self.m
        t: dict = {}

        def put(k, c):
            t[k] = t[k] + c if k in t else c

        for k, c in self.terms.items():
            if k[i]:
                put(k, c * k[i])
            if self.logs and k[m + i]:
                kk = list(k)
                kk[m + i] -= 1
                put(tuple(kk), c * k[m + i])
        return self._like(t)

    def integrate(self, i: int) -> "TruncSeries":
        """Antiderivative in ``t_i`` vanishing on ``t_i = 0``; the cap rises by one."""
        m = self.m
        t: dict = {}
        for k, c in self.terms.items():
            if self.logs and k[m + i]:
                raise DomainError("integrating a term in L_i is not supported")
            kk = list(k)
            kk[i] += 1
            t[tuple(kk)] = self.ring.div_int(c, k[i] + 1)
        return self._like(t, cap=self.cap + 1)

    def mul_var(self, i: int) -> "TruncSeries":
        """Multiply by ``t_i``; the cap rises by one."""
        t = {}
        for k, c in self.terms.items():
            kk = list(k)
            kk[i] += 1
            t[tuple(kk)] = c
        return self._like(t, cap=self.cap + 1)

    def drop_logs(self) -> "TruncSeries":
        """Keep only the log-free part, as a plain series."""
        if not self.logs:
            return self
        m = self.m
        return TruncSeries(self.names, self.cap, {k[:m]: c for k, c in self.terms.items() if not any(k[m:])}, self.ring, False)

    # substitution -------------------------------------------------------
    def compose(self, subs: Sequence["TruncSeries"]) -> "TruncSeries":
        """``f(g_1, ..., g_m)`` for series ``g_i`` without constant term.

        The result lives in the variables of the ``g_i`` and is known up to
        ``min(f.cap, g_i.cap)``.
        """
        if len(subs) != self.m:
            raise DomainError(f"need {self.m} substitutions, got {len(subs)}")
        if self.has_logs():
            raise DomainError("cannot compose a series with log symbols")
        g0 = subs[0]
        for g in subs:
            if g.names != g0.names or g.ring != self.ring:
                raise DomainError("substituted series must share variables and ring")
            if not g.ring.is_zero(g.constant_term()):
                raise DomainError("substituted series must vanish at the origin")
            if g.has_logs():
                raise DomainError("substituted series must be free of log symbols")
        cap = min([self.cap] + [g.cap for g in subs])
        gs = [g.drop_logs().truncate(cap) if g.cap > cap else g.drop_logs() for g in subs]
        out = TruncSeries(g0.names, cap, {}, self.ring)
        powers: list[dict[int, TruncSeries]] = [{0: out.one()} for _ in gs]

        def pw(j: int, e: int) -> TruncSeries:
            cache = powers[j]
            if e not in cache:
                cache[e] = pw(j, e - 1) * gs[j]
            return cache[e]

        for k, c in self.drop_logs().terms.items():
            if sum(k) > cap:
                continue
            term = out.one() * c
            for j, e in enumerate(k):
                if e:
                    term = term * pw(j, e)
            out = out + term
        return out

    def restrict(self, assignments: Mapping[int, "TruncSeries"]) -> "TruncSeries":
        """Substitute some variables by series in the same variables."""
        subs = [assignments.get(j, TruncSeries.variable(j, self.names, self.cap, self.ring)) for j in range(self.m)]
        return self.compose(subs)

    # evaluation -----------------------------------------------------------
    def evaluate_exact(self, point: Sequence) -> Fraction:
        """Value of the retained polynomial at a rational point."""
        if self.ring != QQ:
            raise DomainError("exact evaluation needs rational coefficients")
        if self.has_logs():
            raise DomainError("log symbols are not evaluated")
        pt = [Fraction(x) for x in point]
        if len(pt) != self.m:
            raise DomainError("point has the wrong dimension")
        total = Fraction(0)
        for k, c in self.terms.items():
            term = c
            for x, e in zip(pt, k[: self.m]):
                if e:
                    term *= x**e
            total += term
        return total

    def evaluate(self, point: Sequence, p: int, N: int, tail_loss: Optional[int] = None) -> PadicScalar:
        """p-adic value at a point of the residue disk around the origin.

        The omitted tail starts in degree ``cap+1`` and is assumed to have
        coefficients of valuation ``>= -log_p(k)`` in degree k, as for
        integrals of forms with p-integral coefficients.  ``tail_loss``
        overrides ``log_p(cap+1)``.  The result's precision is
        ``min(N, (cap+1) v - tail_loss)`` where v is the least valuation of
        a coordinate of the point.
        """
        if self.has_logs():
            raise DomainError("log symbols are not evaluated")
        pt = [Fraction(x.lift()) if isinstance(x, PadicScalar) else Fraction(x) for x in point]
        if len(pt) != self.m:
            raise DomainError("point has the wrong dimension")
        vs = [valuation(x, p) for x in pt]
        if any(v is not None and v < 1 for v in vs):
            raise DomainError("point lies outside the residue disk (needs valuation >= 1)")
        v = min((x for x in vs if x is not None), default=None)
        loss = ilog(self.cap + 1, p) if tail_loss is None else tail_loss
        prec = N if v is None else min(N, (self.cap + 1) * v - loss)
        if prec <= 0:
            raise PrecisionError("truncation leaves no significant digits at this point")
        if self.ring == QQ:
            val = self.evaluate_exact(pt)
            return PadicScalar.from_rational(val, p, prec)
        total = PadicScalar(p, prec, 0)
        for k, c in self.terms.items():
            mono = Fraction(1)
            for x, e in zip(pt, k):
                mono *= x**e
            total = total + c * PadicScalar.from_rational(mono, p, prec)
        return total.reduce(min(prec, total.N))

    # comparison / io ------------------------------------------------------
    def agrees(self, o: "TruncSeries", upto: Optional[int] = None) -> bool:
        """Coefficientwise equality in t-degrees ``<= upto`` (default: common cap)."""
        a, b = self._align(o)
        d = min(a.cap, b.cap) if upto is None else upto
        diff = a - b
        return all(diff.tdeg(k) > d for k in diff.terms)

    def __eq__(self, o) -> bool:
        if not isinstance(o, TruncSeries):
            return NotImplemented
        return (self.names, self.cap, self.ring, self.logs, self.terms) == (o.names, o.cap, o.ring, o.logs, o.terms)

    def __hash__(self):
        return hash((self.names, self.cap, frozenset(self.terms)))

    def to_record(self) -> dict:
        rec = {
            "vars": list(self.names),
            "cap": self.cap,
            "ring": self.ring.tag,
            "logs": self.logs,
            "terms": {",".join(map(str, k)): self.ring.fmt(c) for k, c in sorted(self.terms.items())},
        }
        if isinstance(self.ring, PadicRing):
            rec["p"], rec["N"] = self.ring.p, self.ring.N
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> "TruncSeries":
        try:
            names = list(rec["vars"])
            cap = int(rec["cap"])
            tag = rec.get("ring", "QQ")
            ring: AnyRing = QQ if tag == "QQ" else PadicRing(int(rec["p"]), int(rec["N"]))
            logs = bool(rec.get("logs", False))
            terms = {}
            for ks, cs in dict(rec.get("terms", {})).items():
                k = tuple(int(x) for x in str(ks).split(",")) if str(ks) else ()
                terms[k] = ring.parse(str(cs))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed series record: {exc}") from None
        return cls(names, cap, terms, ring, logs)

    def __repr__(self) -> str:
        if not self.terms:
            return f"0 + O(deg {self.cap + 1})"
        parts = []
        labels = list(self.names) + [f"L{n}" for n in self.names] if self.logs else list(self.names)
        for k, c in sorted(self.terms.items(), key=lambda kc: (self.tdeg(kc[0]), kc[0])):
            mono = "*".join(f"{labels[i]}^{e}" if e > 1 else labels[i] for i, e in enumerate(k) if e)
            cs = self.ring.fmt(c)
            parts.append(cs if not mono else (mono if cs == "1" else f"{cs}*{mono}"))
        return " + ".join(parts) + f" + O(deg {self.cap + 1})"


def series_arith(op: str, f: TruncSeries, g: Optional[TruncSeries] = None, var: int = 0) -> TruncSeries:
    if op == "diff":
        return f.diff(var)
    if g is None:
        raise DomainError(f"{op} needs two operands")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op in ("mul", "truncmul"):
        return f * g
    raise DomainError(f"unknown op {op!r}")


def is_closed(form: Sequence[TruncSeries]) -> bool:
    """``d/dt_j f_i == d/dt_i f_j`` for all pairs, up to the known degree."""
    m = len(form)
    for i in range(m):
        for j in range(i + 1, m):
            if not form[i].diff(j).agrees(form[j].diff(i)):
                return False
    return True


def antiderivative(form: Sequence[TruncSeries], residues: Optional[Sequence] = None) -> TruncSeries:
    """F with ``dF = sum_i f_i dt_i + sum_i c_i dt_i/t_i`` and ``F(0) = 0``.

    ``residues`` are the constants ``c_i``; a nonzero one contributes
    ``c_i L_i`` and needs log symbols enabled on the input series.
    """
    if not form:
        raise DomainError("empty form")
    f0 = form[0]
    m = f0.m
    if len(form) != m:
        raise DomainError(f"a 1-form on {m} variables needs {m} components")
    if any(f.has_logs() for f in form):
        raise DomainError("form coefficients must be free of log symbols")
    if not is_closed(form):
        raise IntegrabilityError("form is not closed")
    cap = min(f.cap for f in form)
    terms: dict = {}
    for i, f in enumerate(form):
        for k, c in f.terms.items():
            k = k[:m]
            kk = list(k)
            kk[i] += 1
            kk = tuple(kk)
            q = f.ring.div_int(c, sum(k) + 1)
            terms[kk] = terms[kk] + q if kk in terms else q
    F = TruncSeries(f0.names, cap + 1, terms, f0.ring)
    if residues is not None and any(not _is_zero_scalar(c) for c in residues):
        if not f0.logs:
            raise DomainError("a dt/t term needs log symbols enabled")
        F = F.with_logs()
        for i, c in enumerate(residues):
            if not _is_zero_scalar(c):
                F = F + TruncSeries.log_symbol(i, f0.names, F.cap, f0.ring) * c
    elif f0.logs:
        F = F.with_logs()
    return F


def _is_zero_scalar(c) -> bool:
    return c.is_zero() if isinstance(c, PadicScalar) else c == 0


def exterior_derivative(F: TruncSeries) -> list[TruncSeries]:
    return [F.diff(i) for i in range(F.m)]


# --------------------------------------------------------------------------
# matrices


def _det(rows: list[list[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(rows)
    if n == 0:
        return 1
    a = [r[:] for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class PadicMatrix:
    p: int
    N: int
    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Iterable[Iterable], p: int, N: int):
        _check_prime(p)
        mod = p**N
        rr = []
        for r in rows:
            rr.append(tuple((x.lift() if isinstance(x, PadicScalar) else PadicScalar.from_rational(x, p, N).value) % mod for x in r))
        if rr and len({len(r) for r in rr}) != 1:
            raise DomainError("matrix rows must have equal length")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "rows", tuple(rr))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def entry(self, i: int, j: int) -> PadicScalar:
        return PadicScalar(self.p, self.N, self.rows[i][j])

    def minor(self, ri: Sequence[int], ci: Sequence[int]) -> PadicScalar:
        return PadicScalar(self.p, self.N, _det([[self.rows[i][j] for j in ci] for i in ri]))

    def minors(self, k: int):
        nr, nc = self.shape
        for ri in itertools.combinations(range(nr), k):
            for ci in itertools.combinations(range(nc), k):
                yield (ri, ci), self.minor(ri, ci)

    def matmul(self, o: "PadicMatrix") -> "PadicMatrix":
        if self.p != o.p:
            raise DomainError("prime mismatch")
        n = min(self.N, o.N)
        cols = list(zip(*o.rows))
        return PadicMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows], self.p, n)

    def to_record(self) -> dict:
        return {"p": self.p, "N": self.N, "rows": [[format_padic(self.entry(i, j)) for j in range(self.shape[1])] for i in range(self.shape[0])]}


def rank_at_precision(M: PadicMatrix, tol_val: int = 0) -> tuple[int, bool]:
    """Rank read off from minor valuations.

    ``rank`` is the largest k having a k x k minor of valuation
    ``< N - tol_val``; that many independent directions are certain.
    ``certified`` says whether every ``(rank+1)``-minor is zero modulo
    ``p**N``, i.e. whether the data also rule out a larger rank.
    """
    if not 0 <= tol_val < M.N:
        raise DomainError("need 0 <= tol_val < N")
    nr, nc = M.shape
    cut = M.N - tol_val
    rank = 0
    for k in range(1, min(nr, nc) + 1):
        if any(not mn.is_zero() and mn.valuation < cut for _, mn in M.minors(k)):
            rank = k
        else:
            break
    if rank == min(nr, nc):
        return rank, True
    certified = all(mn.is_zero() for _, mn in M.minors(rank + 1))
    return rank, certified
