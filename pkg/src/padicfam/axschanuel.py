"""Rank, kernel and first-integral extraction for a pulled-back connection form.

Given the coordinates ``omega_1..omega_n`` of a Lie-algebra valued 1-form
and a parametrised germ ``phi: (w) -> (z)`` of a subvariety, the pulled
back matrix ``M[a][b] = sum_k Omega_{a,k}(phi) dphi_k/dw_b`` describes how
the form restricts.  Its left kernel is spanned by covectors
``v*_i + sum_j f_ij v*_j``.  If some ``f_ij`` is non-constant it is a first
integral of the foliation and cuts the germ down; if all are constant
the form takes values in a proper subalgebra.

Everything is decided on truncated series, so every verdict is only
certified up to the working cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .exactnum import DomainError
from .padic import QQ, TruncSeries


class DegenerateChart(DomainError):
    """No block of the pulled-back form is invertible at the basepoint."""


@dataclass(frozen=True)
class GForm:
    """Coordinates of a g-valued 1-form: ``coeffs[a][k]`` multiplies ``dz_k``."""

    names: tuple[str, ...]
    coeffs: tuple[tuple[TruncSeries, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "coeffs", tuple(tuple(r) for r in self.coeffs))
        for r in self.coeffs:
            if len(r) != len(self.names):
                raise DomainError("each coordinate needs one coefficient per ambient variable")
            for c in r:
                if c.names != self.names:
                    raise DomainError("coefficient series use the wrong variables")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def cap(self) -> int:
        return min(c.cap for r in self.coeffs for c in r)

    def rows(self, idx: Sequence[int]) -> "GForm":
        return GForm(self.names, tuple(self.coeffs[i] for i in idx))

    @classmethod
    def from_connection(cls, L) -> "GForm":
        """Strictly-lower entries of a unipotent connection as coordinates."""
        rows = []
        for i in range(L.dim):
            for j in range(i):
                rows.append(tuple(A[i][j] for A in L.components))
        return cls(L.names, tuple(rows))

    def to_record(self) -> dict:
        return {"ambient": list(self.names), "omega": [[c.to_record() for c in r] for r in self.coeffs]}


@dataclass(frozen=True)
class SubvarietyChart:
    params: tuple[str, ...]
    maps: tuple[TruncSeries, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "maps", tuple(self.maps))
        for f in self.maps:
            if f.names != self.params:
                raise DomainError("chart maps must be series in the chart parameters")
            if f.constant_term() != 0:
                raise DomainError("chart must send the basepoint to the ambient origin")

    @property
    def cap(self) -> int:
        return min(f.cap for f in self.maps)

    def is_point(self) -> bool:
        return all(f.is_zero() for f in self.maps)

    def to_record(self) -> dict:
        return {"params": list(self.params), "maps": [f.to_record() for f in self.maps]}


@dataclass(frozen=True)
class PulledBackForm:
    M: tuple[tuple[TruncSeries, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.M), (len(self.M[0]) if self.M else 0)

    @property
    def cap(self) -> int:
        return min(c.cap for r in self.M for c in r)


def pull_back(omega: GForm, V: SubvarietyChart) -> PulledBackForm:
    if len(V.maps) != len(omega.names):
        raise DomainError("chart dimension does not match the ambient space")
    if omega.cap != V.cap:
        raise DomainError(f"cap mismatch: form {omega.cap}, chart {V.cap}")
    jac = [[f.diff(b) for b in range(len(V.params))] for f in V.maps]
    M = []
    for row in omega.coeffs:
        comp = [c.compose(list(V.maps)) for c in row]
        out = []
        for b in range(len(V.params)):
            acc = comp[0] * jac[0][b]
            for k in range(1, len(comp)):
                acc = acc + comp[k] * jac[k][b]
            out.append(acc)
        M.append(tuple(out))
    return PulledBackForm(tuple(M))


def _det(rows: list[list[TruncSeries]]) -> TruncSeries:
    n = len(rows)
    total = None
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        if inv % 2:
            term = -term
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    leading_term: tuple  # (exponent, coefficient) of the minor's lowest-degree term
    cap: int


def _lowest_term(f: TruncSeries):
    k = min(f.terms, key=lambda e: (f.tdeg(e), tuple(-x for x in e)))
    return k, f.terms[k]


def generic_rank(P: PulledBackForm) -> RankCertificate:
    """Largest r with a nonzero r x r minor at the working cap."""
    nr, nc = P.shape
    best = RankCertificate(0, (), (), ((), Fraction(1)), P.cap)
    for r in range(1, min(nr, nc) + 1):
        found = None
        for ri in itertools.combinations(range(nr), r):
            for ci in itertools.combinations(range(nc), r):
                d = _det([[P.M[i][j] for j in ci] for i in ri])
                if not d.is_zero():
                    o = d.order()
                    if found is None or o < found[0]:
                        found = (o, ri, ci, _lowest_term(d))
                    if o == 0:
                        break
            if found is not None and found[0] == 0:
                break
        if found is None:
            break
        best = RankCertificate(r, found[1], found[2], found[3], P.cap)
    return best


# --------------------------------------------------------------------------
# kernel and verdicts


@dataclass(frozen=True)
class SubalgebraDescent:
    basis: tuple[tuple[Fraction, ...], ...]  # spanning vectors of h in g-coordinates
    certificate: str


@dataclass(frozen=True)
class FirstIntegral:
    f: TruncSeries
    vanishing_fn: TruncSeries
    source: tuple[int, int]  # (kernel row, pivot column) of the chosen f_ij
    certificate: str


@dataclass(frozen=True)
class FullRank:
    certificate: str


Verdict = Union[SubalgebraDescent, FirstIntegral, FullRank]


@dataclass(frozen=True)
class KernelAnalysis:
    rank: int
    pivots: tuple[int, ...]
    kernel_rows: tuple[int, ...]
    kernel_basis: tuple[dict, ...]  # one {coordinate: series} per covector
    verdict: Verdict
    cap: int

    def covector(self, i: int) -> list[TruncSeries]:
        return [self.kernel_basis[i].get(a) for a in range(len(self.pivots) + len(self.kernel_rows))]


def _solve_unit(B: list[list[TruncSeries]], rhs: list[list[TruncSeries]]) -> list[list[TruncSeries]]:
    """``X`` with ``X B = rhs`` for a block ``B`` invertible over the local ring."""
    n = len(B)
    # Gauss-Jordan on columns of B^T: solve B^T X^T = rhs^T
    A = [[B[j][i] for j in range(n)] for i in range(n)]
    R = [[rhs[k][i] for k in range(len(rhs))] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c].constant_term() != 0), None)
        if piv is None:
            raise DegenerateChart("no unit pivot in the chosen block")
        A[c], A[piv] = A[piv], A[c]
        R[c], R[piv] = R[piv], R[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        R[c] = [x * inv for x in R[c]]
        for r in range(n):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
                R[r] = [x - f * y for x, y in zip(R[r], R[c])]
    # R[i][k] = X[k][i]
    return [[R[i][k] for i in range(n)] for k in range(len(rhs))]


def _unit_block(P: PulledBackForm, r: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    nr, nc = P.shape
    for ri in itertools.combinations(range(nr), r):
        for ci in itertools.combinations(range(nc), r):
            d = _det([[P.M[i][j] for j in ci] for i in ri])
            if d.constant_term() != 0:
                return ri, ci
    raise DegenerateChart(f"no {r} x {r} block of the pulled-back form is a unit at the basepoint")


def _normalise(f: TruncSeries) -> TruncSeries:
    g = f - f.constant_term()
    _, c = _lowest_term(g)
    return g * (1 / c)


def kernel_analysis(P: PulledBackForm, rank: Optional[int] = None) -> KernelAnalysis:
    """Left kernel of ``M`` over the fraction field and the resulting verdict."""
    nr, nc = P.shape
    cap = P.cap
    r = generic_rank(P).rank if rank is None else rank
    if r == nr:
        return KernelAnalysis(r, tuple(range(nr)), (), (), FullRank("no kernel: the restricted form has full rank"), cap)
    if r == 0:
        piv_rows, piv_cols = (), ()
        F = [[] for _ in range(nr)]
    else:
        piv_rows, piv_cols = _unit_block(P, r)
        others = [i for i in range(nr) if i not in piv_rows]
        B = [[P.M[i][j] for j in piv_cols] for i in piv_rows]
        rhs = [[P.M[i][j] for j in piv_cols] for i in others]
        X = _solve_unit(B, rhs)  # row_i = sum_j X[i][j] row_{piv_j}
        F = {i: [-x for x in X[n]] for n, i in enumerate(others)}
    others = [i for i in range(nr) if i not in piv_rows]
    basis = []
    for i in others:
        cov = {i: P.M[0][0].one()}
        for n, j in enumerate(piv_rows):
            cov[j] = F[i][n]
        basis.append(cov)
    coeffs = [(i, j, cov[j]) for i, cov in zip(others, basis) for j in piv_rows]
    cert = f"constant to order {cap}"
    nonconst = [(i, j, f) for i, j, f in coeffs if not f.is_constant()]
    if nonconst:
        i, j, f = nonconst[0]
        g = _normalise(f)
        verdict: Verdict = FirstIntegral(g, g - g.constant_term(), (i, j), f"non-constant at order {cap}")
    else:
        # h = vectors killed by every covector: x_i = -sum_j f_ij x_j
        hb = []
        for j in piv_rows:
            v = [Fraction(0)] * nr
            v[j] = Fraction(1)
            for i, cov in zip(others, basis):
                v[i] = -Fraction(cov[j].constant_term())
            hb.append(tuple(v))
        verdict = SubalgebraDescent(tuple(hb), cert)
    return KernelAnalysis(r, tuple(piv_rows), tuple(others), tuple(basis), verdict, cap)


def right_kernel(P: PulledBackForm, rank: Optional[int] = None) -> list[list[TruncSeries]]:
    """Vector fields ``D = sum_b D_b d/dw_b`` with ``M D = 0``."""
    nr, nc = P.shape
    r = generic_rank(P).rank if rank is None else rank
    z = P.M[0][0].zero()
    if r == 0:
        return [[z.one() if b == c else z for b in range(nc)] for c in range(nc)]
    piv_rows, piv_cols = _unit_block(P, r)
    free = [c for c in range(nc) if c not in piv_cols]
    B = [[P.M[i][j] for j in piv_cols] for i in piv_rows]
    # M_piv D_piv + M_free D_free = 0  ->  D_piv = -B^{-1} M_free e_c
    Bt = [[B[j][i] for j in range(r)] for i in range(r)]
    out = []
    for c in free:
        col = [[P.M[i][c] for i in piv_rows]]
        sol = _solve_unit(Bt, col)[0]  # sol B^T = col  ->  B sol^T = col^T
        D = [z] * nc
        D[c] = z.one()
        for n, j in enumerate(piv_cols):
            D[j] = -sol[n]
        out.append(D)
    return out


def derivation_kills(D: Sequence[TruncSeries], f: TruncSeries) -> bool:
    acc = None
    for b, Db in enumerate(D):
        t = Db * f.diff(b)
        acc = t if acc is None else acc + t
    return acc is None or acc.is_zero()


# --------------------------------------------------------------------------
# iteration


@dataclass
class EffectiveLocus:
    functions: list = field(default_factory=list)  # vanishing functions in the chart parameters
    verdicts: list = field(default_factory=list)
    caps: list = field(default_factory=list)  # degree to which each verdict is certified
    chart: Optional[SubvarietyChart] = None
    complete: bool = True
    notes: list = field(default_factory=list)


def _solve_linear(h: TruncSeries) -> tuple[int, TruncSeries]:
    """Write ``h = 0`` as ``w_b = g(w)`` with g free of w_b (implicit function theorem)."""
    m = h.m
    lin = [(b, h.coeff(tuple(int(i == b) for i in range(m)))) for b in range(m)]
    lin = [(b, c) for b, c in lin if c != 0]
    if not lin:
        raise DegenerateChart("vanishing function has no linear term")
    b, c = lin[0]
    wb = TruncSeries.variable(b, h.names, h.cap)
    # h = c w_b + rest(w);  w_b = -rest/c, iterate to a fixed point
    rest = h - wb * c
    g = h.zero()
    for _ in range(h.cap + 2):
        new = rest.restrict({b: g}) * (-1 / Fraction(c))
        if new == g:
            break
        g = new
    return b, g


def _align(form: GForm, chart: SubvarietyChart) -> tuple[GForm, SubvarietyChart]:
    cap = min(form.cap, chart.cap)
    form = GForm(form.names, tuple(tuple(c.truncate(cap) for c in r) for r in form.coeffs))
    chart = SubvarietyChart(chart.params, tuple(f.truncate(cap) for f in chart.maps))
    return form, chart


def effective_locus(omega: GForm, V: SubvarietyChart, max_iter: int = 8) -> EffectiveLocus:
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    form, chart = _align(omega, V)
    out = EffectiveLocus(chart=chart)
    for _ in range(max_iter):
        if chart.is_point():
            out.notes.append("chart reduced to the basepoint")
            return out
        P = pull_back(form, chart)
        ka = kernel_analysis(P)
        out.verdicts.append(ka.verdict)
        out.caps.append(ka.cap)
        v = ka.verdict
        if isinstance(v, FullRank):
            out.notes.append("full rank: hypothesis dim V < dim W + dim G not exploitable")
            return out
        if isinstance(v, SubalgebraDescent):
            if not ka.pivots:
                out.notes.append("form vanishes on the chart")
                return out
            form = form.rows(ka.pivots)
            continue
        h = v.vanishing_fn
        out.functions.append(h)
        b, g = _solve_linear(h)
        new_maps = tuple(f.restrict({b: g}) for f in chart.maps)
        chart = SubvarietyChart(chart.params, new_maps)
        form, chart = _align(form, chart)
        out.chart = chart
    out.complete = False
    out.notes.append(f"iteration budget {max_iter} exhausted")
    return out


# --------------------------------------------------------------------------
# built-in examples


def demo(name: str, cap: int = 16) -> tuple[GForm, SubvarietyChart]:
    if name == "parabola":
        z = ("z1", "z2")
        one = TruncSeries.constant(1, z, cap)
        zero = one.zero()
        omega = GForm(z, ((one, zero), (zero, one)))
        t = TruncSeries.variable(0, ("t1",), cap)
        return omega, SubvarietyChart(("t1",), (t, t * t))
    if name == "constant-kernel":
        z = ("t1", "t2")
        one = TruncSeries.constant(1, z, cap)
        zero = one.zero()
        omega = GForm(z, ((one, zero), (one * 3, zero)))
        return omega, identity_chart(z, cap)
    if name == "full-rank":
        z = ("t1", "t2")
        one = TruncSeries.constant(1, z, cap)
        zero = one.zero()
        omega = GForm(z, ((one, zero), (zero, one)))
        return omega, identity_chart(z, cap)
    if name == "line-kernel":
        z = ("t1", "t2")
        one = TruncSeries.constant(1, z, cap)
        zero = one.zero()
        t1 = TruncSeries.variable(0, z, cap)
        omega = GForm(z, ((one, zero), (t1, zero)))
        return omega, identity_chart(z, cap)
    raise DomainError(f"unknown demo {name!r}")


def identity_chart(names: Sequence[str], cap: int) -> SubvarietyChart:
    names = tuple(names)
    return SubvarietyChart(names, tuple(TruncSeries.variable(i, names, cap) for i in range(len(names))))


def from_record(rec: Mapping) -> tuple[GForm, SubvarietyChart]:
    try:
        names = tuple(rec["ambient"])
        omega = GForm(names, tuple(tuple(TruncSeries.from_record(c) for c in r) for r in rec["omega"]))
        ch = rec["chart"]
        chart = SubvarietyChart(tuple(ch["params"]), tuple(TruncSeries.from_record(f) for f in ch["maps"]))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed Ax-Schanuel input: {exc}") from None
    return omega, chart
