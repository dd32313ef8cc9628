"""Self-checks of the closed-form identities and cross-checks between modules.

Each check returns a :class:`CheckResult`; :func:`run_all` drives them
for the ``paper-check`` command.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from . import bounds, filtered, liedims, padic, transport
from . import axschanuel as axs
from .exactnum import PrecisionError, divisors


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    ok: Optional[bool]  # None = skipped
    detail: str = ""

    def to_record(self) -> dict:
        status = "skip" if self.ok is None else ("pass" if self.ok else "fail")
        return {"check": self.name, "status": status, "anchor": self.anchor, "detail": self.detail}


def check_mg(tamper: int = 0) -> CheckResult:
    try:
        for g in range(4, 51):
            bounds.mg_bound(g, g - 3, _tamper=tamper)
    except ArithmeticError as exc:
        return CheckResult("mg-identity", "Cor Mg", False, str(exc))
    return CheckResult("mg-identity", "Cor Mg", True, "g = 4..50")


def check_krzb() -> CheckResult:
    row = next(r for r in bounds.classical_rows(g=4) if r.name == "krzb")
    return CheckResult("krzb-row", "KRZB", row.threshold == 980, f"threshold {row.threshold_str()}")


def check_witt(N: int = 64, digits: int = 50) -> CheckResult:
    c = liedims.PuncturedLine()
    e = liedims.graded_dims(c, N).e
    for n in range(1, N + 1):
        if sum(k * e[k - 1] for k in divisors(n)) != 2**n:
            return CheckResult("witt", "Witt formula", False, f"divisor sum fails at n={n}")
        if n >= 2:
            lo, hi = liedims.dim_envelope(c, n, digits)
            if lo.certainly_gt(e[n - 1]) or hi.certainly_lt(e[n - 1]):
                return CheckResult("witt", "Witt formula", False, f"envelope misses e_{n}")
    return CheckResult("witt", "Witt formula", True, f"n <= {N}")


def _labute_product(e, N: int) -> list[int]:
    # prod_{n<=N} (1 - t^n)^{e_n} mod t^{N+1}, each factor by the binomial series
    poly = [1] + [0] * N
    for n in range(1, N + 1):
        factor = [0] * (N + 1)
        for j in range(N // n + 1):
            factor[n * j] = (-1) ** j * math.comb(e[n - 1], j)
        poly = [sum(poly[i] * factor[k - i] for i in range(k + 1)) for k in range(N + 1)]
    return poly


def check_labute(N: int = 30) -> CheckResult:
    for g in (2, 3, 5):
        e = liedims.graded_dims(liedims.ProjectiveGenus(g), N).e
        target = [1, -2 * g, 1] + [0] * (N - 2)
        if _labute_product(e, N) != target:
            return CheckResult("labute", "Labute formula", False, f"product identity fails for g={g}")
    return CheckResult("labute", "Labute formula", True, f"mod t^{N + 1}, g in 2,3,5")


def check_filip(gmax: int = 5, nmax: int = 40, digits: int = 50) -> CheckResult:
    for g in range(2, gmax + 1):
        ch = liedims.filip_chi(g, nmax)
        e = liedims.graded_dims(liedims.ProjectiveGenus(g), nmax).e
        for n in range(2, nmax + 1, 2):
            v = ch.v_fixed[n - 1]
            if v.denominator != 1 or not 0 <= v <= e[n - 1]:
                return CheckResult("filip", "Thm filip", False, f"dim V_{n}^c = {v} at g={g}")
            env = liedims.chi_envelope(g, n, digits)
            if env.certainly_lt(abs(ch.chi_c[n - 1])):
                return CheckResult("filip", "Thm filip", False, f"|chi_{n}| exceeds envelope at g={g}")
    spot = liedims.filip_chi(2, 4)
    if spot.chi_c[1] != -3 or spot.v_fixed[3] != 21:
        return CheckResult("filip", "Thm filip", False, "spot values chi_2 = -3, dim V_4^c = 21 fail")
    return CheckResult("filip", "Thm filip", True, f"g <= {gmax}, even n <= {nmax}")


def check_depth() -> CheckResult:
    p1 = liedims.PuncturedLine()
    a, b = liedims.min_depth(p1, 12), liedims.min_depth(liedims.ProjectiveGenus(2), 30)
    if (a.exact_min, a.paper_bound) != (6, 7) or (b.exact_min, b.paper_bound) != (5, 5):
        return CheckResult("depth", "lemma N_estimate1", False, "spot values fail")
    bad = [s for s in range(6, 201) if _exceeds(liedims.min_depth(p1, 2 * s))]
    if bad:
        t = liedims.min_depth(p1, 2 * bad[0])
        return CheckResult(
            "depth",
            "lemma N_estimate1",
            False,
            f"exact_min > paper_bound for {len(bad)} values of s, first s={bad[0]} ({t.exact_min} > {t.paper_bound})",
        )
    g2 = liedims.ProjectiveGenus(2)
    bad = [r for r in range(23, 501) if _exceeds(liedims.min_depth(g2, r))]
    if bad:
        return CheckResult("depth", "lemma BKimplies", False, f"exact_min > paper_bound for r in {bad[:5]}...")
    return CheckResult("depth", "lemma N_estimate1", True, "s in 6..200; g=2, r in 23..500")


def _exceeds(t) -> bool:
    return t.exact_min > t.paper_bound


def check_j_oracle(conv: filtered.WeightConvention) -> CheckResult:
    if conv is not filtered.WeightConvention.WEIGHTED:
        return CheckResult("j-oracle", "lemma universal", None, "skipped: the enumeration oracle is weighted")
    for n in (1, 2, 3):
        for d in itertools.product(range(4), repeat=n):
            for e in itertools.product(range(4), repeat=n):
                sh = filtered.FilteredShape(d, e)
                if filtered.J_exact(sh, conv) != filtered.J_bruteforce(sh):
                    return CheckResult("j-oracle", "lemma universal", False, f"d={d}, e={e}")
    return CheckResult("j-oracle", "lemma universal", True, "n <= 3, d_k, e_k <= 3")


def _floor_power(g: Optional[int], i: int) -> int:
    """floor(alpha^i) for alpha = 2 (g None) or alpha_+(g)."""
    if g is None:
        return 2**i
    # alpha_+^i + alpha_-^i is an integer and 0 < alpha_-^i < 1
    return liedims.power_sums(liedims.ProjectiveGenus(g), i)[i] - 1


def random_jestimate_shape(rng: random.Random):
    """A random shape with d_1 = r, d_i <= alpha^i, e_i <= beta^i / i."""
    r = rng.randint(2, 30)
    n = rng.randint(1, 6)
    ga, gb = rng.choice([None, 2, 3]), rng.choice([None, 2, 3])
    # entries are clipped to keep the exact count cheap
    d = [r] + [rng.randint(0, min(_floor_power(ga, i), 6)) for i in range(2, n + 1)]
    e = [rng.randint(0, min(_floor_power(gb, i) // i, 8)) for i in range(1, n + 1)]
    alpha = 2 if ga is None else liedims.alpha_plus(ga)
    beta = 2 if gb is None else liedims.alpha_plus(gb)
    return filtered.FilteredShape(d, e), r, alpha, beta, n


def check_jestimate(seed: int = 0, count: int = 200) -> CheckResult:
    rng = random.Random(seed)
    done = 0
    while done < count:
        sh, r, alpha, beta, n = random_jestimate_shape(rng)
        try:
            up = filtered.J_upper(r, alpha, beta, n)
        except PrecisionError:
            continue
        if up.certainly_lt(filtered.J_exact(sh)):
            return CheckResult("jestimate", "lemma Jestimate", False, f"shape {sh}")
        done += 1
    return CheckResult("jestimate", "lemma Jestimate", True, f"{count} random shapes, seed {seed}")


def check_transport(p: int = 5, N: int = 8, cap: int = 12, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    L = transport.demo_family(cap)
    res = transport.parallel_transport(L)
    if not transport.check_horizontal(L, res):
        return CheckResult("transport", "dH = Lambda H", False, "residual nonzero")
    pts = [[p * rng.randint(0, 4), p * rng.randint(0, 4)] for _ in range(3)]
    g12 = transport.transport_evaluate(res, pts[0], pts[1], p, N)
    g23 = transport.transport_evaluate(res, pts[1], pts[2], p, N)
    g13 = transport.transport_evaluate(res, pts[0], pts[2], p, N)
    prod = g23.matmul(g12)
    if any((a - b) % p ** min(prod.N, g13.N) for ra, rb in zip(prod.rows, g13.rows) for a, b in zip(ra, rb)):
        return CheckResult("transport", "dH = Lambda H", False, "cocycle identity fails")
    t = padic.TruncSeries.variable(0, ("t",), cap)
    integral = transport.coleman_disk_integral([(1 + t).inverse()], [0], [p], p, N)[0]
    if integral.reduce(3).value != 55 or not integral.agrees(transport.log_of_one_plus(p, N)):
        return CheckResult("transport", "Coleman integral", False, f"log(1+p) mismatch: {integral}")
    phi = t + t * t
    for _ in range(20):
        w = padic.TruncSeries(("t",), cap, {(k,): rng.randint(-5, 5) for k in range(cap + 1)})
        x = p * rng.randint(1, 4)
        lhs = transport.coleman_disk_integral([transport.pullback_form(w, phi)], [0], [x], p, N)[0]
        rhs = transport.coleman_disk_integral([w], [0], [x + x * x], p, N)[0]
        if not lhs.agrees(rhs):
            return CheckResult("transport", "prop BC_functorial", False, "functoriality fails")
    return CheckResult("transport", "dH = Lambda H", True, f"p={p}, N={N}, cap={cap}")


def check_betti(cap: int = 12) -> CheckResult:
    L = transport.demo_family(cap)
    rep = transport.betti_square_check(L)
    if not rep.ok:
        return CheckResult("betti-square", "lemma simplest_commutative", False, "residual nonzero")
    G = transport.parallel_transport(L)
    zero = ((0, 0), (0, 0))
    lt = transport.log_singular_transport([zero, zero], G, L)
    if transport.mat_map(lambda a: a.drop_logs(), lt.H) != G.H or any(a.has_logs() for r in lt.H for a in r):
        return CheckResult("betti-square", "eq GM_badred", False, "N = 0 does not reproduce G")
    one = padic.TruncSeries.variable(0, ("t",), cap).one()
    G1 = transport.parallel_transport(transport.ConnectionForm.nilpotent_column([[one]]))
    lt1 = transport.log_singular_transport([((0, 0), (1, 0))], G1)
    Lsym = padic.TruncSeries.log_symbol(0, ("t",), G1.order)
    E = transport.mat([[Lsym.one(), Lsym.zero()], [Lsym, Lsym.one()]])
    if lt1.H != transport.mat_mul(E, transport.mat_map(lambda a: a.with_logs(), G1.H)):
        return CheckResult("betti-square", "eq GM_badred", False, "single nilpotent case differs")
    return CheckResult("betti-square", "lemma simplest_commutative", True, f"cap {cap}")


def exact_rank(rows) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def random_lifted_matrix(rng: random.Random, p: int):
    g = rng.randint(1, 5)
    n = rng.randint(1, 7)
    k = rng.randint(0, min(g, n))
    # low-rank integer matrices with entries of valuation <= 2
    U = [[rng.choice([0, 1, 2, 3, p, p * p + 1]) for _ in range(k)] for _ in range(g)]
    V = [[rng.choice([0, 1, -1, 2, p]) for _ in range(n)] for _ in range(k)]
    return [[sum(U[i][l] * V[l][j] for l in range(k)) for j in range(n)] for i in range(g)]


def check_degeneracy(p: int = 5, N: int = 8, seed: int = 0, count: int = 200) -> CheckResult:
    rng = random.Random(seed)
    for _ in range(count):
        rows = random_lifted_matrix(rng, p)
        rk = exact_rank(rows)
        got, cert = padic.rank_at_precision(padic.PadicMatrix(rows, p, N), 0)
        if got != rk or not cert:
            # a minor divisible by p^N would be a genuine precision ambiguity
            if cert or got > rk:
                return CheckResult("degeneracy", "codimension (n+d0-r)(g-r)", False, f"rank {got} vs exact {rk}")
    spots = [((2, 3, 0, 1), 2), ((3, 2, 1, 0), 9), ((4, 3, 1, 4), 0)]
    for args, want in spots:
        if bounds.degeneracy_codim(*args) != want:
            return CheckResult("degeneracy", "codimension (n+d0-r)(g-r)", False, f"codim{args}")
    return CheckResult("degeneracy", "codimension (n+d0-r)(g-r)", True, f"{count} random matrices")


def check_axs() -> CheckResult:
    for cap in (16, 20):
        om, V = axs.demo("parabola", cap)
        v = axs.kernel_analysis(axs.pull_back(om, V)).verdict
        t1 = padic.TruncSeries.variable(0, ("t1",), v.f.cap) if isinstance(v, axs.FirstIntegral) else None
        if not isinstance(v, axs.FirstIntegral) or v.f != t1:
            return CheckResult("axs", "effectively computable rational first integral", False, f"parabola at cap {cap}: {v}")
        om, V = axs.demo("constant-kernel", cap)
        v = axs.kernel_analysis(axs.pull_back(om, V)).verdict
        if not isinstance(v, axs.SubalgebraDescent):
            return CheckResult("axs", "effectively computable rational first integral", False, f"constant-kernel at cap {cap}: {v}")
    return CheckResult("axs", "effectively computable rational first integral", True, "caps 16 and 20")


def check_sunit(digits: int = 50) -> CheckResult:
    import mpmath

    rep = bounds.sunit_bound(6, digits)
    with mpmath.workdps(80):
        t = mpmath.mpf(12)
        ref = 59 * t ** ((mpmath.log(t) + mpmath.log(mpmath.log(t))) / mpmath.log(2) + 5) * mpmath.log(t)
    th = rep.threshold
    ok = (
        th.relative_width() <= mpmath.mpf("1e-30")
        and th.lower <= ref <= th.upper
        and rep.valid
        and not bounds.sunit_bound(5).valid
    )
    return CheckResult("sunit", "S-unit bound", ok, f"{rep.threshold_str()}")


def run_all(conv=filtered.WeightConvention.WEIGHTED, tamper: Optional[str] = None, seed: int = 0, p: int = 5, N: int = 8, cap: int = 12, digits: int = 50) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_mg(1 if tamper == "mg" else 0),
        check_krzb,
        lambda: check_witt(digits=digits),
        check_labute,
        lambda: check_filip(digits=digits),
        check_depth,
        lambda: check_j_oracle(conv),
        lambda: check_jestimate(seed),
        lambda: check_transport(p, N, cap, seed),
        lambda: check_betti(cap),
        lambda: check_degeneracy(p, N, seed),
        check_axs,
        lambda: check_sunit(digits),
    ]
    return [c() for c in checks]
