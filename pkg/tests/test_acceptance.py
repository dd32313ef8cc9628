"""The thirteen acceptance criteria, one test each.

Every test prints a ``PASS criterion k: ...`` or ``FAIL criterion k: ...``
line; the lines are repeated in the terminal summary.  Running this file
as a script prints the same lines without pytest.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction

import mpmath
import pytest

from padicfam import bounds, filtered, liedims, padic, transport
from padicfam import axschanuel as axs
from padicfam.checks import exact_rank, random_jestimate_shape, random_lifted_matrix
from padicfam.exactnum import PrecisionError

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def report(k: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def necklaces(n: int) -> int:
    # independent of the Moebius code: count aperiodic binary necklaces by orbit size
    total = 0
    for w in range(2**n):
        rots = {((w << k) | (w >> (n - k))) & (2**n - 1) for k in range(n)}
        if len(rots) == n and w == min(rots):
            total += 1
    return total


def criterion_1():
    t0 = time.perf_counter()
    bad = [g for g in range(4, 51) if bounds.thm1_stable(bounds.FamilyParams(g=g, s=3 * g - 3, r=g - 3)).threshold != 21 * g * g - 30 * g]
    dt = time.perf_counter() - t0
    return not bad and dt < 1, f"threshold = 21g^2-30g for g in 4..50, bad={bad}, {dt:.2f}s"


def criterion_2():
    row = next(r for r in bounds.classical_rows(g=4) if r.name == "krzb")
    want = 84 * 16 - 98 * 4 + 28
    return row.threshold == want == 980, f"KRZB row {row.threshold} vs {want}"


def criterion_3():
    t0 = time.perf_counter()
    c = liedims.PuncturedLine()
    e = liedims.graded_dims(c, 64).e
    sums = all(sum(k * e[k - 1] for k in range(1, n + 1) if n % k == 0) == 2**n for n in range(1, 65))
    env = True
    for n in range(2, 65):
        lo, hi = liedims.dim_envelope(c, n)
        env &= not lo.certainly_gt(e[n - 1]) and not hi.certainly_lt(e[n - 1])
    dt = time.perf_counter() - t0
    return sums and env and dt < 1, f"divisor sums {sums}, envelope brackets {env}, {dt:.2f}s"


def criterion_4():
    N, ok = 30, True
    for g in (2, 3, 5):
        e = liedims.graded_dims(liedims.ProjectiveGenus(g), N).e
        poly = [1] + [0] * N
        for n in range(1, N + 1):
            f = [0] * (N + 1)
            for j in range(N // n + 1):
                f[n * j] = (-1) ** j * math.comb(e[n - 1], j)
            poly = [sum(poly[i] * f[k - i] for i in range(k + 1)) for k in range(N + 1)]
        ok &= poly == [1, -2 * g, 1] + [0] * (N - 2)
    return ok, "prod (1-t^n)^{e_n} = 1-2gt+t^2 mod t^31 for g in 2,3,5"


def criterion_5():
    ok, worst = True, ""
    for g in range(2, 6):
        ch = liedims.filip_chi(g, 40)
        e = liedims.graded_dims(liedims.ProjectiveGenus(g), 40).e
        for n in range(2, 41, 2):
            v = ch.v_fixed[n - 1]
            if v.denominator != 1 or not 0 <= v <= e[n - 1]:
                ok, worst = False, f"dim V at g={g}, n={n}"
            if liedims.chi_envelope(g, n).certainly_lt(abs(ch.chi_c[n - 1])):
                ok, worst = False, f"|chi| at g={g}, n={n}"
    spot = liedims.filip_chi(2, 4)
    ok &= spot.chi_c[1] == -3 and spot.v_fixed[3] == 21
    return ok, f"g <= 5, even n <= 40, spot chi_2 = {spot.chi_c[1]}, dim V_4 = {spot.v_fixed[3]} {worst}".rstrip()


def criterion_6():
    # independent oracle: necklace counts, the exact defect 2 - r + sum e_{2i},
    # and the closed-form bound evaluated at 60 digits
    e = [necklaces(n) for n in range(1, 17)]

    def exact_min(r):
        n = 1
        while 2 - r + sum(e[2 * i - 1] for i in range(1, n // 2 + 1)) <= 0:
            n += 1
        return n

    def bound(r):
        with mpmath.workdps(60):
            R = mpmath.mpf(r)
            t = 1 + (mpmath.log(R) + mpmath.log(mpmath.log(R) + mpmath.log(2))) / mpmath.log(2)
            return int(mpmath.floor(t)) + 1

    bad = []
    for s in range(6, 201):
        m = liedims.min_depth(liedims.PuncturedLine(), 2 * s)
        assert (m.exact_min, m.paper_bound) == (exact_min(2 * s), bound(2 * s))
        if m.exact_min > m.paper_bound:
            bad.append(s)
    g2 = liedims.ProjectiveGenus(2)
    bad_g = [r for r in range(23, 501) if liedims.min_depth(g2, r).exact_min > liedims.min_depth(g2, r).paper_bound]
    a = liedims.min_depth(liedims.PuncturedLine(), 12)
    b = liedims.min_depth(g2, 30)
    spots = (a.exact_min, a.paper_bound) == (6, 7) and (b.exact_min, b.paper_bound) == (5, 5)
    detail = f"spots {spots}; genus 2 violations {len(bad_g)}; punctured line violations at s={bad}"
    return spots and not bad and not bad_g, detail


def criterion_7():
    t0 = time.perf_counter()
    mism = 0
    for n in (1, 2, 3):
        for d in itertools.product(range(4), repeat=n):
            for e in itertools.product(range(4), repeat=n):
                sh = filtered.FilteredShape(d, e)
                mism += filtered.J_exact(sh, "weighted") != filtered.J_bruteforce(sh, True)
    dt = time.perf_counter() - t0
    return mism == 0 and dt < 60, f"weighted J = enumeration on the full grid, {mism} mismatches, {dt:.1f}s"


def criterion_8():
    rng = random.Random(2024)
    done = skipped = 0
    while done < 200:
        sh, r, a, b, n = random_jestimate_shape(rng)
        try:
            up = filtered.J_upper(r, a, b, n)
        except PrecisionError:
            skipped += 1
            continue
        if up.certainly_lt(filtered.J_exact(sh)):
            return False, f"J_upper < J_exact at {sh}"
        done += 1
    return True, f"J_upper >= J_exact on 200 random shapes ({skipped} undecided shapes redrawn)"


def criterion_9():
    t0 = time.perf_counter()
    p, N, cap = 5, 8, 12
    rng = random.Random(9)
    L = transport.demo_family(cap)
    res = transport.parallel_transport(L)
    horiz = transport.check_horizontal(L, res)
    cocycle = True
    for _ in range(5):
        a, b, c = ([p * rng.randint(0, 4), p * rng.randint(0, 4)] for _ in range(3))
        lhs = transport.transport_evaluate(res, b, c, p, N).matmul(transport.transport_evaluate(res, a, b, p, N))
        rhs = transport.transport_evaluate(res, a, c, p, N)
        k = min(lhs.N, rhs.N)
        cocycle &= all((u - v) % p**k == 0 for ru, rv in zip(lhs.rows, rhs.rows) for u, v in zip(ru, rv))
    t = padic.TruncSeries.variable(0, ("t",), cap)
    integral = transport.coleman_disk_integral([(1 + t).inverse()], [0], [p], p, N)[0]
    # series-summation oracle for log(1+5)
    s = sum(Fraction((-1) ** (k + 1) * p**k, k) for k in range(1, 60))
    oracle = s.numerator * pow(s.denominator, -1, p**3) % p**3
    log_ok = integral.reduce(3).value == oracle == 55 and integral.agrees(padic.padic_log(padic.PadicScalar(p, N, 1 + p)))
    phi = t + t * t
    func = True
    for _ in range(20):
        w = padic.TruncSeries(("t",), cap, {(k,): rng.randint(-5, 5) for k in range(cap + 1)})
        x = p * rng.randint(1, 4)
        lhs = transport.coleman_disk_integral([transport.pullback_form(w, phi)], [0], [x], p, N)[0]
        rhs = transport.coleman_disk_integral([w], [0], [x + x * x], p, N)[0]
        func &= lhs.agrees(rhs)
    dt = time.perf_counter() - t0
    ok = horiz and cocycle and log_ok and func and dt < 30
    return ok, f"residual {horiz}, cocycle {cocycle}, log(6) = 55 mod 125 {log_ok}, functoriality {func}, {dt:.1f}s"


def criterion_10():
    cap = 12
    L = transport.demo_family(cap)
    rep = transport.betti_square_check(L)
    G = transport.parallel_transport(L)
    z = ((0, 0), (0, 0))
    lt = transport.log_singular_transport([z, z], G, L)
    zero_ok = transport.mat_map(lambda a: a.drop_logs(), lt.H) == G.H and not any(a.has_logs() for r in lt.H for a in r)
    one = padic.TruncSeries.variable(0, ("t",), cap).one()
    G1 = transport.parallel_transport(transport.ConnectionForm.nilpotent_column([[one]]))
    lt1 = transport.log_singular_transport([((0, 0), (1, 0))], G1)
    Ls = padic.TruncSeries.log_symbol(0, ("t",), G1.order)
    E = transport.mat([[Ls.one(), Ls.zero()], [Ls, Ls.one()]])
    single = lt1.H == transport.mat_mul(E, transport.mat_map(lambda a: a.with_logs(), G1.H))
    ok = rep.ok and transport.mat_is_zero(rep.residual) and zero_ok and single
    return ok, f"Betti residual zero {rep.ok}, N = 0 gives G {zero_ok}, [[1,0],[L,1]] G {single}"


def criterion_11():
    rng = random.Random(11)
    agree = 0
    for _ in range(200):
        rows = random_lifted_matrix(rng, 5)
        got, cert = padic.rank_at_precision(padic.PadicMatrix(rows, 5, 8), 0)
        agree += got == exact_rank(rows) and cert
    # codimension (n + d0 - r)(g - r)
    spots = [((g, n, d0, r), (n + d0 - r) * (g - r)) for g, n, d0, r in [(2, 3, 0, 1), (3, 2, 1, 0), (4, 3, 1, 4), (5, 7, 2, 3)]]
    codim = all(bounds.degeneracy_codim(*a) == w for a, w in spots)
    return agree == 200 and codim, f"{agree}/200 ranks agree with Gaussian elimination, codim spots {codim}"


def criterion_12():
    ok = True
    seen = {}
    for cap in (16, 20):
        v = axs.kernel_analysis(axs.pull_back(*axs.demo("parabola", cap))).verdict
        ok &= isinstance(v, axs.FirstIntegral) and v.f == padic.TruncSeries.variable(0, ("t1",), v.f.cap)
        w = axs.kernel_analysis(axs.pull_back(*axs.demo("constant-kernel", cap))).verdict
        ok &= isinstance(w, axs.SubalgebraDescent)
        seen[cap] = (type(v).__name__, type(w).__name__, getattr(w, "basis", None))
    ok &= seen[16] == seen[20]
    return ok, f"parabola FirstIntegral(t1), constant-kernel SubalgebraDescent, caps 16 and 20 agree {seen[16] == seen[20]}"


def criterion_13():
    rep = bounds.sunit_bound(6)
    with mpmath.workdps(50):
        t = mpmath.mpf(12)
        ref = 59 * t ** ((mpmath.log(t) + mpmath.log(mpmath.log(t))) / mpmath.log(2) + 5) * mpmath.log(t)
        close = abs(ref - rep.threshold.midpoint()) / ref < mpmath.mpf("1e-30")
    width = rep.threshold.relative_width() <= mpmath.mpf("1e-30")
    valid = rep.valid and not bounds.sunit_bound(5).valid
    return close and width and valid, f"50-digit match {close}, relative width <= 1e-30 {width}, validity s > 5 {valid}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13]

KNOWN_DEFECT = pytest.mark.xfail(
    strict=True,
    reason="the closed-form depth bound is below the exact minimum depth for 22 values of s; see the decisions ledger",
)


@pytest.mark.parametrize(
    "k", [pytest.param(k, marks=KNOWN_DEFECT) if k == 6 else k for k in range(1, 14)]
)
def test_criterion(k):
    ok, detail = CRITERIA[k - 1]()
    report(k, ok, detail)


if __name__ == "__main__":
    failed = 0
    for k, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
        failed += not ok
    sys.exit(1 if failed else 0)
