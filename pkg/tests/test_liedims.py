import itertools
from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicfam.exactnum import DomainError
from padicfam.liedims import (
    ConsistencyError,
    ProjectiveGenus,
    PuncturedLine,
    alpha_minus,
    alpha_plus,
    chi_envelope,
    defect_profile,
    dim_envelope,
    filip_chi,
    graded_dims,
    min_depth,
    parse_curve,
    power_sums,
)

P1 = PuncturedLine()


def lyndon_count(n, k=2):
    """Aperiodic necklaces: words strictly smaller than all their rotations."""
    count = 0
    for w in itertools.product(range(k), repeat=n):
        if all(w < w[i:] + w[:i] for i in range(1, n)):
            count += 1
    return count


def labute_product(e, N):
    poly = [1] + [0] * N
    for n in range(1, N + 1):
        # multiply by (1 - t^n)^{e_n} through the binomial series
        factor = [0] * (N + 1)
        for j in range(N // n + 1):
            factor[n * j] = (-1) ** j * comb(e[n - 1], j)
        poly = [sum(poly[i] * factor[k - i] for i in range(k + 1)) for k in range(N + 1)]
    return poly


class TestGradedDims:
    def test_punctured_line_example(self):
        assert graded_dims(P1, 6).e == (2, 1, 2, 3, 6, 9)

    def test_genus2_example(self):
        assert graded_dims(ProjectiveGenus(2), 4).e == (4, 5, 16, 45)

    @pytest.mark.parametrize("g", [2, 3, 7])
    def test_first_is_2g(self, g):
        assert graded_dims(ProjectiveGenus(g), 1)[1] == 2 * g

    def test_lyndon_oracle(self):
        e = graded_dims(P1, 14).e
        for n in range(1, 15):
            assert e[n - 1] == lyndon_count(n)

    def test_witt_divisor_sum(self):
        e = graded_dims(P1, 64).e
        for n in range(1, 65):
            assert sum(k * e[k - 1] for k in range(1, n + 1) if n % k == 0) == 2**n

    @pytest.mark.parametrize("g", [2, 3, 5])
    def test_labute_generating_function(self, g):
        e = graded_dims(ProjectiveGenus(g), 30).e
        assert labute_product(e, 30) == [1, -2 * g, 1] + [0] * 28

    def test_power_sums_integer_recurrence(self):
        assert power_sums(ProjectiveGenus(2), 4) == (2, 4, 14, 52, 194)

    def test_depth_indexing(self):
        d = graded_dims(P1, 3)
        with pytest.raises(IndexError):
            d[4]
        assert d.total() == 5


class TestEnvelope:
    def test_punctured_example(self):
        lo, hi = dim_envelope(P1, 6)
        assert abs(float(lo.midpoint()) - 4.135) < 1e-2
        assert hi.contains(Fraction(64, 6))
        assert lo.certainly_lt(9) and hi.certainly_gt(9)

    def test_genus_example(self):
        _, hi = dim_envelope(ProjectiveGenus(2), 4)
        assert abs(float(hi.midpoint()) - 48.5) < 1e-2
        assert hi.certainly_gt(45)

    def test_brackets_every_level(self):
        for curve, N in [(P1, 40), (ProjectiveGenus(2), 25), (ProjectiveGenus(4), 20)]:
            e = graded_dims(curve, N).e
            for n in range(2, N + 1):
                lo, hi = dim_envelope(curve, n)
                assert not lo.certainly_gt(e[n - 1])
                assert not hi.certainly_lt(e[n - 1])

    def test_alpha_product_is_one(self):
        for g in (2, 3, 5):
            assert (alpha_plus(g) * alpha_minus(g)).contains(1)


class TestFilip:
    @pytest.mark.parametrize("n,chi,dim", [(2, -3, 1), (3, 0, 8), (4, -3, 21)])
    def test_genus2_examples(self, n, chi, dim):
        c = filip_chi(2, 4)
        assert c.chi_c[n - 1] == chi
        assert c.v_fixed[n - 1] == dim

    @pytest.mark.parametrize("g", [2, 3, 4, 5])
    def test_odd_levels_are_half(self, g):
        c = filip_chi(g, 21)
        e = graded_dims(ProjectiveGenus(g), 21).e
        for n in range(1, 22, 2):
            assert c.chi_c[n - 1] == 0
            assert c.v_fixed[n - 1] == Fraction(e[n - 1], 2)

    @pytest.mark.parametrize("g", [2, 3, 4, 5])
    def test_integral_bounded_and_enveloped(self, g):
        c = filip_chi(g, 40)
        e = graded_dims(ProjectiveGenus(g), 40).e
        for n in range(2, 41, 2):
            v = c.v_fixed[n - 1]
            assert v.denominator == 1 and 0 <= v <= e[n - 1]
            assert not chi_envelope(g, n).certainly_lt(abs(c.chi_c[n - 1]))

    def test_zero_rhs_is_not_integral(self):
        with pytest.raises(ConsistencyError):
            filip_chi(2, 4, rhs="zero")
        c = filip_chi(2, 4, rhs="zero", strict=False)
        assert not c.integral()

    def test_genus_one_rejected(self):
        with pytest.raises(DomainError):
            filip_chi(1, 4)


class TestDefects:
    def test_punctured_example(self):
        prof = defect_profile(P1, 12, 6)
        assert prof.defect[5] == 2 - 12 + 1 + 3 + 9 == 3
        assert prof.exact

    def test_rank_zero(self):
        assert defect_profile(P1, 0, 1).defect[0] == 2

    def test_punctured_closed_form(self):
        e = graded_dims(P1, 20).e
        for r in (0, 4, 10, 30):
            prof = defect_profile(P1, r, 20)
            for n in range(1, 21):
                assert prof.defect[n - 1] == 2 - r + sum(e[2 * i - 1] for i in range(1, n // 2 + 1))

    def test_genus_refined(self):
        prof = defect_profile(ProjectiveGenus(2), 30, 5)
        assert prof.per_level[1] >= 1 and prof.per_level[3] >= 21
        assert not prof.exact

    def test_analytic_below_refined_levels(self):
        ref = defect_profile(ProjectiveGenus(3), 10, 12)
        ana = defect_profile(ProjectiveGenus(3), 10, 12, variant="analytic")
        assert ana.label == "analytic lower bound"
        assert len(ana.defect) == len(ref.defect) == 12

    def test_unknown_variant(self):
        with pytest.raises(DomainError):
            defect_profile(ProjectiveGenus(2), 3, 3, variant="nope")


class TestMinDepth:
    def test_examples(self):
        assert min_depth(P1, 12)[:2] == (6, 7)
        assert min_depth(ProjectiveGenus(2), 30)[:2] == (5, 5)
        assert min_depth(P1, 2)[0] == 2

    def test_exact_min_is_first_positive(self):
        for s in range(1, 60):
            n = min_depth(P1, 2 * s).exact_min
            prof = defect_profile(P1, 2 * s, n)
            assert prof.defect[-1] > 0
            assert all(d <= 0 for d in prof.defect[:-1])

    def test_monotone_in_r(self):
        prev = (0, 0)
        for s in range(1, 120):
            t = min_depth(P1, 2 * s)
            assert t.exact_min >= prev[0] and t.paper_bound >= prev[1]
            prev = (t.exact_min, t.paper_bound)
        prev = (0, 0)
        for r in range(1, 300, 7):
            t = min_depth(ProjectiveGenus(2), r)
            assert t.exact_min >= prev[0] and t.paper_bound >= prev[1]
            prev = (t.exact_min, t.paper_bound)

    def test_paper_bound_is_strict_ceiling(self):
        for r in (12, 40, 100):
            t = min_depth(P1, r)
            assert t.threshold.certainly_lt(t.paper_bound)
            assert not t.threshold.certainly_lt(t.paper_bound - 1)

    def test_odd_rank_rejected(self):
        with pytest.raises(DomainError):
            min_depth(P1, 7)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(1, 400))
def test_genus_exact_min_definition(g, r):
    # least n with alpha_+^n / n > 2r, checked at 60 digits
    n = min_depth(ProjectiveGenus(g), r).exact_min
    with mpmath.workdps(60):
        a = g + mpmath.sqrt(g * g - 1)
        assert a**n / n > 2 * r
        assert n == 1 or a ** (n - 1) / (n - 1) <= 2 * r


class TestParse:
    def test_specs(self):
        assert parse_curve("p1") == P1
        assert parse_curve("genus:3") == ProjectiveGenus(3)

    @pytest.mark.parametrize("bad", ["genus:1", "genus:x", "torus", ""])
    def test_bad(self, bad):
        with pytest.raises(DomainError):
            parse_curve(bad)
