from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicfam.bounds import (
    BoundReport,
    FamilyParams,
    ValidityError,
    bad_reduction_rows,
    classical_rows,
    degeneracy_codim,
    gonality_check,
    mg_bound,
    padic_zp_check,
    stable_graph_caps,
    stoll_zp,
    sunit_bound,
    thm1_smooth,
    thm1_stable,
    twist_bound,
)
from padicfam.exactnum import BoundValue, DomainError


def assert_strict_ceiling(rep: BoundReport):
    t, n = rep.threshold, rep.min_n
    if isinstance(t, BoundValue):
        assert t.certainly_lt(n)
        assert n - 1 <= t.upper_fraction()
    else:
        assert n - 1 <= t < n


class TestSmooth:
    @pytest.mark.parametrize(
        "g,s,r,d,t,n",
        [(2, 1, 0, 0, 1, 2), (3, 0, 0, 0, 0, 1), (5, 2, 3, 1, 6, 7)],
    )
    def test_examples(self, g, s, r, d, t, n):
        rep = thm1_smooth(FamilyParams(g=g, s=s, r=r, d=d))
        assert rep.threshold == t and rep.min_n == n and rep.valid

    def test_validity(self):
        with pytest.raises(ValidityError):
            thm1_smooth(FamilyParams(g=4, s=0, r=3))

    def test_floored_at_one(self):
        rep = thm1_smooth(FamilyParams(g=5, s=0, r=3, d=4))
        assert rep.threshold < 0 and rep.min_n == 1


class TestStable:
    def test_g4_example(self):
        rep = thm1_stable(FamilyParams(g=4, s=1, r=0))
        assert rep.threshold == Fraction(112, 3) and rep.min_n == 38

    def test_g3_example(self):
        rep = thm1_stable(FamilyParams(g=3, s=0, r=0))
        assert rep.threshold == 27 and rep.min_n == 28

    def test_proposition_variant(self):
        a = thm1_stable(FamilyParams(g=6, s=2, r=2, d=1))
        b = thm1_stable(FamilyParams(g=6, s=2, r=2, d=1), variant="proposition")
        assert b.threshold < a.threshold
        assert thm1_stable(FamilyParams(g=6, s=2, r=2), variant="proposition").threshold == a.threshold

    def test_validity(self):
        with pytest.raises(ValidityError):
            thm1_stable(FamilyParams(g=4, s=0, r=2))


class TestMg:
    def test_examples(self):
        rep = mg_bound(4, 1)
        assert rep.threshold == 216 and rep.min_n == 217 and rep.anchor == "Cor Mg"
        assert mg_bound(10, 7).threshold == 1800
        assert mg_bound(4, 0).threshold == Fraction(320, 3)

    def test_identity_sweep(self):
        for g in range(4, 51):
            assert thm1_stable(FamilyParams(g=g, s=3 * g - 3, r=g - 3)).threshold == 21 * g * g - 30 * g

    def test_tamper_detected(self):
        with pytest.raises(ArithmeticError, match="Cor Mg"):
            mg_bound(4, 1, _tamper=1)


class TestLinear:
    def test_stoll(self):
        assert (stoll_zp(2, 1, 1).threshold, stoll_zp(2, 1, 1).min_n) == (3, 4)
        assert (stoll_zp(2, 0, 0).threshold, stoll_zp(2, 0, 0).min_n) == (0, 1)

    def test_padic_zp(self):
        assert padic_zp_check(2, 2, 3, 1) is True
        assert padic_zp_check(2, 2, 3, 2) is False
        assert padic_zp_check(2, 1, 0, 0) is False
        with pytest.raises(DomainError):
            padic_zp_check(2, 0, 1, 0)


class TestSunit:
    def test_value(self):
        rep = sunit_bound(6)
        with mpmath.workdps(80):
            t = mpmath.mpf(12)
            ref = 59 * t ** ((mpmath.log(t) + mpmath.log(mpmath.log(t))) / mpmath.log(2) + 5) * mpmath.log(t)
        assert rep.threshold.lower <= ref <= rep.threshold.upper
        assert rep.threshold.relative_width() < mpmath.mpf("1e-30")
        assert rep.min_n == 7047976145989
        assert rep.valid and not sunit_bound(5).valid

    def test_monotone(self):
        prev = 0
        for s in range(1, 30):
            n = sunit_bound(s).min_n
            assert n >= prev
            prev = n


class TestTwist:
    def test_validity_boundary(self):
        assert twist_bound(2, 23).valid
        assert not twist_bound(2, 22).valid

    def test_final_variant_larger(self):
        a, b = twist_bound(2, 23), twist_bound(2, 23, variant="final")
        assert b.threshold.certainly_gt(a.threshold)

    def test_oracle(self):
        rep = twist_bound(3, 40, Fraction(5, 2))
        with mpmath.workdps(80):
            r, a = mpmath.mpf(40), 3 + mpmath.sqrt(8)
            lr = mpmath.log(r)
            ref = 3 * mpmath.mpf(5) / 2 * r ** ((lr + mpmath.log(lr) + mpmath.log(2)) / mpmath.log(a) + 4) * lr * a**3
        assert rep.threshold.lower <= ref <= rep.threshold.upper

    def test_bad_input(self):
        with pytest.raises(ValidityError):
            twist_bound(2, 30, 0)
        with pytest.raises(DomainError):
            twist_bound(2, 30, variant="other")


class TestClassical:
    def test_rows(self):
        rows = {r.name: r for r in classical_rows(1, 4)}
        assert rows["evertse"].threshold == 50421
        assert rows["krzb"].threshold == 980
        assert rows["mg-closed"].threshold == 216
        assert rows["krzb/mg"].threshold == Fraction(980, 216)
        assert rows["est"].threshold is None and not rows["est"].valid

    def test_est_defined_from_two(self):
        est = next(r for r in classical_rows(2) if r.name == "est")
        with mpmath.workdps(80):
            ref = mpmath.exp(3 * mpmath.sqrt(2 / mpmath.log(2)))
        assert est.threshold.lower <= ref <= est.threshold.upper
        assert "constant unnormalized" in est.notes


class TestBadReduction:
    def test_caps(self):
        assert stable_graph_caps(2) == (2, 3)

    def test_rows(self):
        rows = {r.name: r for r in bad_reduction_rows(4, 1, 0, 0)}
        assert rows["vertex"].threshold == Fraction(5, 3)
        assert rows["edge"].threshold == 2
        assert rows["assembly"].threshold == Fraction(112, 3)
        assert rows["assembly-tight"].threshold == 28

    def test_gonality(self):
        assert gonality_check(4, 2, 0, 4) == (True, 4)
        assert gonality_check(4, 2, 0, 3) == (False, 4)
        assert gonality_check(5, 1, 1, 1) == (True, 0)

    def test_codim(self):
        assert degeneracy_codim(2, 3, 0, 1) == 2
        assert degeneracy_codim(3, 2, 1, 0) == 9
        assert degeneracy_codim(4, 5, 0, 4) == 0
        with pytest.raises(DomainError):
            degeneracy_codim(2, 1, 0, 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(4, 30), st.integers(0, 40), st.data())
def test_strict_ceiling_contract(g, s, data):
    r = data.draw(st.integers(0, g - 3))
    d = data.draw(st.integers(0, r))
    p = FamilyParams(g=g, s=s, r=r, d=d)
    for rep in (thm1_stable(p), stoll_zp(g, s, r), mg_bound(g, r), *bad_reduction_rows(g, s, r, d)):
        assert_strict_ceiling(rep)
    if r <= g - 2 and thm1_smooth(p).threshold >= 0:
        assert_strict_ceiling(thm1_smooth(p))


def test_enclosed_rows_strict_ceiling():
    for rep in [sunit_bound(s) for s in (2, 6, 11)] + [twist_bound(2, r) for r in (23, 40)]:
        assert_strict_ceiling(rep)


def test_monotone_in_s_and_r():
    for g in (4, 6, 9):
        for r in range(0, g - 2):
            ts = [thm1_stable(FamilyParams(g=g, s=s, r=r)).threshold for s in range(0, 20)]
            assert ts == sorted(ts)
        for s in (0, 5):
            rs = [thm1_stable(FamilyParams(g=g, s=s, r=r)).threshold for r in range(0, g - 2)]
            assert rs == sorted(rs)
            zs = [stoll_zp(g, s, r).threshold for r in range(0, 20)]
            assert zs == sorted(zs)
