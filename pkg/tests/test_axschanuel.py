import random
from fractions import Fraction

import pytest

from padicfam.axschanuel import (
    DegenerateChart,
    FirstIntegral,
    FullRank,
    GForm,
    SubalgebraDescent,
    SubvarietyChart,
    _solve_linear,
    demo,
    derivation_kills,
    effective_locus,
    from_record,
    generic_rank,
    identity_chart,
    kernel_analysis,
    pull_back,
    right_kernel,
)
from padicfam.exactnum import DomainError
from padicfam.padic import TruncSeries

Z2 = ("z1", "z2")


def rand_poly(rng, names, cap, const=True):
    terms = {}
    for _ in range(5):
        k = tuple(rng.randint(0, 2) for _ in names)
        if sum(k) <= 3 and (const or sum(k) > 0):
            terms[k] = Fraction(rng.randint(-3, 3))
    return TruncSeries(names, cap, terms)


class TestPullback:
    def test_coordinate_forms_on_parabola(self):
        om, V = demo("parabola", 10)
        P = pull_back(om, V)
        t = TruncSeries.variable(0, ("t1",), P.cap)
        assert P.M[0][0] == t.one() and P.M[1][0].agrees(2 * t)

    def test_curve_through_z1(self):
        one = TruncSeries.constant(1, Z2, 10)
        z1 = TruncSeries.variable(0, Z2, 10)
        om = GForm(Z2, ((one, one.zero()), (z1, one.zero())))
        t = TruncSeries.variable(0, ("t1",), 10)
        P = pull_back(om, SubvarietyChart(("t1",), (t, t.zero())))
        assert P.M[0][0].agrees(t.one()) and P.M[1][0].agrees(t)

    def test_constant_map_pulls_back_to_zero(self):
        om, _ = demo("full-rank", 8)
        w = TruncSeries.variable(0, ("w",), 8)
        P = pull_back(om, SubvarietyChart(("w",), (w.zero(), w.zero())))
        assert all(c.is_zero() for r in P.M for c in r)
        assert generic_rank(P).rank == 0

    def test_cap_mismatch(self):
        om, _ = demo("full-rank", 8)
        with pytest.raises(DomainError):
            pull_back(om, identity_chart(("t1", "t2"), 10))

    def test_chart_must_hit_origin(self):
        w = TruncSeries.variable(0, ("w",), 4)
        with pytest.raises(DomainError):
            SubvarietyChart(("w",), (w + 1,))


class TestRank:
    @pytest.mark.parametrize("name,rank", [("parabola", 1), ("constant-kernel", 1), ("full-rank", 2), ("line-kernel", 1)])
    def test_demos(self, name, rank):
        om, V = demo(name, 12)
        cert = generic_rank(pull_back(om, V))
        assert cert.rank == rank and cert.cap == 11

    def test_leading_term_is_lowest(self):
        z = ("t1", "t2")
        t1 = TruncSeries.variable(0, z, 8)
        one = t1.one()
        om = GForm(z, ((one, one.zero()), (one.zero(), t1 * t1)))
        cert = generic_rank(pull_back(om, identity_chart(z, 8)))
        assert cert.rank == 2 and cert.leading_term == ((2, 0), 1)

    def test_invariance(self):
        rng = random.Random(5)
        t = TruncSeries.variable(0, ("t1",), 10)
        u = TruncSeries.variable(0, ("u",), 10)
        for _ in range(30):
            rows = tuple(tuple(rand_poly(rng, Z2, 10) for _ in Z2) for _ in range(3))
            om = GForm(Z2, rows)
            V = SubvarietyChart(("t1",), (t * rng.randint(1, 3) + t * t, t * t * rng.randint(0, 2)))
            r = generic_rank(pull_back(om, V)).rank
            # constant invertible row operation
            a = Fraction(rng.randint(-3, 3))
            mixed = GForm(Z2, (rows[0], tuple(x + y * a for x, y in zip(rows[1], rows[0])), rows[2]))
            assert generic_rank(pull_back(mixed, V)).rank == r
            # reparametrise the germ by u -> u + u^2
            W = SubvarietyChart(("u",), tuple(f.compose([u + u * u]) for f in V.maps))
            assert generic_rank(pull_back(om, W)).rank == r


class TestVerdicts:
    def test_parabola(self):
        om, V = demo("parabola", 16)
        v = kernel_analysis(pull_back(om, V)).verdict
        assert isinstance(v, FirstIntegral)
        assert v.f == TruncSeries.variable(0, ("t1",), v.f.cap)

    def test_constant_kernel(self):
        om, V = demo("constant-kernel", 16)
        v = kernel_analysis(pull_back(om, V)).verdict
        assert isinstance(v, SubalgebraDescent) and v.basis == ((1, 3),)

    def test_full_rank(self):
        om, V = demo("full-rank", 16)
        assert isinstance(kernel_analysis(pull_back(om, V)).verdict, FullRank)

    def test_line_kernel(self):
        om, V = demo("line-kernel", 16)
        v = kernel_analysis(pull_back(om, V)).verdict
        assert isinstance(v, FirstIntegral) and v.vanishing_fn.constant_term() == 0

    @pytest.mark.parametrize("name", ["parabola", "constant-kernel", "full-rank", "line-kernel"])
    def test_stable_under_larger_cap(self, name):
        a = kernel_analysis(pull_back(*demo(name, 12))).verdict
        b = kernel_analysis(pull_back(*demo(name, 16))).verdict
        assert type(a) is type(b)
        if isinstance(a, FirstIntegral):
            assert a.f.agrees(b.f, upto=10)
        if isinstance(a, SubalgebraDescent):
            assert a.basis == b.basis

    def test_unknown_demo(self):
        with pytest.raises(DomainError):
            demo("circle")


class TestKernel:
    def test_first_integral_killed_by_kernel_fields(self):
        for name in ("parabola", "line-kernel", "constant-kernel"):
            P = pull_back(*demo(name, 12))
            ka = kernel_analysis(P)
            for D in right_kernel(P):
                assert all(derivation_kills(D, cov[j]) for cov in ka.kernel_basis for j in cov)

    def test_left_kernel_annihilates(self):
        P = pull_back(*demo("line-kernel", 12))
        ka = kernel_analysis(P)
        for cov in ka.kernel_basis:
            for b in range(P.shape[1]):
                acc = sum((cov[a] * P.M[a][b] for a in cov), P.M[0][0].zero())
                assert acc.is_zero()

    def test_vanishing_functions_vanish_on_new_chart(self):
        for name in ("parabola", "line-kernel"):
            om, V = demo(name, 12)
            loc = effective_locus(om, V)
            assert loc.functions
            h = loc.functions[0]
            b, g = _solve_linear(h)
            assert h.restrict({b: g}).is_zero()
            # the cut chart no longer depends on the eliminated parameter
            assert all(f.restrict({b: g.zero()}) == f for f in loc.chart.maps)

    def test_degenerate_chart(self):
        z = ("t1", "t2")
        t1 = TruncSeries.variable(0, z, 8)
        om = GForm(z, ((t1, t1.zero()), (t1 * t1, t1.zero())))
        with pytest.raises(DegenerateChart):
            kernel_analysis(pull_back(om, identity_chart(z, 8)))

    def test_budget(self):
        with pytest.raises(DomainError):
            effective_locus(*demo("parabola", 8), max_iter=0)


class TestRecords:
    def test_roundtrip(self):
        om, V = demo("line-kernel", 8)
        rec = dict(om.to_record(), chart=V.to_record())
        om2, V2 = from_record(rec)
        assert om2 == om and V2 == V

    def test_malformed(self):
        with pytest.raises(DomainError):
            from_record({"ambient": ["z"]})
