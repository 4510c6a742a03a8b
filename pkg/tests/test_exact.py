from fractions import Fraction

import pytest

from kontsevich_weights import (Family, Method, PiMonomial, WeightQuery, binomial_sum,
                                binomial_sum_literal, eval_boundary_moment, eval_wheel_moment,
                                hyp2f1_terminating, pochhammer, weight, weight_gamma,
                                weight_gamma_bruteforce, weight_lambda, weight_upsilon)
from kontsevich_weights.errors import NonTerminating, PoleInC

TABLE_GAMMA = [0, Fraction(1, 24), 0, Fraction(1, 320), 0, Fraction(1, 2688), 0,
               Fraction(1, 18432), 0, Fraction(1, 112640)]
TABLE_UPSILON = [1, 0, Fraction(1, 12), 0, Fraction(1, 80), 0, Fraction(1, 448), 0,
                 Fraction(1, 2304), 0]


def direct_2f1(a, b, c, z, K):
    # independent term-by-term loop
    total, term = Fraction(0), Fraction(1)
    for k in range(K + 1):
        total += term
        term = term * (a + k) * (b + k) * z / ((c + k) * (k + 1))
    return total


class TestPochhammer:
    def test_k_zero(self):
        assert pochhammer(Fraction(5, 2), 0) == 1

    def test_integer(self):
        assert pochhammer(2, 3) == 24

    def test_hits_zero(self):
        assert pochhammer(-3, 5) == 0

    def test_rational(self):
        assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)


class TestHypergeometric:
    def test_zero_numerator(self):
        assert hyp2f1_terminating(0, 7, 3, -1) == 1

    def test_two_terms(self):
        assert hyp2f1_terminating(-1, 5, 2, -1) == Fraction(7, 2)

    def test_both_negative_against_loop(self):
        assert hyp2f1_terminating(-2, -4, -3, -1) == direct_2f1(-2, -4, -3, Fraction(-1), 2)
        assert hyp2f1_terminating(-2, -4, -3, -1) == Fraction(17, 3)

    @pytest.mark.parametrize("a,b,c", [(-3, 4, 2), (-5, -2, 7), (6, -4, 3), (-7, 1, 1)])
    def test_matches_loop(self, a, b, c):
        K = min(-x for x in (a, b) if x <= 0)
        assert hyp2f1_terminating(a, b, c, Fraction(-1)) == direct_2f1(a, b, c, Fraction(-1), K)

    def test_non_terminating(self):
        with pytest.raises(NonTerminating):
            hyp2f1_terminating(1, 2, 3, -1)

    def test_pole(self):
        with pytest.raises(PoleInC):
            hyp2f1_terminating(-4, 1, -1, -1)


class TestMoments:
    def test_three_one(self):
        assert eval_wheel_moment(3, 1) == PiMonomial(Fraction(4), 4)

    def test_equal_vanishes(self):
        for m in range(1, 41):
            assert eval_wheel_moment(m, m).coeff == 0

    def test_signed_two_two(self):
        # direct summation of the signed formula over k = 0..m, l = 0..n-1
        m = n = 2
        from math import comb
        a = sum(Fraction(comb(m, k) * n, m + n - k) for k in range(m + 1))
        b = sum(Fraction(comb(n - 1, l) * n, m + n - l) for l in range(n))
        assert eval_wheel_moment(2, 2, signed=True) == PiMonomial(-2 ** m + a - b, 4)
        assert eval_wheel_moment(2, 2, signed=True).coeff == Fraction(-7, 3)

    def test_routes_agree(self):
        for m in range(1, 9):
            for n in range(1, 9):
                for signed in (False, True):
                    assert (eval_wheel_moment(m, n, signed) ==
                            eval_wheel_moment(m, n, signed, via="hypergeometric"))

    def test_boundary(self):
        assert eval_boundary_moment(0, 3) == PiMonomial(Fraction(8), 3)
        assert eval_boundary_moment(2, 1) == PiMonomial(Fraction(4), 3)
        assert eval_boundary_moment(0, 1, signed=True) == PiMonomial(Fraction(1), 1)


class TestPiMonomial:
    def test_mismatched_powers(self):
        with pytest.raises(ValueError):
            PiMonomial(Fraction(1), 2) + PiMonomial(Fraction(1), 3)

    def test_divide(self):
        assert PiMonomial(Fraction(3), 4).divide_by_pi(4) == PiMonomial(Fraction(3), 0)


class TestWeights:
    def test_table_gamma(self):
        assert [weight_gamma(n) for n in range(10)] == TABLE_GAMMA

    def test_table_upsilon(self):
        assert [weight_upsilon(n) for n in range(10)] == TABLE_UPSILON

    def test_lambda(self):
        assert weight_lambda(0) == 1
        assert weight_lambda(1) == Fraction(1, 2)
        assert weight_lambda(3) == Fraction(1, 8)
        assert all(weight_lambda(n) * 2 ** n == 1 for n in range(65))

    def test_bruteforce_agrees(self):
        for n in range(0, 31):
            assert weight_gamma_bruteforce(n) == weight_gamma(n)

    def test_bruteforce_examples(self):
        assert weight_gamma_bruteforce(1) == Fraction(1, 24)
        assert weight_gamma_bruteforce(2) == 0
        assert weight_gamma_bruteforce(9) == Fraction(1, 112640)

    def test_even_gamma_vanish(self):
        assert all(weight_gamma(n) == 0 for n in range(0, 61, 2))

    def test_odd_upsilon_vanish(self):
        assert all(weight_upsilon(n) == 0 for n in range(1, 62, 2))

    def test_results_lowest_terms(self):
        v = weight_gamma(7)
        assert isinstance(v, Fraction) and v.denominator > 0

    def test_dispatch(self):
        for fam in Family:
            q = WeightQuery(fam, 4)
            assert weight(q).value == {Family.GAMMA: 0, Family.UPSILON: Fraction(1, 80),
                                       Family.LAMBDA: Fraction(1, 16)}[fam]
        assert weight(WeightQuery("upsilon", 6), Method.BRUTE_FORCE).value == Fraction(1, 448)
        assert weight(WeightQuery("gamma", 5), "brute_force").value == Fraction(1, 2688)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            WeightQuery(Family.GAMMA, -1)


class TestBinomialSums:
    def test_examples(self):
        assert binomial_sum("B", 0, Method.CLOSED_FORM) == Fraction(1, 2)
        assert binomial_sum("C", 2, Method.CLOSED_FORM) == Fraction(1, 12)
        assert binomial_sum("A", 4, Method.BRUTE_FORCE) == Fraction(1, 160)

    def test_literal_loops(self):
        for n in range(0, 13):
            for which in "ABC":
                assert binomial_sum_literal(which, n) == binomial_sum(which, n, Method.CLOSED_FORM)

    def test_fast_brute_force_matches_literal(self):
        for n in range(0, 13):
            for which in "ABC":
                assert binomial_sum(which, n, Method.BRUTE_FORCE) == binomial_sum_literal(which, n)

    def test_relations(self):
        for n in range(0, 60):
            assert binomial_sum("A", n) == binomial_sum("B", n)
            assert binomial_sum("C", n) == weight_upsilon(n)
