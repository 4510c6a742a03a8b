import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kontsevich_weights.errors import CapExceeded, SingularLeadingTerm
from kontsevich_weights.jets import (BasePolynomial, JetPolynomial, identity_matrix, matmul,
                                     parse_base, parse_jet, random_jet, series_matrix_inverse)

from oracle import from_jet, pdiff, pmul, ptrunc


def jets(dim=2, kx=2, ky=3):
    return st.integers(0, 10**6).map(lambda s: random_jet(random.Random(s), dim, kx, ky, density=0.4))


class TestBasics:
    def test_parse_render_roundtrip(self):
        text = "-3 + y1*y2 + 1/2*dx1*y1^2"
        jet = parse_jet(text, 2)
        assert str(jet) == text
        assert parse_jet(str(jet), 2) == jet

    def test_render_signs(self):
        assert str(parse_jet("-y1 - 1/3*y2^2", 2)) == "-y1 - 1/3*y2^2"
        assert str(JetPolynomial.zero(2)) == "0"

    def test_float_rejected(self):
        with pytest.raises(ValueError):
            parse_jet("0.5*y1", 2)
        with pytest.raises(TypeError):
            JetPolynomial.from_terms(1, {((0,), (1,)): 0.5})

    def test_unknown_variable(self):
        with pytest.raises(ValueError):
            parse_jet("y3", 2)

    def test_caps_drop_terms(self):
        jet = parse_jet("1 + y1 + y1^2 + y1^3 + dx1^2*y1", 1, kx=1, ky=2)
        assert str(jet) == "1 + y1 + y1^2"
        assert jet.caps == (1, 2)

    def test_no_term_beyond_caps(self):
        a = random_jet(random.Random(1), 2, 2, 3)
        b = random_jet(random.Random(2), 2, 2, 3)
        for alpha, beta, _ in a.mul(b).terms():
            assert sum(alpha) <= 2 and sum(beta) <= 3

    def test_derivative_lowers_caps(self):
        jet = parse_jet("y1^3 + dx1*y1", 1, 2, 4)
        assert jet.diff_y(0).caps == (2, 3)
        assert jet.diff_x(0).caps == (1, 4)
        assert str(jet.diff_y(0)) == "dx1 + 3*y1^2"

    def test_exact_stays_exact(self):
        jet = parse_jet("y1^3", 1)
        assert jet.diff_y(0).caps == (None, None)

    def test_at_y0(self):
        jet = parse_jet("2 + dx1 + dx1*y1 + y1^2", 1)
        assert str(jet.at_y0()) == "2 + dx1"

    def test_canonical_storage(self):
        a = parse_jet("y1 + dx1 + 1", 1)
        b = parse_jet("1 + dx1 + y1", 1)
        assert a == b and list(a.terms()) == list(b.terms())

    def test_substitute(self):
        # (dx1 + y1)^2 with y1 -> y1 + y1^2
        jet = parse_jet("dx1^2 + 2*dx1*y1 + y1^2", 1)
        out = jet.substitute([parse_jet("dx1", 1), parse_jet("y1 + y1^2", 1)], 3, 3)
        assert out == parse_jet("dx1^2 + 2*dx1*y1 + 2*dx1*y1^2 + y1^2 + 2*y1^3", 1, 3, 3)

    def test_exponent_overflow(self):
        big = parse_jet("y1^40", 1)
        with pytest.raises(CapExceeded):
            big.mul(big)

    def test_base_polynomial_shift(self):
        jet = parse_jet("dx1^2 + dx2", 2)
        assert BasePolynomial.from_offset_jet(jet, [2, 1]) == parse_base("4 - 4*x1 + x1^2 - 1 + x2", 2)


class TestAgainstOracle:
    @settings(max_examples=40, deadline=None)
    @given(jets(), jets())
    def test_product(self, a, b):
        assert from_jet(a.mul(b)) == pmul(from_jet(a), from_jet(b), (2, 3), 2)

    @settings(max_examples=40, deadline=None)
    @given(jets(), jets())
    def test_add_commutes(self, a, b):
        assert a + b == b + a
        assert (a - a).is_zero()

    @settings(max_examples=30, deadline=None)
    @given(jets(), jets(), jets())
    def test_associative_distributive(self, a, b, c):
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.mul(b + c) == a.mul(b) + a.mul(c)

    @settings(max_examples=40, deadline=None)
    @given(jets())
    def test_derivatives(self, a):
        for var in range(4):
            d = a.diff_x(var) if var < 2 else a.diff_y(var - 2)
            assert from_jet(d) == pdiff(from_jet(a), var)

    @settings(max_examples=30, deadline=None)
    @given(jets(), jets())
    def test_leibniz(self, a, b):
        lhs = a.mul(b).diff_y(0)
        rhs = a.diff_y(0).mul(b) + a.mul(b.diff_y(0))
        assert lhs.agrees_with(rhs)


class TestSeriesInverse:
    def test_identity(self):
        eye = identity_matrix(2, 2)
        inv = series_matrix_inverse(eye, 2, 3)
        assert all(inv[i][j] == int(i == j) for i in range(2) for j in range(2))

    def test_geometric(self):
        inv = series_matrix_inverse([[parse_jet("1 + y1", 1)]], 1, 5)
        assert inv[0][0] == parse_jet("1 - y1 + y1^2 - y1^3 + y1^4 - y1^5", 1, 1, 5)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_residual(self, seed):
        rng = random.Random(seed)
        m = [[random_jet(rng, 2, 2, 3, density=0.3) for _ in range(2)] for _ in range(2)]
        # unit-ish leading term, invertible over the rationals
        m[0][0] = m[0][0] - m[0][0].constant_term() + 2
        m[0][1] = m[0][1] - m[0][1].constant_term() + 1
        m[1][0] = m[1][0] - m[1][0].constant_term()
        m[1][1] = m[1][1] - m[1][1].constant_term() + Fraction(1, 3)
        inv = series_matrix_inverse(m)
        prod = matmul(m, inv)
        for i in range(2):
            for j in range(2):
                assert (prod[i][j] - int(i == j)).truncate(2, 3).is_zero()

    def test_singular(self):
        with pytest.raises(SingularLeadingTerm):
            series_matrix_inverse([[parse_jet("y1", 1, 1, 2)]])

    def test_needs_caps(self):
        with pytest.raises(CapExceeded):
            series_matrix_inverse([[parse_jet("1 + y1", 1)]])
