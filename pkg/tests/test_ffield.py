import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from grmk.ffield import (ContextMismatch, FqContext, KContext, LaurentPoly,
                         NotAPthPower, ParseError, format_element,
                         parse_element)


def ctx(p=2, f=1, r=2):
    return KContext(p, f, r)


class TestFqContext:
    def test_prime_field_tables(self):
        fq = FqContext(5)
        assert fq.mul(2, 3) == 1
        assert fq.add(4, 3) == 2
        assert fq.inv(2) == 3

    @pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 2)])
    def test_frobenius_bijection(self, p, f):
        fq = FqContext(p, f)
        seen = set()
        for a in fq.elements():
            b = fq.frob(a)
            assert fq.frob_inv(b) == a
            seen.add(b)
        assert len(seen) == fq.q

    def test_qth_power_is_identity(self):
        fq = FqContext(3, 2)
        for a in fq.elements():
            assert fq.pow_int(a, fq.q) == a

    def test_generator_is_primitive(self):
        fq = FqContext(2, 3)
        orbit = {fq.gpow(i) for i in range(fq.q - 1)}
        assert len(orbit) == fq.q - 1

    def test_nonprime_rejected(self):
        with pytest.raises(ValueError):
            FqContext(6)


class TestLaurentPoly:
    def test_add_identity(self):
        k = ctx()
        f = k.var(1) + k.var(2)
        assert f + k.zero() == f

    def test_characteristic(self):
        k = ctx()
        t1 = k.var(1)
        assert (t1 + t1).is_zero()

    def test_add_hand_arithmetic_f3(self):
        # (t1^2 + t2) + t1^2 = 2 t1^2 + t2 over F_3
        k = ctx(p=3)
        t1sq = k.monomial((2, 0))
        t2 = k.var(2)
        total = (t1sq + t2) + t1sq
        assert total == k.monomial((2, 0), 2) + t2

    def test_mul_identity_and_inverse_monomial(self):
        k = ctx()
        f = k.var(1) + k.var(2) * k.var(2)
        assert f * k.one() == f
        assert k.monomial((-1, 0)) * k.var(1) == k.one()

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_freshmans_dream_by_expansion(self, p):
        k = ctx(p=p)
        t1, t2 = k.var(1), k.var(2)
        lhs = (t1 + t2) ** p
        # independent oracle: binomial expansion with integer coefficients mod p
        rhs = k.zero()
        for j in range(p + 1):
            coeff = math.comb(p, j) % p
            if coeff:
                rhs = rhs + k.monomial((p - j, j), coeff)
        assert lhs == rhs
        assert lhs == t1 ** p + t2 ** p

    def test_pth_root_examples(self):
        k = ctx()
        t1 = k.var(1)
        assert (t1 ** 2).pth_root() == t1
        assert k.one().pth_root() == k.one()
        with pytest.raises(NotAPthPower):
            t1.pth_root()

    def test_pth_root_with_coefficient(self):
        k = KContext(2, 2, 2)
        c = 2  # the modulus root in GF(4)
        f = k.monomial((2, 4), c)
        g = f.pth_root()
        assert g ** 2 == f
        assert g == k.monomial((1, 2), k.fq.frob_inv(c))

    def test_is_pth_power(self):
        k = ctx(p=3)
        assert k.monomial((3, -6)).is_pth_power()
        assert not k.monomial((3, -5)).is_pth_power()

    def test_frobenius_additive_random(self):
        rng = random.Random(1)
        k = ctx(p=3, r=2)
        for _ in range(100):
            terms_f = {(rng.randint(-6, 6), rng.randint(-6, 6)): rng.randint(1, 2)
                       for _ in range(3)}
            terms_g = {(rng.randint(-6, 6), rng.randint(-6, 6)): rng.randint(1, 2)
                       for _ in range(3)}
            f, g = LaurentPoly(k, terms_f), LaurentPoly(k, terms_g)
            assert (f + g).frobenius() == f.frobenius() + g.frobenius()

    def test_context_mismatch(self):
        with pytest.raises(ContextMismatch):
            ctx(p=2).one() + ctx(p=3).one()


@st.composite
def laurent_pairs(draw):
    k = ctx(p=3, r=2)
    def poly():
        n = draw(st.integers(0, 3))
        terms = {}
        for _ in range(n):
            alpha = (draw(st.integers(-6, 6)), draw(st.integers(-6, 6)))
            terms[alpha] = draw(st.integers(1, 2))
        return LaurentPoly(k, terms)
    return poly(), poly(), poly()


class TestRingAxioms:
    @settings(max_examples=200, derandomize=True)
    @given(laurent_pairs())
    def test_ring_axioms(self, triple):
        f, g, h = triple
        assert (f + g) + h == f + (g + h)
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert f * g == g * f


class TestGrammar:
    def test_round_trip_canonical(self):
        k = ctx(p=3)
        f = k.monomial((2, -1), 2) + k.var(2) + k.one()
        text = format_element(f)
        assert parse_element(k, text) == f
        assert format_element(parse_element(k, text)) == text

    def test_round_trip_gf4(self):
        k = KContext(2, 2, 1)
        f = k.monomial((3,), 2) + k.monomial((0,), 3)
        text = format_element(f)
        assert parse_element(k, text) == f
        assert format_element(parse_element(k, text)) == text

    def test_parse_examples(self):
        k = ctx(p=5)
        assert parse_element(k, "0").is_zero()
        assert parse_element(k, "7") == k.scalar(2)
        assert parse_element(k, "2*t1^3*t2^-2") == k.monomial((3, -2), 2)
        assert parse_element(k, "t1^1*t1^2") == k.monomial((3, 0))

    def test_parse_errors(self):
        k = ctx()
        with pytest.raises(ParseError):
            parse_element(k, "t3^1")
        with pytest.raises(ParseError):
            parse_element(k, "t1^")
        with pytest.raises(ParseError):
            parse_element(k, "")
