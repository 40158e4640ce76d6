import random

import pytest

from grmk.ffield import KContext, LaurentPoly
from grmk.forms import DiffForm, d, format_form, inv_cartier_iter
from grmk.graded import (CASE_I, CASE_II, CASE_III, OUT_OF_RANGE, PRIME,
                         CDVFParams, CoefficientNotIntegral, MalformedSymbol,
                         OutOfRangeLevel, PreconditionViolated, SymbolExpr,
                         WindowOverflow, classify, descriptor, format_symbol,
                         graded_order, is_zero, level_shift_consistency,
                         make_z_tower_element, one_plus_ac, parse_symbol,
                         reduce, symbol_to_forms, theta)
from grmk.selftest import rand_form


def params_q2i(q=1, r=0):
    return CDVFParams(2, 1, r, 2, 2, q, "1")


class TestParams:
    def test_e0_must_be_integral(self):
        with pytest.raises(ValueError):
            CDVFParams(3, 1, 0, 3, 1, 1, "1")

    def test_zeta_divisibility_enforced(self):
        # p^(n-1)(p-1) | e fails for p=2, e=2, n=3
        with pytest.raises(ValueError):
            CDVFParams(2, 1, 0, 2, 3, 1, "1")

    def test_a_nonzero(self):
        with pytest.raises(ValueError):
            CDVFParams(2, 1, 0, 2, 2, 1, "0")

    def test_thresholds(self):
        P = params_q2i()
        assert [P.threshold(i) for i in range(3)] == [0, 4, 6]


class TestClassify:
    def test_case_i_low(self):
        P = params_q2i()
        case = classify(P, 3)
        assert case.tag == CASE_I and case.i == 0 and case.s == 0

    def test_case_ii_and_iii(self):
        P = params_q2i()
        assert classify(P, 4).tag == CASE_II and classify(P, 4).i == 1
        assert classify(P, 7).tag == CASE_III

    def test_out_of_range(self):
        assert classify(params_q2i(), 0).tag == OUT_OF_RANGE

    def test_partition(self):
        for P in (params_q2i(), CDVFParams(3, 1, 0, 6, 2, 1, "1")):
            for m in range(1, P.threshold(P.n) + 5):
                case = classify(P, m)
                assert case.tag in (CASE_I, CASE_II, CASE_III)
                if case.tag == CASE_I:
                    assert 0 <= case.i < P.n
                    assert P.threshold(case.i) < m < P.threshold(case.i + 1)
                if case.tag == CASE_II:
                    assert 0 < case.i <= P.n
                    assert m == P.threshold(case.i)


class TestTheta:
    def test_zero_map_on_zero_module(self):
        # q = 1: the source O^{-1} is the zero module
        P = params_q2i(q=1, r=1)
        pair = theta(P, 3, DiffForm.zero(P.kctx, -1))
        assert pair[0].is_zero() and pair[1].is_zero()

    def test_direct_evaluation_q2(self):
        # s=0, i=0, q=2: theta(t1) = (d t1, (m mod p) t1)
        P = CDVFParams(2, 1, 2, 2, 2, 2, "1")
        m = 3
        w = DiffForm.from_poly(P.kctx.var(1))
        t1_, t2_ = theta(P, m, w)
        assert t1_ == d(w)
        assert t2_ == w.scale(m % P.p)

    def test_theta_of_zero(self):
        P = CDVFParams(2, 1, 2, 2, 2, 2, "1")
        pair = theta(P, 3, DiffForm.zero(P.kctx, 0))
        assert pair[0].is_zero() and pair[1].is_zero()

    def test_wrong_case_rejected(self):
        P = params_q2i()
        with pytest.raises(PreconditionViolated):
            theta(P, 4, DiffForm.zero(P.kctx, -1))

    def test_nonintegral_coefficient_reported(self):
        # unreachable through classify under the enforced divisibility, but
        # the guard must report rather than truncate
        from grmk.graded import _theta_coeff
        P = params_q2i()
        with pytest.raises(CoefficientNotIntegral):
            _theta_coeff(P, 3, 1, 1)  # p^1 does not divide 3 - 1*2


class TestOnePlusAC:
    def test_zero(self):
        P = params_q2i()
        assert one_plus_ac(P, DiffForm.zero(P.kctx, 0)).is_zero()

    def test_prime_field_identity_action(self):
        # r=0, k=F_p: C is the identity, so (1+aC)x = (1+a)x
        P = CDVFParams(3, 1, 0, 2, 1, 1, "1")
        x = DiffForm.from_poly(P.kctx.scalar(1))
        out = one_plus_ac(P, x)
        assert out == DiffForm.from_poly(P.kctx.scalar(2))

    def test_annihilates_f2_with_a_one(self):
        P = params_q2i()
        one = DiffForm.from_poly(P.kctx.one())
        assert one_plus_ac(P, one).is_zero()


class TestDescriptorOrders:
    def test_case_i_order(self):
        P = params_q2i()
        desc = descriptor(P, 5)
        assert desc.branch == "theta"
        assert graded_order(desc) == 2

    def test_case_iii_zero_group(self):
        P = params_q2i()
        assert graded_order(descriptor(P, 7)) == 1

    def test_case_ii_order(self):
        P = params_q2i()
        desc = descriptor(P, 4)
        assert desc.branch == "ac" and desc.z_level == 1
        assert graded_order(desc) == 2

    def test_q2i_order_profile(self):
        P = params_q2i()
        assert [graded_order(descriptor(P, m)) for m in range(1, 7)] == [2] * 6

    def test_q3_order_profile(self):
        P = CDVFParams(3, 1, 0, 2, 1, 1, "2")
        assert [graded_order(descriptor(P, m)) for m in range(1, 4)] == [3] * 3

    def test_m_zero_rejected(self):
        with pytest.raises(OutOfRangeLevel):
            descriptor(params_q2i(), 0)

    def test_dim_table_r1(self):
        P = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        table = graded_order(descriptor(P, 5), radius=2)
        assert set(table) == {(-2,), (-1,), (0,), (1,), (2,)}
        # O^0/B_0 at r=1: every slice contributes one GF(2)-dimension
        assert all(v == 1 for v in table.values())


class TestReduce:
    def test_zero_reduces_to_zero(self):
        P = params_q2i()
        desc = descriptor(P, 5)
        assert is_zero(desc.zero_element())

    def test_theta_image_reduces_to_zero(self):
        rng = random.Random(20)
        P = CDVFParams(2, 1, 2, 2, 2, 2, "1")
        desc = descriptor(P, 3)
        for _ in range(60):
            pair = theta(P, 3, rand_form(rng, P.kctx, 0))
            assert is_zero(desc.element(*pair))

    def test_case_ii_relations_reduce_to_zero(self):
        rng = random.Random(21)
        P = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        desc = descriptor(P, 4)
        for _ in range(60):
            z = make_z_tower_element(P.kctx, rand_form(rng, P.kctx, 0), desc.z_level)
            assert is_zero(desc.element(one_plus_ac(P, z)))

    def test_nonzero_case_i_q1(self):
        # B_s^0 = 0 and theta has zero source at q=1, so constants survive
        P = params_q2i()
        desc = descriptor(P, 5)
        el = desc.element(DiffForm.from_poly(P.kctx.one()))
        assert not is_zero(el)

    def test_case_ii_unit_not_killed_when_map_vanishes(self):
        # over F_2 with a = 1 the operator 1+aC annihilates Z, so the
        # relation subgroup is trivial and the class of 1 is nonzero;
        # this is forced by the measured order 2 of the quotient
        P = params_q2i()
        desc = descriptor(P, 4)
        el = desc.element(DiffForm.from_poly(P.kctx.one()))
        assert not is_zero(el)
        assert graded_order(desc) == 2

    def test_case_iii_everything_zero(self):
        rng = random.Random(22)
        P = CDVFParams(2, 1, 2, 2, 2, 2, "1")
        desc = descriptor(P, 8)
        for _ in range(10):
            el = desc.element(rand_form(rng, P.kctx, 1), rand_form(rng, P.kctx, 0))
            assert is_zero(el)

    def test_contraction_chain_collapses(self):
        P = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        desc = descriptor(P, 6)
        k = P.kctx
        reps = set()
        for expo in (1, 2, 4, 8):
            el = desc.element(DiffForm.from_poly(k.monomial((expo,))))
            reps.add(format_form(reduce(el).w1))
        assert reps == {"t1^1"}

    def test_window_overflow_reported(self):
        P = CDVFParams(2, 1, 1, 2, 2, 1, "t1^1")
        desc = descriptor(P, 4, window_cap=2)
        el = desc.element(DiffForm.from_poly(P.kctx.monomial((8,))))
        with pytest.raises(WindowOverflow):
            reduce(el)

    def test_reduce_idempotent_and_coset_constant(self):
        rng = random.Random(23)
        P = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        for m in (1, 2, 3, 4, 5, 6):
            desc = descriptor(P, m)
            for _ in range(20):
                el = desc.element(rand_form(rng, P.kctx, 0))
                red = reduce(el)
                assert reduce(red) == red


class TestSymbols:
    def test_q1_empty_tail(self):
        P = params_q2i(q=1, r=1)
        el = symbol_to_forms(P, parse_symbol(P.kctx, "{1+pi^3*(1)}"))
        assert format_form(el.w1) == "1" and el.w2.is_zero()

    def test_first_formula(self):
        P = CDVFParams(2, 1, 1, 2, 2, 2, "1")
        el = symbol_to_forms(P, parse_symbol(P.kctx, "{1+pi^2*(t1^1);t1^1}"))
        assert format_form(el.w1) == "t1^1*dlog[1]"
        assert el.w2.is_zero()

    def test_second_formula(self):
        P = CDVFParams(2, 1, 1, 2, 2, 2, "1")
        el = symbol_to_forms(P, parse_symbol(P.kctx, "{1+pi^2*(t1^1);pi}"))
        assert el.w1.is_zero()
        assert format_form(el.w2) == "t1^1"

    def test_prime_moved_with_sign(self):
        # {1+pi^m u, pi, y} = -{1+pi^m u, y, pi} on the form side
        P = CDVFParams(3, 1, 1, 2, 1, 3, "1")
        k = P.kctx
        el = symbol_to_forms(P, SymbolExpr(2, k.one(), [PRIME, k.var(1)]))
        el_last = symbol_to_forms(P, SymbolExpr(2, -k.one(), [k.var(1), PRIME]))
        assert el.w2 == el_last.w2

    def test_malformed(self):
        P = CDVFParams(2, 1, 1, 2, 2, 3, "1")
        k = P.kctx
        with pytest.raises(MalformedSymbol):
            SymbolExpr(2, k.zero(), [])
        with pytest.raises(MalformedSymbol):
            SymbolExpr(2, k.one(), [PRIME, PRIME])
        with pytest.raises(MalformedSymbol):
            SymbolExpr(2, k.one(), [k.var(1) + k.one()])
        with pytest.raises(MalformedSymbol):
            symbol_to_forms(P, SymbolExpr(2, k.one(), [PRIME]))

    def test_symbol_round_trip(self):
        P = CDVFParams(2, 1, 2, 2, 2, 2, "1")
        text = "{1+pi^2*(t2^1+t1^1);pi}"
        sym = parse_symbol(P.kctx, text)
        assert format_symbol(sym) == text


class TestGF4Semilinear:
    # f = 2 makes 1+aC only GF(2)-linear; the flattened solver must still
    # kill relations and stay coset-constant
    def test_relations_and_cosets_over_gf4(self):
        rng = random.Random(30)
        P = CDVFParams(2, 2, 1, 2, 2, 1, "g^1")
        desc = descriptor(P, 6)
        k = P.kctx
        for _ in range(60):
            z = make_z_tower_element(k, rand_form(rng, k, 0), desc.z_level)
            rel = one_plus_ac(P, z)
            assert is_zero(desc.element(rel))
            w = rand_form(rng, k, 0)
            assert reduce(desc.element(w + rel)) == reduce(desc.element(w))

    def test_gf4_case_ii_order_r0(self):
        # over GF(4) with a = 1: z + z^(1/2) has image {0, 1},
        # so the quotient at the threshold has order 2
        P = CDVFParams(2, 2, 0, 1, 1, 1, "1")
        assert graded_order(descriptor(P, 2)) == 2
        assert graded_order(descriptor(P, 1)) == 4


class TestParameterSweep:
    def test_descriptor_reduce_sweep(self):
        # broad shakeout: every branch, r up to 2, q up to 3, p in {2,3,5}
        rng = random.Random(99)
        combos = []
        for p, e_list, n in [(2, [2, 4], 1), (2, [2, 4], 2), (3, [2, 6], 1),
                             (3, [6], 2), (5, [4], 1), (5, [20], 2)]:
            for e in e_list:
                if e % (p ** (n - 1) * (p - 1)) == 0:
                    combos.append((p, e, n))
        count = 0
        for (p, e, n) in combos:
            for r in (0, 1, 2):
                for q in (1, 2, 3):
                    a = "1" if r == 0 else "t1^1"
                    P = CDVFParams(p, 1, r, e, n, q, a)
                    cn = P.threshold(n)
                    for m in range(1, min(cn + 3, 30), 2):
                        desc = descriptor(P, m)
                        graded_order(desc, radius=1)
                        el = desc.element(rand_form(rng, P.kctx, q - 1),
                                          rand_form(rng, P.kctx, q - 2))
                        red = reduce(el)
                        assert reduce(red) == red, (p, e, n, r, q, m)
                        if desc.branch == "zero":
                            assert is_zero(el)
                        count += 1
        assert count > 400


class TestShiftConsistency:
    def test_orders_match_q2i(self):
        P = params_q2i()
        rep = level_shift_consistency(P, 5)
        assert rep.consistent
        assert rep.order_high == rep.order_low == 2

    def test_case_ii_match(self):
        P = params_q2i()
        rep = level_shift_consistency(P, 6)
        assert rep.consistent
        assert rep.case_high.tag == CASE_II and rep.case_low.tag == CASE_II

    def test_precondition(self):
        P = params_q2i()
        with pytest.raises(PreconditionViolated):
            level_shift_consistency(P, 4)
        with pytest.raises(PreconditionViolated):
            level_shift_consistency(CDVFParams(2, 1, 0, 2, 1, 1, "1"), 5)

    def test_probes_pass_through(self):
        rng = random.Random(24)
        P = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        probes = [(rand_form(rng, P.kctx, 0), DiffForm.zero(P.kctx, -1))
                  for _ in range(5)]
        rep = level_shift_consistency(P, 5, probes=probes)
        assert rep.consistent and not rep.probe_flags

    def test_grid(self):
        for (p, e, n) in [(2, 2, 2), (2, 4, 2), (3, 6, 2)]:
            for r in (0, 1):
                for q in (1, 2):
                    P = CDVFParams(p, 1, r, e, n, q, "1")
                    lo = P.e + P.e0 + 1
                    hi = P.threshold(P.n)
                    for m in range(lo, hi + 1):
                        rep = level_shift_consistency(P, m)
                        assert rep.consistent, (p, e, n, r, q, m, rep.structure_note)
