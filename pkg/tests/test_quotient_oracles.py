"""Independent closed-form oracles for the quotient machinery.

For a scalar a and f = 1 the Case II relation subgroup (1+aC)Z_j of
0-forms over GF(p)[t^(+-1)] admits a hand-derived membership rule: writing
a candidate w = sum_k w_k t^(p^k g) along the p-power tower over a degree g
with p not dividing g, solving (1+aC)z = w coefficient by coefficient from
the top forces

    sum_k (-a)^k w_k = 0   (mod p),

with the tower truncated to the slices where Z_j lives (exponents divisible
by p^j give relations reaching down to p^(j-1) g), and on the constant slice
solvability is exactly (1+a) != 0 mod p.  None of that reasoning touches the
windowed reducer, so agreement is a real cross-check.
"""

import random

import pytest

from grmk.ffield import LaurentPoly
from grmk.forms import DiffForm
from grmk.graded import CDVFParams, descriptor, graded_order, is_zero, reduce
from grmk.selftest import rand_form


def tower_split(exp, p):
    """exp = p^k * g with p not dividing g (g = 0 only for exp = 0)."""
    if exp == 0:
        return 0, 0
    k = 0
    while exp % p == 0:
        exp //= p
        k += 1
    return k, exp


def membership_rule(params, z_level, poly):
    """Hand-derived membership of a 0-form in (1+aC)Z_{z_level}, f=1, scalar a."""
    p = params.p
    a_code = params.a.constant_code()
    towers = {}
    const_coeff = 0
    for (exp,), c in poly.terms.items():
        k, g = tower_split(exp, p)
        if g == 0:
            const_coeff = c
            continue
        towers.setdefault(g, {})[k] = c
    # constant slice: (1+aC)(c) = (1+a)c over the prime field
    if const_coeff and (1 + a_code) % p == 0:
        return False
    for g, coeffs in towers.items():
        # relations t^{p^k g} + a t^{p^{k-1} g} exist for k >= z_level, so
        # the slots below z_level - 1 are untouched and must vanish, and the
        # reachable tail must satisfy the alternating a-weighted sum rule
        for k, c in coeffs.items():
            if k < z_level - 1 and c % p:
                return False
        total = 0
        sign = 1
        for k in range(z_level - 1, max(coeffs, default=0) + 1):
            total = (total + sign * coeffs.get(k, 0)) % p
            sign = (sign * (-a_code)) % p
        if total % p:
            return False
    return True


CONFIGS = [
    # (p, e, n, a, m) with the resulting z_level in the comment
    (2, 2, 2, "1", 6),   # CaseII(2), z_level 1
    (2, 2, 2, "1", 4),   # CaseII(1), z_level 1
    (3, 6, 2, "1", 15),  # CaseII(2), z_level 1, (1+a) invertible
    (3, 6, 2, "2", 15),  # CaseII(2), z_level 1, (1+a) = 0
    (3, 6, 2, "2", 9),   # CaseII(1), z_level 1
    (2, 4, 3, "1", 8),   # CaseII(1), z_level 2
    (2, 4, 3, "1", 12),  # CaseII(2), z_level 1
]


class TestClosedFormMembership:
    @pytest.mark.parametrize("p,e,n,a,m", CONFIGS)
    def test_reducer_matches_hand_rule(self, p, e, n, a, m):
        params = CDVFParams(p, 1, 1, e, n, 1, a)
        desc = descriptor(params, m)
        assert desc.branch == "ac"
        rng = random.Random((p, e, n, a, m).__repr__())
        k = params.kctx
        agreements = 0
        zeros = 0
        for _ in range(300):
            terms = {}
            for _ in range(rng.randint(1, 4)):
                exp = rng.randint(-9, 9)
                code = rng.randint(1, p - 1)
                terms[(exp,)] = (terms.get((exp,), 0) + code) % p
            poly = LaurentPoly(k, terms)
            got = is_zero(desc.element(DiffForm.from_poly(poly)))
            expected = membership_rule(params, desc.z_level, poly)
            assert got == expected, (poly, got, expected)
            agreements += 1
            zeros += got
        assert agreements == 300
        # the draw must exercise both outcomes to mean anything
        assert 0 < zeros < 300

    @pytest.mark.parametrize("p,e,n,a,m", CONFIGS)
    def test_constructed_members_accepted(self, p, e, n, a, m):
        # build tower elements satisfying the rule and check both verdicts
        params = CDVFParams(p, 1, 1, e, n, 1, a)
        desc = descriptor(params, m)
        k = params.kctx
        a_code = params.a.constant_code()
        rng = random.Random(m * 1000 + p)
        for _ in range(50):
            g = rng.choice([x for x in range(-5, 6) if x and x % p])
            kk = rng.randint(desc.z_level, desc.z_level + 2)
            c = rng.randint(1, p - 1)
            # (1+aC)(c t^{p^k g}) = c t^{p^k g} + a c t^{p^{k-1} g} for f=1
            w = k.monomial((p ** kk * g,), c) + k.monomial(
                (p ** (kk - 1) * g,), (a_code * c) % p)
            assert membership_rule(params, desc.z_level, w)
            assert is_zero(desc.element(DiffForm.from_poly(w)))


class TestRankNullityEnumeration:
    def test_distinct_representatives_count(self):
        # enumerate every GF(2) 0-form on a small degree box; the reduction
        # map is linear, so #images * #kernel must equal the box count, and
        # #kernel must match the closed-form membership rule
        params = CDVFParams(2, 1, 1, 2, 2, 1, "1")
        desc = descriptor(params, 6)
        k = params.kctx
        box = [-2, -1, 0, 1, 2]
        images = set()
        kernel = 0
        rule_kernel = 0
        for mask in range(2 ** len(box)):
            terms = {(box[i],): 1 for i in range(len(box)) if mask >> i & 1}
            poly = LaurentPoly(k, terms)
            red = reduce(desc.element(DiffForm.from_poly(poly)))
            images.add(repr(red))
            kernel += red.is_zero_pair()
            rule_kernel += membership_rule(params, desc.z_level, poly)
        assert kernel == rule_kernel
        assert len(images) * kernel == 2 ** len(box)

    def test_theta_branch_rank_nullity(self):
        params = CDVFParams(2, 1, 1, 2, 2, 2, "1")
        desc = descriptor(params, 3)
        assert desc.branch == "theta"
        k = params.kctx
        box = [-1, 0, 1, 2]
        images = set()
        kernel = 0
        for mask in range(2 ** (2 * len(box))):
            t1 = {(box[i],): 1 for i in range(len(box)) if mask >> i & 1}
            t2 = {(box[i],): 1 for i in range(len(box))
                  if mask >> (i + len(box)) & 1}
            w1 = DiffForm(k, 1, {(1,): LaurentPoly(k, t1)})
            w2 = DiffForm.from_poly(LaurentPoly(k, t2))
            red = reduce(desc.element(w1, w2))
            images.add(repr(red))
            kernel += red.is_zero_pair()
        assert len(images) * kernel == 2 ** (2 * len(box))
