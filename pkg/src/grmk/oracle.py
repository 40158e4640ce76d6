"""Brute-force verification of the q = 1 graded quotients on concrete local
fields.

A field K is specified by an Eisenstein polynomial over the (unramified) base
with residue degree f; its ring of integers is modeled exactly as
O_K/(pi^N) with coefficient vectors of length e over a truncated base ring
(precision p^M, M = ceil(N/e) + 2 guard digits, so products never lose
valuation information before reduction).

The finite group H = (1 + pi O_K)/(1 + pi^N O_K) is enumerated outright and
the subgroup P of p^n-th powers is its image under u -> u^{p^n} (an
endomorphism of an abelian group, hence a subgroup).  P equals the
intersection of (K^x)^{p^n} with the 1-units up to level N because a p^n-th
power pi^{a p^n} zeta^{p^n} u^{p^n} is a 1-unit only when a = 0 and
zeta = 1; the companion check `power_landing_ok` exercises that claim on
non-1-units.  Orders of the graded quotients then come from counting
P-elements by filtration level.

Fixture format (text, '#' comments)::

    p: 2
    f: 1
    coeffs: 2 2 1        # ascending, monic, degree e
"""

from __future__ import annotations

import itertools
import math

from .ffield import FqContext


class NotEisenstein(Exception):
    pass


class TooLarge(Exception):
    pass


class ParamsMismatch(Exception):
    pass


DEFAULT_ENUM_CAP = 1 << 22


# ---------------------------------------------------------------------------
# truncated base rings

class PadicBase:
    """Z/p^M; codes are integers in [0, p^M)."""

    def __init__(self, p, M):
        self.p = p
        self.f = 1
        self.M = M
        self.mod = p ** M

    def from_int(self, n):
        return n % self.mod

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.mod

    def sub(self, a, b):
        return (a - b) % self.mod

    def neg(self, a):
        return (-a) % self.mod

    def mul(self, a, b):
        return (a * b) % self.mod

    def vp(self, a):
        if a == 0:
            return self.M
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def div_p(self, a):
        if a % self.p:
            raise ValueError("not divisible by p")
        return a // self.p

    def unit_inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("not a unit in the base ring")
        return pow(a, -1, self.mod)

    def residue(self, a):
        """Residue in GF(p^f), encoded as an FqContext code."""
        return a % self.p

    def lift_residue(self, code):
        return code % self.p

    def teichmuller(self, code):
        x = self.lift_residue(code)
        for _ in range(self.M + 1):
            x = pow(x, self.p, self.mod)
        return x

    def residue_digits(self):
        return list(range(self.p))

    def truncate(self, a, k):
        if k >= self.M:
            return a
        return a % (self.p ** k)


class GaloisBase:
    """(Z/p^M)[y]/(modulus lift); codes are tuples of f integers in [0, p^M)."""

    def __init__(self, p, f, M, modulus):
        self.p = p
        self.f = f
        self.M = M
        self.mod = p ** M
        self.fq = FqContext(p, f, modulus)
        self.modulus = [c % self.mod for c in self.fq.modulus]

    def from_int(self, n):
        return (n % self.mod,) + (0,) * (self.f - 1)

    def zero(self):
        return (0,) * self.f

    def one(self):
        return self.from_int(1)

    def add(self, a, b):
        return tuple((x + y) % self.mod for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.mod for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.mod for x in a)

    def mul(self, a, b):
        f = self.f
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % self.mod
        for i in range(2 * f - 2, f - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(f):
                    prod[i - f + j] = (prod[i - f + j] - c * self.modulus[j]) % self.mod
        return tuple(prod[:f])

    def vp(self, a):
        v = self.M
        for x in a:
            if x:
                vx = 0
                while x % self.p == 0:
                    x //= self.p
                    vx += 1
                v = min(v, vx)
        return v

    def div_p(self, a):
        if any(x % self.p for x in a):
            raise ValueError("not divisible by p")
        return tuple(x // self.p for x in a)

    def unit_inv(self, a):
        if self.vp(a) > 0:
            raise ZeroDivisionError("not a unit in the base ring")
        y = self.lift_residue(self.fq.inv(self.residue(a)))
        steps = max(1, math.ceil(math.log2(self.M)) + 1)
        two = self.from_int(2)
        for _ in range(steps):
            y = self.mul(y, self.sub(two, self.mul(a, y)))
        return y

    def residue(self, a):
        code = 0
        for x in reversed(a):
            code = code * self.p + (x % self.p)
        return code

    def lift_residue(self, code):
        out = []
        for _ in range(self.f):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def teichmuller(self, code):
        x = self.lift_residue(code)
        q = self.p ** self.f
        for _ in range(self.M + 1):
            y = x
            e = q
            acc = self.one()
            while e:
                if e & 1:
                    acc = self.mul(acc, y)
                e >>= 1
                if e:
                    y = self.mul(y, y)
            x = acc
        return x

    def residue_digits(self):
        return [t for t in itertools.product(range(self.p), repeat=self.f)]

    def truncate(self, a, k):
        if k >= self.M:
            return a
        pk = self.p ** k
        return tuple(x % pk for x in a)


# ---------------------------------------------------------------------------
# the Eisenstein extension

class EisensteinPoly:
    """Monic degree-e polynomial over the base, Eisenstein at p.

    Integer coefficients (ascending, leading 1) embed into any base ring;
    the Eisenstein condition -- constant term of p-valuation exactly 1, the
    others of positive valuation -- is checked at construction.
    """

    def __init__(self, p, f, coeffs, modulus=None):
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise NotEisenstein("polynomial must be monic of degree >= 1")
        e = len(coeffs) - 1
        c0 = coeffs[0]
        if c0 % p != 0 or (c0 // p) % p == 0:
            raise NotEisenstein("constant term must have p-valuation exactly 1")
        for c in coeffs[1:-1]:
            if c % p != 0:
                raise NotEisenstein("middle coefficients must have positive p-valuation")
        self.p = p
        self.f = f
        self.e = e
        self.coeffs = list(coeffs)
        self.modulus = modulus

    def __repr__(self):
        return f"EisensteinPoly(p={self.p}, f={self.f}, coeffs={self.coeffs})"


def load_fixture(path):
    data = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition(":")
            data[key.strip()] = value.strip()
    p = int(data["p"])
    f = int(data.get("f", "1"))
    coeffs = [int(x) for x in data["coeffs"].split()]
    return EisensteinPoly(p, f, coeffs)


class FieldContext:
    """Exact arithmetic in O_K/(pi^N) for K defined by an Eisenstein polynomial.

    Elements are tuples of length e of base-ring codes (coefficients of
    1, pi, ..., pi^{e-1}); reduction uses pi^e = -(c_0 + ... + c_{e-1} pi^{e-1}).
    """

    def __init__(self, poly, N):
        if N < 2:
            raise ValueError("the cutoff N must be >= 2")
        self.poly = poly
        self.p = poly.p
        self.f = poly.f
        self.e = poly.e
        self.N = N
        M = math.ceil(N / poly.e) + 2
        self.M = M
        if poly.f == 1:
            self.base = PadicBase(poly.p, M)
        else:
            self.base = GaloisBase(poly.p, poly.f, M, poly.modulus)
        self.cb = [self.base.from_int(c) for c in poly.coeffs[:-1]]
        self._trunc = [math.ceil((N - j) / poly.e) for j in range(poly.e)]
        self.fq = FqContext(poly.p, poly.f, poly.modulus)

    # -- element helpers

    def zero(self):
        return (self.base.zero(),) * self.e

    def one(self):
        return self.canon((self.base.one(),) + (self.base.zero(),) * (self.e - 1))

    def pi(self):
        if self.e == 1:
            return self.canon((self.base.neg(self.cb[0]),))
        return self.canon((self.base.zero(), self.base.one())
                          + (self.base.zero(),) * (self.e - 2))

    def from_int(self, n):
        return self.canon((self.base.from_int(n),) + (self.base.zero(),) * (self.e - 1))

    def canon(self, vec):
        return tuple(self.base.truncate(x, self._trunc[j]) for j, x in enumerate(vec))

    def add(self, x, y):
        return self.canon(tuple(self.base.add(a, b) for a, b in zip(x, y)))

    def sub(self, x, y):
        return self.canon(tuple(self.base.sub(a, b) for a, b in zip(x, y)))

    def neg(self, x):
        return self.canon(tuple(self.base.neg(a) for a in x))

    def mul(self, x, y):
        b = self.base
        e = self.e
        prod = [b.zero()] * (2 * e - 1)
        for i, xi in enumerate(x):
            if xi != b.zero():
                for j, yj in enumerate(y):
                    prod[i + j] = b.add(prod[i + j], b.mul(xi, yj))
        for i in range(2 * e - 2, e - 1, -1):
            c = prod[i]
            if c != b.zero():
                prod[i] = b.zero()
                for j in range(e):
                    prod[i - e + j] = b.sub(prod[i - e + j], b.mul(c, self.cb[j]))
        return self.canon(tuple(prod[:e]))

    def pow(self, x, k):
        acc = self.one()
        while k:
            if k & 1:
                acc = self.mul(acc, x)
            k >>= 1
            if k:
                x = self.mul(x, x)
        return acc

    def val(self, x):
        """pi-adic valuation in {0, ..., N}; N means zero in O_K/(pi^N)."""
        x = self.canon(x)
        best = self.N
        for j, c in enumerate(x):
            if c != self.base.zero():
                best = min(best, self.e * self.base.vp(c) + j)
        return min(best, self.N)

    def is_unit(self, x):
        return self.val(x) == 0

    def unit_inv(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError("not a unit")
        inv_res = self.fq.inv(self.residue(x))
        y = self.canon((self.base.lift_residue(inv_res),)
                       + (self.base.zero(),) * (self.e - 1))
        steps = max(1, math.ceil(math.log2(self.N)) + 1)
        two = self.from_int(2)
        for _ in range(steps):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        return y

    def residue(self, x):
        return self.base.residue(x[0])

    def teichmuller(self, code):
        return self.canon((self.base.teichmuller(code),)
                          + (self.base.zero(),) * (self.e - 1))

    def a_residue(self):
        """Residue class of p * pi^{-e} in GF(p^f)."""
        b = self.base
        gamma = b.div_p(self.cb[0])
        inv_gamma = b.unit_inv(gamma)
        # pi^e = -c_0 (1 + w) with w = sum_{j>=1} (c_j/c_0) pi^j
        w = self.zero()
        pi_pow = self.one()
        pi = self.pi()
        for j in range(1, self.e):
            pi_pow = self.mul(pi_pow, pi)
            ratio = b.mul(b.div_p(self.cb[j]), inv_gamma)
            w = self.add(w, self.scale(pi_pow, ratio))
        one_plus_w = self.add(self.one(), w)
        a_elem = self.neg(self.scale(self.unit_inv(one_plus_w), inv_gamma))
        return self.residue(a_elem)

    def scale(self, x, code):
        return self.canon(tuple(self.base.mul(c, code) for c in x))


def build_field(poly, N):
    return FieldContext(poly, N)


# ---------------------------------------------------------------------------
# the unit group modulo p^n-th powers

class UnitGroupTable:
    """H = (1 + pi O_K)/(1 + pi^N O_K) with its subgroup P of p^n-th powers.

    Only the valuations of P-elements are retained: |H_m| is p^{f(N-m)} on
    the nose, and |H_m intersect P| is the count of P-elements of level >= m.
    """

    def __init__(self, ctx, n, p_level_counts, p_size):
        self.ctx = ctx
        self.n = n
        self.N = ctx.N
        self.p_level_counts = p_level_counts  # m -> #{x in P : v(x-1) >= m}
        self.p_size = p_size

    def h_size(self, m=1):
        if m >= self.N:
            return 1
        return self.ctx.p ** (self.ctx.f * (self.N - m))

    def hp_index(self, m):
        """|H_m / (H_m intersect P)| for 1 <= m <= N."""
        inter = self.p_level_counts.get(m, 1)
        size = self.h_size(m)
        if size % inter:
            raise AssertionError("intersection size does not divide the level size")
        return size // inter


def unit_group(ctx, n, cap=DEFAULT_ENUM_CAP):
    # N > n*e + e/(p-1), compared exactly so a non-integral e_0 cannot
    # slip through the floor
    if (ctx.p - 1) * ctx.N <= (ctx.p - 1) * n * ctx.e + ctx.e:
        c_n = n * ctx.e + ctx.e / (ctx.p - 1)
        raise ValueError(
            f"cutoff N = {ctx.N} must exceed c_n = n*e + e_0 = {c_n:g}")
    size = ctx.p ** (ctx.f * (ctx.N - 1))
    if size > cap:
        raise TooLarge(f"|H| = {size} exceeds the enumeration cap {cap}")
    digits = ctx.base.residue_digits()
    pi_pows = [ctx.one()]
    pi = ctx.pi()
    for _ in range(ctx.N - 1):
        pi_pows.append(ctx.mul(pi_pows[-1], pi))
    pn = ctx.p ** n
    p_elems = set()
    one = ctx.one()
    for digit_vec in itertools.product(digits, repeat=ctx.N - 1):
        u = one
        for j, dcode in enumerate(digit_vec, start=1):
            if dcode != ctx.base.zero():
                u = ctx.add(u, ctx.scale(pi_pows[j], dcode))
        p_elems.add(ctx.pow(u, pn))
    levels = sorted(ctx.val(ctx.sub(x, one)) for x in p_elems)
    counts = {}
    for m in range(1, ctx.N + 1):
        counts[m] = sum(1 for v in levels if v >= m)
    return UnitGroupTable(ctx, n, counts, len(p_elems))


class GradedOrdersReport:
    """Per-level orders of the graded quotients measured on a concrete field."""

    def __init__(self, table):
        ctx = table.ctx
        self.N = ctx.N
        self.n = table.n
        self.p = ctx.p
        self.f = ctx.f
        self.e = ctx.e
        self.orders = {}
        for m in range(1, ctx.N):
            num = table.hp_index(m)
            den = table.hp_index(m + 1)
            if num % den:
                raise AssertionError("filtration indices do not telescope")
            self.orders[m] = num // den
        # level 0 carries the prime element and Teichmueller contributions,
        # which do not mix with the 1-unit filtration
        self.gr0_pi = ctx.p ** table.n
        self.gr0_teich = math.gcd(ctx.p ** ctx.f - 1, ctx.p ** table.n)
        self.total_u1_image = table.hp_index(1)

    def same_orders(self, other):
        """True when the overlapping levels and the total agree."""
        common = range(1, min(self.N, other.N))
        if any(self.orders[m] != other.orders[m] for m in common):
            return False
        longer = self if self.N >= other.N else other
        for m in range(min(self.N, other.N), longer.N):
            if longer.orders[m] != 1:
                return False
        return self.total_u1_image == other.total_u1_image


def gr_orders(table):
    return GradedOrdersReport(table)


def power_landing_ok(ctx, n, sample_codes=None):
    """p^n-th powers of non-1-units never land among nontrivial 1-units."""
    pn = ctx.p ** n
    codes = sample_codes if sample_codes is not None else list(range(2, ctx.fq.q))[:8]
    for code in codes:
        zeta = ctx.teichmuller(code)
        x = ctx.pow(zeta, pn)
        if ctx.residue(x) == 1 and ctx.val(ctx.sub(x, ctx.one())) >= 1:
            return False
    pi_unit = ctx.mul(ctx.pi(), ctx.add(ctx.one(), ctx.pi()))
    x = ctx.pow(pi_unit, pn)
    return ctx.val(x) != 0


# ---------------------------------------------------------------------------
# comparison against the symbolic engine

class CompareReport:
    def __init__(self, rows, gr0_pi):
        self.rows = rows  # list of (m, oracle_order, engine_order, match)
        self.gr0_pi = gr0_pi

    @property
    def all_match(self):
        return all(match for _, _, _, match in self.rows)


def compare(ctx, params, table=None, cap=DEFAULT_ENUM_CAP):
    """Per-level comparison of brute-forced orders against the presentations."""
    from . import graded

    if params.r != 0:
        raise ParamsMismatch("oracle comparison requires a finite residue field (r = 0)")
    if (params.p, params.f, params.e) != (ctx.p, ctx.f, ctx.e):
        raise ParamsMismatch(
            f"field context (p={ctx.p}, f={ctx.f}, e={ctx.e}) does not match "
            f"params (p={params.p}, f={params.f}, e={params.e})")
    a_ctx = ctx.a_residue()
    if params.a.constant_code() != a_ctx or len(params.a.terms) != 1:
        raise ParamsMismatch(
            f"a mismatch: params carry {params.a}, the field gives {a_ctx}")
    if table is None:
        table = unit_group(ctx, params.n, cap)
    report = gr_orders(table)
    rows = []
    for m in range(1, ctx.N):
        desc = graded.descriptor(params, m)
        engine = graded.graded_order(desc)
        oracle = report.orders[m]
        rows.append((m, oracle, engine, oracle == engine))
    return CompareReport(rows, report.gr0_pi)
