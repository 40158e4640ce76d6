"""Presentations of the graded quotients gr^m of the unit filtration on
Milnor K-groups modulo p^n of a mixed-characteristic complete discrete
valuation field, in terms of differential forms of the residue field.

The arithmetic context carries p, the residue parameters (f, r), the
absolute ramification index e with e_0 = e/(p-1), the modulus exponent n,
the symbol degree q, and the residue class a of p*pi^{-e}.  The divisibility
p^{n-1}(p-1) | e is enforced at construction: it is the necessary numeric
side of requiring a p^n-th root of unity in the field, and it is exactly
what keeps the Case I relation-map coefficient integral.

Levels m >= 1 classify against the thresholds c_i = i*e + e_0 (c_0 = 0):

  Case I   (c_i < m < c_{i+1}, 0 <= i < n, s = v_p(m)):
      n-i > s:  coker of  theta : O^{q-2} -> O^{q-1}/B_s (+) O^{q-2}/B_s,
                theta(w) = (C^{-s} d w, (-1)^q (m-ie)/p^s C^{-s} w)
      n-i <= s: O^{q-1}/Z_{n-i} (+) O^{q-2}/Z_{n-i}
  Case II  (m = c_i, 0 < i <= n):
      O^{q-1}/(1+aC)Z_{n-i} (+) O^{q-2}/(1+aC)Z_{n-i}
      (for i = n the operator is applied on Z_1, the part of Z_0 where the
      Cartier operator is defined)
  Case III (m > c_n): the zero group.

Elements are pairs (w1, w2) of forms of degrees q-1 and q-2; under the
symbol map a pair (x dlog y_1 ^ ... , 0) corresponds to the symbol
{1 + pi^m x~, y~_1, ...} and (0, ...) to symbols ending in pi.

Reduction solves the relation subgroup exactly on a support-closed degree
window; canonical representatives are deterministic and constant on cosets.
"""

from __future__ import annotations

import itertools
import math
import re

from .ffield import FqContext, KContext, LaurentPoly, parse_element
from .forms import (B_KIND, Z_KIND, DiffForm, cartier, d, format_form, in_Z,
                    inv_cartier_iter, subsets_of, subspace_basis, wedge)
from .linalg import RowSpace

CASE_I = "I"
CASE_II = "II"
CASE_III = "III"
OUT_OF_RANGE = "out_of_range"

PRIME = "pi"

DEFAULT_WINDOW_CAP = 100_000
DEFAULT_TABLE_RADIUS = 3


class OutOfRangeLevel(Exception):
    pass


class CoefficientNotIntegral(Exception):
    pass


class WindowOverflow(Exception):
    pass


class MalformedSymbol(Exception):
    pass


class PreconditionViolated(Exception):
    pass


def vp(n, p):
    """Exact p-adic valuation of a positive integer."""
    if n <= 0:
        raise ValueError("valuation of a nonpositive integer")
    s = 0
    while n % p == 0:
        n //= p
        s += 1
    return s


class CDVFParams:
    """Arithmetic context (p, f, r, e, n, q, a) for the graded quotients."""

    def __init__(self, p, f, r, e, n, q, a, modulus=None):
        kctx = KContext(p, f, r, modulus)
        if e < 1 or n < 1 or q < 1:
            raise ValueError("e, n, q must all be >= 1")
        if e % (p - 1) != 0:
            raise ValueError(f"(p-1) = {p - 1} must divide e = {e}: e_0 is not integral")
        if e % (p ** (n - 1) * (p - 1)) != 0:
            raise ValueError(
                f"p^(n-1)*(p-1) = {p ** (n - 1) * (p - 1)} must divide e = {e}")
        if isinstance(a, str):
            a = parse_element(kctx, a)
        if not isinstance(a, LaurentPoly) or a.ctx != kctx:
            raise ValueError("a must be an element of the residue field context")
        if a.is_zero():
            raise ValueError("a must be a nonzero residue")
        self.kctx = kctx
        self.p = p
        self.f = f
        self.r = r
        self.e = e
        self.n = n
        self.q = q
        self.a = a

    @property
    def e0(self):
        return self.e // (self.p - 1)

    def threshold(self, i):
        """c_i = i*e + e_0 for i >= 1, c_0 = 0."""
        return 0 if i == 0 else i * self.e + self.e0

    def with_level(self, n):
        return CDVFParams(self.p, self.f, self.r, self.e, n, self.q, self.a,
                          modulus=self.kctx.fq.modulus if self.f > 1 else None)

    def __repr__(self):
        return (f"CDVFParams(p={self.p}, f={self.f}, r={self.r}, e={self.e}, "
                f"n={self.n}, q={self.q}, a={self.a})")


class GradedCase:
    """Classification tag for a level m; exactly one tag applies."""

    __slots__ = ("tag", "i", "s")

    def __init__(self, tag, i=None, s=None):
        self.tag = tag
        self.i = i
        self.s = s

    def __eq__(self, other):
        return (isinstance(other, GradedCase)
                and (self.tag, self.i, self.s) == (other.tag, other.i, other.s))

    def __repr__(self):
        if self.tag == CASE_I:
            return f"CaseI(i={self.i}, s={self.s})"
        if self.tag == CASE_II:
            return f"CaseII(i={self.i})"
        if self.tag == CASE_III:
            return "CaseIII"
        return "OutOfRange"


def classify(params, m):
    """Place m against the thresholds; s is the exact p-adic valuation of m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return GradedCase(OUT_OF_RANGE)
    if m > params.threshold(params.n):
        return GradedCase(CASE_III)
    for i in range(1, params.n + 1):
        if m == params.threshold(i):
            return GradedCase(CASE_II, i=i)
    for i in range(params.n):
        if params.threshold(i) < m < params.threshold(i + 1):
            return GradedCase(CASE_I, i=i, s=vp(m, params.p))
    raise AssertionError(f"classification fell through for m = {m}")


# ---------------------------------------------------------------------------
# the relation map of Case I and the 1 + aC operator of Case II

def _theta_coeff(params, m, i, s):
    ps = params.p ** s
    if (m - i * params.e) % ps != 0:
        raise CoefficientNotIntegral(
            f"p^s = {ps} does not divide m - i*e = {m - i * params.e}")
    lam = ((m - i * params.e) // ps) % params.p
    if params.q % 2 == 1:
        lam = (-lam) % params.p
    return lam


def _theta_pair(params, s, coeff_code, w):
    first = inv_cartier_iter(d(w), s)
    second = inv_cartier_iter(w, s).scale(coeff_code)
    return first, second


def theta(params, m, w):
    """Relation map w -> (C^{-s} d w, (-1)^q (m-ie)/p^s C^{-s} w).

    Defined for levels strictly between thresholds with n-i > s; its cokernel
    presents the graded quotient there.  w has degree q-2.
    """
    case = classify(params, m)
    if case.tag != CASE_I or params.n - case.i <= case.s:
        raise PreconditionViolated(
            f"theta is only defined in Case I with n-i > s; m={m} gives {case!r}")
    lam = _theta_coeff(params, m, case.i, case.s)
    return _theta_pair(params, case.s, lam, w)


def one_plus_ac(params, z):
    """Apply 1 + aC; z must be closed so that the Cartier operator applies."""
    return z + cartier(z).times_poly(params.a)


# ---------------------------------------------------------------------------
# descriptors

class GrDescriptor:
    """Quotient presentation of the graded piece at level m.

    branch is one of 'theta' (Case I, n-i > s), 'zmod' (Case I, n-i <= s),
    'ac' (Case II) or 'zero' (Case III); the relation data needed by each
    branch is stored alongside.
    """

    def __init__(self, params, m, case, window_cap=DEFAULT_WINDOW_CAP):
        self.params = params
        self.m = m
        self.case = case
        self.window_cap = window_cap
        self.theta_coeff = None
        self.b_level = None
        self.z_level = None
        if case.tag == CASE_I:
            if params.n - case.i > case.s:
                self.branch = "theta"
                self.b_level = case.s
                self.theta_coeff = _theta_coeff(params, m, case.i, case.s)
            else:
                self.branch = "zmod"
                self.z_level = params.n - case.i
        elif case.tag == CASE_II:
            self.branch = "ac"
            # i = n gives Z_0; the operator lives on its closed part Z_1
            self.z_level = max(params.n - case.i, 1)
        elif case.tag == CASE_III:
            self.branch = "zero"
        else:
            raise OutOfRangeLevel(f"no presentation at level m = {m}")

    def zero_element(self):
        k = self.params.kctx
        return GrElement(self,
                         DiffForm.zero(k, self.params.q - 1),
                         DiffForm.zero(k, self.params.q - 2))

    def element(self, w1, w2=None):
        k = self.params.kctx
        if w2 is None:
            w2 = DiffForm.zero(k, self.params.q - 2)
        return GrElement(self, w1, w2)

    def reduce(self, el):
        return reduce(el)

    def is_zero(self, el):
        return is_zero(el)

    def __repr__(self):
        return f"GrDescriptor(m={self.m}, case={self.case!r}, branch={self.branch})"


class GrElement:
    """A pair (w1, w2) of forms of degrees q-1 and q-2 inside a descriptor."""

    __slots__ = ("desc", "w1", "w2")

    def __init__(self, desc, w1, w2):
        q = desc.params.q
        k = desc.params.kctx
        if w1.kctx != k or w2.kctx != k:
            raise ValueError("element forms live over the wrong residue field")
        if not w1.is_zero() and w1.q != q - 1:
            raise ValueError(f"w1 must have degree {q - 1}, got {w1.q}")
        if not w2.is_zero() and w2.q != q - 2:
            raise ValueError(f"w2 must have degree {q - 2}, got {w2.q}")
        self.desc = desc
        self.w1 = w1 if w1.q == q - 1 else DiffForm.zero(k, q - 1)
        self.w2 = w2 if w2.q == q - 2 else DiffForm.zero(k, q - 2)

    def __add__(self, other):
        if other.desc is not self.desc and (
                other.desc.m != self.desc.m
                or other.desc.params is not self.desc.params):
            raise ValueError("elements belong to different descriptors")
        return GrElement(self.desc, self.w1 + other.w1, self.w2 + other.w2)

    def is_zero_pair(self):
        return self.w1.is_zero() and self.w2.is_zero()

    def __eq__(self, other):
        return (isinstance(other, GrElement)
                and self.w1 == other.w1 and self.w2 == other.w2)

    def __repr__(self):
        return f"GrElement(({format_form(self.w1)}; {format_form(self.w2)}))"


def descriptor(params, m, window_cap=DEFAULT_WINDOW_CAP):
    if m < 1:
        raise OutOfRangeLevel("levels start at m = 1")
    return GrDescriptor(params, m, classify(params, m), window_cap)


# ---------------------------------------------------------------------------
# reduction: Case I with the relation map (slice-diagonal)

def _slice_vec(index_map, slice_terms, offset=0):
    return {offset + index_map[sub]: c for sub, c in slice_terms.items()}


def _theta_relation_space(desc, beta, subs1, subs2):
    params = desc.params
    kctx = params.kctx
    fq = kctx.fq
    n1 = len(subs1)
    idx1 = {s: i for i, s in enumerate(subs1)}
    idx2 = {s: i for i, s in enumerate(subs2)}
    space = RowSpace(fq)
    for comp in subspace_basis(kctx, beta, params.q - 1, B_KIND, desc.b_level):
        space.add({i: c for i, c in enumerate(comp.vec) if c})
    for comp in subspace_basis(kctx, beta, params.q - 2, B_KIND, desc.b_level):
        space.add({n1 + i: c for i, c in enumerate(comp.vec) if c})
    ps = params.p ** desc.b_level
    if all(x % ps == 0 for x in beta):
        alpha = tuple(x // ps for x in beta)
        for sub in subs2:
            w = DiffForm.monomial(kctx, alpha, sub)
            t1, t2 = _theta_pair(params, desc.b_level, desc.theta_coeff, w)
            vec = {}
            vec.update(_slice_vec(idx1, t1.components().get(beta, {})))
            vec.update(_slice_vec(idx2, t2.components().get(beta, {}), offset=n1))
            if vec:
                space.add(vec)
    return space


def _reduce_theta(desc, w1, w2):
    params = desc.params
    kctx = params.kctx
    subs1 = subsets_of(kctx.r, params.q - 1)
    subs2 = subsets_of(kctx.r, params.q - 2)
    n1 = len(subs1)
    idx1 = {s: i for i, s in enumerate(subs1)}
    idx2 = {s: i for i, s in enumerate(subs2)}
    comps1 = w1.components()
    comps2 = w2.components()
    out1, out2 = {}, {}
    for beta in sorted(set(comps1) | set(comps2)):
        space = _theta_relation_space(desc, beta, subs1, subs2)
        vec = {}
        vec.update(_slice_vec(idx1, comps1.get(beta, {})))
        vec.update(_slice_vec(idx2, comps2.get(beta, {}), offset=n1))
        red = space.reduce(vec)
        s1 = {subs1[c]: v for c, v in red.items() if c < n1}
        s2 = {subs2[c - n1]: v for c, v in red.items() if c >= n1}
        if s1:
            out1[beta] = s1
        if s2:
            out2[beta] = s2
    return (DiffForm.from_components(kctx, params.q - 1, out1),
            DiffForm.from_components(kctx, params.q - 2, out2))


# ---------------------------------------------------------------------------
# reduction: Case II (1 + aC is not degree-homogeneous; use a closed window)

def _shift_bound(params):
    """Radius of the degree ball every window must contain.

    Contraction steps gamma -> gamma/p + shift(a) have all their periodic
    points inside this ball; seeding it makes canonical forms coset-constant.
    """
    supp = params.a.terms
    amax = max((max(abs(x) for x in alpha) if alpha else 0) for alpha in supp)
    return math.ceil(params.p * amax / (params.p - 1))


def _ac_window(params, seed_slices, cap):
    p = params.p
    r = params.r
    radius = _shift_bound(params)
    window = set(seed_slices)
    if r == 0:
        window.add(())
    else:
        window.update(itertools.product(range(-radius, radius + 1), repeat=r))
    shifts = sorted(params.a.terms)
    queue = list(window)
    while queue:
        gamma = queue.pop()
        if any(x % p for x in gamma):
            continue
        for delta in shifts:
            nxt = tuple(x // p + dx for x, dx in zip(gamma, delta))
            if nxt not in window:
                window.add(nxt)
                queue.append(nxt)
                if len(window) > cap:
                    raise WindowOverflow(
                        f"degree window exceeded the configured cap {cap}")
    # expansion-dominant order: larger sup-norm degrees come first, so every
    # relation generator pivots on the degree of its tower part
    return sorted(window, key=lambda g: (-max((abs(x) for x in g), default=0), g))


def _flatten_form(params, w, subs, slice_pos, nsub):
    f = params.f
    p = params.p
    vec = {}
    for alpha, sl in w.components().items():
        base = slice_pos[alpha] * nsub * f
        for i, sub in enumerate(subs):
            c = sl.get(sub, 0)
            for l in range(f):
                digit = c % p
                c //= p
                if digit:
                    vec[base + i * f + l] = digit
    return vec


def _unflatten(params, vec, subs, slices, nsub):
    f = params.f
    p = params.p
    comps = {}
    for col, digit in vec.items():
        rest, l = divmod(col, f)
        slice_idx, sub_idx = divmod(rest, nsub)
        gamma = slices[slice_idx]
        sub = subs[sub_idx]
        sl = comps.setdefault(gamma, {})
        sl[sub] = sl.get(sub, 0) + digit * p ** l
    return comps


def _ac_relation_space(desc, deg, slices):
    """Row space of (1+aC) applied to the tower slices, over GF(p)."""
    params = desc.params
    kctx = params.kctx
    subs = subsets_of(kctx.r, deg)
    nsub = len(subs)
    fp = FqContext(params.p, 1)
    space = RowSpace(fp)
    if nsub == 0:
        return space, subs, nsub
    slice_pos = {g: i for i, g in enumerate(slices)}
    for gamma in slices:
        for comp in subspace_basis(kctx, gamma, deg, Z_KIND, desc.z_level):
            sl = {subs[i]: c for i, c in enumerate(comp.vec) if c}
            z0 = DiffForm.from_components(kctx, deg, {gamma: sl})
            for l in range(params.f):
                z = z0 if l == 0 else z0.scale(params.p ** l)
                g = one_plus_ac(params, z)
                if any(s not in slice_pos for s in g.components()):
                    raise AssertionError("relation image escaped the closed window")
                space.add(_flatten_form(params, g, subs, slice_pos, nsub))
    return space, subs, nsub


def _reduce_ac_slot(desc, w, deg):
    params = desc.params
    kctx = params.kctx
    if w.is_zero() or deg < 0 or deg > kctx.r:
        return w
    slices = _ac_window(params, w.components().keys(), desc.window_cap)
    space, subs, nsub = _ac_relation_space(desc, deg, slices)
    if nsub == 0:
        return w
    slice_pos = {g: i for i, g in enumerate(slices)}
    red = space.reduce(_flatten_form(params, w, subs, slice_pos, nsub))
    return DiffForm.from_components(
        kctx, deg, _unflatten(params, red, subs, slices, nsub))


# ---------------------------------------------------------------------------
# public reduction interface

def reduce(el):
    """Canonical representative of el in its descriptor's presentation."""
    desc = el.desc
    params = desc.params
    if desc.branch == "zero":
        return desc.zero_element()
    if desc.branch == "zmod":
        from .forms import nf_mod
        return GrElement(desc,
                         nf_mod(el.w1, Z_KIND, desc.z_level),
                         nf_mod(el.w2, Z_KIND, desc.z_level))
    if desc.branch == "theta":
        w1, w2 = _reduce_theta(desc, el.w1, el.w2)
        return GrElement(desc, w1, w2)
    w1 = _reduce_ac_slot(desc, el.w1, params.q - 1)
    w2 = _reduce_ac_slot(desc, el.w2, params.q - 2)
    return GrElement(desc, w1, w2)


def is_zero(el):
    if el.desc.branch == "zero":
        return True
    return reduce(el).is_zero_pair()


# ---------------------------------------------------------------------------
# orders and dimension tables

def _slice_fp_dim(desc, beta):
    """GF(p)-dimension of the graded slice pair at degree beta."""
    params = desc.params
    kctx = params.kctx
    subs1 = subsets_of(kctx.r, params.q - 1)
    subs2 = subsets_of(kctx.r, params.q - 2)
    n1, n2 = len(subs1), len(subs2)
    if desc.branch == "zero":
        return 0
    if desc.branch == "theta":
        space = _theta_relation_space(desc, beta, subs1, subs2)
        return params.f * (n1 + n2 - space.rank())
    if desc.branch == "zmod":
        z1 = len(subspace_basis(kctx, beta, params.q - 1, Z_KIND, desc.z_level))
        z2 = len(subspace_basis(kctx, beta, params.q - 2, Z_KIND, desc.z_level))
        return params.f * ((n1 - z1) + (n2 - z2))
    raise ValueError("per-slice dimensions of Case II need the windowed table")


def _ac_dim_table(desc, box):
    params = desc.params
    total = {beta: 0 for beta in box}
    slices = _ac_window(params, box, desc.window_cap)
    f = params.f
    for deg in (params.q - 1, params.q - 2):
        space, subs, nsub = _ac_relation_space(desc, deg, slices)
        if nsub == 0:
            continue
        pivots_by_slice = {}
        for piv in space.pivots():
            slice_idx = piv // (nsub * f)
            gamma = slices[slice_idx]
            pivots_by_slice[gamma] = pivots_by_slice.get(gamma, 0) + 1
        for beta in box:
            total[beta] += f * nsub - pivots_by_slice.get(beta, 0)
    return total


def _degree_box(r, radius):
    if r == 0:
        return [()]
    return sorted(itertools.product(range(-radius, radius + 1), repeat=r))


def graded_order(desc, radius=DEFAULT_TABLE_RADIUS):
    """Exact group order (r = 0) or a per-degree GF(p)-dimension table (r >= 1)."""
    params = desc.params
    if params.r == 0:
        if desc.branch == "zero":
            return 1
        if desc.branch == "ac":
            table = _ac_dim_table(desc, [()])
            return params.p ** table[()]
        return params.p ** _slice_fp_dim(desc, ())
    box = _degree_box(params.r, radius)
    if desc.branch == "zero":
        return {beta: 0 for beta in box}
    if desc.branch == "ac":
        return _ac_dim_table(desc, box)
    return {beta: _slice_fp_dim(desc, beta) for beta in box}


# ---------------------------------------------------------------------------
# symbols

class SymbolExpr:
    """A restricted symbol {1 + pi^m u~, y_1, ..., y_{q-1}}.

    u is the residue of the unit part of the first entry; tail entries are
    lifted k-monomials, or at most one PRIME marker for the prime element.
    """

    __slots__ = ("m", "u", "tail")

    def __init__(self, m, u, tail):
        if u is None or u.is_zero():
            raise MalformedSymbol("the unit residue u must be nonzero")
        primes = sum(1 for t in tail if t is PRIME or t == PRIME)
        if primes > 1:
            raise MalformedSymbol("at most one prime-element entry is allowed")
        for t in tail:
            if t is PRIME or t == PRIME:
                continue
            if not isinstance(t, LaurentPoly) or len(t.terms) != 1:
                raise MalformedSymbol(f"tail entry {t!r} is not a monomial")
        self.m = m
        self.u = u
        self.tail = list(tail)

    def __repr__(self):
        return f"SymbolExpr({format_symbol(self)!r})"


def _dlog_of_monomial(kctx, mono):
    """dlog(c t^alpha) = sum alpha_i dlog t_i; the coefficient contributes 0."""
    (alpha, _code), = mono.terms.items()
    terms = {}
    for i in range(1, kctx.r + 1):
        ai = alpha[i - 1] % kctx.p
        if ai:
            terms[(i,)] = kctx.scalar(ai)
    return DiffForm(kctx, 1, terms)


def symbol_to_forms(params, sym):
    """Evaluate the symbol map on a restricted symbol, landing in gr^m.

    A tail of monomials gives (u dlog y_1 ^ ... ^ dlog y_{q-1}, 0); a tail
    ending in the prime element gives (0, u dlog y_1 ^ ... ^ dlog y_{q-2}).
    A prime entry elsewhere is first moved to the last slot, with the sign
    of the transpositions applied to u.
    """
    kctx = params.kctx
    q = params.q
    if len(sym.tail) != q - 1:
        raise MalformedSymbol(f"tail has {len(sym.tail)} entries, expected {q - 1}")
    if sym.u.ctx != kctx:
        raise MalformedSymbol("unit residue lives over the wrong residue field")
    desc = descriptor(params, sym.m)
    prime_pos = [j for j, t in enumerate(sym.tail) if t == PRIME]
    u = sym.u
    if prime_pos:
        j = prime_pos[0]
        transpositions = (q - 2) - j
        if transpositions % 2 == 1:
            u = -u
        rest = [t for t in sym.tail if t != PRIME]
        w = DiffForm.from_poly(u)
        for mono in rest:
            w = wedge(w, _dlog_of_monomial(kctx, mono))
        return GrElement(desc, DiffForm.zero(kctx, q - 1), w)
    w = DiffForm.from_poly(u)
    for mono in sym.tail:
        w = wedge(w, _dlog_of_monomial(kctx, mono))
    return GrElement(desc, w, DiffForm.zero(kctx, q - 2))


_SYMBOL_RE = re.compile(r"^\{1\+pi\^(\d+)\*\((.*?)\)(;.*)?\}$")


def parse_symbol(kctx, text):
    text = text.strip().replace(" ", "")
    m = _SYMBOL_RE.match(text)
    if not m:
        raise MalformedSymbol(
            "expected {1+pi^M*(element); entry; ...} with entries monomials or 'pi'")
    level = int(m.group(1))
    u = parse_element(kctx, m.group(2))
    tail = []
    rest = m.group(3)
    if rest:
        for entry in rest[1:].split(";"):
            if entry == "pi":
                tail.append(PRIME)
            else:
                tail.append(parse_element(kctx, entry))
    return SymbolExpr(level, u, tail)


def format_symbol(sym):
    from .ffield import format_element

    parts = [f"1+pi^{sym.m}*({format_element(sym.u)})"]
    for t in sym.tail:
        parts.append("pi" if t == PRIME else format_element(t))
    return "{" + ";".join(parts) + "}"


# ---------------------------------------------------------------------------
# consistency of the level shift (n, m) -> (n-1, m-e)

class ShiftConsistencyReport:
    """Comparison of the presentations at (n, m) and (n-1, m-e).

    Multiplication by p carries the filtration at level n-1 onto the one at
    level n once m > e + e_0, so the two presentations must agree under the
    index shift i -> i-1.  Any mismatch is reported, never patched.
    """

    def __init__(self, params, m):
        self.params = params
        self.m = m
        self.case_high = None
        self.case_low = None
        self.structure_ok = False
        self.structure_note = ""
        self.order_high = None
        self.order_low = None
        self.orders_ok = True
        self.dim_mismatches = []
        self.probe_flags = []

    @property
    def consistent(self):
        return (self.structure_ok and self.orders_ok
                and not self.dim_mismatches and not self.probe_flags)


def _descriptors_shift_match(d_high, d_low):
    high, low = d_high.case, d_low.case
    if high.tag == CASE_III and low.tag == CASE_III:
        return True, "both beyond the top threshold"
    if high.tag != low.tag or high.tag not in (CASE_I, CASE_II):
        return False, f"case tags differ: {high!r} vs {low!r}"
    if low.i != high.i - 1:
        return False, f"index shift broken: i={high.i} vs i={low.i}"
    if d_high.branch != d_low.branch:
        return False, f"branches differ: {d_high.branch} vs {d_low.branch}"
    if d_high.branch == "theta":
        if high.s != low.s:
            return False, f"valuations differ: s={high.s} vs s={low.s}"
        if d_high.theta_coeff != d_low.theta_coeff:
            return False, (f"relation-map coefficients differ: "
                           f"{d_high.theta_coeff} vs {d_low.theta_coeff}")
    elif d_high.z_level != d_low.z_level:
        return False, f"tower levels differ: {d_high.z_level} vs {d_low.z_level}"
    return True, f"case {high.tag} with index shift {high.i}->{low.i}"


def level_shift_consistency(params, m, probes=(), radius=DEFAULT_TABLE_RADIUS,
                            window_cap=DEFAULT_WINDOW_CAP):
    if params.n <= 1:
        raise PreconditionViolated("the level shift needs n > 1")
    if m <= params.e + params.e0:
        raise PreconditionViolated(
            f"the level shift needs m > e + e_0 = {params.e + params.e0}")
    report = ShiftConsistencyReport(params, m)
    low_params = params.with_level(params.n - 1)
    d_high = descriptor(params, m, window_cap)
    d_low = descriptor(low_params, m - params.e, window_cap)
    report.case_high = d_high.case
    report.case_low = d_low.case
    report.structure_ok, report.structure_note = _descriptors_shift_match(
        d_high, d_low)
    if params.r == 0:
        report.order_high = graded_order(d_high)
        report.order_low = graded_order(d_low)
        report.orders_ok = report.order_high == report.order_low
    else:
        t_high = graded_order(d_high, radius)
        t_low = graded_order(d_low, radius)
        s_high = d_high.case.s if d_high.case.tag == CASE_I else None
        s_low = d_low.case.s if d_low.case.tag == CASE_I else None
        rescale = (s_high is not None and s_low is not None and s_high != s_low
                   and d_high.branch == "theta")
        for beta in sorted(t_high):
            if rescale:
                diff = s_high - s_low
                if diff >= 0:
                    target = tuple(x * params.p ** diff for x in beta)
                elif all(x % params.p ** (-diff) == 0 for x in beta):
                    target = tuple(x // params.p ** (-diff) for x in beta)
                else:
                    continue
                other = t_low.get(target)
            else:
                other = t_low.get(beta)
            if other is not None and t_high[beta] != other:
                report.dim_mismatches.append((beta, t_high[beta], other))
    for probe in probes:
        if isinstance(probe, GrElement):
            w1, w2 = probe.w1, probe.w2
        else:
            w1, w2 = probe
        z_high = is_zero(GrElement(d_high, w1, w2))
        z_low = is_zero(GrElement(d_low, w1, w2))
        if z_high != z_low:
            report.probe_flags.append(
                (format_form(w1), format_form(w2), z_high, z_low))
    return report


def make_z_tower_element(kctx, w, level):
    """A member of Z_level built by iterated inverse Cartier; w is arbitrary."""
    z = inv_cartier_iter(w, level)
    assert in_Z(z, level)
    return z
