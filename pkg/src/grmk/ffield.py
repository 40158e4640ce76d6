"""Exact arithmetic in the residue field model k = GF(p^f)(t_1, ..., t_r),
restricted to Laurent-polynomial representatives.

Scalars of GF(p^f) are encoded as integers in [0, p^f): the base-p digits of
the code are the coordinates with respect to the power basis of the stored
modulus root.  Multiplication runs through exp/log tables built from a
primitive element, so Frobenius, its inverse, and inversion are O(1) lookups.

Text grammar for k-elements (used by the CLI and test fixtures)::

    element  := term ('+' term)*
    term     := coeff ('*' monomial)? | monomial
    monomial := 't'IDX'^'INT ('*' 't'IDX'^'INT)*
    coeff    := INT (reduced mod p) | 'g^'INT (power of the stored generator)

Parsing and printing round-trip bit-exactly on canonical forms.
"""

from __future__ import annotations

import re

# Monic irreducible (and primitive-root-friendly) moduli for small (p, f),
# ascending coefficients.  Any irreducible works: a primitive element is
# located by search when the root itself is not primitive.
DEFAULT_MODULI = {
    (2, 2): [1, 1, 1],
    (2, 3): [1, 1, 0, 1],
    (2, 4): [1, 1, 0, 0, 1],
    (3, 2): [2, 2, 1],
    (3, 3): [1, 2, 0, 1],
    (5, 2): [2, 4, 1],
}

# Exponent vectors must stay well inside machine-friendly range; repeated
# inverse-Cartier multiplies exponents by p, so this is a checked error
# rather than a silent wraparound.
EXP_LIMIT = 1 << 40


class ContextMismatch(Exception):
    pass


class NotAPthPower(Exception):
    pass


class ExponentOverflow(Exception):
    pass


class ParseError(Exception):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} (at {pos!r})")
        self.pos = pos


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class FqContext:
    """Arithmetic tables for GF(p^f); elements are integer codes in [0, p^f)."""

    def __init__(self, p, f=1, modulus=None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if f < 1:
            raise ValueError("f must be >= 1")
        self.p = p
        self.f = f
        self.q = p ** f
        if f == 1:
            self.modulus = [0, 1]
        else:
            if modulus is None:
                modulus = DEFAULT_MODULI.get((p, f))
                if modulus is None:
                    raise ValueError(f"no default modulus stored for (p, f) = ({p}, {f})")
            if len(modulus) != f + 1 or modulus[-1] % p != 1:
                raise ValueError("modulus must be monic of degree f")
            self.modulus = [c % p for c in modulus]
        self._build_tables()

    # -- raw polynomial arithmetic used only to bootstrap the tables

    def _poly_mul(self, a, b):
        p, f = self.p, self.f
        da = self._digits(a)
        db = self._digits(b)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(len(prod) - 1, f - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(f):
                    prod[i - f + j] = (prod[i - f + j] - c * self.modulus[j]) % p
        return self._encode(prod[:f])

    def _digits(self, code):
        p = self.p
        out = []
        for _ in range(self.f):
            out.append(code % p)
            code //= p
        return out

    def _encode(self, digits):
        code = 0
        for d in reversed(digits):
            code = code * self.p + (d % self.p)
        return code

    def _build_tables(self):
        q = self.q
        gen = None
        for cand in range(2, q):
            seen = bytearray(q)
            x = 1
            order = 0
            while True:
                if seen[x]:
                    break
                seen[x] = 1
                x = self._poly_mul(x, cand)
                order += 1
            if order == q - 1:
                gen = cand
                break
        if gen is None:
            if q == 2:
                gen = 1
            else:
                raise ValueError("modulus is not irreducible (no primitive element found)")
        self.gen = gen
        exp = [0] * (q - 1)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._poly_mul(x, gen)
        self._exp = exp
        self._log = log

    # -- field operations on codes

    def add(self, a, b):
        if self.f == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.f):
            out += ((a + b) % p) * mul
            a //= p
            b //= p
            mul *= p
        return out

    def neg(self, a):
        if self.f == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.f):
            out += ((-a) % p) * mul
            a //= p
            mul *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p^f)")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow_int(self, a, n):
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError
            return 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a):
        """Frobenius x -> x^p (a field automorphism; bijective)."""
        return self.pow_int(a, self.p)

    def frob_inv(self, a):
        """Inverse Frobenius, i.e. the unique p-th root."""
        return self.pow_int(a, self.p ** (self.f - 1))

    def from_int(self, n):
        return n % self.p

    def gpow(self, l):
        return self._exp[l % (self.q - 1)]

    def glog(self, a):
        if a == 0:
            raise ValueError("log of 0")
        return self._log[a]

    def elements(self):
        return range(self.q)

    def __eq__(self, other):
        return (isinstance(other, FqContext)
                and (self.p, self.f, tuple(self.modulus)) == (other.p, other.f, tuple(other.modulus)))

    def __hash__(self):
        return hash((self.p, self.f, tuple(self.modulus)))

    def __repr__(self):
        return f"FqContext(p={self.p}, f={self.f})"


class KContext:
    """The residue field k = GF(p^f)(t_1, ..., t_r) with {t_i} as p-basis."""

    def __init__(self, p, f=1, r=0, modulus=None):
        self.fq = FqContext(p, f, modulus)
        if r < 0:
            raise ValueError("r must be >= 0")
        self.p = p
        self.f = f
        self.r = r

    def zero(self):
        return LaurentPoly(self, {})

    def one(self):
        return LaurentPoly(self, {(0,) * self.r: 1})

    def scalar(self, n):
        """Constant polynomial from an integer (reduced into the prime field)."""
        return self.const(self.fq.from_int(n))

    def const(self, code):
        if code % self.fq.q == 0:
            return self.zero()
        return LaurentPoly(self, {(0,) * self.r: code % self.fq.q})

    def monomial(self, alpha, code=1):
        alpha = tuple(alpha)
        if len(alpha) != self.r:
            raise ValueError(f"exponent vector length {len(alpha)} != r = {self.r}")
        if code == 0:
            return self.zero()
        return LaurentPoly(self, {alpha: code})

    def var(self, i):
        """The p-basis variable t_i (1-based)."""
        if not 1 <= i <= self.r:
            raise ValueError(f"variable index {i} out of range 1..{self.r}")
        alpha = [0] * self.r
        alpha[i - 1] = 1
        return self.monomial(alpha)

    def __eq__(self, other):
        return (isinstance(other, KContext)
                and self.r == other.r and self.fq == other.fq)

    def __hash__(self):
        return hash((self.r, self.fq))

    def __repr__(self):
        return f"KContext(p={self.p}, f={self.f}, r={self.r})"


def _check_alpha(alpha):
    for a in alpha:
        if a > EXP_LIMIT or a < -EXP_LIMIT:
            raise ExponentOverflow(f"exponent {a} exceeds the configured bound")


class LaurentPoly:
    """Finite-support map from exponent vectors in Z^r to nonzero GF(p^f) codes.

    Canonical form: no stored coefficient is zero; the zero element has empty
    support.  Values are immutable after construction.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        clean = {}
        for alpha, c in terms.items():
            if c:
                _check_alpha(alpha)
                clean[alpha] = c
        self.ctx = ctx
        self.terms = clean

    def _need_same(self, other):
        if not isinstance(other, LaurentPoly) or other.ctx != self.ctx:
            raise ContextMismatch("operands live in different residue fields")

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __add__(self, other):
        self._need_same(other)
        fq = self.ctx.fq
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            s = fq.add(out.get(alpha, 0), c)
            if s:
                out[alpha] = s
            else:
                out.pop(alpha, None)
        return LaurentPoly(self.ctx, out)

    def __neg__(self):
        fq = self.ctx.fq
        return LaurentPoly(self.ctx, {a: fq.neg(c) for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._need_same(other)
        fq = self.ctx.fq
        out = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                alpha = tuple(x + y for x, y in zip(a1, a2))
                s = fq.add(out.get(alpha, 0), fq.mul(c1, c2))
                if s:
                    out[alpha] = s
                else:
                    out.pop(alpha, None)
        return LaurentPoly(self.ctx, out)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers only make sense for monomials; invert explicitly")
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, code):
        """Multiply by a GF(p^f) scalar code."""
        if code == 0:
            return self.ctx.zero()
        fq = self.ctx.fq
        return LaurentPoly(self.ctx, {a: fq.mul(c, code) for a, c in self.terms.items()})

    def frobenius(self):
        """x -> x^p; exponents scale by p, coefficients pass through Frobenius."""
        fq = self.ctx.fq
        p = self.ctx.p
        return LaurentPoly(self.ctx,
                           {tuple(p * x for x in a): fq.frob(c) for a, c in self.terms.items()})

    def is_pth_power(self):
        p = self.ctx.p
        return all(x % p == 0 for a in self.terms for x in a)

    def pth_root(self):
        """The unique g with g^p == self; requires componentwise p-divisible exponents."""
        p = self.ctx.p
        fq = self.ctx.fq
        out = {}
        for alpha, c in self.terms.items():
            if any(x % p for x in alpha):
                raise NotAPthPower(f"monomial exponent {alpha} is not divisible by {p}")
            out[tuple(x // p for x in alpha)] = fq.frob_inv(c)
        return LaurentPoly(self.ctx, out)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def constant_code(self):
        """Coefficient code at exponent 0 (the 'residue' of a unit-like element)."""
        return self.terms.get((0,) * self.ctx.r, 0)

    def __repr__(self):
        return f"LaurentPoly({format_element(self)!r})"

    def __str__(self):
        return format_element(self)


# ---------------------------------------------------------------------------
# text grammar

_TOKEN_VAR = re.compile(r"^t(\d+)\^(-?\d+)$")
_TOKEN_GPOW = re.compile(r"^g\^(-?\d+)$")
_TOKEN_INT = re.compile(r"^-?\d+$")


def parse_element(ctx, text):
    text = text.strip().replace(" ", "")
    if not text:
        raise ParseError("empty element")
    total = ctx.zero()
    for term in text.split("+"):
        if not term:
            raise ParseError("empty term", term)
        code = 1
        alpha = [0] * ctx.r
        for piece in term.split("*"):
            m = _TOKEN_VAR.match(piece)
            if m:
                idx, expo = int(m.group(1)), int(m.group(2))
                if not 1 <= idx <= ctx.r:
                    raise ParseError(f"variable t{idx} out of range 1..{ctx.r}", piece)
                alpha[idx - 1] += expo
                continue
            m = _TOKEN_GPOW.match(piece)
            if m:
                code = ctx.fq.mul(code, ctx.fq.gpow(int(m.group(1))))
                continue
            if _TOKEN_INT.match(piece):
                code = ctx.fq.mul(code, ctx.fq.from_int(int(piece)))
                continue
            raise ParseError("unrecognized token", piece)
        total = total + ctx.monomial(alpha, code)
    return total


def format_element(poly):
    if poly.is_zero():
        return "0"
    ctx = poly.ctx
    parts = []
    for alpha, code in poly.sorted_terms():
        pieces = []
        vars_part = [f"t{i + 1}^{a}" for i, a in enumerate(alpha) if a]
        if code != 1 or not vars_part:
            if code < ctx.p:
                pieces.append(str(code))
            else:
                pieces.append(f"g^{ctx.fq.glog(code)}")
        pieces.extend(vars_part)
        parts.append("*".join(pieces))
    return "+".join(parts)
