"""Differential q-forms over k = GF(p^f)(t_1, ..., t_r) in the dlog basis.

A form is stored as a finite map from sorted q-element index subsets
S = {i_1 < ... < i_q} of {1, ..., r} to Laurent-polynomial coefficients,
representing  omega = sum_S f_S dlog t_{i_1} ^ ... ^ dlog t_{i_q}.
The monomial pieces t^alpha dlog t_S form a basis and every operator here
acts monomially on it:

    d(t^alpha dlog t_S)   = sum_i alpha_i t^alpha dlog t_i ^ dlog t_S
    C^{-1}(t^alpha dlog t_S) = t^{p alpha} dlog t_S  with coefficient c -> c^p
    C(t^{p beta} dlog t_S)   = t^beta dlog t_S       with coefficient c -> c^{1/p}

C (the Cartier operator) is only defined on closed forms; on those, the
monomials with non-p-divisible degree span an exact summand (the Koszul
complex of the degree covector is exact), so C drops them.

The filtration towers are decided recursively through C:

    in_Z(w, 0) always; in_Z(w, s) iff d(w) = 0 and in_Z(C(w), s-1)
    in_B(w, 0) iff w = 0; in_B(w, 1) iff d(w) = 0 and C(w) = 0;
    in_B(w, s) iff d(w) = 0 and in_B(C(w), s-1)      (s >= 2)

Every tower statement is also realized per degree-alpha slice by
`subspace_basis`, which backs the normal forms of `nf_mod`.

Degrees q < 0 and q > r denote the zero module; operations accept them and
return zero.

Text grammar (CLI and fixtures)::

    form  := fterm ('+' fterm)*
    fterm := element '*' 'dlog[' idxlist ']' | element      (degree 0)

Printing uses canonical order (subsets lexicographic, then exponent vectors);
parse o print is the identity on canonical forms.
"""

from __future__ import annotations

import itertools

from .ffield import ContextMismatch, LaurentPoly, ParseError, parse_element

B_KIND = "B"
Z_KIND = "Z"


class NotClosed(Exception):
    pass


def subsets_of(r, q):
    """All sorted q-subsets of {1..r} in lexicographic order."""
    if q < 0 or q > r:
        return []
    return [tuple(s) for s in itertools.combinations(range(1, r + 1), q)]


def _insert_sign(i, subset):
    """Sign and result of dlog t_i ^ dlog t_S, or (0, None) when i in S."""
    if i in subset:
        return 0, None
    below = sum(1 for j in subset if j < i)
    merged = tuple(sorted(subset + (i,)))
    return (-1) ** below, merged


def _merge_sign(s1, s2):
    """Sign and union for dlog t_S1 ^ dlog t_S2 on disjoint subsets."""
    if set(s1) & set(s2):
        return 0, None
    inversions = 0
    for a in s1:
        inversions += sum(1 for b in s2 if b < a)
    return (-1) ** inversions, tuple(sorted(s1 + s2))


class DiffForm:
    """Immutable degree-q differential form; terms map subsets to coefficients."""

    __slots__ = ("kctx", "q", "terms")

    def __init__(self, kctx, q, terms=None):
        clean = {}
        if terms and 0 <= q <= kctx.r:
            for subset, poly in terms.items():
                if len(subset) != q or list(subset) != sorted(subset):
                    raise ValueError(f"subset {subset} is not a sorted {q}-subset")
                if any(not 1 <= i <= kctx.r for i in subset):
                    raise ValueError(f"subset {subset} out of range 1..{kctx.r}")
                if poly:
                    clean[subset] = poly
        self.kctx = kctx
        self.q = q
        self.terms = clean

    @staticmethod
    def zero(kctx, q):
        return DiffForm(kctx, q)

    @staticmethod
    def from_poly(poly):
        """A degree-0 form from a field element."""
        return DiffForm(poly.ctx, 0, {(): poly})

    @staticmethod
    def monomial(kctx, alpha, subset, code=1):
        return DiffForm(kctx, len(subset), {tuple(subset): kctx.monomial(alpha, code)})

    def _need_same(self, other):
        if not isinstance(other, DiffForm) or other.kctx != self.kctx:
            raise ContextMismatch("forms live over different residue fields")

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return (self.kctx == other.kctx and self.q == other.q
                and self.terms == other.terms)

    def __add__(self, other):
        self._need_same(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.q != other.q:
            raise ValueError(f"cannot add forms of degrees {self.q} and {other.q}")
        out = dict(self.terms)
        for subset, poly in other.terms.items():
            s = out.get(subset)
            s = poly if s is None else s + poly
            if s:
                out[subset] = s
            else:
                out.pop(subset, None)
        return DiffForm(self.kctx, self.q, out)

    def __neg__(self):
        return DiffForm(self.kctx, self.q, {s: -p for s, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def times_poly(self, poly):
        """Left multiplication by a field element (a 0-form)."""
        return DiffForm(self.kctx, self.q,
                        {s: poly * p for s, p in self.terms.items()})

    def scale(self, code):
        return DiffForm(self.kctx, self.q,
                        {s: p.scale(code) for s, p in self.terms.items()})

    def components(self):
        """Split by exponent vector: alpha -> {subset: coefficient code}."""
        out = {}
        for subset, poly in self.terms.items():
            for alpha, c in poly.terms.items():
                out.setdefault(alpha, {})[subset] = c
        return out

    @staticmethod
    def from_components(kctx, q, comps):
        terms = {}
        for alpha, sl in comps.items():
            for subset, c in sl.items():
                if not c:
                    continue
                poly = terms.get(subset)
                mono = kctx.monomial(alpha, c)
                terms[subset] = mono if poly is None else poly + mono
        return DiffForm(kctx, q, terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        return f"DiffForm(q={self.q}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)


def wedge(w1, w2):
    """Exterior product; bilinear and alternating on the dlog basis."""
    w1._need_same(w2)
    kctx = w1.kctx
    q = w1.q + w2.q
    if w1.is_zero() or w2.is_zero() or q > kctx.r:
        return DiffForm.zero(kctx, min(q, kctx.r + 1))
    out = {}
    for s1, p1 in w1.terms.items():
        for s2, p2 in w2.terms.items():
            sign, merged = _merge_sign(s1, s2)
            if sign == 0:
                continue
            piece = p1 * p2
            if sign < 0:
                piece = -piece
            acc = out.get(merged)
            acc = piece if acc is None else acc + piece
            if acc:
                out[merged] = acc
            else:
                out.pop(merged, None)
    return DiffForm(kctx, q, out)


def d(w):
    """Exterior derivative, extended additively from the monomial rule."""
    kctx = w.kctx
    out = DiffForm.zero(kctx, w.q + 1)
    if w.q >= kctx.r or w.q < 0:
        return out
    fq = kctx.fq
    terms = {}
    for subset, poly in w.terms.items():
        for alpha, c in poly.terms.items():
            for i in range(1, kctx.r + 1):
                ai = alpha[i - 1] % kctx.p
                if not ai:
                    continue
                sign, merged = _insert_sign(i, subset)
                if sign == 0:
                    continue
                code = fq.mul(c, ai)
                if sign < 0:
                    code = fq.neg(code)
                mono = kctx.monomial(alpha, code)
                acc = terms.get(merged)
                acc = mono if acc is None else acc + mono
                if acc:
                    terms[merged] = acc
                else:
                    terms.pop(merged, None)
    return DiffForm(kctx, w.q + 1, terms)


def is_closed(w):
    return d(w).is_zero()


def inv_cartier(w):
    """Inverse Cartier operator; the returned representative is closed."""
    kctx = w.kctx
    fq = kctx.fq
    p = kctx.p
    terms = {}
    for subset, poly in w.terms.items():
        new = {tuple(p * x for x in alpha): fq.frob(c)
               for alpha, c in poly.terms.items()}
        terms[subset] = LaurentPoly(kctx, new)
    return DiffForm(kctx, w.q, terms)


def inv_cartier_iter(w, s):
    for _ in range(s):
        w = inv_cartier(w)
    return w


def cartier(w):
    """Cartier operator on a closed form.

    Monomials with non-p-divisible degree form an exact summand of a closed
    form and are dropped; the rest map by t^{p beta} -> t^beta with inverse
    Frobenius on coefficients.  Raises NotClosed when d(w) != 0.
    """
    if not is_closed(w):
        raise NotClosed("the Cartier operator is only defined on closed forms")
    kctx = w.kctx
    fq = kctx.fq
    p = kctx.p
    terms = {}
    for subset, poly in w.terms.items():
        new = {}
        for alpha, c in poly.terms.items():
            if any(x % p for x in alpha):
                continue
            new[tuple(x // p for x in alpha)] = fq.frob_inv(c)
        if new:
            terms[subset] = LaurentPoly(kctx, new)
    return DiffForm(kctx, w.q, terms)


def in_Z(w, s):
    """Membership in the s-th cocycle tower group Z_s."""
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return True
    if not is_closed(w):
        return False
    return in_Z(cartier(w), s - 1)


def in_B(w, s):
    """Membership in the s-th boundary tower group B_s."""
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return w.is_zero()
    if not is_closed(w):
        return False
    cw = cartier(w)
    if s == 1:
        return cw.is_zero()
    return in_B(cw, s - 1)


# ---------------------------------------------------------------------------
# per-degree-slice realization of the towers

class DegreeComponent:
    """A vector in the alpha-slice of Omega^q, indexed by the q-subsets.

    d preserves alpha, so the towers split across slices and each slice can
    be processed independently.
    """

    __slots__ = ("alpha", "vec")

    def __init__(self, alpha, vec):
        self.alpha = tuple(alpha)
        self.vec = tuple(vec)

    def __eq__(self, other):
        return (isinstance(other, DegreeComponent)
                and self.alpha == other.alpha and self.vec == other.vec)

    def __repr__(self):
        return f"DegreeComponent(alpha={self.alpha}, vec={self.vec})"


def koszul_matrix(kctx, alpha, q):
    """Columns of (a ^ -): Lambda^{q-1} -> Lambda^q for a = sum alpha_i dlog t_i.

    Returns a list of sparse column dicts {row_index: code}, columns indexed
    by the (q-1)-subsets, rows by the q-subsets.
    """
    fq = kctx.fq
    rows = subsets_of(kctx.r, q)
    row_index = {s: i for i, s in enumerate(rows)}
    cols = []
    for subset in subsets_of(kctx.r, q - 1):
        col = {}
        for i in range(1, kctx.r + 1):
            ai = alpha[i - 1] % kctx.p
            if not ai:
                continue
            sign, merged = _insert_sign(i, subset)
            if sign == 0:
                continue
            code = fq.from_int(ai) if sign > 0 else fq.neg(fq.from_int(ai))
            idx = row_index[merged]
            s = fq.add(col.get(idx, 0), code)
            if s:
                col[idx] = s
            else:
                col.pop(idx, None)
        cols.append(col)
    return cols


def subspace_basis(kctx, alpha, q, kind, s):
    """Echelonized basis of the alpha-slice of B_s^q or Z_s^q.

    For alpha not divisible by p the slice's B_1 equals its Z_1 (Koszul
    exactness), and all tower groups between them share that image; for
    alpha = p*beta the slice pulls back from beta along entrywise Frobenius.
    """
    from .linalg import RowSpace

    if kind not in (B_KIND, Z_KIND):
        raise ValueError(f"kind must be 'B' or 'Z', got {kind!r}")
    if s < 0:
        raise ValueError("s must be >= 0")
    alpha = tuple(alpha)
    subsets = subsets_of(kctx.r, q)
    n = len(subsets)
    if n == 0:
        return []
    fq = kctx.fq

    def _echelon(vecs):
        space = RowSpace(fq)
        for v in vecs:
            space.add(v)
        out = []
        for piv in space.pivots():
            row = space.rows[piv]
            vec = [0] * n
            for c, v in row.items():
                vec[c] = v
            out.append(DegreeComponent(alpha, vec))
        return out

    if s == 0:
        if kind == B_KIND:
            return []
        unit = []
        for i in range(n):
            vec = [0] * n
            vec[i] = 1
            unit.append(DegreeComponent(alpha, vec))
        return unit

    p = kctx.p
    if any(x % p for x in alpha):
        return _echelon(koszul_matrix(kctx, alpha, q))

    beta = tuple(x // p for x in alpha)
    lifted = []
    for comp in subspace_basis(kctx, beta, q, kind, s - 1):
        lifted.append({i: fq.frob(c) for i, c in enumerate(comp.vec) if c})
    return _echelon(lifted)


def nf_mod(w, kind, s):
    """Canonical representative of w modulo B_s^q (or Z_s^q).

    Zero exactly when the corresponding membership predicate holds; computed
    per alpha-slice against the echelonized subspace basis.
    """
    from .linalg import RowSpace

    kctx = w.kctx
    fq = kctx.fq
    subsets = subsets_of(kctx.r, w.q)
    index = {sub: i for i, sub in enumerate(subsets)}
    out_comps = {}
    for alpha, sl in w.components().items():
        space = RowSpace(fq)
        for comp in subspace_basis(kctx, alpha, w.q, kind, s):
            space.add({i: c for i, c in enumerate(comp.vec) if c})
        reduced = space.reduce({index[sub]: c for sub, c in sl.items()})
        if reduced:
            out_comps[alpha] = {subsets[i]: c for i, c in reduced.items()}
    return DiffForm.from_components(kctx, w.q, out_comps)


# ---------------------------------------------------------------------------
# text grammar

def parse_form(kctx, q, text):
    text = text.strip().replace(" ", "")
    if not text:
        raise ParseError("empty form")
    if text == "0":
        return DiffForm.zero(kctx, q)
    total = DiffForm.zero(kctx, q)
    for fterm in text.split("+"):
        if "dlog[" in fterm:
            elem_text, _, rest = fterm.partition("*dlog[")
            if not rest.endswith("]"):
                raise ParseError("missing ']' after dlog[", fterm)
            idx_text = rest[:-1]
            try:
                subset = tuple(int(x) for x in idx_text.split(",")) if idx_text else ()
            except ValueError:
                raise ParseError("bad index list", idx_text)
            if list(subset) != sorted(set(subset)):
                raise ParseError("dlog indices must be strictly increasing", idx_text)
            if len(subset) != q:
                raise ParseError(f"dlog[{idx_text}] has degree {len(subset)}, expected {q}", fterm)
            poly = parse_element(kctx, elem_text)
        else:
            if q != 0:
                raise ParseError(f"term {fterm!r} has degree 0, expected {q}", fterm)
            subset = ()
            poly = parse_element(kctx, fterm)
        total = total + DiffForm(kctx, q, {subset: poly})
    return total


def format_form(w):
    from .ffield import format_element

    if w.is_zero():
        return "0"
    parts = []
    for subset, poly in w.sorted_terms():
        for alpha, code in poly.sorted_terms():
            elem = format_element(w.kctx.monomial(alpha, code))
            if subset:
                idx = ",".join(str(i) for i in subset)
                parts.append(f"{elem}*dlog[{idx}]")
            else:
                parts.append(elem)
    return "+".join(parts)
