"""Sparse multivariate polynomials over cyclotomic scalars.

Monomials are sorted tuples of (variable index, exponent) pairs; the zero
polynomial has no terms.  Everything is immutable in spirit: operations
return new polynomials and never mutate their arguments.  The gcd is a
primitive polynomial-remainder-sequence gcd, normalized monic with respect
to the graded-lexicographic leading term, so canonical forms are unique.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Optional

from .scalars import Scalar

Mono = tuple[tuple[int, int], ...]

EMPTY_MONO: Mono = ()


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


def mono_div(a: Mono, b: Mono) -> Optional[Mono]:
    """a / b, or None when b does not divide a."""
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        have = out.get(v, 0)
        if have < e:
            return None
        if have == e:
            del out[v]
        else:
            out[v] = have - e
    return tuple(sorted(out.items()))


def mono_deg(a: Mono) -> int:
    return sum(e for _, e in a)


def mono_key(a: Mono):
    """Graded-lex order key (total degree, then exponents by variable index)."""
    return (mono_deg(a), a)


def mono_pow(a: Mono, n: int) -> Mono:
    return tuple((v, e * n) for v, e in a)


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[Mono, Scalar]] = None):
        t = {}
        if terms:
            for m, c in terms.items():
                if not c.is_zero():
                    t[m] = c
        self.terms = t

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(c) -> "Poly":
        c = c if isinstance(c, Scalar) else Scalar(c)
        return Poly({EMPTY_MONO: c})

    @staticmethod
    def var(index: int) -> "Poly":
        return Poly({((index, 1),): Scalar(1)})

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and EMPTY_MONO in self.terms)

    def const_value(self) -> Scalar:
        if self.is_zero():
            return Scalar(0)
        if not self.is_const():
            raise ValueError("polynomial is not constant")
        return self.terms[EMPTY_MONO]

    def variables(self) -> set[int]:
        vs: set[int] = set()
        for m in self.terms:
            for v, _ in m:
                vs.add(v)
        return vs

    def degree(self) -> int:
        if self.is_zero():
            return -1
        return max(mono_deg(m) for m in self.terms)

    def degree_in(self, var: int) -> int:
        d = 0
        for m in self.terms:
            for v, e in m:
                if v == var:
                    d = max(d, e)
        return d

    def leading(self) -> tuple[Mono, Scalar]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    def __hash__(self):
        return hash(tuple(sorted((m, hash(c)) for m, c in self.terms.items())))

    def __bool__(self):
        return not self.is_zero()

    # -- ring operations --------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Scalar):
            return self.scale(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(Scalar(other))
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Mono, Scalar] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                c = ca * cb
                s = out.get(m)
                out[m] = c if s is None else s + c
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Poly":
        if c.is_zero():
            return Poly()
        return Poly({m: x * c for m, x in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def exact_div(self, other: "Poly") -> "Poly":
        """Exact division; raises ArithmeticError when other does not divide self."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly()
        if other.is_const():
            return self.scale(other.const_value().inverse())
        lm, lc = other.leading()
        lc_inv = lc.inverse()
        rem = dict(self.terms)
        out: dict[Mono, Scalar] = {}
        while rem:
            m = max(rem, key=mono_key)
            q = mono_div(m, lm)
            if q is None:
                raise ArithmeticError("inexact polynomial division")
            c = rem[m] * lc_inv
            out[q] = c
            for mb, cb in other.terms.items():
                mm = mono_mul(q, mb)
                s = rem.get(mm, Scalar(0)) - c * cb
                if s.is_zero():
                    rem.pop(mm, None)
                else:
                    rem[mm] = s
        return Poly(out)

    def divides(self, other: "Poly") -> bool:
        try:
            other.exact_div(self)
            return True
        except ArithmeticError:
            return False

    # -- calculus -----------------------------------------------------------

    def derivative(self, var: int) -> "Poly":
        out: dict[Mono, Scalar] = {}
        for m, c in self.terms.items():
            for i, (v, e) in enumerate(m):
                if v == var:
                    nm = list(m)
                    if e == 1:
                        del nm[i]
                    else:
                        nm[i] = (v, e - 1)
                    key = tuple(nm)
                    s = out.get(key, Scalar(0)) + c * e
                    if s.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = s
                    break
        return Poly(out)

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, point: dict[int, Fraction]) -> Scalar:
        acc = Scalar(0)
        powcache: dict[tuple[int, int], Fraction] = {}
        for m, c in self.terms.items():
            f = Fraction(1)
            for v, e in m:
                key = (v, e)
                pw = powcache.get(key)
                if pw is None:
                    pw = point[v] ** e
                    powcache[key] = pw
                f *= pw
            acc = acc + c * Scalar(f)
        return acc

    def map_monomials(self, fn: Callable[[Mono], Mono]) -> "Poly":
        out: dict[Mono, Scalar] = {}
        for m, c in self.terms.items():
            key = fn(m)
            s = out.get(key)
            out[key] = c if s is None else s + c
        return Poly(out)

    def substitute_general(self, mapping: dict[int, object], make_const, make_var):
        """Evaluate in any commutative ring: mapping var -> ring element.

        make_const(scalar) embeds coefficients, make_var(index) embeds
        untouched variables.  Used for plugging rational expressions into
        defining equations.
        """
        total = None
        for m, c in self.terms.items():
            term = make_const(c)
            for v, e in m:
                base = mapping.get(v)
                if base is None:
                    base = make_var(v)
                term = term * base ** e
            total = term if total is None else total + term
        return total if total is not None else make_const(Scalar(0))

    def conj_coeffs(self) -> "Poly":
        return Poly({m: c.conj() for m, c in self.terms.items()})

    # -- normalization -----------------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        _, lc = self.leading()
        if lc.is_one():
            return self
        return self.scale(lc.inverse())

    def content_monomial(self) -> Mono:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        try:
            first = next(it)
        except StopIteration:
            return EMPTY_MONO
        common = dict(first)
        for m in it:
            md = dict(m)
            for v in list(common):
                e = md.get(v, 0)
                if e == 0:
                    del common[v]
                else:
                    common[v] = min(common[v], e)
            if not common:
                break
        return tuple(sorted(common.items()))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for m in sorted(self.terms, key=mono_key, reverse=True):
            c = self.terms[m]
            vars_part = "*".join(
                f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in m
            )
            if not m:
                parts.append(f"({c!r})")
            elif c.is_one():
                parts.append(vars_part)
            else:
                parts.append(f"({c!r})*{vars_part}")
        return " + ".join(parts)


# -- gcd machinery ------------------------------------------------------------


def _uni(p: Poly, var: int) -> dict[int, Poly]:
    """View p as a univariate polynomial in var with Poly coefficients."""
    out: dict[int, dict[Mono, Scalar]] = {}
    for m, c in p.terms.items():
        e = 0
        rest = []
        for v, ex in m:
            if v == var:
                e = ex
            else:
                rest.append((v, ex))
        out.setdefault(e, {})[tuple(rest)] = c
    return {e: Poly(t) for e, t in out.items()}


def _from_uni(coeffs: dict[int, Poly], var: int) -> Poly:
    out: dict[Mono, Scalar] = {}
    for e, p in coeffs.items():
        for m, c in p.terms.items():
            key = mono_mul(m, ((var, e),) if e else EMPTY_MONO)
            s = out.get(key)
            out[key] = c if s is None else s + c
    return Poly(out)


def _uni_deg(u: dict[int, Poly]) -> int:
    return max(u) if u else -1


def _uni_scale(u: dict[int, Poly], f: Poly) -> dict[int, Poly]:
    return {e: c * f for e, c in u.items()}


def _uni_sub(a: dict[int, Poly], b: dict[int, Poly]) -> dict[int, Poly]:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, Poly()) - c
        if s.is_zero():
            out.pop(e, None)
        else:
            out[e] = s
    return out


def _pseudo_rem(a: dict[int, Poly], b: dict[int, Poly], var: int) -> dict[int, Poly]:
    da, db = _uni_deg(a), _uni_deg(b)
    lb = b[db]
    r = dict(a)
    while r and _uni_deg(r) >= db:
        dr = _uni_deg(r)
        lr = r[dr]
        shifted = {e + dr - db: c * lr for e, c in b.items()}
        r = _uni_sub(_uni_scale(r, lb), shifted)
    return r


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the scalar field (primitive PRS)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_const() or b.is_const():
        return Poly.const(1)
    if a == b:
        return a.monic()
    # monomial fast path: gcd(mono, p) = common monomial part
    if a.is_monomial() or b.is_monomial():
        mono = a if a.is_monomial() else b
        other = b if a.is_monomial() else a
        (m, _), = mono.terms.items()
        cm = other.content_monomial()
        common = dict()
        cmd = dict(cm)
        for v, e in m:
            if v in cmd:
                common[v] = min(e, cmd[v])
        return Poly({tuple(sorted(common.items())): Scalar(1)})
    var = max(a.variables() | b.variables())
    ua, ub = _uni(a, var), _uni(b, var)
    ca = _uni_content(ua)
    cb = _uni_content(ub)
    pa = {e: c.exact_div(ca) for e, c in ua.items()}
    pb = {e: c.exact_div(cb) for e, c in ub.items()}
    cg = poly_gcd(ca, cb)
    f, g = (pa, pb) if _uni_deg(pa) >= _uni_deg(pb) else (pb, pa)
    while g:
        r = _pseudo_rem(f, g, var)
        if r:
            rc = _uni_content(r)
            r = {e: c.exact_div(rc) for e, c in r.items()}
        f, g = g, r
    gcd_p = _from_uni(f, var)
    return (gcd_p * cg).monic()


def _uni_content(u: dict[int, Poly]) -> Poly:
    acc = Poly()
    for _, c in sorted(u.items()):
        acc = poly_gcd(acc, c)
        if acc.is_const() and not acc.is_zero():
            return Poly.const(1)
    return acc if not acc.is_zero() else Poly.const(1)


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    g = poly_gcd(a, b)
    return (a * b).exact_div(g).monic()


def poly_nth_root(p: Poly, n: int) -> Optional[Poly]:
    """Exact n-th root of p, allowing the scalar field to grow; None if no root."""
    if n == 1:
        return p
    if p.is_zero():
        return Poly()
    lm, lc = p.leading()
    if any(e % n for _, e in lm):
        return None
    root_c = lc.nth_root(n)
    if root_c is None:
        return None
    root_mono = tuple((v, e // n) for v, e in lm)
    g = Poly({root_mono: root_c})
    limit = len(p.terms) + 4
    for _ in range(limit):
        r = p - g ** n
        if r.is_zero():
            return g
        mr, cr = r.leading()
        # leading-order correction: n * lt(g)^(n-1) * t = lt(r)
        denom_mono = mono_pow(root_mono, n - 1)
        tm = mono_div(mr, denom_mono)
        if tm is None:
            return None
        tc = cr / (root_c ** (n - 1) * Scalar(n))
        if mono_key(tm) >= mono_key(max(g.terms, key=mono_key)):
            return None
        g = g + Poly({tm: tc})
    return g if (p - g ** n).is_zero() else None
