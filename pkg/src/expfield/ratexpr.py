"""Rational expressions over cyclotomic scalars in named indeterminates.

The Registry owns the indeterminate names and their involution pairing:
a name paired with itself is fixed by sigma ("real"), a 2-cycle is a
swapped pair.  Registries are append-only; re-embeddings retire old names
and hand out a replayable receipt instead of mutating expressions in
place.  RatExpr values are immutable and canonical: numerator and
denominator are coprime and the denominator is monic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .poly import Mono, Poly, mono_mul, poly_gcd
from .scalars import Scalar


class ConfigurationError(Exception):
    """Raised when an indeterminate is missing registration data."""


NAME_RE = r"[a-z][a-z0-9_]*"


class Registry:
    """Append-only table of indeterminate names with sigma-pairing."""

    def __init__(self):
        self.names: list[str] = []
        self._index: dict[str, int] = {}
        self.pairing: list[Optional[int]] = []
        self.retired: set[int] = set()
        self.receipts: list["Receipt"] = []
        self.generation = 0

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ConfigurationError(f"unregistered indeterminate {name!r}") from None

    def name(self, index: int) -> str:
        return self.names[index]

    def _add(self, name: str) -> int:
        import re

        if not re.fullmatch(NAME_RE, name):
            raise ValueError(f"invalid indeterminate name {name!r}")
        if name in self._index:
            raise ValueError(f"indeterminate {name!r} already registered")
        idx = len(self.names)
        self.names.append(name)
        self._index[name] = idx
        self.pairing.append(None)
        return idx

    def register_real(self, name: str) -> int:
        idx = self._add(name)
        self.pairing[idx] = idx
        return idx

    def register_pair(self, name: str, partner: str) -> tuple[int, int]:
        a = self._add(name)
        b = self._add(partner)
        self.pairing[a] = b
        self.pairing[b] = a
        return a, b

    def register_unpaired(self, name: str) -> int:
        """A name with no sigma information; sigma_apply refuses it."""
        return self._add(name)

    def partner(self, index: int) -> int:
        p = self.pairing[index]
        if p is None:
            raise ConfigurationError(
                f"indeterminate {self.names[index]!r} has no involution pairing"
            )
        return p

    def fresh_name(self, stem: str) -> str:
        if stem not in self._index:
            return stem
        k = 1
        while f"{stem}{k}" in self._index:
            k += 1
        return f"{stem}{k}"

    # -- expression constructors ---------------------------------------

    def var(self, name: str) -> "RatExpr":
        return RatExpr(Poly.var(self.index(name)), Poly.const(1), self)

    def const(self, value) -> "RatExpr":
        c = value if isinstance(value, Scalar) else Scalar(value)
        return RatExpr(Poly.const(c), Poly.const(1), self)

    def i(self) -> "RatExpr":
        return self.const(Scalar.i())


class Involution:
    """Field automorphism of order two: permute indeterminates, conjugate scalars."""

    def __init__(self, registry: Registry, conjugate_constants: bool = True):
        self.registry = registry
        self.conjugate_constants = conjugate_constants

    def apply_poly(self, p: Poly) -> Poly:
        reg = self.registry

        def remap(m: Mono) -> Mono:
            return tuple(sorted((reg.partner(v), e) for v, e in m))

        q = p.map_monomials(remap)
        return q.conj_coeffs() if self.conjugate_constants else q

    def __call__(self, e: "RatExpr") -> "RatExpr":
        return RatExpr(self.apply_poly(e.num), self.apply_poly(e.den), e.registry)


class RatExpr:
    """num/den with coprime canonical representation."""

    __slots__ = ("num", "den", "registry")

    def __init__(self, num: Poly, den: Poly, registry: Registry, *, reduce: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce and not num.is_zero():
            g = poly_gcd(num, den)
            if not g.is_const():
                num = num.exact_div(g)
                den = den.exact_div(g)
        if num.is_zero():
            den = Poly.const(1)
        else:
            _, lc = den.leading()
            if not lc.is_one():
                inv = lc.inverse()
                num = num.scale(inv)
                den = den.scale(inv)
        self.num = num
        self.den = den
        self.registry = registry

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Scalar:
        if not self.is_const():
            raise ValueError("expression is not constant")
        if self.num.is_zero():
            return Scalar(0)
        return self.num.const_value() / self.den.const_value()

    def variables(self) -> set[int]:
        return self.num.variables() | self.den.variables()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash(self.canonical_str())

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> Optional["RatExpr"]:
        if isinstance(other, RatExpr):
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.registry.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatExpr(self.num * o.den + o.num * self.den, self.den * o.den, self.registry)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den, self.registry, reduce=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # cross-cancel to keep intermediate gcds small
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1 = self.num if g1.is_const() else self.num.exact_div(g1)
        d2 = o.den if g1.is_const() else o.den.exact_div(g1)
        n2 = o.num if g2.is_const() else o.num.exact_div(g2)
        d1 = self.den if g2.is_const() else self.den.exact_div(g2)
        return RatExpr(n1 * n2, d1 * d2, self.registry, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "RatExpr":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero expression")
        return RatExpr(self.den, self.num, self.registry, reduce=False)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return self.registry.const(1)
        if n < 0:
            return self.inverse() ** (-n)
        return RatExpr(self.num ** n, self.den ** n, self.registry, reduce=False)

    # -- calculus ---------------------------------------------------------

    def derivative(self, var: int) -> "RatExpr":
        dn = self.num.derivative(var)
        dd = self.den.derivative(var)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den, self.registry)

    def gradient_numerators(self, variables: Sequence[int]) -> list[Poly]:
        """Polynomials (dn*den - num*dd) per variable: the gradient times den^2."""
        out = []
        for v in variables:
            dn = self.num.derivative(v)
            dd = self.den.derivative(v)
            out.append(dn * self.den - self.num * dd)
        return out

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, point: dict[int, Fraction]) -> Scalar:
        d = self.den.evaluate(point)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes at sample point")
        return self.num.evaluate(point) / d

    def substitute(self, mapping: dict[int, "RatExpr"]) -> "RatExpr":
        reg = self.registry
        num = self.num.substitute_general(mapping, reg.const, lambda v: RatExpr(Poly.var(v), Poly.const(1), reg))
        den = self.den.substitute_general(mapping, reg.const, lambda v: RatExpr(Poly.var(v), Poly.const(1), reg))
        return num / den

    # -- io ---------------------------------------------------------------------

    def canonical_str(self) -> str:
        return f"({_poly_str(self.num, self.registry)})/({_poly_str(self.den, self.registry)})"

    def __repr__(self):
        if self.den.is_const() and self.den.const_value().is_one():
            return _poly_str(self.num, self.registry)
        return self.canonical_str()


def _poly_str(p: Poly, reg: Registry) -> str:
    if p.is_zero():
        return "0"
    from .poly import mono_key

    parts = []
    for m in sorted(p.terms, key=mono_key, reverse=True):
        c = p.terms[m]
        factors = []
        cs = _scalar_str(c)
        if not m:
            parts.append(cs)
            continue
        if cs != "1":
            factors.append(cs)
        for v, e in m:
            nm = reg.names[v]
            factors.append(nm if e == 1 else f"{nm}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def _scalar_str(c: Scalar) -> str:
    c = c.canonical()
    if c.level == 1:
        return str(c.coeffs[0])
    terms = []
    for k, x in enumerate(c.coeffs):
        if x == 0:
            continue
        if k == 0:
            terms.append(str(x))
            continue
        if c.level == 4 and k == 1:
            base = "i"
        else:
            base = f"zeta({c.level})" if k == 1 else f"zeta({c.level})^{k}"
        terms.append(base if x == 1 else f"{x}*{base}")
    body = " + ".join(terms) if terms else "0"
    return f"({body})" if len(terms) > 1 else body


# -- sigma decomposition operations ------------------------------------------


def sigma_apply(e: RatExpr, inv: Involution) -> RatExpr:
    return inv(e)


def real_part(e: RatExpr, inv: Involution) -> RatExpr:
    return (e + inv(e)) / 2


def imag_part(e: RatExpr, inv: Involution) -> RatExpr:
    i2 = e.registry.const(Scalar.i() * 2)
    return (e - inv(e)) / i2


def modulus_sq(e: RatExpr, inv: Involution) -> RatExpr:
    if e.is_zero():
        raise ZeroDivisionError("modulus_sq of zero")
    return e * inv(e)


def is_unit_circle(e: RatExpr, inv: Involution) -> bool:
    if e.is_zero():
        return False
    return (e * inv(e)) == e.registry.const(1)


# -- re-embedding --------------------------------------------------------------


class Receipt:
    """Replayable record of a registry re-embedding.

    substitutions maps a retired variable index to its replacement
    expression; for the monomial case u -> v^q the expression is v^q and
    fast exponent rewriting applies.
    """

    def __init__(self, registry: Registry, substitutions: dict[int, RatExpr],
                 label: str):
        self.registry = registry
        self.substitutions = substitutions
        self.label = label
        self._monomial: dict[int, tuple[int, int]] = {}
        for old, expr in substitutions.items():
            if expr.den.is_const() and expr.num.is_monomial():
                (m, c), = expr.num.terms.items()
                if len(m) == 1 and c.is_one() and expr.den.const_value().is_one():
                    self._monomial[old] = (m[0][0], m[0][1])

    def apply(self, e: RatExpr) -> RatExpr:
        touched = e.variables() & set(self.substitutions)
        if not touched:
            return e
        if all(v in self._monomial for v in touched):
            def remap(m: Mono) -> Mono:
                out: dict[int, int] = {}
                for v, ex in m:
                    target = self._monomial.get(v)
                    if target is None:
                        out[v] = out.get(v, 0) + ex
                    else:
                        nv, q = target
                        out[nv] = out.get(nv, 0) + ex * q
                return tuple(sorted(out.items()))

            return RatExpr(e.num.map_monomials(remap), e.den.map_monomials(remap), e.registry)
        return e.substitute(dict(self.substitutions))

    def describe(self) -> dict:
        reg = self.registry
        return {
            "label": self.label,
            "substitutions": {
                reg.names[old]: repr(expr) for old, expr in self.substitutions.items()
            },
        }


def reembed(registry: Registry, name: str, q: int, *, fresh_stem: Optional[str] = None) -> Receipt:
    """Retire name (and its sigma-partner) via u -> v^q; returns the receipt.

    With q = 1 this is a plain renaming.  The new names inherit the pairing
    structure of the old ones.
    """
    if q < 1:
        raise ValueError("re-embedding exponent must be >= 1")
    idx = registry.index(name)
    partner = registry.pairing[idx]
    if partner is None:
        raise ConfigurationError(f"indeterminate {name!r} has no involution pairing")
    stem = fresh_stem or name
    subs: dict[int, RatExpr] = {}
    if partner == idx:
        new = registry.register_real(registry.fresh_name(stem))
        subs[idx] = RatExpr(Poly.var(new) ** q, Poly.const(1), registry)
        registry.retired.add(idx)
    else:
        pname = registry.names[partner]
        n1, n2 = registry.register_pair(
            registry.fresh_name(stem), registry.fresh_name(fresh_stem or pname)
        )
        subs[idx] = RatExpr(Poly.var(n1) ** q, Poly.const(1), registry)
        subs[partner] = RatExpr(Poly.var(n2) ** q, Poly.const(1), registry)
        registry.retired.add(idx)
        registry.retired.add(partner)
    receipt = Receipt(registry, subs, label=f"{name}->{q}th power of fresh")
    registry.receipts.append(receipt)
    registry.generation += 1
    return receipt


def circle_root_receipt(registry: Registry, name: str, q: int) -> Receipt:
    """Receipt for s -> s' with (1+is)/(1-is) = ((1+is')/(1-is'))^q.

    The substitution is the rational multiple-angle map; name must be
    sigma-fixed.
    """
    if q < 1:
        raise ValueError("root order must be >= 1")
    idx = registry.index(name)
    if registry.pairing[idx] != idx:
        raise ConfigurationError("circle refinement needs a sigma-fixed parameter")
    new = registry.register_real(registry.fresh_name(name))
    sp = RatExpr(Poly.var(new), Poly.const(1), registry)
    i = registry.const(Scalar.i())
    one = registry.const(1)
    plus = (one + i * sp) ** q
    minus = (one - i * sp) ** q
    # (1+is)/(1-is) = plus/minus  =>  s = -i (plus - minus) / (plus + minus)
    s_expr = (registry.const(Scalar.i() * (-1)) * (plus - minus)) / (plus + minus)
    subs = {idx: s_expr}
    registry.retired.add(idx)
    receipt = Receipt(registry, subs, label=f"{name}->tangent {q}-section")
    registry.receipts.append(receipt)
    registry.generation += 1
    return receipt
