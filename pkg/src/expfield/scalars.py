"""Exact arithmetic in cyclotomic number fields Q(zeta_N).

A Scalar is an element of Q[x]/Phi_N(x) with x standing for a primitive
N-th root of unity.  The level N grows on demand (lcm of the levels of the
operands); an element whose coefficients beyond the constant term vanish is
stored at level 1, so plain rationals stay cheap.  Complex conjugation is
the field automorphism zeta -> zeta^(-1).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Union

RationalLike = Union[int, Fraction]


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _int_poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # little-endian integer polynomial division, exact by construction
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        q, r = divmod(c, den[-1])
        if r != 0:
            raise ArithmeticError("inexact cyclotomic division")
        out[k] = q
        for j, d in enumerate(den):
            num[k + j] -= q * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("nonzero remainder in cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, little-endian."""
    if n == 1:
        return (-1, 1)
    poly = [0] * n + [1]
    poly[0] = -1  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _int_poly_div_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _zeta_powers(level: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta_level^k for 0 <= k < level, as coefficient vectors of length phi(level)."""
    phi = cyclotomic_poly(level)
    d = len(phi) - 1
    powers: list[tuple[Fraction, ...]] = []
    cur = [Fraction(0)] * d
    cur[0] = Fraction(1)
    for _ in range(level):
        powers.append(tuple(cur))
        nxt = [Fraction(0)] * (d + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] = c
        if nxt[d] != 0:
            top = nxt[d]
            for j in range(d):
                nxt[j] -= top * phi[j]
        cur = nxt[:d]
    return tuple(powers)


def _reduce_conv(conv: list[Fraction], level: int) -> list[Fraction]:
    phi = cyclotomic_poly(level)
    d = len(phi) - 1
    for k in range(len(conv) - 1, d - 1, -1):
        c = conv[k]
        if c:
            conv[k] = Fraction(0)
            for j in range(d):
                conv[k - d + j] -= c * phi[j]
    return conv[:d]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class Scalar:
    """An element of Q(zeta_level), immutable."""

    __slots__ = ("level", "coeffs", "_canon")

    def __init__(self, value: RationalLike = 0, *, level: int = 1,
                 coeffs: Optional[Iterable[Fraction]] = None):
        if coeffs is None:
            self.level = 1
            self.coeffs = (Fraction(value),)
        else:
            cs = tuple(Fraction(c) for c in coeffs)
            if len(cs) != euler_phi(level):
                raise ValueError("coefficient vector length must be phi(level)")
            if level > 1 and not any(cs[1:]):
                self.level = 1
                self.coeffs = (cs[0],)
            else:
                self.level = level
                self.coeffs = cs
        self._canon = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeta(n: int) -> "Scalar":
        if n < 1:
            raise ValueError("root-of-unity order must be positive")
        if n == 1:
            return Scalar(1)
        if n == 2:
            return Scalar(-1)
        d = euler_phi(n)
        cs = [Fraction(0)] * d
        cs[1] = Fraction(1)
        return Scalar(level=n, coeffs=cs)

    @staticmethod
    def i() -> "Scalar":
        return Scalar.zeta(4)

    # -- representation management -------------------------------------

    def _lift(self, level: int) -> tuple[Fraction, ...]:
        """Coefficient vector of self inside Q(zeta_level); self.level must divide level."""
        if self.level == level:
            return self.coeffs
        if level % self.level != 0:
            raise ValueError("can only lift to a multiple level")
        step = level // self.level
        powers = _zeta_powers(level)
        d = euler_phi(level)
        out = [Fraction(0)] * d
        for k, c in enumerate(self.coeffs):
            if c:
                pw = powers[(k * step) % level]
                for j in range(d):
                    out[j] += c * pw[j]
        return tuple(out)

    def is_rational(self) -> bool:
        return self.level == 1

    def rational_value(self) -> Fraction:
        if self.level != 1:
            s = self.canonical()
            if s.level != 1:
                raise ValueError("scalar is not rational")
            return s.coeffs[0]
        return self.coeffs[0]

    def canonical(self) -> "Scalar":
        """Equivalent scalar at the smallest cyclotomic level dividing self.level."""
        if self._canon is not None:
            return self._canon
        s = self
        changed = True
        while changed and s.level > 1:
            changed = False
            for m in sorted(_proper_divisors(s.level)):
                t = _try_lower(s, m)
                if t is not None:
                    s = t
                    changed = True
                    break
        self._canon = s
        s._canon = s
        return s

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> Optional["Scalar"]:
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        lv = _lcm(self.level, o.level)
        a, b = self._lift(lv), o._lift(lv)
        return Scalar(level=lv, coeffs=[x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Scalar(level=self.level, coeffs=[-c for c in self.coeffs])

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
        if self.level == 1:
            c = self.coeffs[0]
            return Scalar(level=o.level, coeffs=[c * y for y in o.coeffs])
        if o.level == 1:
            c = o.coeffs[0]
            return Scalar(level=self.level, coeffs=[x * c for x in self.coeffs])
        lv = _lcm(self.level, o.level)
        a, b = self._lift(lv), o._lift(lv)
        conv = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return Scalar(level=lv, coeffs=_reduce_conv(conv, lv))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("scalar inverse of zero")
        if self.level == 1:
            return Scalar(1 / self.coeffs[0])
        phi = [Fraction(c) for c in cyclotomic_poly(self.level)]
        a = list(self.coeffs)
        inv = _poly_modular_inverse(a, phi)
        return Scalar(level=self.level, coeffs=_reduce_conv(inv, self.level))

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
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "Scalar":
        """Complex conjugation: zeta -> zeta^(-1)."""
        if self.level == 1:
            return self
        powers = _zeta_powers(self.level)
        d = euler_phi(self.level)
        out = [Fraction(0)] * d
        for k, c in enumerate(self.coeffs):
            if c:
                pw = powers[(-k) % self.level]
                for j in range(d):
                    out[j] += c * pw[j]
        return Scalar(level=self.level, coeffs=out)

    # -- predicates and hashing ------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.level == 1 and self.coeffs[0] == 1

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.level == o.level:
            return self.coeffs == o.coeffs
        return (self - o).is_zero()

    def __hash__(self):
        c = self.canonical()
        return hash((c.level, c.coeffs))

    def __bool__(self):
        return not self.is_zero()

    # -- root-of-unity bookkeeping ----------------------------------------

    def torsion_order(self) -> Optional[int]:
        """Order of self as a root of unity, or None if self is not one."""
        if self.is_zero():
            return None
        c = self.canonical()
        bound = _lcm(2, c.level)
        acc = Scalar(1)
        for k in range(1, bound + 1):
            acc = acc * c
            if acc.is_one():
                return k
        return None

    def as_rational_times_root(self) -> Optional[tuple[Fraction, "Scalar", int]]:
        """Write self = rho * zeta_T^e with rho rational, T = lcm(2, level).

        Returns (rho, zeta_T, e) or None if no such form exists.
        """
        if self.is_zero():
            return Fraction(0), Scalar(1), 0
        c = self.canonical()
        t = _lcm(2, c.level)
        z = Scalar.zeta(t)
        zpow = Scalar(1)
        for e in range(t):
            q = c / zpow
            if q.is_rational():
                return q.rational_value(), z, e
            zpow = zpow * z
        return None

    def nth_root(self, n: int) -> Optional["Scalar"]:
        """Some exact n-th root in a (possibly larger) cyclotomic field, or None."""
        if n < 1:
            raise ValueError("root order must be positive")
        if n == 1:
            return self
        if self.is_zero():
            return Scalar(0)
        form = self.as_rational_times_root()
        if form is None:
            return None
        rho, _z, e = form
        t = _lcm(2, self.canonical().level)
        root_rho = _rational_nth_root(abs(rho), n)
        if root_rho is None:
            return None
        out = Scalar(root_rho)
        if rho < 0:
            out = out * Scalar.zeta(2 * n)
        if e:
            out = out * Scalar.zeta(t * n) ** e
        return out

    # -- io -----------------------------------------------------------------

    def serialize(self) -> list:
        c = self.canonical()
        return [c.level, [str(x) for x in c.coeffs]]

    @staticmethod
    def deserialize(data) -> "Scalar":
        level, coeffs = data
        return Scalar(level=level, coeffs=[Fraction(x) for x in coeffs])

    def __repr__(self):
        c = self.canonical()
        if c.level == 1:
            return str(c.coeffs[0])
        parts = []
        for k, x in enumerate(c.coeffs):
            if x == 0:
                continue
            if k == 0:
                parts.append(str(x))
            else:
                base = f"zeta({c.level})" if k == 1 else f"zeta({c.level})^{k}"
                parts.append(base if x == 1 else f"{x}*{base}")
        return " + ".join(parts) if parts else "0"


def _proper_divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


@lru_cache(maxsize=None)
def _descent_matrix(level: int, m: int):
    """Columns: zeta_m^j (j < phi(m)) lifted to level; used to test membership in Q(zeta_m)."""
    powers = _zeta_powers(level)
    step = level // m
    cols = []
    for j in range(euler_phi(m)):
        cols.append(powers[(j * step) % level])
    return cols


def _try_lower(s: Scalar, m: int) -> Optional[Scalar]:
    """Rewrite s at level m if s lies in Q(zeta_m); m must divide s.level."""
    cols = _descent_matrix(s.level, m)
    d = euler_phi(s.level)
    k = len(cols)
    # Solve sum_j x_j * cols[j] == s.coeffs by Gaussian elimination.
    rows = [[cols[j][i] for j in range(k)] + [s.coeffs[i]] for i in range(d)]
    piv_cols: list[int] = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(d):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == d:
            break
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    for i in range(r, d):
        if rows[i][-1] != 0:
            return None
    # verify against the full system: the solve above only used pivot rows
    for i in range(d):
        acc = Fraction(0)
        for j in range(k):
            acc += cols[j][i] * sol[j]
        if acc != s.coeffs[i]:
            return None
    return Scalar(level=m, coeffs=sol)


def _poly_modular_inverse(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo mod in Q[x], little-endian; mod monic."""

    def norm(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    def pdivmod(n, d):
        n = list(n)
        if len(n) < len(d):
            return [], n
        q = [Fraction(0)] * (len(n) - len(d) + 1)
        for k in range(len(q) - 1, -1, -1):
            c = n[k + len(d) - 1] / d[-1]
            q[k] = c
            if c:
                for j, dv in enumerate(d):
                    n[k + j] -= c * dv
        return q, norm(n)

    def psub(p, q):
        out = [Fraction(0)] * max(len(p), len(q))
        for i, c in enumerate(p):
            out[i] += c
        for i, c in enumerate(q):
            out[i] -= c
        return norm(out)

    def pmul(p, q):
        if not p or not q:
            return []
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            if x:
                for j, y in enumerate(q):
                    out[i + j] += x * y
        return norm(out)

    r0, r1 = norm(list(mod)), norm(list(a))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element not invertible modulo cyclotomic polynomial")
    c = r0[0]
    inv = [x / c for x in s0]
    inv += [Fraction(0)] * (len(mod) - 1 - len(inv))
    return inv


def _rational_nth_root(x: Fraction, n: int) -> Optional[Fraction]:
    """Exact n-th root of a nonnegative rational, or None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)

    def iroot(v: int) -> Optional[int]:
        if v == 0:
            return 0
        r = round(v ** (1.0 / n))
        for cand in (r - 1, r, r + 1, r + 2):
            if cand >= 0 and cand ** n == v:
                return cand
        return None

    p = iroot(x.numerator)
    q = iroot(x.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


ZERO = Scalar(0)
ONE = Scalar(1)
