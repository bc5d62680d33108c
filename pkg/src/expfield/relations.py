"""Additive and multiplicative relation lattices.

q_linear_relations finds the lattice of rational (cleared to integer)
vectors m with  sum_j m_j f_j  constant; mult_relations finds the integer
vectors m with  prod_j f_j^(m_j)  constant, via a gcd-refined coprime basis
of all numerators and denominators -- no irreducible factorization.
Every generator carries the constant it evaluates to, with torsion
classification (exactly 1 / root of unity of known order / other).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .intmat import IntMat, hnf, left_kernel, saturate
from .poly import Poly, poly_gcd, poly_lcm
from .ratexpr import RatExpr
from .scalars import Scalar


@dataclass(frozen=True)
class RelationLattice:
    kind: str  # "additive" | "multiplicative"
    arity: int
    generators: tuple[tuple[int, ...], ...]
    constants: tuple[Scalar, ...]
    torsion: tuple[tuple[str, Optional[int]], ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.generators)

    def is_empty(self) -> bool:
        return not self.generators


def _classify_constant(c: Scalar) -> tuple[str, Optional[int]]:
    if c.is_one():
        return ("one", 1)
    order = c.torsion_order()
    if order is not None:
        return ("root_of_unity", order)
    return ("other", None)


def _canonical_lattice(rows: list[list[int]], arity: int) -> IntMat:
    if not rows:
        return IntMat([], cols=arity)
    mat = IntMat(rows, cols=arity)
    sat = saturate(mat)
    h, _ = hnf(sat)
    nonzero = [r for r in h.entries if any(r)]
    return IntMat(nonzero, cols=arity)


def _frac_right_kernel(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0} over Q."""
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def q_linear_relations(fs: Sequence[RatExpr]) -> RelationLattice:
    """Lattice of integer vectors m with m . fs constant."""
    n = len(fs)
    if n == 0:
        return RelationLattice("additive", 0, (), ())
    registry = fs[0].registry
    den = Poly.const(1)
    for f in fs:
        den = poly_lcm(den, f.den)
    nums = [f.num * den.exact_div(f.den) for f in fs]
    # coefficient rows over Q: index (monomial, scalar-basis position)
    level = 1
    for p in nums + [den]:
        for c in p.terms.values():
            lv = c.canonical().level
            level = level // _gcd(level, lv) * lv
    monos = sorted({m for p in nums + [den] for m in p.terms})
    mono_index = {m: i for i, m in enumerate(monos)}

    def column(p: Poly) -> dict[tuple[int, int], Fraction]:
        col: dict[tuple[int, int], Fraction] = {}
        for m, c in p.terms.items():
            mi = mono_index[m]
            cc = c.canonical()
            for bi, x in enumerate(cc._lift(level)):
                if x:
                    col[(mi, bi)] = x
        return col

    cols = [column(p) for p in nums] + [column(den)]
    keys = sorted({k for col in cols for k in col})
    rows = []
    for key in keys:
        row = [col.get(key, Fraction(0)) for col in cols]
        row[-1] = -row[-1]  # unknowns are (m_1..m_n, c) with sum m_j p_j - c*den = 0
        rows.append(row)
    kernel = _frac_right_kernel(rows, n + 1)
    int_rows = []
    for vec in kernel:
        mvec = vec[:n]
        if not any(mvec):
            continue
        denom = 1
        for f in mvec:
            denom = denom // _gcd(denom, f.denominator) * f.denominator
        int_rows.append([int(f * denom) for f in mvec])
    lattice = _canonical_lattice(int_rows, n)
    generators = lattice.entries
    constants = []
    for g in generators:
        acc = registry.const(0)
        for coef, f in zip(g, fs):
            if coef:
                acc = acc + f * coef
        constants.append(acc.const_value())
    torsion = tuple(_classify_constant(c) for c in constants)
    return RelationLattice("additive", n, generators, tuple(constants), torsion)


def lin_dim_q(fs: Sequence[RatExpr], over: Sequence[RatExpr] = ()) -> int:
    """lin.d.(fs over span of `over`): |fs| minus the rank of the lattice of
    vectors m with m . fs inside span(over) + constants."""
    all_exprs = list(over) + list(fs)
    if not fs:
        return 0
    lat_all = q_linear_relations(all_exprs)
    rank_over = q_linear_relations(list(over)).rank if over else 0
    return len(fs) - (lat_all.rank - rank_over)


def coprime_basis(polys: Sequence[Poly]) -> list[Poly]:
    """Pairwise-coprime monic polynomials generating the same factor set."""
    basis: list[Poly] = []
    queue = [p.monic() for p in polys if not p.is_const()]
    while queue:
        p = queue.pop()
        if p.is_const():
            continue
        p = p.monic()
        placed = False
        for idx, b in enumerate(basis):
            g = poly_gcd(p, b)
            if g.is_const():
                continue
            basis.pop(idx)
            queue.append(g)
            queue.append(b.exact_div(g))
            queue.append(p.exact_div(g))
            placed = True
            break
        if not placed:
            basis.append(p)
    basis.sort(key=_poly_sort_key)
    return basis


def _poly_sort_key(p: Poly):
    items = []
    for m, c in sorted(p.terms.items()):
        cc = c.canonical()
        items.append((m, cc.level, tuple(cc.coeffs)))
    return tuple(items)


def _multiplicity(p: Poly, g: Poly) -> tuple[int, Poly]:
    count = 0
    while True:
        try:
            p = p.exact_div(g)
        except ArithmeticError:
            return count, p
        count += 1


def mult_relations(fs: Sequence[RatExpr]) -> RelationLattice:
    """Lattice of integer vectors m with prod fs^m constant (modulo constants)."""
    n = len(fs)
    if n == 0:
        return RelationLattice("multiplicative", 0, (), ())
    for f in fs:
        if f.is_zero():
            raise ZeroDivisionError("mult_relations requires nonzero inputs")
    units: list[Scalar] = []
    factored: list[list[tuple[int, int]]] = []  # per f: list of (basis index, exponent)
    basis = coprime_basis([f.num for f in fs] + [f.den for f in fs])
    for f in fs:
        _, lc_num = f.num.leading()
        unit = lc_num  # denominator is monic by canonicalization
        exps: dict[int, int] = {}
        rest = f.num.monic()
        for bi, g in enumerate(basis):
            e, rest = _multiplicity(rest, g)
            if e:
                exps[bi] = exps.get(bi, 0) + e
        if not rest.is_const():
            raise ArithmeticError("coprime basis failed to exhaust numerator")
        rest = f.den
        for bi, g in enumerate(basis):
            e, rest = _multiplicity(rest, g)
            if e:
                exps[bi] = exps.get(bi, 0) - e
        if not rest.is_const():
            raise ArithmeticError("coprime basis failed to exhaust denominator")
        unit = unit / rest.const_value()
        units.append(unit)
        factored.append(sorted(exps.items()))
    exp_matrix = IntMat(
        [[dict(factored[j]).get(k, 0) for k in range(len(basis))] for j in range(n)],
        cols=len(basis),
    )
    kernel = left_kernel(exp_matrix)
    h, _ = hnf(kernel)
    generators = tuple(r for r in h.entries if any(r))
    constants = []
    for g in generators:
        c = Scalar(1)
        for coef, u in zip(g, units):
            if coef:
                c = c * u ** coef
        constants.append(c)
    torsion = tuple(_classify_constant(c) for c in constants)
    return RelationLattice("multiplicative", n, generators, tuple(constants), torsion)


def _gcd(a: int, b: int) -> int:
    from math import gcd as _g

    return _g(a, b)
