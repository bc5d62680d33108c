"""Transcendence degree over the constant field via Jacobian rank.

Valid in characteristic zero: the transcendence degree of a tuple of
rational functions equals the generic rank of its Jacobian matrix, and
the relative version is a difference of ranks.  Ranks are computed
fraction-free (Bareiss) on the polynomial matrix obtained by clearing
each row's denominators, which does not change the rank.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Poly
from .ratexpr import RatExpr
from .scalars import Scalar


def jacobian_rows(fs: Sequence[RatExpr], variables: Sequence[int]) -> list[list[Poly]]:
    """One polynomial row per function: the gradient scaled by den^2."""
    return [f.gradient_numerators(variables) for f in fs]


def poly_matrix_rank(rows: Sequence[Sequence[Poly]]) -> int:
    """Bareiss fraction-free rank of a matrix of polynomials."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = Poly.const(1)
    for c in range(ncols):
        pivot = None
        best = None
        for i in range(rank, nrows):
            if not m[i][c].is_zero():
                size = len(m[i][c].terms)
                if best is None or size < best:
                    pivot, best = i, size
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(rank + 1, nrows):
            for j in range(c + 1, ncols):
                num = m[i][j] * m[rank][c] - m[i][c] * m[rank][j]
                m[i][j] = num.exact_div(prev) if not num.is_zero() else Poly.zero()
            m[i][c] = Poly.zero()
        prev = m[rank][c]
        rank += 1
        if rank == nrows:
            break
    return rank


def tr_deg(fs: Sequence[RatExpr], over: Sequence[RatExpr] = ()) -> int:
    """tr.deg of fs over the field generated by constants and `over`."""
    everything = list(fs) + list(over)
    if not everything:
        return 0
    variables: set[int] = set()
    for f in everything:
        variables.update(f.variables())
    if not variables:
        return 0
    vs = sorted(variables)
    rows_over = jacobian_rows(list(over), vs)
    rows_all = rows_over + jacobian_rows(list(fs), vs)
    r_over = poly_matrix_rank(rows_over) if over else 0
    r_all = poly_matrix_rank(rows_all)
    return r_all - r_over


# -- exact evaluation shortcuts ------------------------------------------------
#
# Rank at a rational sample point is a lower bound for the generic rank.
# These helpers keep the bounded predimension searches fast while staying
# exact: all arithmetic is over Q(zeta), no floats anywhere.


def gradient_at_point(f: RatExpr, variables: Sequence[int],
                      point: dict[int, Fraction]) -> list[Scalar]:
    den_val = f.den.evaluate(point)
    if den_val.is_zero():
        raise ZeroDivisionError("sample point hits a denominator zero")
    num_val = f.num.evaluate(point)
    out = []
    for v in variables:
        dn = f.num.derivative(v).evaluate(point)
        dd = f.den.derivative(v).evaluate(point)
        out.append((dn * den_val - num_val * dd) / (den_val * den_val))
    return out


def scalar_matrix_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, nrows) if not m[i][c].is_zero()), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
        inv = m[rank][c].inverse()
        m[rank] = [x * inv for x in m[rank]]
        for i in range(rank + 1, nrows):
            if not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank
