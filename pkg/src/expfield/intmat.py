"""Integer matrix algebra: normal forms, kernels, row-span machinery,
the two block-decomposition lemmas, and the matrix action on G^n.

All entries are arbitrary-precision Python ints; rank and kernel
computations are fraction-free (Bareiss) or exact rational.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Iterator, Optional, Sequence

from .ratexpr import RatExpr, Registry


class IntMat:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[int]], cols: Optional[int] = None):
        rows = tuple(tuple(int(x) for x in r) for r in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged matrix")
        else:
            width = cols if cols is not None else 0
        self.rows = len(rows)
        self.cols = width
        self.entries = rows

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "IntMat":
        return IntMat([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(r: int, c: int) -> "IntMat":
        return IntMat([[0] * c for _ in range(r)], cols=c)

    @staticmethod
    def scalar(n: int, value: int) -> "IntMat":
        return IntMat([[value if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMat":
        return IntMat(rows, cols=cols)

    # -- basic operations ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, IntMat):
            return NotImplemented
        return self.entries == other.entries and self.cols == other.cols

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __mul__(self, other: "IntMat") -> "IntMat":
        if not isinstance(other, IntMat):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        ot = list(zip(*other.entries)) if other.entries else [[]] * other.cols
        out = [
            [sum(a * b for a, b in zip(row, col)) for col in ot]
            for row in self.entries
        ]
        return IntMat(out, cols=other.cols)

    def __neg__(self):
        return IntMat([[-x for x in r] for r in self.entries], cols=self.cols)

    def transpose(self) -> "IntMat":
        return IntMat(list(zip(*self.entries)) if self.entries else [], cols=self.rows)

    def vstack(self, other: "IntMat") -> "IntMat":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMat(self.entries + other.entries, cols=self.cols)

    def hstack(self, other: "IntMat") -> "IntMat":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return IntMat([a + b for a, b in zip(self.entries, other.entries)],
                      cols=self.cols + other.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMat":
        return IntMat([[self.entries[i][j] for j in cols] for i in rows],
                      cols=len(cols))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in r) for r in self.entries)

    def rank(self) -> int:
        """Fraction-free Bareiss rank."""
        m = [list(r) for r in self.entries]
        rows, cols = self.rows, self.cols
        r = 0
        prev = 1
        for c in range(cols):
            piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            for i in range(r + 1, rows):
                for j in range(c + 1, cols):
                    m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) // prev
                m[i][c] = 0
            prev = m[r][c]
            r += 1
            if r == rows:
                break
        return r

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for c in range(n - 1):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                sign = -sign
            for i in range(c + 1, n):
                for j in range(c + 1, n):
                    m[i][j] = (m[i][j] * m[c][c] - m[i][c] * m[c][j]) // prev
                m[i][c] = 0
            prev = m[c][c]
        return sign * m[n - 1][n - 1]

    def __repr__(self):
        return f"IntMat({[list(r) for r in self.entries]!r})"


# -- rational elimination helpers ------------------------------------------------


def frac_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
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
        r += 1
        if r == nrows:
            break
    return r


def frac_solve_rowspace(basis_rows: Sequence[Sequence[int]],
                        target: Sequence[int]) -> Optional[list[Fraction]]:
    """Solve x . basis_rows == target over Q, or None; basis rows independent."""
    k = len(basis_rows)
    if k == 0:
        return [] if all(t == 0 for t in target) else None
    n = len(basis_rows[0])
    # columns are the unknown coefficients
    rows = [[Fraction(basis_rows[j][i]) for j in range(k)] + [Fraction(target[i])]
            for i in range(n)]
    piv: list[int] = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    for i in range(r, n):
        if rows[i][-1] != 0:
            return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv):
        sol[c] = rows[i][-1]
    return sol


# -- normal forms --------------------------------------------------------


def hnf(m: IntMat) -> tuple[IntMat, IntMat]:
    """Row Hermite normal form: returns (H, U) with U*M = H, U unimodular.

    H is upper staircase with positive pivots and reduced entries above
    them; zero rows sit at the bottom.
    """
    h = [list(r) for r in m.entries]
    u = [[1 if i == j else 0 for j in range(m.rows)] for i in range(m.rows)]
    r = 0
    for c in range(m.cols):
        while True:
            nz = [i for i in range(r, m.rows) if h[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(h[i][c]))
            if i0 != r:
                h[r], h[i0] = h[i0], h[r]
                u[r], u[i0] = u[i0], u[r]
            stable = True
            for i in range(r + 1, m.rows):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    if q:
                        h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if h[i][c] != 0:
                        stable = False
            if stable:
                break
        if r < m.rows and h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = h[i][c] // h[r][c]
                if q:
                    h[i] = [a - q * b for a, b in zip(h[i], h[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            r += 1
            if r == m.rows:
                break
    return IntMat(h, cols=m.cols), IntMat(u, cols=m.rows)


def snf(m: IntMat) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form: returns (S, U, V) with U*M*V = S, U, V unimodular."""
    s = [list(r) for r in m.entries]
    rows, cols = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(i, j, q):  # row_i -= q * row_j
        s[i] = [a - q * b for a, b in zip(s[i], s[j])]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for rr in range(rows):
            s[rr][i] -= q * s[rr][j]
        for rr in range(cols):
            v[rr][i] -= q * v[rr][j]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for rr in range(rows):
            s[rr][i], s[rr][j] = s[rr][j], s[rr][i]
        for rr in range(cols):
            v[rr][i], v[rr][j] = v[rr][j], v[rr][i]

    t = 0
    while t < min(rows, cols):
        # locate smallest nonzero entry in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if s[i][j] != 0 and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        clean = False
        while not clean:
            clean = True
            for i in range(t + 1, rows):
                if s[i][t] != 0:
                    q = s[i][t] // s[t][t]
                    row_op(i, t, q)
                    if s[i][t] != 0:
                        swap_rows(t, i)
                        clean = False
            for j in range(t + 1, cols):
                if s[t][j] != 0:
                    q = s[t][j] // s[t][t]
                    col_op(j, t, q)
                    if s[t][j] != 0:
                        swap_cols(t, j)
                        clean = False
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        # divisibility sweep: fold any bad entry into the pivot block
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % s[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, -1)  # add row `bad` to row t, redo this pivot
            continue
        t += 1
    return IntMat(s, cols=cols), IntMat(u, cols=rows), IntMat(v, cols=cols)


def companion(m: IntMat) -> tuple[IntMat, int]:
    """Integer matrix A with A*M = |det M| * Id, plus d = |det M|."""
    if m.rows != m.cols:
        raise ValueError("companion needs a square matrix")
    d = m.det()
    if d == 0:
        raise ValueError("companion of a singular matrix")
    n = m.rows
    # adjugate via exact rational inverse
    aug = [[Fraction(m.entries[i][j]) for j in range(n)] +
           [Fraction(1 if i == k else 0) for k in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            val = aug[i][n + j] * d
            if val.denominator != 1:
                raise ArithmeticError("adjugate entry not integral")
            row.append(val.numerator)
        adj.append(row)
    a = IntMat(adj)
    if d < 0:
        a = -a
    return a, abs(d)


# -- kernels, saturation ---------------------------------------------------------


def left_kernel(m: IntMat) -> IntMat:
    """Saturated basis (rows) of {x in Z^rows : x * M = 0}."""
    h, u = hnf(m)
    nonzero = sum(1 for r in h.entries if any(r))
    return IntMat(u.entries[nonzero:], cols=m.rows)


def right_kernel(m: IntMat) -> IntMat:
    """Saturated basis (columns stacked as rows) of {x : M x = 0}."""
    return left_kernel(m.transpose())


def saturate(m: IntMat) -> IntMat:
    """Basis (rows) of the saturation Q-rowspan(M) intersect Z^cols."""
    s, _u, v = snf(m)
    r = sum(1 for i in range(min(m.rows, m.cols)) if s.entries[i][i] != 0)
    vinv, d = companion(v)
    if d != 1:
        raise ArithmeticError("SNF right transform not unimodular")
    return IntMat(vinv.entries[:r], cols=m.cols)


def row_span_canonical(m: IntMat) -> IntMat:
    """Canonical representative of the Q-row-span: HNF of the saturation."""
    if m.rank() == 0:
        return IntMat([], cols=m.cols)
    sat = saturate(m)
    h, _ = hnf(sat)
    nonzero = [r for r in h.entries if any(r)]
    return IntMat(nonzero, cols=m.cols)


# -- the two decomposition lemmas --------------------------------------------


def decompose_block(n_mat: IntMat, p_mat: IntMat) -> tuple[IntMat, IntMat, IntMat, IntMat]:
    """Split a pair of full-row-rank matrices along the intersection of
    their row spans.

    Returns (A, N0, P0, P1) with A * diag(N, P) = [[N0;P1, 0], [0, P0;P1]],
    the stacked rows of N0, P0, P1 Q-linearly independent, and
    span(P1) = span(N) intersect span(P).
    """
    if n_mat.cols != p_mat.cols:
        raise ValueError("column mismatch")
    k, l = n_mat.rows, p_mat.rows
    if n_mat.rank() != k or p_mat.rank() != l:
        raise ValueError("decompose_block needs full-row-rank inputs")
    stacked = n_mat.vstack(-p_mat)
    ker = left_kernel(stacked)  # rows (a | b): a*N = b*P
    p1_rows = []
    a_vecs = []
    b_vecs = []
    for row in ker.entries:
        a, b = row[:k], row[k:]
        vec = [sum(a[i] * n_mat.entries[i][j] for i in range(k)) for j in range(n_mat.cols)]
        p1_rows.append(vec)
        a_vecs.append(list(a))
        b_vecs.append(list(b))
    p1 = IntMat(p1_rows, cols=n_mat.cols)

    def extend(base: list[Sequence[int]], candidates: IntMat) -> list[int]:
        chosen: list[int] = []
        current = [list(map(Fraction, r)) for r in base]
        rank_now = frac_rank(current)
        for i, row in enumerate(candidates.entries):
            trial = current + [list(map(Fraction, row))]
            r2 = frac_rank(trial)
            if r2 > rank_now:
                chosen.append(i)
                current = trial
                rank_now = r2
        return chosen

    n0_idx = extend(p1_rows, n_mat)
    p0_idx = extend(p1_rows, p_mat)
    n0 = IntMat([n_mat.entries[i] for i in n0_idx], cols=n_mat.cols)
    p0 = IntMat([p_mat.entries[i] for i in p0_idx], cols=p_mat.cols)
    a0_rows = [[1 if j == i else 0 for j in range(k)] for i in n0_idx] + a_vecs
    a1_rows = [[1 if j == i else 0 for j in range(l)] for i in p0_idx] + b_vecs
    a0 = IntMat(a0_rows, cols=k)
    a1 = IntMat(a1_rows, cols=l)
    top = a0.hstack(IntMat.zero(k, l))
    bottom = IntMat.zero(l, k).hstack(a1)
    a = top.vstack(bottom)
    return a, n0, p0, p1


def reduce_general(m: IntMat) -> tuple[IntMat, IntMat, IntMat, IntMat, IntMat, int, int, int]:
    """Bring a full-row-rank matrix M (p x 2n) to the three-band shape
    [[N0, 0], [N1, P1], [0, P0]] by an integer full-rank left transform.

    Returns (A, N0, N1, P1, P0, k, l, m) with (N0;N1) of rank k+m,
    (P0;P1) of rank m+l, and k+m+l = p.
    """
    p, two_n = m.rows, m.cols
    if two_n % 2 != 0:
        raise ValueError("reduce_general needs an even number of columns")
    n = two_n // 2
    if p == 0 or m.rank() != p:
        raise ValueError("reduce_general needs full row rank > 0")
    left = m.submatrix(range(p), range(n))
    h, u1 = hnf(left)
    r1 = sum(1 for r in h.entries if any(r))
    um = u1 * m
    n_block = IntMat([um.entries[i][:n] for i in range(r1)], cols=n)
    q_block = IntMat([um.entries[i][n:] for i in range(r1)], cols=n)
    p_block = IntMat([um.entries[i][n:] for i in range(r1, p)], cols=n)
    r2 = p - r1
    if p_block.rows and p_block.rank() != r2:
        raise ArithmeticError("bottom block lost rank")

    # rows a with a*Q inside span(P)
    if r1:
        stacked = q_block.vstack(p_block) if r2 else q_block
        ker = left_kernel(stacked)
        a_lattice = IntMat([row[:r1] for row in ker.entries], cols=r1)
        a_sat = saturate(a_lattice) if a_lattice.rows else IntMat([], cols=r1)
    else:
        a_sat = IntMat([], cols=0)
    k = a_sat.rows
    # complete to a full-rank square transform on the top rows
    a1_rows = [list(r) for r in a_sat.entries]
    current = [list(map(Fraction, r)) for r in a1_rows]
    rank_now = frac_rank(current)
    for i in range(r1):
        e = [1 if j == i else 0 for j in range(r1)]
        trial = current + [list(map(Fraction, e))]
        if frac_rank(trial) > rank_now:
            a1_rows.append(e)
            current = trial
            rank_now += 1
    mm = r1 - k
    a1 = IntMat(a1_rows, cols=r1) if r1 else IntMat([], cols=0)

    # full transform on all p rows: first apply diag(A1, Id), then clear the
    # right halves of the first k rows using the bottom block
    full = [[0] * p for _ in range(p)]
    for i in range(r1):
        for j in range(r1):
            full[i][j] = a1.entries[i][j]
    for i in range(r2):
        full[r1 + i][r1 + i] = 1
    ta = IntMat(full, cols=p)
    tm = ta * um
    for i in range(k):
        rhs = tm.entries[i][n:]
        if r2:
            x = frac_solve_rowspace(p_block.entries, rhs)
        else:
            x = [] if all(v == 0 for v in rhs) else None
        if x is None:
            raise ArithmeticError("right half not in bottom span as promised")
        denom = 1
        for f in x:
            denom = denom // gcd(denom, f.denominator) * f.denominator
        coeffs = [int(f * denom) for f in x]
        new_rows = [list(r) for r in tm.entries]
        new_full = [list(r) for r in ta.entries]
        new_rows[i] = [denom * v for v in new_rows[i]]
        new_full[i] = [denom * v for v in new_full[i]]
        for j, cf in enumerate(coeffs):
            if cf:
                new_rows[i] = [a - cf * b for a, b in zip(new_rows[i], new_rows[r1 + j])]
                new_full[i] = [a - cf * b for a, b in zip(new_full[i], new_full[r1 + j])]
        tm = IntMat(new_rows, cols=two_n)
        ta = IntMat(new_full, cols=p)

    n0 = IntMat([tm.entries[i][:n] for i in range(k)], cols=n)
    n1 = IntMat([tm.entries[i][:n] for i in range(k, r1)], cols=n)
    p1 = IntMat([tm.entries[i][n:] for i in range(k, r1)], cols=n)
    p0 = IntMat([tm.entries[i][n:] for i in range(r1, p)], cols=n)
    a = ta * u1
    return a, n0, n1, p1, p0, k, r2, mm


# -- bounded span enumeration -----------------------------------------------


def primitive_rows(cols: int, bound: int) -> list[tuple[int, ...]]:
    """Primitive integer rows with entries in [-B, B], deduplicated up to sign."""
    seen: set[tuple[int, ...]] = set()
    for vec in product(range(-bound, bound + 1), repeat=cols):
        if not any(vec):
            continue
        g = 0
        for x in vec:
            g = gcd(g, x)
        v = tuple(x // g for x in vec)
        first = next(x for x in v if x)
        if first < 0:
            v = tuple(-x for x in v)
        seen.add(v)
    return sorted(seen)


def enumerate_row_spans(rows: int, cols: int, bound: int) -> Iterator[IntMat]:
    """One saturated-HNF representative per distinct rank-`rows` Q-row-span
    generated by integer matrices with entries in [-bound, bound].
    Deterministic order."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if rows > cols:
        return
    if rows == cols:
        yield IntMat.identity(rows)
        return
    prims = primitive_rows(cols, bound)
    if rows == 1:
        for v in prims:
            yield IntMat([list(v)], cols=cols)
        return
    reps: dict[tuple, IntMat] = {}
    for combo in combinations(prims, rows):
        mat = IntMat([list(v) for v in combo], cols=cols)
        if mat.rank() != rows:
            continue
        canon = row_span_canonical(mat)
        reps.setdefault(canon.entries, canon)
    for key in sorted(reps):
        yield reps[key]


# -- the group G = Ga x Gm and the matrix action ---------------------------------


class GPoint:
    """A point of G^n: n additive coordinates and n nonzero multiplicative ones."""

    __slots__ = ("n", "additive", "multiplicative", "registry")

    def __init__(self, additive: Sequence[RatExpr], multiplicative: Sequence[RatExpr],
                 registry: Registry):
        if len(additive) != len(multiplicative):
            raise ValueError("additive/multiplicative arity mismatch")
        for w in multiplicative:
            if w.is_zero():
                raise ValueError("multiplicative coordinate must be nonzero")
        self.n = len(additive)
        self.additive = tuple(additive)
        self.multiplicative = tuple(multiplicative)
        self.registry = registry

    @staticmethod
    def identity(registry: Registry, n: int) -> "GPoint":
        one = registry.const(1)
        zero = registry.const(0)
        return GPoint([zero] * n, [one] * n, registry)

    def oplus(self, other: "GPoint") -> "GPoint":
        if self.n != other.n:
            raise ValueError("arity mismatch")
        return GPoint(
            [a + b for a, b in zip(self.additive, other.additive)],
            [a * b for a, b in zip(self.multiplicative, other.multiplicative)],
            self.registry,
        )

    def inverse(self) -> "GPoint":
        return GPoint([-a for a in self.additive],
                      [w.inverse() for w in self.multiplicative], self.registry)

    def __eq__(self, other):
        if not isinstance(other, GPoint):
            return NotImplemented
        return (self.n == other.n
                and all(a == b for a, b in zip(self.additive, other.additive))
                and all(a == b for a, b in zip(self.multiplicative, other.multiplicative)))

    def __repr__(self):
        pairs = ", ".join(
            f"({z!r}, {w!r})" for z, w in zip(self.additive, self.multiplicative)
        )
        return f"GPoint[{pairs}]"


def act(m: IntMat, p: GPoint) -> GPoint:
    """Linear action on additive coordinates, monomial action on multiplicative."""
    if m.cols != p.n:
        raise ValueError("matrix/point dimension mismatch")
    reg = p.registry
    additive = []
    multiplicative = []
    for row in m.entries:
        z = reg.const(0)
        w = reg.const(1)
        for coef, (zz, ww) in zip(row, zip(p.additive, p.multiplicative)):
            if coef:
                z = z + (zz * coef if coef != 1 else zz)
                w = w * ww ** coef
        additive.append(z)
        multiplicative.append(w)
    return GPoint(additive, multiplicative, reg)
