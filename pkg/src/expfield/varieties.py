"""Parametrized irreducible subvarieties of G^n.

A variety is given by a rational parametrization (generic point): n
additive and n nonzero multiplicative coordinate functions of a tuple of
parameter indeterminates.  Dimension is Jacobian rank over the non-parameter
indeterminates, the "for all integer matrices" quantifiers are finitized by
bounded span-representative enumeration, absolute freeness is decided
exactly through relation lattices, and Kummer division is performed by
root-lifting reparametrizations with root-of-unity twist grouping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Optional, Sequence

from .intmat import GPoint, IntMat, act, enumerate_row_spans
from .poly import Poly, poly_nth_root
from .ratexpr import Involution, RatExpr, Registry
from .relations import RelationLattice, mult_relations, q_linear_relations
from .scalars import Scalar
from .trdeg import tr_deg


class UnsupportedDivision(Exception):
    """Raised when divide(V, q) cannot produce a certified answer."""


class VarietyError(ValueError):
    pass


class ParamVariety:
    __slots__ = ("registry", "name", "n", "params", "additive", "multiplicative",
                 "equations", "provenance", "_dim")

    def __init__(self, registry: Registry, n: int, params: Sequence[int],
                 additive: Sequence[RatExpr], multiplicative: Sequence[RatExpr],
                 equations: Optional[tuple] = None, name: str = "",
                 provenance: Optional[dict] = None):
        if len(additive) != n or len(multiplicative) != n:
            raise VarietyError("coordinate maps must have length n")
        for w in multiplicative:
            if w.is_zero():
                raise VarietyError("zero multiplicative coordinate")
        self.registry = registry
        self.name = name
        self.n = n
        self.params = tuple(params)
        self.additive = tuple(additive)
        self.multiplicative = tuple(multiplicative)
        # equations: (coordinate var indices z1..zn,w1..wn, expressions that vanish)
        self.equations = equations
        self.provenance = provenance or {"kind": "user"}
        self._dim: Optional[int] = None
        if equations is not None:
            if not self.satisfies_equations(self.point()):
                raise VarietyError("defining equation does not vanish on the parametrization")

    # -- invariants ------------------------------------------------------

    def satisfies_equations(self, point: GPoint) -> bool:
        """Substitute a G^n point into the stored defining equations."""
        if self.equations is None:
            return True
        coord_vars, exprs = self.equations
        mapping = {}
        for j in range(self.n):
            mapping[coord_vars[j]] = point.additive[j]
            mapping[coord_vars[self.n + j]] = point.multiplicative[j]
        for e in exprs:
            if not e.substitute(mapping).is_zero():
                return False
        return True

    def coordinate_functions(self) -> list[RatExpr]:
        return list(self.additive) + list(self.multiplicative)

    def constant_vars(self) -> list[int]:
        """Indeterminates appearing in the maps that are not parameters."""
        seen: set[int] = set()
        for f in self.coordinate_functions():
            seen.update(f.variables())
        return sorted(seen - set(self.params))

    def point(self) -> GPoint:
        return GPoint(self.additive, self.multiplicative, self.registry)

    def dim(self) -> int:
        if self._dim is None:
            over = [self.registry.var(self.registry.name(v)) for v in self.constant_vars()]
            self._dim = tr_deg(self.coordinate_functions(), over)
        return self._dim

    def depth(self) -> int:
        return self.dim() - self.n

    def canonical_key(self) -> str:
        """Deterministic identity string with parameters renamed positionally."""
        order: list[int] = []
        for f in self.coordinate_functions():
            for m in sorted(f.num.terms) + sorted(f.den.terms):
                for v, _ in m:
                    if v in self.params and v not in order:
                        order.append(v)
        mapping = {v: f"_p{i}" for i, v in enumerate(order)}
        parts = [str(self.n)]
        for f in self.coordinate_functions():
            parts.append(_expr_str_renamed(f, mapping))
        return "|".join(parts)

    def __repr__(self):
        label = self.name or "variety"
        return f"<{label}: n={self.n} dim={self.dim()}>"


def _expr_str_renamed(f: RatExpr, mapping: dict[int, str]) -> str:
    reg = f.registry

    def poly_str(p: Poly) -> str:
        from .poly import mono_key
        if p.is_zero():
            return "0"
        parts = []
        for m in sorted(p.terms, key=mono_key, reverse=True):
            c = p.terms[m]
            cc = c.canonical()
            factors = [f"<{cc.level}:{','.join(map(str, cc.coeffs))}>"]
            for v, e in m:
                nm = mapping.get(v, reg.names[v])
                factors.append(nm if e == 1 else f"{nm}^{e}")
            parts.append("*".join(factors))
        return "+".join(parts)

    return f"{poly_str(f.num)}/{poly_str(f.den)}"


# -- construction ----------------------------------------------------------------


def make_variety(registry: Registry, n: int, param_names: Sequence[str],
                 additive: Sequence[RatExpr], multiplicative: Sequence[RatExpr],
                 equations: Optional[tuple] = None, name: str = "") -> ParamVariety:
    params = [registry.index(p) for p in param_names]
    v = ParamVariety(registry, n, params, additive, multiplicative,
                     equations=equations, name=name)
    if v.dim() > len(params):
        raise VarietyError("dimension exceeds the number of parameters")
    return v


def push(m: IntMat, v: ParamVariety) -> ParamVariety:
    if m.cols != v.n:
        raise VarietyError("matrix arity does not match the variety")
    image = act(m, v.point())
    return ParamVariety(v.registry, m.rows, v.params, image.additive,
                        image.multiplicative,
                        name=f"{v.name}.push" if v.name else "",
                        provenance={"kind": "pushforward", "matrix": m.entries,
                                    "parent": v.name or v.canonical_key()})


def translate(v: ParamVariety, p: GPoint) -> ParamVariety:
    if p.n != v.n:
        raise VarietyError("translation point arity mismatch")
    shifted = v.point().oplus(p)
    return ParamVariety(v.registry, v.n, v.params, shifted.additive,
                        shifted.multiplicative,
                        name=f"{v.name}.translate" if v.name else "",
                        provenance={"kind": "translate", "parent": v.name or ""})


# -- classification ---------------------------------------------------------------


@dataclass(frozen=True)
class Flag:
    holds: bool
    status: str  # "exact" | "holds-up-to-bound" | "fails"
    bound: Optional[int] = None
    witness: Optional[tuple] = None  # matrix entries of a violating representative

    def describe(self) -> str:
        mark = "yes" if self.holds else "NO"
        extra = f" (bound {self.bound})" if self.status == "holds-up-to-bound" else ""
        if self.witness is not None:
            extra += f" witness {list(map(list, self.witness))}"
        return f"{mark} [{self.status}]{extra}"


@dataclass(frozen=True)
class ClassificationReport:
    dim: int
    depth: int
    rotund: Flag
    abs_free: Flag
    simple: Flag
    perfectly_rotund: Flag
    equality_matrices: tuple[tuple, ...]
    additive_lattice: RelationLattice
    multiplicative_lattice: RelationLattice
    bound: int

    def all_flags(self) -> dict[str, Flag]:
        return {"rotund": self.rotund, "absolutely_free": self.abs_free,
                "simple": self.simple, "perfectly_rotund": self.perfectly_rotund}


def classify(v: ParamVariety, bound: int = 3) -> ClassificationReport:
    if bound < 1:
        raise ValueError("bound must be >= 1")
    dim_v = v.dim()
    depth_v = v.depth()
    add_lat = q_linear_relations(list(v.additive))
    mul_lat = mult_relations(list(v.multiplicative))
    free = add_lat.is_empty() and mul_lat.is_empty()
    abs_free = Flag(free, "exact",
                    witness=(add_lat.generators + mul_lat.generators) or None
                    if not free else None)

    rotund_holds = True
    rotund_witness = None
    simple_holds = True
    simple_witness = None
    equality: list[tuple] = []
    for k in range(1, v.n + 1):
        for rep in enumerate_row_spans(k, v.n, bound):
            d = push(rep, v).dim()
            if d < k:
                rotund_holds = False
                if rotund_witness is None:
                    rotund_witness = rep.entries
            if d == k:
                equality.append(rep.entries)
            if 0 < k < v.n and d <= k:
                simple_holds = False
                if simple_witness is None:
                    simple_witness = rep.entries

    rotund = Flag(rotund_holds, "holds-up-to-bound" if rotund_holds else "fails",
                  bound=bound, witness=rotund_witness)
    simple = Flag(simple_holds, "holds-up-to-bound" if simple_holds else "fails",
                  bound=bound, witness=simple_witness)
    perfect_holds = simple_holds and free and rotund_holds and depth_v == 0
    perfect = Flag(perfect_holds,
                   "holds-up-to-bound" if perfect_holds else "fails",
                   bound=bound)
    return ClassificationReport(dim_v, depth_v, rotund, abs_free, simple, perfect,
                                tuple(equality), add_lat, mul_lat, bound)


# -- Kummer division -----------------------------------------------------------


def _uniform_weight(p: Poly, var: int) -> Optional[int]:
    """Common exponent of var across all terms, or None."""
    w = None
    for m in p.terms:
        e = dict(m).get(var, 0)
        if w is None:
            w = e
        elif w != e:
            return None
    return w


def _expr_weight(f: RatExpr, var: int) -> Optional[int]:
    wn = _uniform_weight(f.num, var)
    wd = _uniform_weight(f.den, var)
    if wn is None or wd is None:
        return None
    return wn - wd


def _monomial_form(f: RatExpr, params: set[int]) -> Optional[tuple[Scalar, dict[int, int]]]:
    """f as c * prod(params^e), or None."""
    if not f.num.is_monomial() or not f.den.is_monomial():
        return None
    (mn, cn), = f.num.terms.items()
    (md, cd), = f.den.terms.items()
    exps: dict[int, int] = {}
    for v, e in mn:
        if v not in params:
            return None
        exps[v] = exps.get(v, 0) + e
    for v, e in md:
        if v not in params:
            return None
        exps[v] = exps.get(v, 0) - e
    return cn / cd, exps


def _affine_form(f: RatExpr, params: set[int]) -> Optional[tuple[int, Scalar, Scalar]]:
    """f as a*u + b with u a parameter and a, b scalar, or None."""
    if not f.den.is_const():
        return None
    num = f.num
    used = num.variables() & params
    if len(used) != 1:
        return None
    (u,) = used
    if num.degree_in(u) != 1 or num.variables() != {u}:
        return None
    a = Scalar(0)
    b = Scalar(0)
    for m, c in num.terms.items():
        if m == ():
            b = c
        elif m == ((u, 1),):
            a = c
        else:
            return None
    dc = f.den.const_value()
    return u, a / dc, b / dc


def divide(v: ParamVariety, q: int) -> list[ParamVariety]:
    """All irreducible W with q*W = V, by root-lifting reparametrization.

    Raises UnsupportedDivision when a multiplicative coordinate is neither
    an exact q-th power, nor a parameter monomial (with constant admitting
    a q-th root), nor affine-linear in a single parameter.
    """
    if q < 1:
        raise ValueError("division order must be >= 1")
    if q == 1:
        return [v]
    reg = v.registry
    params = set(v.params)
    add_maps = list(v.additive)
    mul_maps = list(v.multiplicative)
    substitution: dict[int, RatExpr] = {}
    fresh_for: dict[int, int] = {}  # old param -> fresh param index

    def apply_subs():
        nonlocal add_maps, mul_maps
        if substitution:
            add_maps = [f.substitute(substitution) if f.variables() & set(substitution)
                        else f for f in add_maps]
            mul_maps = [f.substitute(substitution) if f.variables() & set(substitution)
                        else f for f in mul_maps]

    for _round in range(2):
        scheduled: dict[int, RatExpr] = {}
        for f in mul_maps:
            rn = poly_nth_root(f.num, q)
            rd = poly_nth_root(f.den, q)
            if rn is not None and rd is not None:
                continue
            mono = _monomial_form(f, params)
            if mono is not None:
                c, exps = mono
                if c.nth_root(q) is None:
                    raise UnsupportedDivision(
                        f"constant {c!r} has no exact {q}-th root in the scalar field")
                for u, e in exps.items():
                    if e % q != 0 and u not in scheduled and u not in fresh_for:
                        stem = reg.names[u]
                        fresh = reg.register_real(reg.fresh_name(stem))
                        scheduled[u] = RatExpr(Poly.var(fresh) ** q, Poly.const(1), reg)
                        fresh_for[u] = fresh
                continue
            aff = _affine_form(f, params)
            if aff is not None:
                u, a, b = aff
                if u in scheduled or u in fresh_for:
                    raise UnsupportedDivision(
                        "parameter needs two incompatible root substitutions")
                fresh = reg.register_real(reg.fresh_name(reg.names[u]))
                expr = (RatExpr(Poly.var(fresh) ** q, Poly.const(1), reg) - reg.const(b)) / reg.const(a)
                scheduled[u] = expr
                fresh_for[u] = fresh
                continue
            raise UnsupportedDivision(
                f"multiplicative coordinate {f!r} is not root-liftable")
        if not scheduled:
            break
        substitution.update(scheduled)
        params = (params - set(scheduled)) | {fresh_for[u] for u in scheduled}
        apply_subs()
    else:
        raise UnsupportedDivision("root substitutions did not stabilise")

    roots: list[RatExpr] = []
    for f in mul_maps:
        rn = poly_nth_root(f.num, q)
        rd = poly_nth_root(f.den, q)
        if rn is None or rd is None:
            raise UnsupportedDivision(f"no exact {q}-th root for {f!r} after lifting")
        roots.append(RatExpr(rn, rd, reg))

    # twist group: parameter scalings act on roots by their uniform weights
    action_vectors: list[tuple[int, ...]] = []
    for u in sorted(fresh_for.values()):
        weights = [_expr_weight(r, u) for r in roots]
        if all(w is not None for w in weights):
            action_vectors.append(tuple(w % q for w in weights))
    subgroup: set[tuple[int, ...]] = {tuple([0] * v.n)}
    frontier = list(subgroup)
    while frontier:
        base = frontier.pop()
        for vec in action_vectors:
            nxt = tuple((a + b) % q for a, b in zip(base, vec))
            if nxt not in subgroup:
                subgroup.add(nxt)
                frontier.append(nxt)

    new_params = [p for p in v.params if p not in substitution]
    new_params += [fresh_for[u] for u in sorted(fresh_for)]
    divided_add = [f / q for f in add_maps]

    components: list[ParamVariety] = []
    kept: set[tuple[int, ...]] = set()
    for t in iproduct(range(q), repeat=v.n):
        if any(tuple((a - b) % q for a, b in zip(t, k)) in subgroup for k in kept):
            continue
        kept.add(t)
        zq = Scalar.zeta(q)
        mult = [r * reg.const(zq ** tj) if tj else r for r, tj in zip(roots, t)]
        w = ParamVariety(reg, v.n, new_params, divided_add, mult,
                         name=f"{v.name}/({q})" if v.name else "",
                         provenance={"kind": "divide", "parent": v.name or v.canonical_key(),
                                     "q": q, "twist": list(t),
                                     "substitution": {reg.names[k]: repr(e)
                                                      for k, e in substitution.items()}})
        _verify_division(v, w, q, substitution)
        components.append(w)
    components.sort(key=lambda w: w.canonical_key())
    return components


def _verify_division(v: ParamVariety, w: ParamVariety, q: int,
                     substitution: dict[int, RatExpr]):
    """push(q*Id, W) must equal V composed with the recorded substitution."""
    qw = act(IntMat.scalar(v.n, q), w.point())
    for j in range(v.n):
        va = v.additive[j]
        vm = v.multiplicative[j]
        if substitution and va.variables() & set(substitution):
            va = va.substitute(substitution)
        if substitution and vm.variables() & set(substitution):
            vm = vm.substitute(substitution)
        if qw.additive[j] != va or qw.multiplicative[j] != vm:
            raise UnsupportedDivision("division verification failed")


def is_kummer_generic(v: ParamVariety, q: int) -> bool:
    if q == 1:
        return True
    return len(divide(v, q)) == 1


def roots_system(v: ParamVariety, q_max: int) -> list[tuple[int, ParamVariety]]:
    """All (q, W) with q*W = V for q <= q_max, deduplicated."""
    out: list[tuple[int, ParamVariety]] = []
    seen: set[str] = set()
    for q in range(1, q_max + 1):
        for w in divide(v, q):
            key = w.canonical_key()
            if key not in seen:
                seen.add(key)
                out.append((q, w))
    return out


# -- G-restriction of scalars -----------------------------------------------------


class Realization:
    """The G-restriction V-check together with its membership witness data."""

    __slots__ = ("variety", "half", "parent", "param_pairs", "phi", "phi_sigma")

    def __init__(self, variety: ParamVariety, half: ParamVariety,
                 parent: ParamVariety, param_pairs: list[tuple[int, int]],
                 phi: list[tuple[RatExpr, RatExpr]],
                 phi_sigma: list[tuple[RatExpr, RatExpr]]):
        self.variety = variety
        self.half = half
        self.parent = parent
        self.param_pairs = param_pairs
        self.phi = phi
        self.phi_sigma = phi_sigma


def realize(v: ParamVariety, inv: Involution) -> Realization:
    """Image of V' x (V')^sigma under ((z,w),(z',w')) -> (z+z', ww') x (z-z', w/w')
    for the canonical half V' with 2*V' = V."""
    halves = divide(v, 2)
    half = halves[0]
    reg = v.registry
    rename: dict[int, RatExpr] = {}
    rename_sigma: dict[int, RatExpr] = {}
    pairs: list[tuple[int, int]] = []
    for p in half.params:
        stem = reg.names[p]
        a, b = reg.register_pair(reg.fresh_name(stem), reg.fresh_name(stem + "c"))
        pairs.append((a, b))
        rename[p] = reg.var(reg.names[a])
        rename_sigma[p] = reg.var(reg.names[b])
    phi = []
    phi_sigma = []
    for j in range(half.n):
        z = half.additive[j].substitute(rename) if half.additive[j].variables() & set(rename) else half.additive[j]
        w = half.multiplicative[j].substitute(rename) if half.multiplicative[j].variables() & set(rename) else half.multiplicative[j]
        phi.append((z, w))
        phi_sigma.append((inv(z), inv(w)))
    additive = [z + zs for (z, _), (zs, _) in zip(phi, phi_sigma)]
    additive += [z - zs for (z, _), (zs, _) in zip(phi, phi_sigma)]
    multiplicative = [w * ws for (_, w), (_, ws) in zip(phi, phi_sigma)]
    multiplicative += [w / ws for (_, w), (_, ws) in zip(phi, phi_sigma)]
    params = [a for a, _ in pairs] + [b for _, b in pairs]
    variety = ParamVariety(reg, 2 * v.n, params, additive, multiplicative,
                           name=f"{v.name}.check" if v.name else "realized",
                           provenance={"kind": "realize", "parent": v.name or v.canonical_key()})
    return Realization(variety, half, v, pairs, phi, phi_sigma)


def witness_identity_holds(r: Realization) -> bool:
    """(a+c, b*d) = 2*phi'(u): the membership certificate for SOL blocks."""
    n = r.parent.n
    vc = r.variety
    for j in range(n):
        a, c = vc.additive[j], vc.additive[n + j]
        b, d = vc.multiplicative[j], vc.multiplicative[n + j]
        z, w = r.phi[j]
        if a + c != z * 2 or b * d != w * w:
            return False
    return True


@dataclass(frozen=True)
class RestrictionReport:
    rejected: bool
    reason: str
    equality_cases: tuple[tuple, ...]
    violations: tuple[tuple, ...]  # (matrix entries, dim, rank) with dim < rank
    bad_shapes: tuple[tuple, ...]  # equality cases with disallowed shape
    abs_free: bool
    bound: int

    @property
    def passed(self) -> bool:
        return (not self.rejected and self.abs_free
                and not self.violations and not self.bad_shapes)


def restriction_theorem_check(v: ParamVariety, inv: Involution,
                              bound: int = 3) -> RestrictionReport:
    """For simple V: V-check must be absolutely free and rotund within bound,
    with every bounded equality case of full rank 2n or of shape (N|P) with
    both blocks square nonsingular; for n = 1 the shape must be (k|+-k)."""
    rep = classify(v, bound)
    if not rep.abs_free.holds:
        return RestrictionReport(True, "input variety is not absolutely free",
                                 (), (), (), False, bound)
    if not rep.simple.holds:
        return RestrictionReport(True, "input variety is not simple within bound",
                                 (), (), (), False, bound)
    real = realize(v, inv)
    vc = real.variety
    n = v.n
    add_lat = q_linear_relations(list(vc.additive))
    mul_lat = mult_relations(list(vc.multiplicative))
    abs_free = add_lat.is_empty() and mul_lat.is_empty()
    equality = []
    violations = []
    bad_shapes = []
    for p in range(1, 2 * n + 1):
        for m in enumerate_row_spans(p, 2 * n, bound):
            d = push(m, vc).dim()
            if d < p:
                violations.append((m.entries, d, p))
            elif d == p:
                equality.append(m.entries)
                if p == 2 * n:
                    continue
                ok = False
                if p == n:
                    left = m.submatrix(range(p), range(n))
                    right = m.submatrix(range(p), range(n, 2 * n))
                    if left.rank() == n and right.rank() == n:
                        ok = True
                        if n == 1:
                            a = left.entries[0][0]
                            b = right.entries[0][0]
                            ok = abs(a) == abs(b)
                if not ok:
                    bad_shapes.append((m.entries, d, p))
    return RestrictionReport(False, "", tuple(equality), tuple(violations),
                             tuple(bad_shapes), abs_free, bound)
