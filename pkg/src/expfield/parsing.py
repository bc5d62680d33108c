"""Input grammar and structured-text formats.

Expression grammar: integers, rationals p/q, `i`, `zeta(N)`, indeterminate
names matching [a-z][a-z0-9_]*, operators + - * / and ^ with integer
exponent, and parentheses.  Variety, script, state and report files are
JSON documents whose leaf expressions use this grammar, so everything
round-trips exactly.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .poly import Poly, mono_key
from .ratexpr import RatExpr, Registry
from .scalars import Scalar
from .varieties import ParamVariety, make_variety

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[a-z][a-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"cannot tokenize near {rest[:20]!r}")
        if m.group("int") is not None:
            tokens.append(("int", m.group("int")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], registry: Registry,
                 auto_register: Optional[str]):
        self.tokens = tokens
        self.pos = 0
        self.registry = registry
        self.auto_register = auto_register

    def peek(self) -> Optional[tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok != ("op", value):
            raise ParseError(f"expected {value!r}, got {tok!r}")

    def parse(self) -> RatExpr:
        e = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input at token {self.peek()!r}")
        return e

    def expr(self) -> RatExpr:
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> RatExpr:
        node = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self) -> RatExpr:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer literal")
            return base ** (sign * int(val))
        return base

    def atom(self) -> RatExpr:
        kind, val = self.take()
        if kind == "op" and val == "-":
            return -self.atom()
        if kind == "op" and val == "+":
            return self.atom()
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "int":
            return self.registry.const(int(val))
        if kind == "name":
            if val == "i":
                return self.registry.const(Scalar.i())
            if val == "zeta":
                self.expect("(")
                k, v = self.take()
                if k != "int":
                    raise ParseError("zeta() needs an integer order")
                self.expect(")")
                return self.registry.const(Scalar.zeta(int(v)))
            if val not in self.registry:
                if self.auto_register == "real":
                    self.registry.register_real(val)
                else:
                    raise ParseError(f"unknown indeterminate {val!r}")
            return self.registry.var(val)
        raise ParseError(f"unexpected token {val!r}")


def parse_expression(text: str, registry: Registry,
                     auto_register: Optional[str] = None) -> RatExpr:
    return _Parser(_tokenize(text), registry, auto_register).parse()


# -- serialization back into the grammar -----------------------------------------


def scalar_to_syntax(c: Scalar) -> str:
    c = c.canonical()
    if c.level == 1:
        v = c.coeffs[0]
        return str(v)
    parts = []
    for k, x in enumerate(c.coeffs):
        if x == 0:
            continue
        if k == 0:
            parts.append(str(x))
            continue
        base = "i" if (c.level == 4 and k == 1) else (
            f"zeta({c.level})" if k == 1 else f"zeta({c.level})^{k}")
        if x == 1:
            parts.append(base)
        elif x == -1:
            parts.append(f"-{base}")
        else:
            parts.append(f"{x}*{base}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" + {p}" if not p.startswith("-") else f" - {p[1:]}"
    return out


def poly_to_syntax(p: Poly, registry: Registry) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m in sorted(p.terms, key=mono_key, reverse=True):
        c = p.terms[m]
        cs = scalar_to_syntax(c)
        needs_parens = ("+" in cs or "-" in cs[1:] or "/" in cs)
        factors = []
        if not m:
            parts.append(f"({cs})" if needs_parens else cs)
            continue
        if cs != "1":
            factors.append(f"({cs})" if needs_parens else cs)
        for v, e in m:
            nm = registry.names[v]
            factors.append(nm if e == 1 else f"{nm}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def expr_to_syntax(e: RatExpr) -> str:
    num = poly_to_syntax(e.num, e.registry)
    if e.den.is_const() and e.den.const_value().is_one():
        return num
    den = poly_to_syntax(e.den, e.registry)
    return f"({num})/({den})"


# -- matrices ------------------------------------------------------------------


def parse_matrix(text: str):
    from .intmat import IntMat

    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError("matrix literal must be a list of rows")
    for r in data:
        for x in r:
            if not isinstance(x, int):
                raise ParseError("matrix entries must be integers")
    return IntMat(data)


# -- variety files ----------------------------------------------------------------


def variety_from_dict(data: dict, registry: Registry) -> ParamVariety:
    try:
        n = int(data["n"])
        params = list(data["params"])
        additive = list(data["additive"])
        multiplicative = list(data["multiplicative"])
    except KeyError as missing:
        raise ParseError(f"variety file missing field {missing}") from None
    name = data.get("name", "")
    for decl in data.get("constants", []):
        if isinstance(decl, str):
            decl = {"name": decl, "sigma": "real"}
        nm = decl["name"]
        if nm in registry:
            continue
        if decl.get("sigma", "real") == "real":
            registry.register_real(nm)
        else:
            registry.register_pair(nm, decl["pair"])
    for p in params:
        if p not in registry:
            registry.register_real(p)
    add = [parse_expression(s, registry) for s in additive]
    mul = [parse_expression(s, registry) for s in multiplicative]
    equations = None
    if data.get("equations"):
        coord_ids = []
        for prefix in ("z", "w"):
            for j in range(1, n + 1):
                nm = f"{prefix}{j}"
                coord_ids.append(registry.index(nm) if nm in registry
                                 else registry.register_unpaired(nm))
        exprs = tuple(parse_expression(s, registry) for s in data["equations"])
        equations = (tuple(coord_ids), exprs)
    return make_variety(registry, n, params, add, mul, equations=equations, name=name)


def variety_to_dict(v: ParamVariety) -> dict:
    reg = v.registry
    out = {
        "name": v.name,
        "n": v.n,
        "params": [reg.names[p] for p in v.params],
        "additive": [expr_to_syntax(e) for e in v.additive],
        "multiplicative": [expr_to_syntax(e) for e in v.multiplicative],
    }
    consts = [reg.names[c] for c in v.constant_vars()]
    if consts:
        out["constants"] = consts
    if v.equations is not None:
        _, exprs = v.equations
        out["equations"] = [expr_to_syntax(e) for e in exprs]
    return out


def load_variety_file(path: str, registry: Registry) -> ParamVariety:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return variety_from_dict(data, registry)


def dump_json(data, path: Optional[str] = None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
