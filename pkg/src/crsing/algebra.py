"""Exact polynomials over the Gaussian rationals with Wirtinger calculus.

Variables carry a role: holomorphic ``z``, antiholomorphic ``conj(z)`` (paired
with ``z``), or real.  Conjugation conjugates coefficients, swaps paired
variables and fixes real ones.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from gmpy2 import mpq

INFINITE = math.inf
DEFAULT_DEGREE_CAP = 12

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"
REAL = "real"


class AlgebraError(ValueError):
    pass


class ParseError(AlgebraError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class UnknownBeyond:
    """Order undetermined: every stored term up to ``cap`` vanishes."""

    cap: int

    def __str__(self) -> str:
        return f"UNKNOWN_BEYOND({self.cap})"


def _q(x) -> mpq:
    if isinstance(x, str):
        return mpq(x)
    return mpq(x)


class GQ:
    """Gaussian rational ``re + i*im`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @staticmethod
    def of(x) -> "GQ":
        if isinstance(x, GQ):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        return GQ(x, 0)

    def __add__(self, o):
        if isinstance(o, Polynomial):
            return NotImplemented
        o = GQ.of(o)
        return GQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Polynomial):
            return NotImplemented
        o = GQ.of(o)
        return GQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GQ.of(o) - self

    def __neg__(self):
        return GQ(-self.re, -self.im)

    def __mul__(self, o):
        if isinstance(o, Polynomial):
            return NotImplemented
        o = GQ.of(o)
        return GQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GQ.of(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GQ((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, o):
        return GQ.of(o) / self

    def __pow__(self, k: int):
        if k < 0:
            return GQ(1) / (self ** (-k))
        out, base = GQ(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GQ":
        return GQ(self.re, -self.im)

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, o):
        if isinstance(o, (int, type(mpq(0)))):
            return self.im == 0 and self.re == o
        if not isinstance(o, GQ):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GQ({self})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"


def _imag_str(q) -> str:
    if q == 1:
        return "I"
    if q == -1:
        return "-I"
    return f"{q}*I"


I_UNIT = GQ(0, 1)


@dataclass(frozen=True)
class Variable:
    name: str
    role: str = HOLOMORPHIC
    pair: str | None = None


class Ring:
    """Ordered variable list; the order drives grevlex storage and printing."""

    def __init__(self, variables: Iterable[Variable]):
        self.variables: tuple[Variable, ...] = tuple(variables)
        self.names: tuple[str, ...] = tuple(v.name for v in self.variables)
        if len(set(self.names)) != len(self.names):
            raise AlgebraError(f"duplicate variable names in {self.names}")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.nvars = len(self.variables)
        self._hash = hash(self.variables)
        perm = []
        for v in self.variables:
            if v.pair is not None and v.pair in self.index:
                perm.append(self.index[v.pair])
            else:
                perm.append(self.index[v.name])
        self._conj_perm = tuple(perm)

    @classmethod
    def complex(cls, holomorphic: Iterable[str], real: Iterable[str] = (), conj: bool = True) -> "Ring":
        """Ring with holomorphic names, their ``conj(.)`` partners, then real names."""
        hol = list(holomorphic)
        vs = [Variable(n, HOLOMORPHIC, f"conj({n})" if conj else None) for n in hol]
        if conj:
            vs += [Variable(f"conj({n})", ANTIHOLOMORPHIC, n) for n in hol]
        vs += [Variable(n, REAL) for n in real]
        return cls(vs)

    @classmethod
    def real(cls, names: Iterable[str]) -> "Ring":
        return cls(Variable(n, REAL) for n in names)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.variables == other.variables

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    def __contains__(self, name):
        return name in self.index

    def variable(self, name: str) -> Variable:
        return self.variables[self.index[name]]

    def gen(self, name: str) -> "Polynomial":
        if name not in self.index:
            raise AlgebraError(f"unknown variable {name!r} in {self!r}")
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Polynomial(self, {tuple(e): GQ(1)})

    def gens(self) -> list["Polynomial"]:
        return [self.gen(n) for n in self.names]

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: GQ.of(c)})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def holomorphic_names(self) -> list[str]:
        return [v.name for v in self.variables if v.role == HOLOMORPHIC]

    def real_names(self) -> list[str]:
        return [v.name for v in self.variables if v.role == REAL]

    def conj_name(self, name: str) -> str:
        return self.names[self._conj_perm[self.index[name]]]

    def extend(self, variables: Iterable[Variable]) -> "Ring":
        extra = [v for v in variables if v.name not in self.index]
        return Ring(self.variables + tuple(extra))


def grevlex_key(e: tuple[int, ...]):
    return (sum(e), tuple(-x for x in reversed(e)))


def _mono_str(ring: Ring, e) -> str:
    parts = []
    for name, k in zip(ring.names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


class Polynomial:
    """Immutable sparse polynomial: exponent tuple -> Gaussian rational."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], GQ] | None = None):
        self.ring = ring
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}
        self._hash = None

    # construction helpers -------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise AlgebraError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        return self.ring.const(GQ.of(other))

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                out[e] = out[e] + c
            else:
                out[e] = c
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = GQ.of(other)
            if c.is_zero():
                return self.ring.zero()
            return Polynomial(self.ring, {e: a * c for e, a in self.terms.items()})
        other = self._coerce(other)
        return Polynomial(self.ring, _mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_constant() and not other.is_zero():
                other = other.constant_term()
            else:
                raise AlgebraError("division by a non-constant polynomial")
        c = GQ.of(other)
        return self * (GQ(1) / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise AlgebraError("only non-negative integer powers")
        out = self.ring.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_truncated(self, other: "Polynomial", cap: int) -> "Polynomial":
        other = self._coerce(other)
        return Polynomial(self.ring, _mul_terms(self.terms, other.terms, cap))

    def pow_truncated(self, k: int, cap: int) -> "Polynomial":
        out = self.ring.const(1)
        base = self.truncate(cap)
        while k:
            if k & 1:
                out = out.mul_truncated(base, cap)
            base = base.mul_truncated(base, cap)
            k >>= 1
        return out

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, GQ)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # inspection -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> GQ:
        return self.terms.get((0,) * self.ring.nvars, GQ(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def order(self):
        return min((sum(e) for e in self.terms), default=INFINITE)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], GQ]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def variables_used(self) -> set[str]:
        used = set()
        for e in self.terms:
            for name, k in zip(self.ring.names, e):
                if k:
                    used.add(name)
        return used

    def degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        return max((e[i] for e in self.terms), default=-1)

    def coefficients(self) -> list[GQ]:
        return list(self.terms.values())

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate(self, cap: int) -> "Polynomial":
        return Polynomial(self.ring, {e: c for e, c in self.terms.items() if sum(e) <= cap})

    # calculus & conjugation -------------------------------------------------
    def conj(self) -> "Polynomial":
        perm = self.ring._conj_perm
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(e)
            for i, k in enumerate(e):
                ne[perm[i]] += k
            out[tuple(ne)] = c.conj()
        return Polynomial(self.ring, out)

    def diff(self, name: str) -> "Polynomial":
        i = self.ring.index[name]
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Polynomial(self.ring, out)

    def real_part(self) -> "Polynomial":
        return (self + self.conj()) * GQ(mpq(1, 2))

    def imag_part(self) -> "Polynomial":
        return (self - self.conj()) * GQ(0, mpq(-1, 2))

    # evaluation & substitution ----------------------------------------------
    def evaluate(self, point: Mapping[str, GQ]) -> GQ:
        vals = _resolve_point(self.ring, point)
        total = GQ(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * (v ** k)
            total = total + t
        return total

    def subs(self, bindings: Mapping[str, "Polynomial"], target: Ring | None = None,
             cap: int | None = None) -> "Polynomial":
        """Simultaneous substitution; unbound variables must exist in ``target``."""
        if target is None:
            rings = {b.ring for b in bindings.values() if isinstance(b, Polynomial)}
            if len(rings) > 1:
                raise AlgebraError("bindings live in different rings")
            target = rings.pop() if rings else self.ring
        images = []
        for name in self.ring.names:
            if name in bindings:
                b = bindings[name]
                images.append(b if isinstance(b, Polynomial) else target.const(GQ.of(b)))
            elif name in target.index:
                images.append(target.gen(name))
            else:
                images.append(None)
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if images[i] is None:
                    raise AlgebraError(f"variable {self.ring.names[i]!r} has no image")
                if k == 1:
                    powers[key] = images[i] if cap is None else images[i].truncate(cap)
                elif cap is None:
                    powers[key] = power(i, k - 1) * images[i]
                else:
                    powers[key] = power(i, k - 1).mul_truncated(images[i], cap)
            return powers[key]

        acc: dict = {}
        for e, c in self.terms.items():
            t = target.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k) if cap is None else t.mul_truncated(power(i, k), cap)
            for te, tc in t.terms.items():
                acc[te] = acc[te] + tc if te in acc else tc
        return Polynomial(target, acc)

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-express in ``ring`` by variable name (all used names must exist)."""
        idx = []
        for name in self.ring.names:
            idx.append(ring.index.get(name))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    if idx[i] is None:
                        raise AlgebraError(f"variable {self.ring.names[i]!r} not in {ring!r}")
                    ne[idx[i]] = k
            out[tuple(ne)] = c
        return Polynomial(ring, out)

    # printing ---------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = _mono_str(self.ring, e)
            neg = False
            if c.im == 0 and c.re < 0:
                neg, c = True, -c
            elif c.re == 0 and c.im < 0:
                neg, c = True, -c
            if not mono:
                body = str(c) if c.im == 0 or c.re == 0 else f"({c})"
            elif c == 1:
                body = mono
            elif c.im == 0 or c.re == 0:
                body = f"{c}*{mono}"
            else:
                body = f"({c})*{mono}"
            pieces.append(("- " if neg else "+ ") + body)
        s = " ".join(pieces)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"Polynomial({self})"


def _mul_terms(a, b, cap=None):
    out: dict = {}
    for e1, c1 in a.items():
        d1 = sum(e1)
        for e2, c2 in b.items():
            if cap is not None and d1 + sum(e2) > cap:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            c = c1 * c2
            if e in out:
                out[e] = out[e] + c
            else:
                out[e] = c
    return out


def _resolve_point(ring: Ring, point: Mapping[str, GQ]) -> list[GQ]:
    vals = []
    for v in ring.variables:
        if v.name in point:
            vals.append(GQ.of(point[v.name]))
        elif v.role == ANTIHOLOMORPHIC and v.pair in point:
            vals.append(GQ.of(point[v.pair]).conj())
        else:
            raise AlgebraError(f"point has no value for {v.name!r}")
    return vals


# --------------------------------------------------------------------------
# parsing

_FUNCS = ("conj", "Re", "Im")


def parse(text: str, ring: Ring) -> Polynomial:
    """Parse ``+ - * / ^``, rational and Gaussian literals, variables, ``conj(.)``.

    ``I`` is the imaginary unit (``i`` too, unless declared as a variable).
    ``Re(.)`` and ``Im(.)`` are accepted as shorthands.
    """
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"malformed expression {text!r}: {exc.msg}", exc.lineno, exc.offset) from None
    return _Builder(ring).visit(tree.body)


class _Builder:
    def __init__(self, ring: Ring):
        self.ring = ring

    def fail(self, node, msg):
        raise ParseError(msg, getattr(node, "lineno", None), getattr(node, "col_offset", None))

    def visit(self, node) -> Polynomial:
        ring = self.ring
        if isinstance(node, ast.BinOp):
            a = self.visit(node.left)
            b = self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if not b.is_constant() or b.is_zero():
                    self.fail(node, "division only by non-zero constants")
                return a / b.constant_term()
            if isinstance(node.op, ast.Pow):
                if not b.is_constant() or not b.constant_term().is_real():
                    self.fail(node, "exponent must be a non-negative integer")
                k = b.constant_term().re
                if k.denominator != 1 or k < 0:
                    self.fail(node, "exponent must be a non-negative integer")
                return a ** int(k)
            self.fail(node, "unsupported operator")
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
            self.fail(node, "unsupported unary operator")
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                self.fail(node, f"unsupported literal {node.value!r}")
            return ring.const(node.value)
        if isinstance(node, ast.Name):
            name = node.id
            if name in ring.index:
                return ring.gen(name)
            if name in ("I", "i"):
                return ring.const(I_UNIT)
            self.fail(node, f"unknown variable {name!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or len(node.args) != 1:
                self.fail(node, "only conj(.), Re(.), Im(.) calls are allowed")
            arg = self.visit(node.args[0])
            fn = node.func.id
            if fn == "conj":
                for v in arg.variables_used():
                    var = ring.variable(v)
                    if var.role != REAL and var.pair not in ring.index:
                        self.fail(node, f"variable {v!r} has no conjugate partner")
                return arg.conj()
            return arg.real_part() if fn == "Re" else arg.imag_part()
        self.fail(node, f"unsupported syntax {type(node).__name__}")


# --------------------------------------------------------------------------
# module-level operations


def wirtinger_derivative(p: Polynomial, v: str | Variable) -> Polynomial:
    name = v.name if isinstance(v, Variable) else v
    if name not in p.ring.index:
        raise AlgebraError(f"{name!r} is not a variable of {p.ring!r}")
    return p.diff(name)


def is_real_valued(p: Polynomial) -> bool:
    return p.conj() == p


def complexify_ring(ring: Ring, prefix: str = "xi_") -> Ring:
    """Replace each antiholomorphic variable by a fresh independent one."""
    vs = []
    for v in ring.variables:
        if v.role == ANTIHOLOMORPHIC:
            vs.append(Variable(prefix + v.pair, HOLOMORPHIC, None))
        elif v.role == HOLOMORPHIC:
            vs.append(Variable(v.name, HOLOMORPHIC, None))
        else:
            vs.append(v)
    return Ring(vs)


def complexify(p: Polynomial, prefix: str = "xi_") -> Polynomial:
    cring = complexify_ring(p.ring, prefix)
    return Polynomial(cring, p.terms)


def restrict_diagonal(q: Polynomial, ring: Ring) -> Polynomial:
    """Inverse of :func:`complexify`: plug ``conj(z)`` back in for ``xi_z``."""
    if q.ring.nvars != ring.nvars:
        raise AlgebraError("ring shapes differ")
    return Polynomial(ring, q.terms)


def order_of_vanishing(p):
    if isinstance(p, TruncatedSeries):
        if p.poly.is_zero():
            return UnknownBeyond(p.cap)
        return p.poly.order()
    return p.order()


def substitute(p: Polynomial, bindings: Mapping[str, Polynomial], cap: int | None = None):
    out = p.subs(bindings, cap=cap)
    return TruncatedSeries(out, cap) if cap is not None else out


@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial known exactly up to total degree ``cap``."""

    poly: Polynomial
    cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if self.cap < 0:
            raise AlgebraError("degree cap must be >= 0")
        object.__setattr__(self, "poly", self.poly.truncate(self.cap))

    def _other(self, o):
        if isinstance(o, TruncatedSeries):
            return o.poly, min(self.cap, o.cap)
        return self.poly._coerce(o), self.cap

    def __add__(self, o):
        p, cap = self._other(o)
        return TruncatedSeries(self.poly + p, cap)

    def __sub__(self, o):
        p, cap = self._other(o)
        return TruncatedSeries(self.poly - p, cap)

    def __mul__(self, o):
        p, cap = self._other(o)
        return TruncatedSeries(self.poly.mul_truncated(p, cap), cap)

    def __neg__(self):
        return TruncatedSeries(-self.poly, self.cap)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __str__(self):
        return f"{self.poly} + O(deg {self.cap + 1})"
