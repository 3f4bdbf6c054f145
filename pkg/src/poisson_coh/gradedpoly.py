"""Sparse multivariate polynomials over Q with positive weight gradings.

Exponent vectors are plain tuples of non-negative ints.  Coefficients are
``int`` whenever integral and ``fractions.Fraction`` otherwise, which keeps the
common all-integer case fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

Coeff = Union[int, Fraction]
Monomial = tuple


def norm_coeff(c) -> Coeff:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    return c


@dataclass(frozen=True)
class WeightedContext:
    """Variable names, their positive weights, and the bracket weight loss ``l``."""

    variables: tuple
    weights: tuple
    bracket_weight: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.variables) != len(self.weights):
            raise ValueError("one weight per variable is required")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"variable names must be distinct: {self.variables}")
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"weights must be strictly positive: {self.weights}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def l(self) -> int:
        return self.bracket_weight

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def monomial_weight(self, exps: Monomial) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def var(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return Polynomial.variable(i, self.nvars)

    def gens(self) -> list:
        return [Polynomial.variable(i, self.nvars) for i in range(self.nvars)]


def monomial_key(exps: Monomial, weights) -> tuple:
    """Sort key for the canonical order: weight ascending, then lex descending."""
    return (sum(e * w for e, w in zip(exps, weights)), tuple(-e for e in exps))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Immutable sparse polynomial: ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms: Mapping = None, nvars: int = 0):
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent vector {exps} does not have length {nvars}")
                if c:
                    clean[tuple(exps)] = norm_coeff(c)
        self.terms = clean
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, nvars: int) -> "Polynomial":
        # terms already clean: nonzero, normalised coefficients
        p = object.__new__(cls)
        p.terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        c = norm_coeff(Fraction(c) if isinstance(c, str) else c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = 1
        return cls._raw({tuple(exps): 1}, nvars)

    @classmethod
    def monomial(cls, exps: Monomial, coeff=1) -> "Polynomial":
        exps = tuple(exps)
        coeff = norm_coeff(coeff)
        return cls._raw({exps: coeff} if coeff else {}, len(exps))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = norm_coeff(v)
            else:
                out.pop(m, None)
        return Polynomial._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw({m: norm_coeff(v * c) for m, v in self.terms.items()}, self.nvars)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial._raw({m: norm_coeff(c) for m, c in out.items() if c}, self.nvars)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff(self, i: int) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        return Polynomial._raw(out, self.nvars)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.nvars: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def coefficient(self, exps: Monomial) -> Coeff:
        return self.terms.get(tuple(exps), 0)

    def constant_term(self) -> Coeff:
        return self.terms.get((0,) * self.nvars, 0)

    def monomials(self) -> list:
        return list(self.terms)

    def weights_present(self, ctx: WeightedContext) -> set:
        return {ctx.monomial_weight(m) for m in self.terms}

    def weight(self, ctx: WeightedContext):
        """The weight if weighted-homogeneous and nonzero, else ``None``."""
        ws = self.weights_present(ctx)
        return ws.pop() if len(ws) == 1 else None

    def is_homogeneous(self, ctx: WeightedContext) -> bool:
        return len(self.weights_present(ctx)) <= 1

    def sorted_terms(self, ctx: WeightedContext) -> list:
        return sorted(self.terms.items(), key=lambda mc: monomial_key(mc[0], ctx.weights))

    def to_text(self, ctx: WeightedContext) -> str:
        return format_polynomial(self, ctx)

    def __repr__(self):
        return f"Polynomial({self.terms!r}, nvars={self.nvars})"


def format_monomial(exps: Monomial, ctx: WeightedContext) -> str:
    parts = []
    for name, e in zip(ctx.variables, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_polynomial(p: Polynomial, ctx: WeightedContext) -> str:
    """Render in the parser's grammar; highest weight first, lex-largest first."""
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda mc: (-ctx.monomial_weight(mc[0]), tuple(-e for e in mc[0])))
    out = []
    for k, (m, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        mono = format_monomial(m, ctx)
        if mono == "1":
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- graded structure ------------------------------------------------------


@lru_cache(maxsize=None)
def monomials_of_weight(weights: tuple, weight: int) -> tuple:
    """All exponent vectors of the given weight, in canonical (lex descending) order."""
    n = len(weights)
    out = []

    def rec(i, remaining, prefix):
        if i == n - 1:
            w = weights[i]
            if remaining % w == 0:
                out.append(tuple(prefix) + (remaining // w,))
            return
        w = weights[i]
        for e in range(remaining // w, -1, -1):
            rec(i + 1, remaining - e * w, prefix + [e])

    if weight < 0:
        return ()
    if n == 0:
        return ((),) if weight == 0 else ()
    rec(0, weight, [])
    return tuple(out)


def weight_decompose(p: Polynomial, ctx: WeightedContext) -> list:
    """Split ``p`` into weighted-homogeneous components, weights strictly increasing."""
    buckets: dict = {}
    for m, c in p.terms.items():
        buckets.setdefault(ctx.monomial_weight(m), {})[m] = c
    return [(w, Polynomial._raw(buckets[w], p.nvars)) for w in sorted(buckets)]


class QuotientPresentation:
    """A single weighted-homogeneous relation whose leading term is a pure power.

    Rewriting ``x_k^m -> -(relation - c*x_k^m)/c`` strictly lowers the
    ``x_k``-degree, so normal forms are unique: monomials with ``x_k``-degree
    below ``m`` form a basis of the quotient.
    """

    def __init__(self, relation: Polynomial, ctx: WeightedContext, leading_monomial: Monomial = None):
        if relation.is_zero():
            raise ValueError("the relation must be nonzero")
        if not relation.is_homogeneous(ctx):
            raise ValueError("the relation must be weighted-homogeneous")
        if leading_monomial is None:
            pure = [m for m in relation.terms if sum(1 for e in m if e) == 1]
            if not pure:
                raise ValueError("relation has no pure-power term to use as leading monomial")
            leading_monomial = min(pure, key=lambda m: monomial_key(m, ctx.weights))
        leading_monomial = tuple(leading_monomial)
        support = [i for i, e in enumerate(leading_monomial) if e]
        if len(support) != 1:
            raise ValueError(f"leading monomial {leading_monomial} is not a pure power of one variable")
        if leading_monomial not in relation.terms:
            raise ValueError("leading monomial does not occur in the relation")
        self.relation = relation
        self.ctx = ctx
        self.leading_monomial = leading_monomial
        self.var = support[0]
        self.power = leading_monomial[self.var]
        lead = relation.terms[leading_monomial]
        self._tail = {m: norm_coeff(Fraction(-c) / lead)
                      for m, c in relation.terms.items() if m != leading_monomial}
        self._cache: dict = {}

    def is_normal(self, exps: Monomial) -> bool:
        return exps[self.var] < self.power

    def reduce_monomial(self, exps: Monomial) -> dict:
        """Normal form of a single monomial as a raw term dict (cached)."""
        exps = tuple(exps)
        if exps[self.var] < self.power:
            return {exps: 1}
        hit = self._cache.get(exps)
        if hit is not None:
            return hit
        rest = list(exps)
        rest[self.var] -= self.power
        rest = tuple(rest)
        out: dict = {}
        for m, c in self._tail.items():
            for mm, cc in self.reduce_monomial(mono_mul(m, rest)).items():
                out[mm] = out.get(mm, 0) + c * cc
        out = {m: norm_coeff(c) for m, c in out.items() if c}
        self._cache[exps] = out
        return out

    def normal_form(self, p: Polynomial) -> Polynomial:
        if all(m[self.var] < self.power for m in p.terms):
            return p
        out: dict = {}
        for m, c in p.terms.items():
            for mm, cc in self.reduce_monomial(m).items():
                out[mm] = out.get(mm, 0) + c * cc
        return Polynomial._raw({m: norm_coeff(c) for m, c in out.items() if c}, p.nvars)

    def __repr__(self):
        return f"QuotientPresentation({format_polynomial(self.relation, self.ctx)!r}, lead={self.leading_monomial})"


def normal_form(p: Polynomial, q: QuotientPresentation = None) -> Polynomial:
    return p if q is None else q.normal_form(p)


def normal_monomials_of_weight(ctx: WeightedContext, weight: int, q: QuotientPresentation = None) -> tuple:
    ms = monomials_of_weight(ctx.weights, weight)
    if q is None:
        return ms
    return tuple(m for m in ms if q.is_normal(m))


def monomial_basis(ctx: WeightedContext, weight: int, q: QuotientPresentation = None) -> list:
    """Normal-form monomials of the given weight, in canonical order."""
    return [Polynomial.monomial(m) for m in normal_monomials_of_weight(ctx, weight, q)]


def iter_monomials_up_to(ctx: WeightedContext, max_weight: int, q: QuotientPresentation = None) -> Iterator:
    for w in range(max_weight + 1):
        yield from normal_monomials_of_weight(ctx, w, q)


def poly_from_terms(terms: Iterable, nvars: int) -> Polynomial:
    out: dict = {}
    for m, c in terms:
        out[m] = out.get(m, 0) + c
    return Polynomial._raw({m: norm_coeff(c) for m, c in out.items() if c}, nvars)


# -- parser -----------------------------------------------------------------


class PolynomialSyntaxError(ValueError):
    """Malformed polynomial text; ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownVariable(PolynomialSyntaxError):
    def __init__(self, name: str, offset: int):
        ValueError.__init__(self, f"UnknownVariable({name!r}) at byte {offset}")
        self.name = name
        self.offset = offset


class _Parser:
    # recursive descent: expr := term (('+'|'-') term)*
    #                    term := unary (('*'|'/') unary)*
    #                    unary := '-' unary | power
    #                    power := atom ('^' INT)?
    #                    atom := NUMBER | IDENT | '(' expr ')'

    def __init__(self, source: str, ctx: WeightedContext):
        self.src = source
        self.ctx = ctx
        self.pos = 0
        self.n = ctx.nvars

    def offset(self, pos=None) -> int:
        return len(self.src[: self.pos if pos is None else pos].encode("utf-8"))

    def fail(self, msg, pos=None):
        raise PolynomialSyntaxError(msg, self.offset(pos))

    def skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def parse(self) -> Polynomial:
        if not self.peek():
            self.fail("empty input")
        p = self.expr()
        if self.peek():
            self.fail(f"unexpected character {self.peek()!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek() in ("*", "/"):
            op = self.src[self.pos]
            self.pos += 1
            start = self.pos
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if any(any(m) for m in q.terms) or q.is_zero():
                    self.fail("division is only allowed by a nonzero constant", start)
                p = p.scale(Fraction(1) / Fraction(q.constant_term()))
        return p

    def unary(self) -> Polynomial:
        if self.peek() == "-":
            self.pos += 1
            return -self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.src) and self.src[self.pos] in "0123456789":
                self.pos += 1
            if start == self.pos:
                self.fail("expected a non-negative integer exponent")
            base = base ** int(self.src[start : self.pos])
        return base

    def atom(self) -> Polynomial:
        c = self.peek()
        if c == "(":
            self.pos += 1
            p = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.pos += 1
            return p
        if c.isascii() and c.isdigit():
            start = self.pos
            while self.pos < len(self.src) and self.src[self.pos] in "0123456789":
                self.pos += 1
            return Polynomial.constant(int(self.src[start : self.pos]), self.n)
        if (c.isascii() and c.isalpha()) or c == "_":
            start = self.pos
            while self.pos < len(self.src) and ((self.src[self.pos].isascii() and self.src[self.pos].isalnum()) or self.src[self.pos] == "_"):
                self.pos += 1
            name = self.src[start : self.pos]
            if name not in self.ctx.variables:
                raise UnknownVariable(name, self.offset(start))
            return Polynomial.variable(self.ctx.index(name), self.n)
        if not c:
            self.fail("unexpected end of input")
        self.fail(f"unexpected character {c!r}")


def parse_polynomial(source: str, ctx: WeightedContext) -> Polynomial:
    """Parse polynomial text such as ``"3/2*x^2*y - (x+y)^2"`` in the given context."""
    return _Parser(source, ctx).parse()
