"""Poisson structures given by a bivector on a weighted polynomial ring or a quotient of it."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .cartan import Polyvector, bivector_matrix
from .gradedpoly import Polynomial, QuotientPresentation, WeightedContext


class JacobiFailure(ValueError):
    def __init__(self, triple, value):
        super().__init__(f"Jacobi identity fails on {triple}: jacobiator = {value!r}")
        self.triple = triple
        self.value = value


class QuotientIncompatible(ValueError):
    pass


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    triples_checked: int
    triple: Optional[tuple] = None  # variable indices of the first failing triple
    value: Optional[Polynomial] = None


@dataclass(frozen=True)
class WeightAudit:
    homogeneous: bool
    declared_l: int
    inferred_l: Optional[int]
    pairs: tuple = field(default_factory=tuple)  # ((i, j), bracket weight or None, inferred l or None)

    @property
    def l_confirmed(self) -> bool:
        return self.homogeneous and self.inferred_l in (None, self.declared_l)


class PoissonStructure:
    """Bivector ``theta`` on ``ctx``, optionally acting on ``ctx`` modulo ``quotient``.

    The bracket is ``{f,g} = Σ_{i<j} θ_ij (∂_i f ∂_j g − ∂_j f ∂_i g)``, reduced
    to normal form when a quotient is present.  Jacobi is checked at
    construction unless ``defer_jacobi`` is set.
    """

    def __init__(self, ctx: WeightedContext, theta: Polyvector, quotient: QuotientPresentation = None,
                 defer_jacobi: bool = False, name: str = ""):
        if theta.degree != 2 or theta.nvars != ctx.nvars:
            raise ValueError("theta must be a bivector on the context's variables")
        self.ctx = ctx
        self.theta = theta
        self.quotient = quotient
        self.name = name
        self.n = ctx.nvars
        self._matrix = bivector_matrix(theta)
        self._pairs = [(i, j, c) for (i, j), c in sorted(theta.comps.items())]
        self._coord_cache: dict = {}
        if quotient is not None:
            bad = self.quotient_violation()
            if bad is not None:
                raise QuotientIncompatible(
                    f"bracket does not preserve the relation ideal: {{relation, {ctx.variables[bad[0]]}}} "
                    f"reduces to {bad[1]!r}")
        if not defer_jacobi:
            rep = jacobi_check(self)
            if not rep.ok:
                raise JacobiFailure(rep.triple, rep.value)

    @classmethod
    def from_brackets(cls, ctx: WeightedContext, brackets: dict, **kw) -> "PoissonStructure":
        """Build from ``{(i, j): {x_i, x_j}}`` with ``i < j``."""
        return cls(ctx, Polyvector(2, ctx.nvars, brackets), **kw)

    @property
    def l(self) -> int:
        return self.ctx.bracket_weight

    @property
    def is_quotient(self) -> bool:
        return self.quotient is not None

    def nf(self, p: Polynomial) -> Polynomial:
        return p if self.quotient is None else self.quotient.normal_form(p)

    def coordinate_bracket(self, i: int, j: int) -> Polynomial:
        return self._matrix[i][j]

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        if not f or not g:
            return Polynomial.zero(self.n)
        df = [f.diff(i) for i in range(self.n)]
        dg = [g.diff(i) for i in range(self.n)]
        out = Polynomial.zero(self.n)
        for i, j, c in self._pairs:
            t = df[i] * dg[j] - df[j] * dg[i]
            if t:
                out = out + c * t
        return self.nf(out)

    def monomial_bracket(self, a: tuple, b: tuple) -> Polynomial:
        """Cached bracket of two monomials (exponent tuples)."""
        key = (a, b)
        hit = self._coord_cache.get(key)
        if hit is None:
            hit = self.bracket(Polynomial.monomial(a), Polynomial.monomial(b))
            self._coord_cache[key] = hit
        return hit

    def jacobiator(self, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
        b = self.bracket
        return b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))

    def hamiltonian_field(self, f: Polynomial) -> Polyvector:
        """``H_f = Σ_j {f, x_j} ∂_j``, so that ``H_f(g) = {f, g}``."""
        gens = self.ctx.gens()
        return Polyvector(1, self.n, {(j,): self.bracket(f, gens[j]) for j in range(self.n)})

    def quotient_violation(self):
        """First ``(i, nf({relation, x_i}))`` that is nonzero, or ``None``."""
        q = self.quotient
        if q is None:
            return None
        gens = self.ctx.gens()
        for i in range(self.n):
            v = q.normal_form(self._raw_bracket(q.relation, gens[i]))
            if v:
                return i, v
        return None

    def _raw_bracket(self, f, g):
        out = Polynomial.zero(self.n)
        for i, j, c in self._pairs:
            out = out + c * (f.diff(i) * g.diff(j) - f.diff(j) * g.diff(i))
        return out

    def __repr__(self):
        return f"PoissonStructure({self.name or self.theta.to_text(self.ctx)!r})"


def bracket(ps: PoissonStructure, f: Polynomial, g: Polynomial) -> Polynomial:
    return ps.bracket(f, g)


def hamiltonian_field(ps: PoissonStructure, f: Polynomial) -> Polyvector:
    return ps.hamiltonian_field(f)


def jacobi_check(ps: PoissonStructure) -> JacobiReport:
    """Jacobiator on all coordinate triples ``i<j<k``.

    The jacobiator of a biderivation is a triderivation, so vanishing on
    coordinates is equivalent to vanishing identically.
    """
    gens = ps.ctx.gens()
    count = 0
    for i, j, k in combinations(range(ps.n), 3):
        count += 1
        v = ps.jacobiator(gens[i], gens[j], gens[k])
        if v:
            return JacobiReport(False, count, (i, j, k), v)
    return JacobiReport(True, count)


def weight_audit(ps: PoissonStructure) -> WeightAudit:
    ctx = ps.ctx
    w = ctx.weights
    rows = []
    homogeneous = True
    inferred = set()
    for i, j in combinations(range(ps.n), 2):
        c = ps.coordinate_bracket(i, j)
        if not c:
            rows.append(((i, j), None, None))
            continue
        cw = c.weight(ctx)
        if cw is None:
            homogeneous = False
            rows.append(((i, j), None, None))
            continue
        li = w[i] + w[j] - cw
        inferred.add(li)
        rows.append(((i, j), cw, li))
    if len(inferred) > 1:
        homogeneous = False
    l_inf = inferred.pop() if len(inferred) == 1 else None
    if l_inf is not None and l_inf != ctx.bracket_weight:
        homogeneous = False
    return WeightAudit(homogeneous, ctx.bracket_weight, l_inf, tuple(rows))
