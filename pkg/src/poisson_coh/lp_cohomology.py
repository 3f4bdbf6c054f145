"""The Lichnerowicz-Poisson complex of polyvector fields, sliced by weight.

``δ`` lowers polyvector weight by ``l`` and raises degree by one, so the
quantity ``W = weight + degree*l`` is constant along the complex.  A slice
with invariant ``W`` has the weight ``W - i*l`` polyvectors in degree ``i``.

Two variants are exposed: ``"paper"`` starts at degree 1, ``"extended"``
adds functions in degree 0 with ``δf = (g ↦ {g, f})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .cartan import DifferentialForm, Musical, Polyvector, de_rham_d, merge_sign
from .exactlinalg import RationalMatrix, SparseEliminator
from .gradedpoly import Polynomial, monomials_of_weight
from .poisson_core import PoissonStructure, weight_audit

COMPLEX_VARIANTS = ("paper", "extended")


class NotHomogeneous(ValueError):
    pass


class UnsupportedAlgebra(ValueError):
    pass


def _require_smooth(ps: PoissonStructure):
    if ps.quotient is not None:
        raise UnsupportedAlgebra("the polyvector complex needs a polynomial ring; use the Harrison route")


def lp_differential(ps: PoissonStructure, P: Polyvector) -> Polyvector:
    """Coboundary of a degree-i polyvector, from its values on coordinate tuples.

    ``δP(dx_K) = Σ_j (-1)^j {x_{K_j}, P(dx_{K∖K_j})}
                 - Σ_{j<k} (-1)^{j+k+1} P(d{x_{K_j}, x_{K_k}} ∧ dx_{K∖{K_j,K_k}})``
    with 0-based positions ``j, k``.  In degree 0 this gives ``δf(dx_j) = {x_j, f}``.
    """
    _require_smooth(ps)
    n = ps.n
    i = P.degree
    gens = ps.ctx.gens()
    out = {}
    if not P.comps:
        return Polyvector.zero(i + 1, n)
    # gradients of the coordinate brackets, reused across all K
    dbr = {}
    for a, b in combinations(range(n), 2):
        c = ps.coordinate_bracket(a, b)
        if c:
            dbr[(a, b)] = [(m, c.diff(m)) for m in range(n) if c.diff(m)]
    for K in combinations(range(n), i + 1):
        total = Polynomial.zero(n)
        for j in range(i + 1):
            rest = K[:j] + K[j + 1 :]
            c = P.comps.get(rest)
            if c:
                t = ps.bracket(gens[K[j]], c)
                total = total + t if j % 2 == 0 else total - t
        for j in range(i + 1):
            for k in range(j + 1, i + 1):
                grad = dbr.get((K[j], K[k]))
                if not grad:
                    continue
                rest = K[:j] + K[j + 1 : k] + K[k + 1 :]
                acc = Polynomial.zero(n)
                for m, g in grad:
                    s = merge_sign((m,), rest)
                    if not s:
                        continue
                    c = P.comps.get(tuple(sorted((m,) + rest)))
                    if c:
                        acc = acc + (g * c if s == 1 else -(g * c))
                if acc:
                    # overall sign -(-1)^{j+k+1} = (-1)^{j+k}
                    total = total + acc if (j + k) % 2 == 0 else total - acc
        if total:
            out[K] = total
    return Polyvector._raw(i + 1, n, out)


def polyvector_basis(ps: PoissonStructure, degree: int, weight: int) -> list:
    """Monomial polyvectors ``m ∂_I`` of the given degree and weight, deterministic order."""
    ctx = ps.ctx
    out = []
    for I in combinations(range(ps.n), degree):
        cw = weight + sum(ctx.weights[i] for i in I)
        for m in monomials_of_weight(ctx.weights, cw):
            out.append((I, m))
    return out


def form_basis(ps: PoissonStructure, degree: int, weight: int) -> list:
    ctx = ps.ctx
    out = []
    for I in combinations(range(ps.n), degree):
        cw = weight - sum(ctx.weights[i] for i in I)
        for m in monomials_of_weight(ctx.weights, cw):
            out.append((I, m))
    return out


def _element(cls, n, key) -> object:
    I, m = key
    return cls._raw(len(I), n, {I: Polynomial.monomial(m)})


def _coords(obj, index: dict) -> dict:
    vec = {}
    for I, c in obj.comps.items():
        for m, v in c.terms.items():
            vec[index[(I, m)]] = v
    return vec


@dataclass
class SliceComplex:
    """Finite slice of the polyvector complex with invariant ``W``.

    ``bases[i]`` lists ``(index tuple, exponent tuple)`` keys;
    ``images[i][c]`` is the sparse image of basis column ``c`` in degree ``i+1``.
    """

    invariant: int
    l: int
    degrees: tuple
    bases: dict
    images: dict = field(default_factory=dict)
    variant: str = "extended"

    def weight_at(self, i: int) -> int:
        return self.invariant - i * self.l

    def dim(self, i: int) -> int:
        return len(self.bases.get(i, ()))

    def matrix(self, i: int) -> RationalMatrix:
        """Coordinate matrix of ``δ`` from degree ``i`` to ``i+1``."""
        rows, cols = self.dim(i + 1), self.dim(i)
        ent = [0] * (rows * cols)
        for c, img in enumerate(self.images.get(i, ())):
            for r, v in img.items():
                ent[r * cols + c] = v
        return RationalMatrix(rows, cols, tuple(ent))

    def rank(self, i: int) -> int:
        if i not in self.images:
            return 0
        el = SparseEliminator()
        for img in self.images[i]:
            if img:
                el.add(img)
        return el.rank

    def cohomology(self, i: int) -> int:
        low = min(self.degrees)
        incoming = self.rank(i - 1) if i - 1 >= low else 0
        return self.dim(i) - self.rank(i) - incoming

    def composes_to_zero(self) -> bool:
        for i in self.degrees:
            if i + 1 not in self.images or i not in self.images:
                continue
            nxt = self.images[i + 1]
            for img in self.images[i]:
                acc = {}
                for r, v in img.items():
                    for rr, vv in nxt[r].items():
                        acc[rr] = acc.get(rr, 0) + v * vv
                if any(acc.values()):
                    return False
        return True


def _degree_range(ps, degrees, variant):
    if variant not in COMPLEX_VARIANTS:
        raise ValueError(f"unknown complex variant {variant!r}")
    lo = 0 if variant == "extended" else 1
    if degrees is None:
        return tuple(range(lo, ps.n + 1))
    degrees = tuple(degrees)
    if degrees and min(degrees) < lo:
        raise ValueError(f"degree {min(degrees)} is below the start of the {variant} complex")
    return degrees


def check_homogeneous(ps: PoissonStructure):
    if not weight_audit(ps).homogeneous:
        raise NotHomogeneous("the structure is not weighted-homogeneous for its declared l")


def build_slice(ps: PoissonStructure, invariant: int, degrees: Sequence[int] = None,
                variant: str = "extended") -> SliceComplex:
    """Slice complex with invariant ``W``; degree ``i`` holds weight ``W - i*l`` polyvectors.

    Differentials are computed out of every listed degree whose target is
    also listed, plus one step past the top so cohomology there is exact.
    """
    _require_smooth(ps)
    check_homogeneous(ps)
    degrees = _degree_range(ps, degrees, variant)
    l = ps.l
    lo = min(degrees)
    hi = max(degrees)
    span = range(max(lo - 1, 0 if variant == "extended" else 1), min(hi + 1, ps.n) + 1)
    bases = {i: polyvector_basis(ps, i, invariant - i * l) for i in span}
    images = {}
    for i in span:
        if i + 1 not in bases:
            continue
        tgt = {k: r for r, k in enumerate(bases[i + 1])}
        images[i] = [_coords(lp_differential(ps, _element(Polyvector, ps.n, key)), tgt) for key in bases[i]]
    return SliceComplex(invariant, l, tuple(span), bases, images, variant)


def hp_dimension(ps: PoissonStructure, i: int, w: int, complex: str = "extended") -> int:
    """Dimension of degree-``i`` LP cohomology in polyvector weight ``w``."""
    if complex == "paper" and i < 1:
        raise ValueError("the paper complex starts in degree 1")
    if i < 0 or i > ps.n:
        return 0
    sl = build_slice(ps, w + i * ps.l, [i], variant=complex)
    return sl.cohomology(i)


def cochain_dimension(ps: PoissonStructure, i: int, w: int) -> int:
    return len(polyvector_basis(ps, i, w))


# -- de Rham side -----------------------------------------------------------


def derham_slice_dimension(ps: PoissonStructure, i: int, w: int, complex: str = "paper") -> int:
    """De Rham cohomology matching ``HP^i`` in polyvector weight ``w``.

    The musical map adds ``l`` per degree, so the matching forms all have
    weight ``w + i*l``.  The ``"paper"`` variant truncates to degrees ``>= 1``.
    """
    _require_smooth(ps)
    Musical(ps.theta)  # raises unless the determinant is a nonzero constant
    lo = 1 if complex == "paper" else 0
    if i < lo or i > ps.n:
        return 0
    W = w + i * ps.l

    def rank_of(k):
        if k < lo or k + 1 > ps.n:
            return 0
        src = form_basis(ps, k, W)
        tgt = {key: r for r, key in enumerate(form_basis(ps, k + 1, W))}
        el = SparseEliminator()
        for key in src:
            img = _coords(de_rham_d(_element(DifferentialForm, ps.n, key)), tgt)
            if img:
                el.add(img)
        return el.rank

    return len(form_basis(ps, i, W)) - rank_of(i) - rank_of(i - 1)


def chain_map_residual(ps: PoissonStructure, P: Polyvector, musical: Musical = None) -> DifferentialForm:
    """``♭(δP) - d(♭P)``; identically zero for a nondegenerate constant-determinant bivector."""
    mus = musical or Musical(ps.theta)
    return mus.flat(lp_differential(ps, P)) - de_rham_d(mus.flat(P))


def euler_characteristics(sl: SliceComplex, degrees: Sequence[int]) -> tuple:
    """(Σ(-1)^i dim HP^i, Σ(-1)^i dim C^i) over the given degrees."""
    hp = sum((-1) ** i * sl.cohomology(i) for i in degrees)
    ch = sum((-1) ** i * sl.dim(i) for i in degrees)
    return hp, ch
