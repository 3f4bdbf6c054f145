"""Truncated Harrison complexes and the Poisson double complex built on them.

Conventions
-----------
* ``ch_n`` is the quotient of ``A^{⊗n}`` by the signed pure-shuffle sums.
  Tensors are tuples of exponent tuples (normal-form monomials).  Relations
  only permute factors, so ``ch_n`` is computed one multiset of monomials
  at a time; lexicographically small arrangements are kept as basis.
* A shuffle ``π`` acts by ``π(a_1⊗...⊗a_n) = a_{π^{-1}(1)}⊗...⊗a_{π^{-1}(n)}``,
  i.e. it riffles the blocks.  The chain bracket ``[f, g]`` sums over riffles
  of ``f`` with ``g``, and inserts ``{·,·}`` wherever an ``f``-entry is
  directly followed by a ``g``-entry, with sign ``(-1)^{i+1}`` at position
  ``i`` (1-based).  This reading reproduces the worked ``Sym^2`` example
  ``[(a,b), c] = ({c,b}, a) + ({c,a}, b)``.
* Cochain sources are products ``x_1⋯x_s`` in the graded-symmetric algebra
  on ``ch_•`` with ``ch_p`` in degree ``p``; factors are sorted by
  descending degree, then key, with the Koszul sign.
* ``d`` is the dual of the Harrison boundary, extended to products by
  ``∂(y_1⋯y_s) = Σ_j (-1)^{p_1+...+p_{j-1}} y_1⋯∂y_j⋯y_s``; the total
  differential is ``d + δ``.

Grading: a component with ``s`` factors in the slice with invariant ``W``
has output weight = input weight + ``W - s*l``.  This agrees with the
polyvector slice invariant, so results line up with the LP route.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Optional, Sequence

from .exactlinalg import SparseEliminator, rref, RationalMatrix
from .gradedpoly import Polynomial, normal_monomials_of_weight, norm_coeff
from .poisson_core import PoissonStructure

# cochain components realised, grouped by total ch-degree
SHAPES_BY_DEGREE = {
    1: ((1,),),
    2: ((2,), (1, 1)),
    3: ((3,), (2, 1), (1, 1, 1)),
}
REALIZED_SHAPES = tuple(s for d in sorted(SHAPES_BY_DEGREE) for s in SHAPES_BY_DEGREE[d])


class TruncationExceeded(ValueError):
    pass


class UnrealizedShape(ValueError):
    pass


def riffles(p: int, q: int):
    """Yield (positions of the first block, sign) for all (p, q) riffle shuffles."""
    n = p + q
    for pos in combinations(range(n), p):
        inv = sum(P - k for k, P in enumerate(pos))
        yield pos, (-1 if inv & 1 else 1)


def _addto(acc: dict, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def shape_of(key: tuple) -> tuple:
    return tuple(len(f) for f in key)


class PoissonAlgebraData:
    """Monomial-level access to a Poisson algebra ``A`` (polynomial ring or quotient)."""

    def __init__(self, ps: PoissonStructure):
        self.ps = ps
        self.ctx = ps.ctx
        self.n = ps.n
        self.weights = ps.ctx.weights
        self._prod: dict = {}
        self._br: dict = {}
        self._mono_by_weight: dict = {}
        self.one = (0,) * self.n

    def weight(self, m: tuple) -> int:
        return sum(e * w for e, w in zip(m, self.weights))

    def monomials(self, w: int) -> tuple:
        hit = self._mono_by_weight.get(w)
        if hit is None:
            hit = normal_monomials_of_weight(self.ctx, w, self.ps.quotient) if w >= 0 else ()
            self._mono_by_weight[w] = hit
        return hit

    def monomials_upto(self, D: int) -> list:
        out = []
        for w in range(D + 1):
            out.extend(self.monomials(w))
        return out

    def product(self, a: tuple, b: tuple) -> dict:
        key = (a, b) if a <= b else (b, a)
        hit = self._prod.get(key)
        if hit is None:
            m = tuple(x + y for x, y in zip(a, b))
            q = self.ps.quotient
            hit = {m: 1} if q is None else dict(q.reduce_monomial(m))
            self._prod[key] = hit
        return hit

    def bracket(self, a: tuple, b: tuple) -> dict:
        key = (a, b)
        hit = self._br.get(key)
        if hit is None:
            hit = dict(self.ps.monomial_bracket(a, b).terms)
            self._br[key] = hit
        return hit

    def poly_product(self, p: dict, q: dict) -> dict:
        out: dict = {}
        for a, ca in p.items():
            for b, cb in q.items():
                for m, c in self.product(a, b).items():
                    _addto(out, m, ca * cb * c)
        return out

    def poly_bracket(self, p: dict, q: dict) -> dict:
        out: dict = {}
        for a, ca in p.items():
            for b, cb in q.items():
                for m, c in self.bracket(a, b).items():
                    _addto(out, m, ca * cb * c)
        return out


class ChainBasis:
    """Basis of ``ch_n`` in each input weight ``<= D``, with reduction of arbitrary tensors."""

    def __init__(self, alg: PoissonAlgebraData, n: int, D: int):
        if n < 1:
            raise ValueError("tensor degree must be positive")
        self.alg = alg
        self.n = n
        self.D = D
        self._tables: dict = {}
        self._by_weight: dict = {}

    def _table(self, multiset: tuple) -> dict:
        hit = self._tables.get(multiset)
        if hit is not None:
            return hit
        n = self.n
        arrs = sorted(set(permutations(multiset)), reverse=True)
        col = {a: k for k, a in enumerate(arrs)}
        rows = []
        for t in arrs:
            for r in range(1, n):
                vec = [0] * len(arrs)
                for pos, sign in riffles(r, n - r):
                    z = [None] * n
                    rest = iter(t[r:])
                    it = iter(t[:r])
                    ps_ = set(pos)
                    for k in range(n):
                        z[k] = next(it) if k in ps_ else next(rest)
                    vec[col[tuple(z)]] += sign
                if any(vec):
                    rows.append(vec)
        if rows:
            pivots, red = rref(RationalMatrix.from_rows(rows, len(arrs)))
        else:
            pivots, red = [], []
        piv = set(pivots)
        free = [a for k, a in enumerate(arrs) if k not in piv]
        table = {a: {a: 1} for a in free}
        for k, c in enumerate(pivots):
            row = red[k]
            table[arrs[c]] = {arrs[j]: norm_coeff(-row[j]) for j in range(len(arrs))
                              if j not in piv and row[j]}
        out = {"basis": sorted(free), "reduce": table, "relations_rank": len(pivots)}
        self._tables[multiset] = out
        return out

    def reduce(self, tensor: tuple) -> dict:
        """Coordinates of a monomial tensor in the basis of ``ch_n``."""
        if self.n == 1:
            return {tensor: 1}
        if self.n == 2:
            a, b = tensor
            return {tensor: 1} if a <= b else {(b, a): 1}
        return self._table(tuple(sorted(tensor)))["reduce"][tensor]

    def weight(self, tensor: tuple) -> int:
        return sum(self.alg.weight(m) for m in tensor)

    def basis(self, u: int) -> list:
        """Basis tensors of input weight exactly ``u``."""
        if u > self.D:
            raise TruncationExceeded(f"weight {u} exceeds truncation {self.D}")
        hit = self._by_weight.get(u)
        if hit is not None:
            return hit
        out = []
        for ms in _multisets_of_weight(self.alg, self.n, u):
            if self.n == 1:
                out.append(ms)
            elif self.n == 2:
                out.append(ms)
            else:
                out.extend(self._table(ms)["basis"])
        self._by_weight[u] = out
        return out

    def basis_upto(self, D: int = None) -> list:
        D = self.D if D is None else D
        out = []
        for u in range(D + 1):
            out.extend(self.basis(u))
        return out

    def shuffle_relations(self, tensor: tuple):
        """Images ``s_{r,n-r}(tensor)`` for ``0<r<n`` as sparse tensor combinations."""
        n = len(tensor)
        for r in range(1, n):
            acc: dict = {}
            for pos, sign in riffles(r, n - r):
                it, rest = iter(tensor[:r]), iter(tensor[r:])
                ps_ = set(pos)
                z = tuple(next(it) if k in ps_ else next(rest) for k in range(n))
                _addto(acc, z, sign)
            yield r, acc

    def reduce_combination(self, comb: dict) -> dict:
        out: dict = {}
        for t, c in comb.items():
            for b, cb in self.reduce(t).items():
                _addto(out, b, c * cb)
        return out


def _multisets_of_weight(alg: PoissonAlgebraData, n: int, u: int) -> list:
    """Sorted n-tuples (with repetition) of normal monomials of total weight ``u``."""
    monos = alg.monomials_upto(u)
    monos.sort()
    out = []

    def rec(start, k, remaining, prefix):
        if k == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for idx in range(start, len(monos)):
            m = monos[idx]
            w = alg.weight(m)
            if w > remaining:
                continue
            prefix.append(m)
            rec(idx, k - 1, remaining - w, prefix)
            prefix.pop()

    rec(0, n, u, [])
    return out


def normalize_product(factors: Sequence[tuple]):
    """Sort factors (tensor tuples) by descending degree then key; return (key, sign) or (None, 0)."""
    f = list(factors)
    sign = 1
    # insertion sort keeps track of the Koszul sign
    for i in range(1, len(f)):
        j = i
        while j > 0:
            a, b = f[j - 1], f[j]
            ka, kb = (-len(a), a), (-len(b), b)
            if ka <= kb:
                break
            if (len(a) * len(b)) & 1:
                sign = -sign
            f[j - 1], f[j] = b, a
            j -= 1
    for i in range(1, len(f)):
        if f[i] == f[i - 1] and len(f[i]) & 1:
            return None, 0
    return tuple(f), sign


@dataclass
class HarrisonCochain:
    """Values of a cochain on the truncated basis of one ``Hom(S^s piece, A)`` component."""

    shape: tuple
    shift: int
    values: dict  # source key -> Polynomial
    D: int

    def value(self, key: tuple, nvars: int) -> Polynomial:
        return self.values.get(key, Polynomial.zero(nvars))


class PoissonDoubleComplex:
    """The double complex truncated to inputs of weight ``<= D``."""

    def __init__(self, ps: PoissonStructure, D: int):
        self.ps = ps
        self.D = D
        self.l = ps.l
        self.alg = PoissonAlgebraData(ps)
        self.ch = {n: ChainBasis(self.alg, n, D) for n in (1, 2, 3, 4)}
        self._keys: dict = {}
        self._terms: dict = {}

    # -- chain-level operations --------------------------------------------

    def key_weight(self, key: tuple) -> int:
        return sum(self.alg.weight(m) for f in key for m in f)

    def boundary(self, tensor: tuple) -> list:
        """``∂_n(t⊗1)`` as ``[(ch_{n-1} basis tensor, A-monomial, coefficient)]``.

        ``∂_n(a_1...a_n⊗m) = (a_1..a_{n-1})⊗a_n m + Σ_i (-1)^{n-i}(..a_i a_{i+1}..)⊗m
        + (-1)^n (a_2..a_n)⊗a_1 m``; ``∂_1 = 0``.
        """
        n = len(tensor)
        if n < 2:
            return []
        alg = self.alg
        chb = self.ch[n - 1]
        acc: dict = {}
        for b, c in chb.reduce(tensor[:-1]).items():
            _addto(acc, (b, tensor[-1]), c)
        for i in range(n - 1):
            s = -1 if (n - 1 - i) & 1 else 1
            for m, cm in alg.product(tensor[i], tensor[i + 1]).items():
                t = tensor[:i] + (m,) + tensor[i + 2 :]
                for b, c in chb.reduce(t).items():
                    _addto(acc, (b, alg.one), s * cm * c)
        s = -1 if n & 1 else 1
        for b, c in chb.reduce(tensor[1:]).items():
            _addto(acc, (b, tensor[0]), s * c)
        return [(b, m, c) for (b, m), c in acc.items()]

    def boundary_tensor(self, tensor: tuple, module: dict) -> dict:
        """``∂`` on ``t⊗m`` for a polynomial ``m`` (dict), returned as ``{(basis, mono): coef}``."""
        out: dict = {}
        for b, a, c in self.boundary(tensor):
            for mono, cm in self.alg.poly_product({a: 1}, module).items():
                _addto(out, (b, mono), c * cm)
        return out

    def tensor_bracket(self, f: tuple, g: tuple) -> dict:
        """``[f, g]`` on monomial tensors, as a combination of monomial tensors."""
        p, q = len(f), len(g)
        n = p + q
        out: dict = {}
        for pos, sign in riffles(p, q):
            pset = set(pos)
            fi, gi = iter(f), iter(g)
            z = []
            src = []
            for k in range(n):
                if k in pset:
                    z.append(next(fi))
                    src.append(0)
                else:
                    z.append(next(gi))
                    src.append(1)
            for i in range(n - 1):
                if src[i] == 0 and src[i + 1] == 1:
                    s = sign if i % 2 == 0 else -sign  # (-1)^{(i+1)+1} with 1-based i+1
                    for m, c in self.alg.bracket(z[i], z[i + 1]).items():
                        _addto(out, tuple(z[:i]) + (m,) + tuple(z[i + 2 :]), s * c)
        return out

    def chain_bracket(self, f: tuple, g: tuple) -> dict:
        """``[f, g]`` reduced into the basis of ``ch_{p+q-1}``."""
        comb = self.tensor_bracket(f, g)
        n = len(f) + len(g) - 1
        return self.ch[n].reduce_combination(comb)

    # -- source bases -------------------------------------------------------

    def keys(self, shape: tuple, u: int) -> list:
        """Basis of the ``shape`` component of ``S(ch)`` in input weight ``u``."""
        if shape not in REALIZED_SHAPES:
            raise UnrealizedShape(f"component {shape} is not realised")
        if u > self.D:
            raise TruncationExceeded(f"input weight {u} exceeds truncation {self.D}")
        ck = (shape, u)
        hit = self._keys.get(ck)
        if hit is not None:
            return hit
        out = []
        if len(shape) == 1:
            out = [(t,) for t in self.ch[shape[0]].basis(u)]
        elif shape == (1, 1):
            for u1 in range(u + 1):
                for a in self.alg.monomials(u1):
                    for b in self.alg.monomials(u - u1):
                        if a < b:
                            out.append(((a,), (b,)))
        elif shape == (2, 1):
            for u1 in range(u + 1):
                for t in self.ch[2].basis(u1):
                    for b in self.alg.monomials(u - u1):
                        out.append((t, (b,)))
        elif shape == (1, 1, 1):
            for ms in _multisets_of_weight(self.alg, 3, u):
                if ms[0] < ms[1] < ms[2]:
                    out.append(tuple((m,) for m in ms))
        out.sort()
        self._keys[ck] = out
        return out

    def keys_upto(self, shape: tuple, D: int = None) -> list:
        D = self.D if D is None else D
        out = []
        for u in range(D + 1):
            out.extend(self.keys(shape, u))
        return out

    # -- differentials as linear terms ---------------------------------------
    # A term (x, kind, data, coef) means coef * op(f(x)) where op is
    # multiplication by the monomial ``data`` (kind "m") or {data, .} (kind "b").

    def d_terms(self, y: tuple) -> list:
        acc: dict = {}
        prefix = 0
        for j, fac in enumerate(y):
            p = len(fac)
            if p >= 2:
                s = -1 if prefix & 1 else 1
                for b, m, c in self.boundary(fac):
                    key, ks = normalize_product(y[:j] + (b,) + y[j + 1 :])
                    if ks:
                        _addto(acc, (key, "m", m), s * ks * c)
            prefix += p
        return [(x, k, d, c) for (x, k, d), c in acc.items()]

    def delta_terms(self, y: tuple) -> list:
        acc: dict = {}
        s_ = len(y)
        degs = [len(f) for f in y]
        for i in range(s_):
            if degs[i] != 1:
                continue
            sigma = degs[i] * sum(degs[:i])
            sign = -1 if sigma & 1 else 1
            rest = y[:i] + y[i + 1 :]
            if not rest:
                continue
            key, ks = normalize_product(rest)
            if ks:
                _addto(acc, (key, "b", y[i][0]), sign * ks)
        for i in range(s_):
            for j in range(i + 1, s_):
                tau = degs[i] * sum(degs[:i]) + degs[j] * (sum(degs[:j]) - degs[i])
                sign = 1 if tau & 1 else -1  # leading minus folded in
                br = self.chain_bracket(y[i], y[j])
                rest = y[:i] + y[i + 1 : j] + y[j + 1 :]
                for t, c in br.items():
                    key, ks = normalize_product((t,) + rest)
                    if ks:
                        _addto(acc, (key, "m", self.alg.one), sign * ks * c)
        return [(x, k, d, c) for (x, k, d), c in acc.items()]

    def total_terms(self, y: tuple, use_d: bool = True, use_delta: bool = True) -> list:
        ck = (y, use_d, use_delta)
        hit = self._terms.get(ck)
        if hit is None:
            hit = (self.d_terms(y) if use_d else []) + (self.delta_terms(y) if use_delta else [])
            self._terms[ck] = hit
        return hit

    def shift(self, shape: tuple, invariant: int) -> int:
        return invariant - len(shape) * self.l

    # -- applying differentials to explicit cochains ------------------------

    def evaluate(self, cochains: dict, y: tuple, use_d: bool = True, use_delta: bool = True) -> Polynomial:
        """Value of ``(d+δ)`` of ``{shape: HarrisonCochain}`` on one source key ``y``."""
        total: dict = {}
        for x, kind, data, c in self.total_terms(y, use_d, use_delta):
            f = cochains.get(shape_of(x))
            if f is None:
                continue
            v = f.values.get(x)
            if not v:
                continue
            img = self.alg.poly_product({data: 1}, v.terms) if kind == "m" else \
                self.alg.poly_bracket({data: 1}, v.terms)
            for m, cm in img.items():
                _addto(total, m, c * cm)
        return Polynomial(total, self.ps.n)

    def apply(self, cochains: dict, target_shape: tuple, invariant: int = None,
              use_d: bool = True, use_delta: bool = True) -> dict:
        """Evaluate ``(d+δ)`` of ``{shape: HarrisonCochain}`` on every ``target_shape`` key.

        Returns ``{key: Polynomial}`` with zero values omitted.
        """
        out = {}
        for y in self.keys_upto(target_shape):
            v = self.evaluate(cochains, y, use_d, use_delta)
            if v:
                out[y] = v
        return out

    # -- slice matrices ---------------------------------------------------------

    def unknowns(self, shapes: Sequence[tuple], invariant: int, D: int = None) -> list:
        """Coordinates ``(shape, key, output monomial)`` of the truncated cochain space."""
        D = self.D if D is None else D
        out = []
        for shape in shapes:
            sh = self.shift(shape, invariant)
            for u in range(D + 1):
                ow = u + sh
                if ow < 0:
                    continue
                monos = self.alg.monomials(ow)
                if not monos:
                    continue
                for x in self.keys(shape, u):
                    for m in monos:
                        out.append((shape, x, m))
        return out

    def differential_images(self, degree: int, invariant: int, D: int = None,
                            use_d: bool = True, use_delta: bool = True):
        """Column images of the total differential from total degree ``degree``.

        Returns ``(columns, images)`` with ``images[c]`` a sparse dict over
        target coordinates ``(y, output monomial)``.
        """
        D = self.D if D is None else D
        src_shapes = SHAPES_BY_DEGREE[degree]
        tgt_shapes = SHAPES_BY_DEGREE[degree + 1]
        cols = self.unknowns(src_shapes, invariant, D)
        colidx = {c: k for k, c in enumerate(cols)}
        images = [dict() for _ in cols]
        alg = self.alg
        for shape in tgt_shapes:
            sh_t = self.shift(shape, invariant)
            for u in range(D + 1):
                if u + sh_t < 0 or not alg.monomials(u + sh_t):
                    continue
                for y in self.keys(shape, u):
                    for x, kind, data, c in self.total_terms(y, use_d, use_delta):
                        xs = shape_of(x)
                        if xs not in src_shapes:
                            continue
                        ow = self.key_weight(x) + self.shift(xs, invariant)
                        for m in alg.monomials(ow):
                            k = colidx[(xs, x, m)]
                            img = alg.product(data, m) if kind == "m" else alg.bracket(data, m)
                            col = images[k]
                            for mm, cm in img.items():
                                _addto(col, (y, mm), c * cm)
        return cols, images

    def rank(self, degree: int, invariant: int, D: int = None, **kw) -> int:
        cols, images = self.differential_images(degree, invariant, D, **kw)
        rowidx: dict = {}
        el = SparseEliminator()
        for img in images:
            if img:
                el.add({rowidx.setdefault(r, len(rowidx)): v for r, v in img.items()})
        return el.rank

    def square_defect(self, invariant: int, D: int = None, use_d: bool = True, use_delta: bool = True) -> int:
        """Number of nonzero entries of ``D2∘D1`` on the slice (zero for a complex)."""
        cols1, im1 = self.differential_images(1, invariant, D, use_d, use_delta)
        cols2, im2 = self.differential_images(2, invariant, D, use_d, use_delta)
        idx2 = {c: k for k, c in enumerate(cols2)}
        bad = 0
        for img in im1:
            acc: dict = {}
            for (y, m), v in img.items():
                k = idx2.get((shape_of(y), y, m))
                if k is None:
                    continue
                for r, vv in im2[k].items():
                    _addto(acc, r, v * vv)
            bad += len(acc)
        return bad

    def boundary_square_defect(self, tensor: tuple) -> dict:
        """``∂∘∂`` applied to ``tensor⊗1``; empty when the chain complex is well defined."""
        out: dict = {}
        for b, m, c in self.boundary(tensor):
            for bb, mm, cc in self.boundary(b):
                for p, cp in self.alg.product(m, mm).items():
                    _addto(out, (bb, p), c * cc * cp)
        return out

    def cochain_dim(self, degree: int, invariant: int, D: int = None) -> int:
        return len(self.unknowns(SHAPES_BY_DEGREE[degree], invariant, D))

    def cohomology(self, degree: int, invariant: int, D: int = None, **kw) -> int:
        if degree not in (1, 2):
            raise UnrealizedShape("only total degrees 1 and 2 have all neighbouring columns realised")
        dim = self.cochain_dim(degree, invariant, D)
        r_out = self.rank(degree, invariant, D, **kw)
        r_in = self.rank(degree - 1, invariant, D, **kw) if degree > 1 else 0
        return dim - r_out - r_in


@dataclass(frozen=True)
class TotalHPResult:
    degree: int
    weight: int  # shift of the top component, comparable with polyvector weight
    invariant: int
    D: int
    dim: int
    dim_previous: Optional[int]
    cochain_dim: int

    @property
    def stable(self) -> bool:
        return self.dim_previous is not None and self.dim == self.dim_previous


def total_hp(ps: PoissonStructure, i: int, w: int, D: int, complex_cache: dict = None) -> TotalHPResult:
    """``HP^i`` of the truncated total complex in weight ``w`` (same meaning as for polyvectors).

    ``w`` is the output-minus-input weight on ``Hom(∧^i ch_1, A)``; the slice
    invariant is ``w + i*l``.  Stability compares truncations ``D`` and ``D-1``.
    """
    if i not in (1, 2):
        raise UnrealizedShape("total_hp supports degrees 1 and 2")
    cache = complex_cache if complex_cache is not None else {}
    key = (id(ps), D)
    cx = cache.get(key)
    if cx is None:
        cx = PoissonDoubleComplex(ps, D)
        cache[key] = cx
    W = w + i * ps.l
    dim = cx.cohomology(i, W, D)
    prev = cx.cohomology(i, W, D - 1) if D >= 1 else None
    return TotalHPResult(i, w, W, D, dim, prev, cx.cochain_dim(i, W, D))
