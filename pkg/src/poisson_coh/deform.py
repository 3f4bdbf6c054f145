"""First-order Poisson deformations over the dual numbers ``C[ε]``.

A deformation is a pair ``(φ, ψ)``: ``a*b = ab + εφ(a,b)`` and
``{a,b}_ε = {a,b} + εψ(a,b)``.  ``φ`` is stored on sorted monomial pairs and
``ψ`` on strictly increasing pairs, using the same keys as the Harrison
cochain components ``Hom(ch_2, A)`` and ``Hom(∧²ch_1, A)``.

The checks here are written directly from the defining identities on
monomial triples, independently of the double-complex code in
``harrison``; the two are compared in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cartan import Polyvector, evaluate_on_exacts
from .exactlinalg import SparseEliminator, solve_sparse, sparse_kernel
from .gradedpoly import Polynomial
from .harrison import HarrisonCochain, PoissonAlgebraData, TruncationExceeded, _addto
from .lp_cohomology import build_slice
from .poisson_core import PoissonStructure


# -- representation -----------------------------------------------------------


def phi_key(a: tuple, b: tuple) -> tuple:
    return (((a, b) if a <= b else (b, a)),)


def psi_key(a: tuple, b: tuple):
    """(key, sign) for ψ(a, b); key is None when a == b."""
    if a == b:
        return None, 0
    return (((a,), (b,)), 1) if a < b else (((b,), (a,)), -1)


@dataclass
class FirstOrderDeformation:
    phi: HarrisonCochain
    psi: HarrisonCochain
    bivector: Optional[Polyvector] = None
    invariant: Optional[int] = None  # slice invariant when homogeneous

    @property
    def D(self) -> int:
        return min(self.phi.D, self.psi.D)

    def phi_value(self, a: tuple, b: tuple) -> dict:
        v = self.phi.values.get(phi_key(a, b))
        return v.terms if v else {}

    def psi_value(self, a: tuple, b: tuple) -> dict:
        key, s = psi_key(a, b)
        if key is None:
            return {}
        v = self.psi.values.get(key)
        if not v:
            return {}
        return v.terms if s == 1 else {m: -c for m, c in v.terms.items()}


@dataclass
class EquivalenceWitness:
    f: HarrisonCochain  # shape (1,): values on monomials


@dataclass
class VerificationReport:
    ok: bool
    checked: dict = field(default_factory=dict)  # condition -> number of triples checked
    condition: Optional[str] = None
    triple: Optional[tuple] = None
    discrepancy: Optional[Polynomial] = None


def zero_deformation(ps: PoissonStructure, D: int) -> FirstOrderDeformation:
    return FirstOrderDeformation(HarrisonCochain((2,), None, {}, D), HarrisonCochain((1, 1), None, {}, D))


def _monomials_upto(alg: PoissonAlgebraData, D: int) -> list:
    return alg.monomials_upto(D)


def from_bivector(ps: PoissonStructure, P: Polyvector, D: int, phi: HarrisonCochain = None) -> FirstOrderDeformation:
    """Deformation with ``ψ(a,b) = P(da∧db)`` (normal form), ``φ = 0`` unless given."""
    alg = PoissonAlgebraData(ps)
    monos = _monomials_upto(alg, D)
    vals = {}
    for i, a in enumerate(monos):
        for b in monos[i + 1 :]:
            if alg.weight(a) + alg.weight(b) > D:
                continue
            key, s = psi_key(a, b)
            v = ps.nf(evaluate_on_exacts(P, [Polynomial.monomial(a), Polynomial.monomial(b)]))
            if v:
                vals[key] = v if s == 1 else -v
    inv = None
    w = P.weight(ps.ctx)
    if w is not None:
        inv = w + 2 * ps.l
    phi = phi if phi is not None else HarrisonCochain((2,), None, {}, D)
    return FirstOrderDeformation(phi, HarrisonCochain((1, 1), w, vals, D), P, inv)


def from_functions(ps: PoissonStructure, D: int, phi_fn=None, psi_fn=None) -> FirstOrderDeformation:
    """Tabulate ``φ``/``ψ`` given as Python callables on monomial Polynomials."""
    alg = PoissonAlgebraData(ps)
    monos = _monomials_upto(alg, D)
    pv, sv = {}, {}
    for i, a in enumerate(monos):
        for b in monos[i:]:
            if alg.weight(a) + alg.weight(b) > D:
                continue
            A, B = Polynomial.monomial(a), Polynomial.monomial(b)
            if phi_fn is not None:
                v = ps.nf(phi_fn(A, B))
                if v:
                    pv[phi_key(a, b)] = v
            if psi_fn is not None and a != b:
                key, s = psi_key(a, b)
                v = ps.nf(psi_fn(A, B))
                if v:
                    sv[key] = v if s == 1 else -v
    return FirstOrderDeformation(HarrisonCochain((2,), None, pv, D), HarrisonCochain((1, 1), None, sv, D))


# -- bilinear helpers -----------------------------------------------------------


class _Ops:
    def __init__(self, ps: PoissonStructure):
        self.alg = PoissonAlgebraData(ps)

    def mul(self, p: dict, q: dict) -> dict:
        return self.alg.poly_product(p, q)

    def br(self, p: dict, q: dict) -> dict:
        return self.alg.poly_bracket(p, q)

    @staticmethod
    def bilinear(fn, p: dict, q: dict) -> dict:
        out: dict = {}
        for a, ca in p.items():
            for b, cb in q.items():
                for m, c in fn(a, b).items():
                    _addto(out, m, ca * cb * c)
        return out

    @staticmethod
    def add(*terms) -> dict:
        out: dict = {}
        for sign, t in terms:
            for m, c in t.items():
                _addto(out, m, sign * c)
        return out


def _triples(alg: PoissonAlgebraData, D: int):
    monos = alg.monomials_upto(D)
    wt = {m: alg.weight(m) for m in monos}
    for a in monos:
        for b in monos:
            if wt[a] + wt[b] > D:
                continue
            for c in monos:
                if wt[a] + wt[b] + wt[c] <= D:
                    yield a, b, c


def assoc_defect(ops: _Ops, d: FirstOrderDeformation, a, b, c) -> dict:
    """``φ(ab,c) + cφ(a,b) - φ(a,bc) - aφ(b,c)``."""
    A, B, C = {a: 1}, {b: 1}, {c: 1}
    phi = d.phi_value
    bil = ops.bilinear
    return ops.add((1, bil(phi, ops.mul(A, B), C)), (1, ops.mul(C, phi(a, b))),
                   (-1, bil(phi, A, ops.mul(B, C))), (-1, ops.mul(A, phi(b, c))))


def star_defect(ops: _Ops, d: FirstOrderDeformation, a, b, c) -> dict:
    """``ψ(a,bc) - cψ(a,b) - bψ(a,c) - φ({a,b},c) - φ({a,c},b) + {a,φ(b,c)}``."""
    A, B, C = {a: 1}, {b: 1}, {c: 1}
    bil = ops.bilinear
    return ops.add((1, bil(d.psi_value, A, ops.mul(B, C))), (-1, ops.mul(C, d.psi_value(a, b))),
                   (-1, ops.mul(B, d.psi_value(a, c))), (-1, bil(d.phi_value, ops.br(A, B), C)),
                   (-1, bil(d.phi_value, ops.br(A, C), B)), (1, ops.br(A, d.phi_value(b, c))))


def star_star_defect(ops: _Ops, d: FirstOrderDeformation, a, b, c) -> dict:
    """``ψ(a,{b,c}) + ψ(b,{c,a}) + ψ(c,{a,b}) + {a,ψ(b,c)} + {b,ψ(c,a)} + {c,ψ(a,b)}``."""
    A, B, C = {a: 1}, {b: 1}, {c: 1}
    bil = ops.bilinear
    psi = d.psi_value
    return ops.add((1, bil(psi, A, ops.br(B, C))), (1, bil(psi, B, ops.br(C, A))), (1, bil(psi, C, ops.br(A, B))),
                   (1, ops.br(A, psi(b, c))), (1, ops.br(B, psi(c, a))), (1, ops.br(C, psi(a, b))))


def verify_first_order(ps: PoissonStructure, d: FirstOrderDeformation, D: int) -> VerificationReport:
    """Check associativity of ``φ``, then (⋆), then (⋆⋆) on monomial triples of weight ``<= D``.

    Triples are scanned in the canonical monomial order, outer slot first.
    """
    if D > d.D:
        raise TruncationExceeded(f"deformation is tabulated up to weight {d.D}, asked for {D}")
    ops = _Ops(ps)
    n = ps.n
    checks = (("associativity", assoc_defect), ("star", star_defect), ("star_star", star_star_defect))
    counts = {}
    for name, fn in checks:
        k = 0
        for a, b, c in _triples(ops.alg, D):
            k += 1
            v = fn(ops, d, a, b, c)
            if v:
                counts[name] = k
                return VerificationReport(False, counts, name, (a, b, c), Polynomial(v, n))
        counts[name] = k
    return VerificationReport(True, counts)


def discrepancy(ps: PoissonStructure, d: FirstOrderDeformation, condition: str, triple: tuple) -> Polynomial:
    """Value of one defining identity's defect at a given monomial triple."""
    fn = {"associativity": assoc_defect, "star": star_defect, "star_star": star_star_defect}[condition]
    return Polynomial(fn(_Ops(ps), d, *triple), ps.n)


# -- transport and equivalence ------------------------------------------------


def _f_value(f: HarrisonCochain, m: tuple) -> dict:
    v = f.values.get(((m,),))
    return v.terms if v else {}


def transport(ps: PoissonStructure, d: FirstOrderDeformation, f: HarrisonCochain) -> FirstOrderDeformation:
    """Deformation equivalent to ``d`` via ``χ_f(a) = a + f(a)ε``.

    ``φ' = φ + f(ab) - af(b) - bf(a)`` and ``ψ' = ψ - ({a,f(b)} + {f(a),b} - f({a,b}))``.
    """
    ops = _Ops(ps)
    alg = ops.alg
    D = d.D
    n = ps.n
    fv = lambda m: _f_value(f, m)
    fpoly = lambda p: ops.add(*[(c, fv(m)) for m, c in p.items()])
    monos = alg.monomials_upto(D)
    pv, sv = {}, {}
    for i, a in enumerate(monos):
        for b in monos[i:]:
            if alg.weight(a) + alg.weight(b) > D:
                continue
            A, B = {a: 1}, {b: 1}
            dphi = ops.add((1, fpoly(ops.mul(A, B))), (-1, ops.mul(A, fv(b))), (-1, ops.mul(B, fv(a))))
            v = ops.add((1, d.phi_value(a, b)), (1, dphi))
            if v:
                pv[phi_key(a, b)] = Polynomial(v, n)
            if a != b:
                df = ops.add((1, ops.br(A, fv(b))), (1, ops.br(fv(a), B)), (-1, fpoly(ops.br(A, B))))
                v = ops.add((1, d.psi_value(a, b)), (-1, df))
                if v:
                    key, sg = psi_key(a, b)
                    sv[key] = Polynomial(v, n) if sg == 1 else -Polynomial(v, n)
    return FirstOrderDeformation(HarrisonCochain((2,), None, pv, D), HarrisonCochain((1, 1), None, sv, D),
                                 None, d.invariant)


def _difference_equations(ps, d1, d2, D, W):
    """Linear system for ``f`` with shift ``W - l`` realising ``d1 -> d2``.

    Unknowns are ``(m, output monomial)``; one equation per (pair, output monomial).
    Returns (columns, rows, rhs).
    """
    ops = _Ops(ps)
    alg = ops.alg
    l = ps.l
    fshift = W - l
    monos = alg.monomials_upto(D)
    cols = []
    for m in monos:
        for o in alg.monomials(alg.weight(m) + fshift):
            cols.append((m, o))
    colidx = {c: k for k, c in enumerate(cols)}

    def f_images(m, coef, sink, op):
        # contribute coef * op(f(m)) for each unknown output monomial of f(m)
        for o in alg.monomials(alg.weight(m) + fshift):
            k = colidx[(m, o)]
            for mm, c in op(o).items():
                sink.setdefault(mm, {})
                _addto(sink[mm], k, coef * c)

    rows, rhs = [], []
    for i, a in enumerate(monos):
        for b in monos[i:]:
            if alg.weight(a) + alg.weight(b) > D:
                continue
            # φ2 - φ1 = f(ab) - a f(b) - b f(a)
            sink: dict = {}
            for m, c in alg.product(a, b).items():
                f_images(m, c, sink, lambda o: {o: 1})
            f_images(b, -1, sink, lambda o, a=a: alg.product(a, o))
            f_images(a, -1, sink, lambda o, b=b: alg.product(b, o))
            target = ops.add((1, d2.phi_value(a, b)), (-1, d1.phi_value(a, b)))
            for mm in set(sink) | set(target):
                rows.append(sink.get(mm, {}))
                rhs.append(target.get(mm, 0))
            if a == b:
                continue
            # ψ2 - ψ1 = -({a,f(b)} + {f(a),b} - f({a,b}))
            sink = {}
            f_images(b, -1, sink, lambda o, a=a: alg.bracket(a, o))
            f_images(a, -1, sink, lambda o, b=b: alg.bracket(o, b))
            for m, c in alg.bracket(a, b).items():
                f_images(m, c, sink, lambda o: {o: 1})
            target = ops.add((1, d2.psi_value(a, b)), (-1, d1.psi_value(a, b)))
            for mm in set(sink) | set(target):
                rows.append(sink.get(mm, {}))
                rhs.append(target.get(mm, 0))
    return cols, rows, rhs


def _shift_components(ps, d1, d2, D) -> set:
    """Slice invariants present in the difference of two deformations."""
    alg = PoissonAlgebraData(ps)
    out = set()
    for cochain, s in ((d1.phi, 1), (d2.phi, 1), (d1.psi, 2), (d2.psi, 2)):
        for key, v in cochain.values.items():
            u = sum(alg.weight(m) for f in key for m in f)
            if u > D:
                continue
            for m in v.terms:
                out.add(alg.weight(m) - u + s * ps.l)
    return out


def equivalence_witness(ps: PoissonStructure, d1: FirstOrderDeformation, d2: FirstOrderDeformation,
                        D: int) -> Optional[EquivalenceWitness]:
    """A linear ``f`` with ``χ_f`` carrying ``d1`` to ``d2`` on inputs of weight ``<= D``, or ``None``."""
    if D > min(d1.D, d2.D):
        raise TruncationExceeded("witness search beyond the tabulated range")
    values: dict = {}
    n = ps.n
    for W in sorted(_shift_components(ps, d1, d2, D)):
        cols, rows, rhs = _difference_equations(ps, d1, d2, D, W)
        sol = solve_sparse(rows, rhs, len(cols))
        if sol is None:
            return None
        for (m, o), v in zip(cols, sol):
            if v:
                key = ((m,),)
                values.setdefault(key, {})
                _addto(values[key], o, v)
    # any remaining mismatch outside the solved slices means inconsistency
    f = HarrisonCochain((1,), None, {k: Polynomial(v, n) for k, v in values.items() if v}, D)
    moved = transport(ps, d1, f)
    if not _same(moved, d2, D, ps):
        return None
    return EquivalenceWitness(f)


def _same(d1: FirstOrderDeformation, d2: FirstOrderDeformation, D: int, ps) -> bool:
    alg = PoissonAlgebraData(ps)
    for c1, c2 in ((d1.phi, d2.phi), (d1.psi, d2.psi)):
        for key in set(c1.values) | set(c2.values):
            if sum(alg.weight(m) for f in key for m in f) > D:
                continue
            if c1.values.get(key, Polynomial.zero(ps.n)) != c2.values.get(key, Polynomial.zero(ps.n)):
                return False
    return True


# -- enumeration -----------------------------------------------------------------


def _direct_system(ps: PoissonStructure, W: int, D: int):
    """Cocycle equations and trivial deformations for slice ``W``, straight from the identities.

    Unknowns: φ on sorted pairs (shift ``W-l``) then ψ on strict pairs (shift ``W-2l``).
    """
    ops = _Ops(ps)
    alg = ops.alg
    l = ps.l
    monos = alg.monomials_upto(D)
    wt = {m: alg.weight(m) for m in monos}
    cols = []
    for i, a in enumerate(monos):
        for b in monos[i:]:
            u = wt[a] + wt[b]
            if u <= D:
                for o in alg.monomials(u + W - l):
                    cols.append(("phi", (min(a, b), max(a, b)), o))
    for i, a in enumerate(monos):
        for b in monos[i + 1 :]:
            u = wt[a] + wt[b]
            if u <= D:
                for o in alg.monomials(u + W - 2 * l):
                    cols.append(("psi", (min(a, b), max(a, b)), o))
    colidx = {c: k for k, c in enumerate(cols)}

    def phi_sym(a, b):
        # symbolic φ(a,b): {output monomial: {column: coef}}
        key = (a, b) if a <= b else (b, a)
        return {o: {colidx[("phi", key, o)]: 1} for o in alg.monomials(wt[a] + wt[b] + W - l)}

    def psi_sym(a, b):
        if a == b:
            return {}
        key, s = ((a, b), 1) if a < b else ((b, a), -1)
        return {o: {colidx[("psi", key, o)]: s} for o in alg.monomials(wt[a] + wt[b] + W - 2 * l)}

    def scaled(sym, poly, mode, coef, sink):
        # sink += coef * mode(poly, sym)
        for o, row in sym.items():
            img = alg.product(poly, o) if mode == "mul" else (alg.bracket(poly, o) if mode == "brl" else {o: 1})
            for mm, c in img.items():
                r = sink.setdefault(mm, {})
                for k, v in row.items():
                    _addto(r, k, coef * c * v)

    def sym_bilinear(fn, p: dict, q: dict, coef, sink):
        for x, cx in p.items():
            for y, cy in q.items():
                scaled(fn(x, y), None, "id", coef * cx * cy, sink)

    rows = []
    for a, b, c in _triples(alg, D):
        A, B, C = {a: 1}, {b: 1}, {c: 1}
        # associativity
        sink: dict = {}
        sym_bilinear(phi_sym, alg.product(a, b), C, 1, sink)
        scaled(phi_sym(a, b), c, "mul", 1, sink)
        sym_bilinear(phi_sym, A, alg.product(b, c), -1, sink)
        scaled(phi_sym(b, c), a, "mul", -1, sink)
        rows.extend(r for r in sink.values() if r)
        # (⋆)
        sink = {}
        sym_bilinear(psi_sym, A, alg.product(b, c), 1, sink)
        scaled(psi_sym(a, b), c, "mul", -1, sink)
        scaled(psi_sym(a, c), b, "mul", -1, sink)
        sym_bilinear(phi_sym, alg.bracket(a, b), C, -1, sink)
        sym_bilinear(phi_sym, alg.bracket(a, c), B, -1, sink)
        scaled(phi_sym(b, c), a, "brl", 1, sink)
        rows.extend(r for r in sink.values() if r)
        # (⋆⋆)
        sink = {}
        sym_bilinear(psi_sym, A, alg.bracket(b, c), 1, sink)
        sym_bilinear(psi_sym, B, alg.bracket(c, a), 1, sink)
        sym_bilinear(psi_sym, C, alg.bracket(a, b), 1, sink)
        scaled(psi_sym(b, c), a, "brl", 1, sink)
        scaled(psi_sym(c, a), b, "brl", 1, sink)
        scaled(psi_sym(a, b), c, "brl", 1, sink)
        rows.extend(r for r in sink.values() if r)

    # trivial deformations: (f(ab) - af(b) - bf(a), -({a,f(b)} + {f(a),b} - f({a,b}))) for f of shift W-l
    trivial = []
    for m in monos:
        for o in alg.monomials(wt[m] + W - l):
            vec: dict = {}

            def fval(x, m=m, o=o):
                return {o: 1} if x == m else {}

            for i, a in enumerate(monos):
                for b in monos[i:]:
                    if wt[a] + wt[b] > D:
                        continue
                    fa, fb = fval(a), fval(b)
                    fab = {}
                    for x, cx in alg.product(a, b).items():
                        for y, cy in fval(x).items():
                            _addto(fab, y, cx * cy)
                    val = _Ops.add((1, fab), (-1, alg.poly_product({a: 1}, fb)), (-1, alg.poly_product({b: 1}, fa)))
                    for y, cy in val.items():
                        _addto(vec, colidx[("phi", (min(a, b), max(a, b)), y)], cy)
                    if a == b:
                        continue
                    fbr = {}
                    for x, cx in alg.bracket(a, b).items():
                        for y, cy in fval(x).items():
                            _addto(fbr, y, cx * cy)
                    val = _Ops.add((-1, alg.poly_bracket({a: 1}, fb)), (-1, alg.poly_bracket(fa, {b: 1})), (1, fbr))
                    sg = 1 if a < b else -1
                    for y, cy in val.items():
                        _addto(vec, colidx[("psi", (min(a, b), max(a, b)), y)], sg * cy)
            if vec:
                trivial.append(vec)
    return cols, rows, trivial


def direct_class_basis(ps: PoissonStructure, w: int, D: int) -> list:
    """Classes in weight ``w`` from the (⋆)/(⋆⋆)/associativity equations modulo trivial ones.

    Returns deformations whose ψ has shift ``w`` (φ has shift ``w + l``).
    """
    W = w + 2 * ps.l
    cols, rows, trivial = _direct_system(ps, W, D)
    kernel = sparse_kernel(rows, len(cols))
    el = SparseEliminator()
    for t in trivial:
        el.add(t)
    classes = []
    for v in kernel:
        if el.add(v):
            classes.append(v)
    n = ps.n
    out = []
    for v in classes:
        pv, sv = {}, {}
        for k, c in v.items():
            kind, (a, b), o = cols[k]
            if kind == "phi":
                key = ((a, b),)
                pv.setdefault(key, {})[o] = c
            else:
                key = ((a,), (b,))
                sv.setdefault(key, {})[o] = c
        out.append(FirstOrderDeformation(
            HarrisonCochain((2,), W - ps.l, {k: Polynomial(t, n) for k, t in pv.items()}, D),
            HarrisonCochain((1, 1), W - 2 * ps.l, {k: Polynomial(t, n) for k, t in sv.items()}, D),
            None, W))
    return out


def lp_class_basis(ps: PoissonStructure, w: int, D: int) -> list:
    """Bivector cocycles of weight ``w`` modulo ``δ`` of vector fields (smooth case, φ = 0)."""
    W = w + 2 * ps.l
    sl = build_slice(ps, W, [2], variant="paper")
    basis2 = sl.bases[2]
    el = SparseEliminator()
    for img in sl.images.get(1, []):
        if img:
            el.add(img)
    # cocycle condition: δ(bivector) = 0; transpose images into rows over degree-2 coordinates
    cols3 = {}
    for c, img in enumerate(sl.images.get(2, [])):
        for r, v in img.items():
            cols3.setdefault(r, {})[c] = v
    kernel = sparse_kernel(list(cols3.values()), len(basis2))
    out = []
    n = ps.n
    for v in kernel:
        if el.add(v):
            comps: dict = {}
            for k, c in v.items():
                I, m = basis2[k]
                comps[I] = comps.get(I, Polynomial.zero(n)) + Polynomial.monomial(m, c)
            out.append(from_bivector(ps, Polyvector(2, n, comps), D))
    return out


def enumerate_first_order(ps: PoissonStructure, w: int, D: int, route: str = "auto") -> list:
    """Basis of first-order deformation classes in weight ``w``.

    ``route="lp"`` uses bivectors (polynomial rings only); ``"direct"`` solves
    the defining identities with ``φ`` and ``ψ`` free; ``"auto"`` picks LP
    for polynomial rings and direct otherwise.
    """
    if route == "auto":
        route = "lp" if ps.quotient is None else "direct"
    if route == "lp":
        return lp_class_basis(ps, w, D)
    if route == "direct":
        return direct_class_basis(ps, w, D)
    raise ValueError(f"unknown route {route!r}")


# -- dual-number algebra tables ----------------------------------------------------


@dataclass
class DualNumberAlgebra:
    """Multiplication and bracket tables of ``A ⊕ Aε`` on monomials of weight ``<= D``.

    ``product[(a,b)] = (ab, φ(a,b))`` and ``bracket[(a,b)] = ({a,b}, ψ(a,b))``,
    each entry a pair of polynomial dicts (ε^0 part, ε^1 part).
    """

    D: int
    product: dict
    bracket: dict
    ps: PoissonStructure
    alg: PoissonAlgebraData = field(init=False, repr=False)

    def __post_init__(self):
        self.alg = PoissonAlgebraData(self.ps)

    # element = (dict, dict) meaning p + εq
    def mul(self, x, y):
        (p1, q1), (p2, q2) = x, y
        alg = self.alg
        base: dict = {}
        eps: dict = {}
        for a, ca in p1.items():
            for b, cb in p2.items():
                e0, e1 = self.product[(a, b) if (a, b) in self.product else (b, a)]
                for m, c in e0.items():
                    _addto(base, m, ca * cb * c)
                for m, c in e1.items():
                    _addto(eps, m, ca * cb * c)
        for m, c in alg.poly_product(p1, q2).items():
            _addto(eps, m, c)
        for m, c in alg.poly_product(q1, p2).items():
            _addto(eps, m, c)
        return base, eps

    def br(self, x, y):
        (p1, q1), (p2, q2) = x, y
        alg = self.alg
        base: dict = {}
        eps: dict = {}
        for a, ca in p1.items():
            for b, cb in p2.items():
                if (a, b) in self.bracket:
                    e0, e1 = self.bracket[(a, b)]
                    s = 1
                else:
                    e0, e1 = self.bracket[(b, a)]
                    s = -1
                for m, c in e0.items():
                    _addto(base, m, s * ca * cb * c)
                for m, c in e1.items():
                    _addto(eps, m, s * ca * cb * c)
        for m, c in alg.poly_bracket(p1, q2).items():
            _addto(eps, m, c)
        for m, c in alg.poly_bracket(q1, p2).items():
            _addto(eps, m, c)
        return base, eps


@dataclass
class ReverifyReport:
    ok: bool
    checked: int
    identity: Optional[str] = None
    triple: Optional[tuple] = None


def build_dual_number_algebra(ps: PoissonStructure, d: FirstOrderDeformation, D: int) -> DualNumberAlgebra:
    alg = PoissonAlgebraData(ps)
    monos = alg.monomials_upto(D)
    prod, brk = {}, {}
    for i, a in enumerate(monos):
        for b in monos[i:]:
            if alg.weight(a) + alg.weight(b) > D:
                continue
            prod[(a, b)] = (dict(alg.product(a, b)), dict(d.phi_value(a, b)))
            brk[(a, b)] = (dict(alg.bracket(a, b)), dict(d.psi_value(a, b)))
    table = DualNumberAlgebra(D, prod, brk, ps)
    rep = reverify(table)
    if not rep.ok:
        raise AssertionError(f"dual-number tables fail {rep.identity} at {rep.triple}")
    return table


def _eq(x, y) -> bool:
    return x[0] == y[0] and x[1] == y[1]


def _plus(x, y):
    out0, out1 = dict(x[0]), dict(x[1])
    for m, c in y[0].items():
        _addto(out0, m, c)
    for m, c in y[1].items():
        _addto(out1, m, c)
    return out0, out1


def reverify(table: DualNumberAlgebra) -> ReverifyReport:
    """Associativity, commutativity, Leibniz and Jacobi on monomial triples, using only the tables."""
    ps = table.ps
    alg = PoissonAlgebraData(ps)
    n = 0
    el = lambda m: ({m: 1}, {})
    for a, b, c in _triples(alg, table.D):
        n += 1
        A, B, C = el(a), el(b), el(c)
        if not _eq(table.mul(table.mul(A, B), C), table.mul(A, table.mul(B, C))):
            return ReverifyReport(False, n, "associativity", (a, b, c))
        if not _eq(table.mul(A, B), table.mul(B, A)):
            return ReverifyReport(False, n, "commutativity", (a, b, c))
        lhs = table.br(A, table.mul(B, C))
        rhs = _plus(table.mul(table.br(A, B), C), table.mul(B, table.br(A, C)))
        if not _eq(lhs, rhs):
            return ReverifyReport(False, n, "leibniz", (a, b, c))
        j = _plus(_plus(table.br(A, table.br(B, C)), table.br(B, table.br(C, A))), table.br(C, table.br(A, B)))
        if j[0] or j[1]:
            return ReverifyReport(False, n, "jacobi", (a, b, c))
    return ReverifyReport(True, n)
