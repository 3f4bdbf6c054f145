"""Polyvector fields and differential forms with polynomial coefficients.

Both are stored as ``{sorted index tuple: Polynomial}``; the index tuple
``(i, j)`` stands for ``∂_i∧∂_j`` or ``dx_i∧dx_j``.

Interior product convention: ``ι(∂_I)(dx_K) = ±dx_{K∖I}`` with the sign fixed
by ``dx_K = ±dx_I∧dx_{K∖I}``.  So ``ι(∂x)(dx∧dy) = dy``, ``ι(∂y)(dx∧dy) = -dx``
and the full pairing ``ι(∂_I)(dx_I) = 1``.  In operator form this reads
``ι(a∧b) = ι(b)∘ι(a)``, i.e. ``(-1)^{|a||b|} ι(a)∘ι(b)``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .gradedpoly import Polynomial, WeightedContext, format_polynomial


class KindMismatch(TypeError):
    pass


class NonConstantDeterminant(ValueError):
    pass


def merge_sign(a: tuple, b: tuple) -> int:
    """Sign of sorting the concatenation ``a + b`` of two sorted tuples (0 on overlap)."""
    inv = 0
    j = 0
    for x in a:
        # count elements of b smaller than x
        while j < len(b) and b[j] < x:
            j += 1
        if j < len(b) and b[j] == x:
            return 0
        inv += j
    return -1 if inv & 1 else 1


def perm_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class _Alternating:
    kind = "alternating"
    __slots__ = ("degree", "nvars", "comps")

    def __init__(self, degree: int, nvars: int, comps: Mapping = None):
        self.degree = degree
        self.nvars = nvars
        clean = {}
        for key, c in (comps or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"index {key} does not have length {degree}")
            s = perm_sign(key)
            if not s or not c:
                continue
            skey = tuple(sorted(key))
            if any(k < 0 or k >= nvars for k in skey):
                raise ValueError(f"index {key} out of range")
            v = clean.get(skey, Polynomial.zero(nvars)) + (c if s == 1 else -c)
            if v:
                clean[skey] = v
            else:
                clean.pop(skey, None)
        self.comps = clean

    @classmethod
    def _raw(cls, degree, nvars, comps):
        obj = object.__new__(cls)
        obj.degree = degree
        obj.nvars = nvars
        obj.comps = comps
        return obj

    @classmethod
    def zero(cls, degree: int, nvars: int):
        return cls._raw(degree, nvars, {})

    @classmethod
    def scalar(cls, p: Polynomial):
        return cls._raw(0, p.nvars, {(): p} if p else {})

    @classmethod
    def basis(cls, index: tuple, nvars: int, coeff: Polynomial = None):
        coeff = Polynomial.constant(1, nvars) if coeff is None else coeff
        return cls(len(index), nvars, {tuple(index): coeff})

    def _check(self, other):
        if type(other) is not type(self):
            raise KindMismatch(f"cannot combine {self.kind} with {getattr(other, 'kind', type(other).__name__)}")
        if other.nvars != self.nvars:
            raise ValueError("different numbers of variables")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add different degrees")
        out = dict(self.comps)
        for k, c in other.comps.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._raw(self.degree, self.nvars, out)

    def __neg__(self):
        return self._raw(self.degree, self.nvars, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply by a polynomial or a rational constant."""
        out = {}
        for k, v in self.comps.items():
            w = v * c
            if w:
                out[k] = w
        return self._raw(self.degree, self.nvars, out)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.degree, self.nvars, self.comps) == (other.degree, other.nvars, other.comps)

    def __hash__(self):
        return hash((self.kind, self.degree, frozenset(self.comps.items())))

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def coefficient(self, index) -> Polynomial:
        index = tuple(index)
        s = perm_sign(index)
        c = self.comps.get(tuple(sorted(index)), Polynomial.zero(self.nvars))
        return c if s == 1 else (-c if s == -1 else Polynomial.zero(self.nvars))

    def map_coefficients(self, fn):
        out = {}
        for k, v in self.comps.items():
            w = fn(v)
            if w:
                out[k] = w
        return self._raw(self.degree, self.nvars, out)

    def weights_present(self, ctx: WeightedContext) -> set:
        sign = self._weight_sign
        out = set()
        for k, v in self.comps.items():
            shift = sign * sum(ctx.weights[i] for i in k)
            out |= {w + shift for w in v.weights_present(ctx)}
        return out

    def weight(self, ctx: WeightedContext):
        ws = self.weights_present(ctx)
        return ws.pop() if len(ws) == 1 else None

    def to_text(self, ctx: WeightedContext) -> str:
        if not self.comps:
            return "0"
        parts = []
        for k in sorted(self.comps):
            basis = "∧".join(self._symbol(ctx.variables[i]) for i in k) or "1"
            parts.append(f"({format_polynomial(self.comps[k], ctx)})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, comps={self.comps!r})"


class Polyvector(_Alternating):
    """Alternating multi-derivation ``Σ c_I ∂_I``; weight = coefficient weight − Σ w_i."""

    kind = "polyvector"
    _weight_sign = -1
    __slots__ = ()

    @staticmethod
    def _symbol(name):
        return f"d/d{name}"


class DifferentialForm(_Alternating):
    """Differential form ``Σ c_I dx_I``; weight = coefficient weight + Σ w_i."""

    kind = "form"
    _weight_sign = 1
    __slots__ = ()

    @staticmethod
    def _symbol(name):
        return f"d{name}"


def wedge(a: _Alternating, b: _Alternating) -> _Alternating:
    a._check(b)
    out: dict = {}
    for ka, ca in a.comps.items():
        for kb, cb in b.comps.items():
            s = merge_sign(ka, kb)
            if not s:
                continue
            key = tuple(sorted(ka + kb))
            term = ca * cb
            v = out.get(key)
            term = term if s == 1 else -term
            v = term if v is None else v + term
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return type(a)._raw(a.degree + b.degree, a.nvars, out)


def vector_field(coeffs: Sequence[Polynomial]) -> Polyvector:
    n = len(coeffs)
    return Polyvector(1, n, {(i,): c for i, c in enumerate(coeffs)}) if n else Polyvector.zero(1, 0)


def one_form(coeffs: Sequence[Polynomial]) -> DifferentialForm:
    return DifferentialForm(1, len(coeffs), {(i,): c for i, c in enumerate(coeffs)})


def exact_form(f: Polynomial) -> DifferentialForm:
    return one_form([f.diff(i) for i in range(f.nvars)])


def _det(rows: list, nvars: int) -> Polynomial:
    """Determinant of a small square matrix of polynomials (Leibniz expansion)."""
    k = len(rows)
    if k == 0:
        return Polynomial.constant(1, nvars)
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = Polynomial.zero(nvars)
    for j in range(k):
        if not rows[0][j]:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor, nvars)
        total = total + term if j % 2 == 0 else total - term
    return total


def evaluate_on_exacts(P: Polyvector, args: Sequence[Polynomial]) -> Polynomial:
    """``P(da_1∧...∧da_k) = Σ_I c_I det(∂a_r/∂x_{I_s})``."""
    if len(args) != P.degree:
        raise ValueError(f"polyvector of degree {P.degree} needs {P.degree} arguments, got {len(args)}")
    if P.degree == 0:
        return P.comps.get((), Polynomial.zero(P.nvars))
    grads = [[a.diff(i) for i in range(P.nvars)] for a in args]
    total = Polynomial.zero(P.nvars)
    for key, c in P.comps.items():
        rows = [[g[i] for i in key] for g in grads]
        total = total + c * _det(rows, P.nvars)
    return total


def evaluate_on_coordinates(P: Polyvector, index: Sequence[int]) -> Polynomial:
    """``P(dx_{i_1}∧...∧dx_{i_k})``: the signed component."""
    return P.coefficient(tuple(index))


def de_rham_d(form: DifferentialForm) -> DifferentialForm:
    out: dict = {}
    n = form.nvars
    for key, c in form.comps.items():
        for j in range(n):
            if j in key:
                continue
            dc = c.diff(j)
            if not dc:
                continue
            s = merge_sign((j,), key)
            nk = tuple(sorted((j,) + key))
            term = dc if s == 1 else -dc
            v = out.get(nk)
            v = term if v is None else v + term
            if v:
                out[nk] = v
            else:
                out.pop(nk, None)
    return DifferentialForm._raw(form.degree + 1, n, out)


def interior_product(P: Polyvector, form: DifferentialForm) -> DifferentialForm:
    if not isinstance(P, Polyvector) or not isinstance(form, DifferentialForm):
        raise KindMismatch("interior product takes a polyvector and a differential form")
    if P.degree > form.degree:
        raise ValueError(f"cannot contract degree {P.degree} into degree {form.degree}")
    out: dict = {}
    for kp, cp in P.comps.items():
        sp = set(kp)
        for kf, cf in form.comps.items():
            if not sp.issubset(kf):
                continue
            rest = tuple(i for i in kf if i not in sp)
            s = merge_sign(kp, rest)
            term = cp * cf
            term = term if s == 1 else -term
            v = out.get(rest)
            v = term if v is None else v + term
            if v:
                out[rest] = v
            else:
                out.pop(rest, None)
    return DifferentialForm._raw(form.degree - P.degree, form.nvars, out)


# -- musical isomorphism ----------------------------------------------------


def bivector_matrix(theta: Polyvector) -> list:
    """Antisymmetric matrix ``P`` with ``{f,g} = Σ P_ij ∂_i f ∂_j g``."""
    n = theta.nvars
    z = Polynomial.zero(n)
    m = [[z] * n for _ in range(n)]
    for (i, j), c in theta.comps.items():
        m[i][j] = c
        m[j][i] = -c
    return m


def _adjugate_inverse(m: list, nvars: int) -> list:
    n = len(m)
    det = _det(m, nvars)
    if det.is_zero() or any(any(e) for e in det.terms):
        raise NonConstantDeterminant(f"determinant {det!r} is not a nonzero constant")
    inv_det = 1 / Fraction(det.constant_term())
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:i] + r[i + 1 :] for k, r in enumerate(m) if k != j]
            cof = _det(minor, nvars)
            row.append(cof.scale(inv_det if (i + j) % 2 == 0 else -inv_det))
        out.append(row)
    return out


class Musical:
    """Musical isomorphism ``♭`` attached to a nondegenerate bivector.

    Degree 1: ``v ↦ ι(v)ω`` where ``ω`` has matrix ``P^{-1}``.  Degree i:
    ``(-1)^{i+1}`` times the i-th exterior power, which is the sign making
    ``♭∘δ = d∘♭`` hold exactly.  The same rule sends a function ``f`` to ``-f``
    in degree 0, which extends the chain map to the degree-0 extension.
    """

    def __init__(self, theta: Polyvector):
        if theta.degree != 2:
            raise ValueError("musical isomorphism needs a bivector")
        n = theta.nvars
        self.n = n
        self.theta = theta
        P = bivector_matrix(theta)
        W = _adjugate_inverse(P, n)  # ω_ij
        self.omega_matrix = W
        self.omega = DifferentialForm(2, n, {(i, j): W[i][j] for i in range(n) for j in range(i + 1, n)})
        # flat(∂_i) = ι(∂_i)ω = Σ_j W_ij dx_j
        self.flat_rows = [[W[i][j] for j in range(n)] for i in range(n)]
        # inverse on 1-forms: dx_j ↦ Σ_i (W^{-1})_ji ∂_i, and W^{-1} = P
        self.sharp_rows = [[P[j][i] for i in range(n)] for j in range(n)]

    @staticmethod
    def _power_sign(k: int) -> int:
        return 1 if k % 2 == 1 else -1

    def _power(self, obj, rows, target_cls):
        k = obj.degree
        n = self.n
        sign = self._power_sign(k)
        if k == 0:
            return target_cls._raw(0, n, {(): -c for c in obj.comps.values()})
        out = target_cls.zero(k, n)
        images = [target_cls(1, n, {(j,): rows[i][j] for j in range(n)}) for i in range(n)]
        for key, c in obj.comps.items():
            acc = target_cls.scalar(c if sign == 1 else -c)
            for i in key:
                acc = wedge(acc, images[i])
            out = out + acc
        return out

    def flat(self, P: Polyvector) -> DifferentialForm:
        if not isinstance(P, Polyvector):
            raise KindMismatch("flat takes a polyvector")
        return self._power(P, self.flat_rows, DifferentialForm)

    def sharp(self, form: DifferentialForm) -> Polyvector:
        if not isinstance(form, DifferentialForm):
            raise KindMismatch("sharp takes a differential form")
        return self._power(form, self.sharp_rows, Polyvector)


def musical(P: Polyvector, theta: Polyvector) -> DifferentialForm:
    return Musical(theta).flat(P)


def musical_inverse(form: DifferentialForm, theta: Polyvector) -> Polyvector:
    return Musical(theta).sharp(form)


def index_subsets(n: int, k: int) -> list:
    return list(combinations(range(n), k))


__all__ = [
    "Polyvector", "DifferentialForm", "wedge", "evaluate_on_exacts", "de_rham_d",
    "interior_product", "musical", "musical_inverse", "Musical", "NonConstantDeterminant",
    "KindMismatch", "merge_sign", "perm_sign", "vector_field", "one_form", "exact_form",
    "bivector_matrix", "index_subsets", "evaluate_on_coordinates",
]
