"""Independent reference computations used to cross-check the package.

Nothing here calls the package's differentials or linear algebra: the
Lie-algebra cochain complex is assembled from structure constants with its
own polynomial dictionaries and its own elimination.
"""

from fractions import Fraction
from itertools import combinations
from math import comb

from poisson_coh.cartan import evaluate_on_exacts


def lp_on_exacts(ps, P, args):
    """Coboundary of ``P`` evaluated on ``da_1∧...∧da_{i+1}``, straight from the defining sum.

    ``Σ_j (-1)^{j+1} {a_j, P(..^j..)} - Σ_{j<k} (-1)^{j+k+1} P(d{a_j,a_k} ∧ ..^j..^k..)``, 1-based.
    """
    n = len(args)
    total = None
    for j in range(1, n + 1):
        rest = args[: j - 1] + args[j:]
        t = ps.bracket(args[j - 1], evaluate_on_exacts(P, rest))
        t = t if (j + 1) % 2 == 0 else -t
        total = t if total is None else total + t
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            rest = [a for r, a in enumerate(args, 1) if r not in (j, k)]
            t = evaluate_on_exacts(P, [ps.bracket(args[j - 1], args[k - 1])] + rest)
            total = total - t if (j + k + 1) % 2 == 0 else total + t
    return total


# -- Lie algebra cohomology with coefficients in symmetric powers ------------------


def _monomials(n, m):
    if n == 0:
        return [()] if m == 0 else []
    out = []
    for e in range(m, -1, -1):
        out.extend((e,) + rest for rest in _monomials(n - 1, m - e))
    return out


def _act(consts, a, poly, n):
    """Adjoint action ``x_a · p = Σ_b [x_a, x_b] ∂_b p`` on a polynomial dict."""
    out = {}
    for mono, c in poly.items():
        for b in range(n):
            e = mono[b]
            if not e:
                continue
            base = list(mono)
            base[b] -= 1
            for d, s in consts.get((a, b), {}).items():
                new = list(base)
                new[d] += 1
                new = tuple(new)
                out[new] = out.get(new, 0) + c * e * s
    return {k: v for k, v in out.items() if v}


def _rank(rows):
    rows = [dict(r) for r in rows if r]
    rank = 0
    pivots = {}
    for r in rows:
        r = {k: Fraction(v) for k, v in r.items() if v}
        while r:
            p = min(r)
            if p not in pivots:
                pivots[p] = r
                rank += 1
                break
            piv = pivots[p]
            f = r[p] / piv[p]
            for k, v in piv.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank


def lie_cochain_differential(consts, n, k, m):
    """Images of basis cochains ``Hom(∧^k g, S^m g)`` under the Chevalley-Eilenberg differential.

    ``consts[(a, b)] = {d: c}`` encodes ``[x_a, x_b] = Σ c x_d``.
    """
    mons = _monomials(n, m)
    src = [(I, mo) for I in combinations(range(n), k) for mo in mons]
    tgt_idx = {(J, mo): r for r, (J, mo) in enumerate((J, mo) for J in combinations(range(n), k + 1) for mo in mons)}
    images = []
    for I, mo in src:
        img = {}
        for J in combinations(range(n), k + 1):
            # (dc)(x_J) = Σ_i (-1)^i x_{J_i} · c(J∖i) + Σ_{i<j} (-1)^{i+j} c([x_{J_i}, x_{J_j}], J∖{i,j})
            val = {}
            for i in range(k + 1):
                rest = J[:i] + J[i + 1:]
                if rest == I:
                    for mm, c in _act(consts, J[i], {mo: 1}, n).items():
                        val[mm] = val.get(mm, 0) + (-1) ** i * c
            for i in range(k + 1):
                for j in range(i + 1, k + 1):
                    rest = J[:i] + J[i + 1:j] + J[j + 1:]
                    for d, s in consts.get((J[i], J[j]), {}).items():
                        args = (d,) + rest
                        if len(set(args)) < len(args) or tuple(sorted(args)) != I:
                            continue
                        perm_parity = sum(1 for x in range(len(args)) for y in range(x + 1, len(args))
                                          if args[x] > args[y])
                        val[mo] = val.get(mo, 0) + (-1) ** (i + j + perm_parity) * s
            for mm, c in val.items():
                if c:
                    img[tgt_idx[(J, mm)]] = c
        images.append(img)
    return src, images


def lie_cohomology_dim(consts, n, k, m):
    dim = comb(n, k) * len(_monomials(n, m))
    out_rank = _rank(lie_cochain_differential(consts, n, k, m)[1]) if k < n else 0
    in_rank = _rank(lie_cochain_differential(consts, n, k - 1, m)[1]) if k >= 1 else 0
    return dim - out_rank - in_rank


SL2_CONSTANTS = {
    # variables e, f, h: [e,f] = h, [h,e] = 2e, [h,f] = -2f, stored for both orders
    (0, 1): {2: 1}, (1, 0): {2: -1},
    (2, 0): {0: 2}, (0, 2): {0: -2},
    (2, 1): {1: -2}, (1, 2): {1: 2},
}


def symplectic_hp_paper(dim, i, w, l=2):
    """HP^i of the standard structure on C^dim (unit weights), complex starting in degree 1.

    Through the musical map this is de Rham cohomology of forms of degree
    >= 1: in degree 1 the closed forms of weight W = w + l, which are the
    differentials of the weight-W polynomials; nothing above degree 1.
    """
    if i != 1:
        return 0
    W = w + l
    return comb(W + dim - 1, dim - 1) if W >= 1 else 0
