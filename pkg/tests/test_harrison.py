import random

import pytest
from hypothesis import given, strategies as st

from poisson_coh.cartan import Polyvector
from poisson_coh.gradedpoly import Polynomial, WeightedContext, parse_polynomial
from poisson_coh.harrison import (ChainBasis, HarrisonCochain, PoissonAlgebraData, PoissonDoubleComplex,
                                  TruncationExceeded, UnrealizedShape, normalize_product, riffles, total_hp)
from poisson_coh.lp_cohomology import cochain_dimension, hp_dimension
from poisson_coh.poisson_core import PoissonStructure
from poisson_coh.structures import example

S2, SL2, CONE = example("symplectic2"), example("sl2star"), example("a1cone")
ZERO2 = PoissonStructure(WeightedContext(("x", "y"), (1, 1), 2), Polyvector(2, 2, {}), name="zero")
X, Y, ONE = (1, 0), (0, 1), (0, 0)


def mono(ps, text):
    (m,) = parse_polynomial(text, ps.ctx).terms
    return m


def poly(ps, text):
    return parse_polynomial(text, ps.ctx)


def test_riffle_signs():
    assert sorted(riffles(1, 1)) == [((0,), 1), ((1,), -1)]
    assert sum(s for _, s in riffles(2, 2)) == 2  # signed count of (2,2)-shuffles
    assert len(list(riffles(2, 3))) == 10


def test_boundary_example():
    cx = PoissonDoubleComplex(S2, 4)
    got = sorted(cx.boundary((X, Y)))
    assert got == sorted([((X,), Y, 1), (((1, 1),), ONE, -1), ((Y,), X, 1)])


def test_boundary_kills_shuffle_relations():
    cx = PoissonDoubleComplex(S2, 6)
    chb = cx.ch[3]
    ms = cx.alg.monomials_upto(2)
    rng = random.Random(3)
    for _ in range(30):
        t = tuple(rng.choice(ms) for _ in range(3))
        for _, rel in chb.shuffle_relations(t):
            assert chb.reduce_combination(rel) == {}
            acc = {}
            for tt, c in rel.items():
                for b, m, cb in cx.boundary(tt):
                    acc[(b, m)] = acc.get((b, m), 0) + c * cb
            assert not any(acc.values())


@pytest.mark.parametrize("ps", [S2, SL2, CONE], ids=["symplectic2", "sl2star", "a1cone"])
def test_boundary_squared_zero(ps):
    cx = PoissonDoubleComplex(ps, 8)
    ms = cx.alg.monomials_upto(4 if ps is S2 else 6)
    rng = random.Random(11)
    for _ in range(40):
        t = tuple(rng.choice(ms) for _ in range(4))
        if cx.key_weight((t,)) > 8:
            continue
        assert cx.boundary_square_defect(t) == {}


def test_chain_basis_counts_sym2_and_lie_words():
    alg = PoissonAlgebraData(S2)
    ch2, ch3 = ChainBasis(alg, 2, 6), ChainBasis(alg, 3, 6)
    # ch_2 is Sym^2; ch_3 of three distinct letters has dimension 2 (free Lie words of length 3)
    assert len(ch2.basis(2)) == 6  # pairs from {x, y, x^2, xy, y^2, 1 ...} of total weight 2
    assert len(ch3._table(tuple(sorted((X, Y, (1, 1)))))["basis"]) == 2
    with pytest.raises(TruncationExceeded):
        ch2.basis(7)


def test_normalize_product_koszul():
    lo, hi = sorted([X, Y])
    assert normalize_product(((lo,), (hi,))) == (((lo,), (hi,)), 1)
    assert normalize_product(((hi,), (lo,))) == (((lo,), (hi,)), -1)
    assert normalize_product(((X,), (X,)))[1] == 0
    # an even factor moves past an odd one without sign
    assert normalize_product(((X,), (X, Y))) == (((X, Y), (X,)), 1)


def sym(a, b):
    return (a, b) if a <= b else (b, a)


def _cochain(shape, values, ps, D=6):
    return HarrisonCochain(shape, None, {k: v for k, v in values.items() if v}, D)


def test_harrison_coboundary_n1_examples():
    cx = PoissonDoubleComplex(S2, 4)
    monos = cx.alg.monomials_upto(4)
    ident = _cochain((1,), {((m,),): Polynomial.monomial(m) for m in monos}, S2)
    assert cx.evaluate({(1,): ident}, (sym(X, Y),), use_delta=False) == poly(S2, "x*y")
    ddx = _cochain((1,), {((m,),): Polynomial.monomial(m).diff(0) for m in monos}, S2)
    for y in cx.keys_upto((2,), 4):
        assert cx.evaluate({(1,): ddx}, y, use_delta=False).is_zero()


def test_chain_bracket_examples():
    cx = PoissonDoubleComplex(S2, 6)
    assert cx.chain_bracket((X,), (Y,)) == {(ONE,): 1}
    cs = PoissonDoubleComplex(SL2, 6)
    assert cs.chain_bracket((mono(SL2, "e"),), (mono(SL2, "f"),)) == {(mono(SL2, "h"),): 1}
    # [x, y⊗y^2] = ({x,y}, y^2) + (y, {x,y^2}) = (1, y^2) + 2 (y, y)
    got = cx.chain_bracket((X,), (Y, (0, 2)))
    assert got == {(ONE, (0, 2)): 1, (Y, Y): 2}
    # [(x,y), x] = ({x,y}, x) + ({x,x}, y) = (1, x)
    assert cx.chain_bracket(sym(X, Y), (X,)) == {(ONE, X): 1}


@given(st.sampled_from(PoissonAlgebraData(SL2).monomials_upto(6)),
       st.sampled_from(PoissonAlgebraData(SL2).monomials_upto(6)))
def test_chain_bracket_on_ch1_is_poisson_bracket(a, b):
    cx = PoissonDoubleComplex(SL2, 12)
    expected = {(m,): c for m, c in cx.alg.bracket(a, b).items()}
    assert cx.chain_bracket((a,), (b,)) == expected


def test_poisson_coboundary_examples():
    cx = PoissonDoubleComplex(S2, 4)
    alg = cx.alg
    monos = alg.monomials_upto(4)
    mult = _cochain((2,), {k: Polynomial(alg.product(*k[0]), 2) for k in cx.keys_upto((2,), 4)}, S2)
    # δφ((x,y)·x) = {x, xy} - φ({x,y}, x) - φ({x,x}, y) = x - x - 0
    assert cx.evaluate({(2,): mult}, (sym(X, Y), (X,)), use_d=False).is_zero()
    br = _cochain((1, 1), {k: Polynomial(alg.bracket(k[0][0], k[1][0]), 2) for k in cx.keys_upto((1, 1), 4)}, S2)
    for y in cx.keys_upto((1, 1, 1), 4):
        assert cx.evaluate({(1, 1): br}, y, use_d=False).is_zero()
    ident = _cochain((1,), {((m,),): Polynomial.monomial(m) for m in monos}, S2)
    assert cx.evaluate({(1,): ident}, ((X,), (Y,)), use_d=False) == Polynomial.constant(1, 2)


@pytest.mark.parametrize("ps, weights", [(S2, range(-2, 3)), (SL2, range(-4, 5, 2)), (CONE, range(-4, 5, 2))],
                         ids=["symplectic2", "sl2star", "a1cone"])
def test_total_differential_squares_to_zero(ps, weights):
    cx = PoissonDoubleComplex(ps, 6)
    for w in weights:
        W = w + 2 * ps.l
        assert cx.square_defect(W) == 0
        assert cx.square_defect(W, use_delta=False) == 0
        assert cx.square_defect(W, use_d=False) == 0


def test_total_hp_matches_lp_on_plane():
    cache = {}
    for w in range(-2, 3):
        for i in (1, 2):
            r = total_hp(S2, i, w, 6, cache)
            assert r.stable
            assert r.dim == hp_dimension(S2, i, w, "paper")


def test_zero_structure_hp2_is_all_bivectors():
    cache = {}
    for w in range(-2, 2):
        r = total_hp(ZERO2, 2, w, 6, cache)
        d_only = PoissonDoubleComplex(ZERO2, 6).cohomology(2, w + 4, 6, use_delta=False)
        assert r.stable and r.dim == d_only == cochain_dimension(ZERO2, 2, w)


def test_cone_hp2_single_class():
    cache = {}
    dims = {w: total_hp(CONE, 2, w, 8, cache) for w in range(-8, 5, 2)}
    assert all(r.stable for r in dims.values())
    assert {w: r.dim for w, r in dims.items() if r.dim} == {-6: 1}


def test_unrealized_degree():
    with pytest.raises(UnrealizedShape):
        total_hp(S2, 3, 0, 4)
