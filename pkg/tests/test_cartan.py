import pytest
from hypothesis import given, strategies as st

from poisson_coh.cartan import (DifferentialForm, KindMismatch, Musical, NonConstantDeterminant, Polyvector,
                                de_rham_d, evaluate_on_exacts, exact_form, interior_product, musical,
                                musical_inverse, wedge)
from poisson_coh.gradedpoly import Polynomial, WeightedContext, parse_polynomial
from strategies import alternating, homogeneous_alternating, polynomials

XY = WeightedContext(("x", "y"), (1, 1), 2)
X4 = WeightedContext(("x1", "x2", "x3", "x4"), (1, 1, 1, 1), 2)
ONE2 = Polynomial.constant(1, 2)
THETA2 = Polyvector(2, 2, {(0, 1): ONE2})
THETA4 = Polyvector(2, 4, {(0, 1): Polynomial.constant(1, 4), (2, 3): Polynomial.constant(1, 4)})


def P(text, ctx=XY):
    return parse_polynomial(text, ctx)


def dx(i, n=2, c=None):
    return DifferentialForm(1, n, {(i,): c if c is not None else Polynomial.constant(1, n)})


def d_(i, n=2, c=None):
    return Polyvector(1, n, {(i,): c if c is not None else Polynomial.constant(1, n)})


def test_wedge_examples():
    assert wedge(d_(0), d_(1)) == THETA2
    assert wedge(d_(0), d_(0)).is_zero()
    assert wedge(d_(0, c=P("x")), d_(1, c=P("y"))) == Polyvector(2, 2, {(0, 1): P("x*y")})
    with pytest.raises(KindMismatch):
        wedge(d_(0), dx(1))


def test_alternating_normalisation():
    v = Polyvector(2, 2, {(1, 0): ONE2})
    assert v.comps == {(0, 1): -ONE2}
    assert v.coefficient((1, 0)) == ONE2
    assert Polyvector(2, 2, {(0, 0): ONE2}).is_zero()


@given(alternating(X4, DifferentialForm, 1), alternating(X4, DifferentialForm, 2),
       alternating(X4, DifferentialForm, 1))
def test_wedge_graded_commutative_and_associative(a, b, c):
    assert wedge(a, b) == wedge(b, a)  # (-1)^{1*2} = 1
    assert wedge(a, c) == -wedge(c, a)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


def test_evaluate_examples():
    assert evaluate_on_exacts(THETA2, [P("x"), P("y")]) == ONE2
    assert evaluate_on_exacts(THETA2, [P("x^2"), P("y")]) == P("2*x")
    assert evaluate_on_exacts(THETA2, [P("x"), P("x")]).is_zero()
    with pytest.raises(ValueError):
        evaluate_on_exacts(THETA2, [P("x")])


@given(alternating(X4, Polyvector, 3, 2),
       st.lists(polynomials(X4, 3, 3), min_size=3, max_size=3), st.integers(0, 1))
def test_evaluate_alternating(Pv, args, i):
    swapped = list(args)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    assert evaluate_on_exacts(Pv, swapped) == -evaluate_on_exacts(Pv, args)


@given(alternating(X4, Polyvector, 2, 2), polynomials(X4, 2, 3), polynomials(X4, 2, 3), polynomials(X4, 2, 3))
def test_evaluate_slot_is_derivation(Pv, a, b, c):
    lhs = evaluate_on_exacts(Pv, [a * b, c])
    rhs = a * evaluate_on_exacts(Pv, [b, c]) + b * evaluate_on_exacts(Pv, [a, c])
    assert lhs == rhs


def test_de_rham_examples():
    assert de_rham_d(dx(1, c=P("x"))) == DifferentialForm(2, 2, {(0, 1): ONE2})
    assert de_rham_d(dx(0, c=P("x*y"))) == DifferentialForm(2, 2, {(0, 1): -P("x")})
    assert de_rham_d(exact_form(P("x^3*y"))).is_zero()


@given(homogeneous_alternating(X4, DifferentialForm, 3, 8))
def test_d_squared_zero(form):
    assert de_rham_d(de_rham_d(form)).is_zero()


@given(alternating(X4, DifferentialForm, 1, 3), alternating(X4, DifferentialForm, 2, 3))
def test_d_leibniz(a, b):
    assert de_rham_d(wedge(a, b)) == wedge(de_rham_d(a), b) - wedge(a, de_rham_d(b))


def test_interior_examples():
    vol = DifferentialForm(2, 2, {(0, 1): ONE2})
    assert interior_product(d_(0), vol) == dx(1)
    assert interior_product(d_(1), vol) == -dx(0)
    assert interior_product(THETA2, vol) == DifferentialForm(0, 2, {(): ONE2})
    with pytest.raises(ValueError):
        interior_product(THETA2, dx(0))


@given(alternating(X4, Polyvector, 1, 2), alternating(X4, Polyvector, 1, 2),
       alternating(X4, DifferentialForm, 3, 2))
def test_interior_of_wedge_composes(a, b, form):
    # convention: contracting by a∧b contracts a first, then b
    assert interior_product(wedge(a, b), form) == interior_product(b, interior_product(a, form))


def test_musical_examples():
    m = Musical(THETA2)
    assert m.flat(d_(0)) == -dx(1)
    assert m.sharp(m.flat(d_(0))) == d_(0)
    top = m.flat(THETA2)
    assert set(top.comps) == {(0, 1)} and set(top.comps[(0, 1)].terms) == {(0, 0)}  # constant multiple of dx∧dy
    assert musical_inverse(musical(THETA2, THETA2), THETA2) == THETA2
    with pytest.raises(NonConstantDeterminant):
        Musical(Polyvector(2, 2, {(0, 1): P("x")}))


@given(homogeneous_alternating(X4, Polyvector, 4, 6))
def test_musical_roundtrip_and_weight_shift(Pv):
    m = Musical(THETA4)
    f = m.flat(Pv)
    assert m.sharp(f) == Pv
    w = Pv.weight(X4)
    if w is not None and Pv:
        assert f.weight(X4) == w + Pv.degree * X4.l
