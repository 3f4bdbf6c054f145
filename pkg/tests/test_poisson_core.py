import pytest
from hypothesis import given

from poisson_coh.cartan import Polyvector
from poisson_coh.gradedpoly import Polynomial, QuotientPresentation, WeightedContext, parse_polynomial
from poisson_coh.poisson_core import (JacobiFailure, PoissonStructure, QuotientIncompatible, bracket,
                                      hamiltonian_field, jacobi_check, weight_audit)
from poisson_coh.structures import example
from strategies import polynomials

S2 = example("symplectic2")
SL2 = example("sl2star")
CONE = example("a1cone")
XY, EFH = S2.ctx, SL2.ctx


def p2(t):
    return parse_polynomial(t, XY)


def p3(t):
    return parse_polynomial(t, EFH)


def test_bracket_examples():
    assert bracket(S2, p2("x"), p2("y")) == p2("1")
    assert bracket(S2, p2("x^2"), p2("y")) == p2("2*x")
    assert bracket(SL2, p3("h"), p3("e*f")).is_zero()
    assert bracket(SL2, p3("h"), p3("e")) == p3("2*e")
    assert bracket(SL2, p3("h"), p3("f")) == p3("-2*f")
    assert bracket(SL2, p3("e"), p3("f")) == p3("h")


def test_jacobi_examples():
    assert jacobi_check(S2).ok
    assert jacobi_check(SL2).ok and jacobi_check(SL2).triples_checked == 1
    ctx = WeightedContext(("x", "y", "z"), (1, 1, 2), 2)
    x = parse_polynomial("x", ctx)
    theta = Polyvector(2, 3, {(0, 1): Polynomial.constant(1, 3), (0, 2): x})
    with pytest.raises(JacobiFailure) as err:
        PoissonStructure(ctx, theta)
    assert err.value.triple == (0, 1, 2) and err.value.value == Polynomial.constant(1, 3)
    rep = jacobi_check(PoissonStructure(ctx, theta, defer_jacobi=True))
    assert not rep.ok and rep.triple == (0, 1, 2)


def test_hamiltonian_examples():
    assert hamiltonian_field(S2, p2("x")) == Polyvector(1, 2, {(1,): p2("1")})
    assert hamiltonian_field(S2, p2("y")) == Polyvector(1, 2, {(0,): p2("-1")})
    assert hamiltonian_field(SL2, p3("h^2 + 4*e*f")).is_zero()


def test_weight_audit_examples():
    a = weight_audit(S2)
    assert a.homogeneous and a.l_confirmed and a.inferred_l == 2
    assert weight_audit(SL2).inferred_l == 2
    theta = Polyvector(2, 2, {(0, 1): p2("1 + x")})
    assert not weight_audit(PoissonStructure(XY, theta)).homogeneous


def test_quotient_compatibility_enforced():
    bad = QuotientPresentation(p3("h^2 + e*f"), EFH)
    with pytest.raises(QuotientIncompatible):
        PoissonStructure(EFH, SL2.theta, bad)


@given(polynomials(EFH, 6, 3), polynomials(EFH, 6, 3), polynomials(EFH, 6, 3))
def test_bracket_axioms(f, g, h):
    b = SL2.bracket
    assert b(f, g) == -b(g, f)
    assert b(f, g * h) == b(f, g) * h + b(f, h) * g
    assert SL2.jacobiator(f, g, h).is_zero()


@given(polynomials(EFH, 6, 3), polynomials(EFH, 6, 3), polynomials(EFH, 2, 2))
def test_quotient_bracket_independent_of_representative(f, g, m):
    rel = CONE.quotient.relation
    assert CONE.bracket(f + rel * m, g) == CONE.bracket(f, g)
    nf = CONE.nf
    assert CONE.bracket(nf(f), nf(g)) == CONE.bracket(f, g)


@given(polynomials(XY, 5, 4), polynomials(XY, 5, 4))
def test_hamiltonian_field_acts_by_bracket(f, g):
    H = hamiltonian_field(S2, f)
    applied = sum((H.comps.get((j,), Polynomial.zero(2)) * g.diff(j) for j in range(2)), Polynomial.zero(2))
    assert applied == S2.bracket(f, g)
