import random

import pytest

from fedconn.scalars import Scalar, I
from fedconn.polynomials import Poly, parse_poly
from fedconn.weylforms import WeylForm, omega_tilde, poincare_potential
from fedconn.properties import random_weyl_form


def y(sym, *alpha):
    return WeylForm.y_monomial(sym, 8, alpha)


def test_moyal_on_generators(sym2):
    prod = y(sym2, 1, 0).mw(y(sym2, 0, 1))
    expect = WeylForm.y_monomial(sym2, 8, (1, 1)) + WeylForm.y_monomial(
        sym2, 8, (0, 0), coeff=Poly.const(sym2.roster, I * Scalar(1) / 2), h_power=1
    )
    assert prod == expect


def test_commutator_of_generators(sym2):
    comm = y(sym2, 1, 0).mw(y(sym2, 0, 1)) - y(sym2, 0, 1).mw(y(sym2, 1, 0))
    assert comm == WeylForm.y_monomial(sym2, 8, (0, 0), coeff=Poly.const(sym2.roster, I), h_power=1)


def test_ad_over_h_examples(sym2):
    assert y(sym2, 1, 0).ad_over_h(y(sym2, 0, 1)) == WeylForm.from_poly(sym2, 8, Poly.const(sym2.roster, -1))
    a = random_weyl_form(sym2, 8, random.Random(1))
    one = WeylForm.unit(sym2, 8)
    assert a.ad_over_h(one).is_zero()
    f = WeylForm.from_poly(sym2, 8, parse_poly("x1^2*x2", sym2.roster))
    g = WeylForm.from_poly(sym2, 8, parse_poly("x2^3", sym2.roster))
    assert f.ad_over_h(g).is_zero()


def test_unit_of_product(sym2):
    rng = random.Random(2)
    one = WeylForm.unit(sym2, 8)
    for _ in range(5):
        a = random_weyl_form(sym2, 8, rng)
        assert one.mw(a) == a
        assert a.mw(one) == a


def test_moyal_associativity_randomized(sym2):
    rng = random.Random(3)
    for _ in range(10):
        a = random_weyl_form(sym2, 8, rng, terms=3)
        b = random_weyl_form(sym2, 8, rng, terms=3)
        c = random_weyl_form(sym2, 8, rng, terms=3)
        assert a.mw(b).mw(c) == a.mw(b.mw(c))


def test_dimension_mismatch(sym2, sym4):
    with pytest.raises(ValueError):
        WeylForm.unit(sym2, 8).mw(WeylForm.unit(sym4, 8))


def test_delta_examples(sym2):
    d = y(sym2, 1, 1).delta()
    expect = WeylForm.y_monomial(sym2, 8, (0, 1), J=(0,)) + WeylForm.y_monomial(sym2, 8, (1, 0), J=(1,))
    assert d == expect


def test_delta_nilpotency(sym2):
    rng = random.Random(4)
    for _ in range(10):
        a = random_weyl_form(sym2, 8, rng)
        assert a.delta().delta().is_zero()
        assert a.delta_star().delta_star().is_zero()


def test_homotopy_hand_example(sym2):
    a = WeylForm.y_monomial(sym2, 8, (0, 1), J=(0,))  # y^2 dx^1
    inv = a.delta_inv()
    assert inv == WeylForm.y_monomial(sym2, 8, (1, 1), coeff=Poly.const(sym2.roster, Scalar(1) / 2))
    half = Poly.const(sym2.roster, Scalar(1) / 2)
    expect = WeylForm.y_monomial(sym2, 8, (0, 1), J=(0,), coeff=half) - WeylForm.y_monomial(
        sym2, 8, (1, 0), J=(1,), coeff=half
    )
    assert a.delta().delta_inv() == expect
    assert a.delta().delta_inv() + a.delta_inv().delta() == a


def test_homotopy_randomized(sym2):
    rng = random.Random(5)
    for _ in range(20):
        a = random_weyl_form(sym2, 8, rng)
        assert a.center_part() + a.delta().delta_inv() + a.delta_inv().delta() == a


def test_delta_equals_minus_ad_of_omega_tilde(sym2):
    rng = random.Random(6)
    ot = omega_tilde(sym2, 8)
    for _ in range(10):
        a = random_weyl_form(sym2, 8, rng)
        assert a.delta() == -(ot.ad_over_h(a))


def test_h_divisibility_of_commutators(sym2):
    rng = random.Random(7)
    for _ in range(10):
        a = random_weyl_form(sym2, 8, rng, max_form=0)
        b = random_weyl_form(sym2, 8, rng, max_form=0)
        comm = a.mw(b) - b.mw(a)
        assert all(k >= 1 for (k, _, _) in comm.terms)


def test_truncation_soundness(sym2):
    rng = random.Random(8)
    for _ in range(10):
        a = random_weyl_form(sym2, 8, rng, terms=4)
        b = random_weyl_form(sym2, 8, rng, terms=4)
        assert a.mw(b).truncate(6) == a.truncate(6).mw(b.truncate(6))


def test_projection(sym2):
    r = sym2.roster
    f = parse_poly("x1^2 - 3*x2", r)
    a = WeylForm.from_poly(sym2, 8, f) + WeylForm.y_monomial(sym2, 8, (1, 0), coeff=parse_poly("x2", r))
    assert a.project_function(3).coefficient(0) == f
    hterm = WeylForm.from_poly(sym2, 8, parse_poly("x1", r), h_power=2)
    assert hterm.project_function(3).coefficient(2) == parse_poly("x1", r)
    with pytest.raises(ValueError):
        WeylForm.y_monomial(sym2, 8, (0, 0), J=(0,)).project_function(3)


def test_poincare_potential(sym2):
    om = WeylForm.omega_form(sym2, 8)
    pot = poincare_potential(om)
    assert pot.d_x() == om
    rng = random.Random(9)
    # random closed 2-form on R^2 (top degree, so closed automatically)
    c = parse_poly("x1^2*x2 - x2", sym2.roster)
    form = WeylForm.two_form(sym2, 8, {(1, 0, 1): c})
    assert poincare_potential(form).d_x() == form
    with pytest.raises(ValueError):
        poincare_potential(WeylForm.y_monomial(sym2, 8, (1, 0), J=(0,)))


def test_serialization_golden(sym2):
    r = sym2.roster
    a = (
        WeylForm.y_monomial(sym2, 8, (0, 1), J=(0,), coeff=parse_poly("1/2*x1", r), h_power=1)
        + WeylForm.y_monomial(sym2, 8, (2, 0), coeff=parse_poly("-x2", r))
    )
    assert a.serialize() == "\n".join([
        "h^0 * -x2 * y^(2,0) * dx{}",
        "h^1 * 1/2*x1 * y^(0,1) * dx{1}",
    ])
    assert WeylForm.zero(sym2, 8).serialize() == "0"
