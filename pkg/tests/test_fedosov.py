import random

import pytest

from fedconn.scalars import Scalar, I
from fedconn.polynomials import Poly, FormalFunction, parse_poly, monomials_up_to
from fedconn.weylforms import WeylForm
from fedconn.symplectic import ConnectionFamily
from fedconn.fedosov import (
    FedosovSetup, NotAbelianError, taylor_flat_section, validate_star_axioms,
)
from fedconn.multidiff import StarTruncation
from fedconn.properties import random_poly


def test_flat_r_is_zero(sym2, flat2):
    setup = FedosovSetup(flat2, None, trunc=8)
    assert setup.r.is_zero()


def test_first_recursion_step(sym2, flat2):
    # alpha = omega + h a dx1^dx2 with a = 3: the degree-3 component of r is
    # (3h/2)(y^1 dx^2 - y^2 dx^1), i.e. h a delta_inv(dx1^dx2)
    alpha = WeylForm.omega_form(sym2, 8) + WeylForm.two_form(
        sym2, 8, {(1, 0, 1): Poly.const(sym2.roster, 3)}
    )
    setup = FedosovSetup(flat2, alpha, trunc=8)
    half3 = Poly.const(sym2.roster, Scalar(3) / 2)
    expect = WeylForm.y_monomial(sym2, 8, (1, 0), J=(1,), coeff=half3, h_power=1) - \
        WeylForm.y_monomial(sym2, 8, (0, 1), J=(0,), coeff=half3, h_power=1)
    assert setup.r.homogeneous(3) == expect


def test_r_normalization_and_curvature(curved_setup):
    assert curved_setup.r.delta_star().is_zero()
    got = curved_setup.weyl_curvature(curved_setup.r)
    diff = got - curved_setup.alpha
    for d in range(curved_setup.trunc):
        assert diff.homogeneous(d).is_zero()
    # the characteristic form is closed
    assert got.d_x().is_zero()


def test_non_abelian_r_rejected(curved_setup):
    bogus = curved_setup.r + WeylForm.y_monomial(
        curved_setup.sym, curved_setup.trunc, (0, 2), J=(0,), h_power=1
    )
    with pytest.raises(NotAbelianError):
        curved_setup.weyl_curvature(bogus)


def test_alpha_validation(sym2, flat2):
    not_closed = WeylForm.omega_form(sym2, 8) + WeylForm.two_form(
        sym2, 8, {(1, 0, 1): parse_poly("x1", sym2.roster)}
    )
    # on R^2 every 2-form is closed; break closedness on R^4 instead
    with pytest.raises(ValueError):
        FedosovSetup(flat2, WeylForm.two_form(sym2, 8, {(1, 0, 1): Poly.const(sym2.roster, 1)}), trunc=8)


def test_alpha_closedness_on_r4(sym4):
    flat4 = ConnectionFamily(sym4)
    bad = WeylForm.omega_form(sym4, 8) + WeylForm.two_form(
        sym4, 8, {(1, 0, 1): parse_poly("x3", sym4.roster)}
    )
    with pytest.raises(ValueError):
        FedosovSetup(flat4, bad, trunc=8)
    good = WeylForm.omega_form(sym4, 8) + WeylForm.two_form(
        sym4, 8, {(1, 0, 1): parse_poly("x1", sym4.roster)}
    )
    FedosovSetup(flat4, good, trunc=6)


def test_tau_flat_taylor_oracle(sym2, flat2):
    setup = FedosovSetup(flat2, None, trunc=8)
    f = parse_poly("x1^3*x2 - 2*x2^2 + x1", sym2.roster)
    assert setup.tau(f) == taylor_flat_section(sym2, f, 8)
    one = Poly.const(sym2.roster, 1)
    assert setup.tau(one) == WeylForm.unit(sym2, 8)


def test_tau_flatness_curved(curved_setup):
    rng = random.Random(1)
    for _ in range(3):
        f = random_poly(curved_setup.sym.roster, rng, degree=3, terms=3)
        t = curved_setup.tau(f)
        assert t.center_part() == WeylForm.from_poly(curved_setup.sym, 8, f)
        defect = curved_setup.D_r(t)
        for d in range(curved_setup.trunc - 1):
            assert defect.homogeneous(d).is_zero()


def test_flat_star_is_moyal(sym2, flat2):
    setup = FedosovSetup(flat2, None, trunc=8)
    r = sym2.roster
    x1, x2 = parse_poly("x1", r), parse_poly("x2", r)
    assert setup.star(x1, x2, 3) == FormalFunction(r, 3, {0: x1 * x2, 1: Poly.const(r, I / 2)})
    assert setup.star(x2, x1, 3) == FormalFunction(r, 3, {0: x1 * x2, 1: Poly.const(r, -I / 2)})
    star = setup.extract_star(4)
    assert star.op == StarTruncation.moyal(sym2, 4).op


def test_extracted_star_axioms(curved_setup):
    star = curved_setup.extract_star(3)
    rng = random.Random(2)
    for name, ok, wit in validate_star_axioms(star, curved_setup.sym, 2, rng=rng):
        assert ok, (name, wit)
    # naturality: differential order of the h^k layer is at most k
    for k in range(4):
        assert star.op.slot_order(k) <= k


def test_unit_and_poisson_conditions(curved_setup):
    star = curved_setup.extract_star(3)
    rng = random.Random(3)
    one = Poly.const(curved_setup.sym.roster, 1)
    for _ in range(5):
        f = random_poly(curved_setup.sym.roster, rng)
        assert star.apply(f, one) == FormalFunction.from_poly(f, 3)
        assert star.apply(one, f) == FormalFunction.from_poly(f, 3)
        g = random_poly(curved_setup.sym.roster, rng)
        c1 = star.coefficient(1)
        assert (c1.apply(f, g) - c1.apply(g, f)).coefficient(0) == \
            curved_setup.sym.poisson(f, g).scale(I)


def test_associativity_randomized(curved_setup):
    star = curved_setup.extract_star(3)
    basis = monomials_up_to(curved_setup.sym.roster, 3)
    rng = random.Random(4)
    for _ in range(20):
        f, g, k = (rng.choice(basis) for _ in range(3))
        assert star.apply(star.apply(f, g), k) == star.apply(f, star.apply(g, k))


def test_star_needs_enough_truncation(curved_setup):
    with pytest.raises(ValueError):
        curved_setup.star(Poly.const(curved_setup.sym.roster, 1),
                          Poly.const(curved_setup.sym.roster, 1), order=7)


def test_projection_of_flat_sections(curved_setup):
    # tau(f) - f lies entirely in positive fiber degree, so p(tau(f)) = f
    rng = random.Random(5)
    for _ in range(3):
        f = random_poly(curved_setup.sym.roster, rng, degree=3, terms=3)
        proj = curved_setup.tau(f).project_function(3)
        assert proj == FormalFunction.from_poly(f, 3)
