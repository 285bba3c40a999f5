import random
from fractions import Fraction

import pytest

from fedconn.scalars import Scalar, I
from fedconn.polynomials import Poly, FormalFunction, parse_poly, x_roster, monomials_up_to
from fedconn.multidiff import (
    MultiDiffOp, StarTruncation, gerstenhaber, hochschild_d, materialize,
    is_derivation, inner_potential, operator_from_callable,
)
from fedconn.properties import random_multidiffop, random_poly, cochain_battery

R2 = x_roster(2)
Z = (0, 0)


def d_op(a, coeff=1, h=0, order=4):
    return MultiDiffOp(R2, 1, order, {(h, (a,)): Poly.const(R2, coeff)})


def test_pointwise_self_bracket_vanishes():
    m0 = StarTruncation.pointwise(R2, 4)
    br = gerstenhaber(m0, m0)
    f, g, k = parse_poly("x1^2", R2), parse_poly("x2", R2), parse_poly("x1*x2", R2)
    assert br.apply(f, g, k).is_zero()


def test_bracket_commutator_specialization():
    psi = d_op((1, 0))
    phi = MultiDiffOp(R2, 1, 4, {(0, (Z,)): parse_poly("x1", R2)})
    br = materialize(gerstenhaber(psi, phi), R2)
    assert br == MultiDiffOp.identity(R2, 4)
    # arity-1 brackets are plain commutators
    assert br == psi.compose(phi) - phi.compose(psi)


def test_graded_jacobi_and_antisymmetry(sym2):
    rng = random.Random(1)
    results = cochain_battery(sym2, 3, rng, count=8)
    for name, ok, wit in results:
        assert ok, (name, wit)


def test_hochschild_formula():
    m0 = StarTruncation.pointwise(R2, 4)
    phi = MultiDiffOp(R2, 1, 4, {(0, ((1, 1),)): parse_poly("x2", R2)})
    dh = hochschild_d(phi, m0)
    f, g = parse_poly("x1^2*x2", R2), parse_poly("x2^3 - x1", R2)
    lhs = dh.apply(f, g)
    rhs = (
        FormalFunction.from_poly(f, 4) * phi.apply(g)
        + phi.apply(f) * FormalFunction.from_poly(g, 4)
        - phi.apply(f * g)
    )
    assert lhs == rhs


def test_hochschild_square_zero(sym2):
    star = StarTruncation.moyal(sym2, 4)
    rng = random.Random(2)
    basis = monomials_up_to(R2, 2)
    for _ in range(6):
        phi = random_multidiffop(R2, rng, 1, 4)
        ddphi = gerstenhaber(star, gerstenhaber(star, phi))
        args = [rng.choice(basis) for _ in range(3)]
        assert ddphi.apply(*args).is_zero()


def test_inner_derivations_are_derivations(sym2):
    star = StarTruncation.moyal(sym2, 4)
    b = FormalFunction.from_poly(parse_poly("x1", R2), 4, h_power=1)
    B = star.ad_over_h(b)
    # (1/h) ad(h x1) acts at lowest order as i d/dx2
    assert B.h_coefficient(1) == d_op((0, 1), coeff=I, order=0)
    ok, wit = is_derivation(B, star, basis_degree=3)
    assert ok, wit
    ok, wit = is_derivation(MultiDiffOp.zero(R2, 1, 4), star, basis_degree=2)
    assert ok


def test_multiplication_operator_fails_with_witness(sym2):
    star = StarTruncation.moyal(sym2, 4)
    B = MultiDiffOp(R2, 1, 4, {(1, (Z,)): parse_poly("x1", R2)})
    ok, wit = is_derivation(B, star, basis_degree=2)
    assert not ok
    assert "h^1" in wit


def test_inner_potential_examples(sym2):
    star = StarTruncation.moyal(sym2, 4)
    B = star.ad_over_h(FormalFunction.from_poly(parse_poly("x1", R2), 4, h_power=1))
    b = inner_potential(B, star)
    assert b.coefficient(1) == parse_poly("x1", R2)
    assert inner_potential(MultiDiffOp.zero(R2, 1, 4), star).is_zero()


def test_inner_potential_round_trip(sym2):
    star = StarTruncation.moyal(sym2, 4)
    rng = random.Random(3)
    for _ in range(5):
        coeffs = {}
        for k in range(1, 4):
            p = random_poly(R2, rng, degree=3, terms=2)
            coeffs[k] = p - Poly.const(R2, p.constant_coefficient())
        b = FormalFunction(R2, 4, coeffs)
        B = star.ad_over_h(b)
        back = inner_potential(B, star)
        for k in range(1, 4):
            assert back.coefficient(k) == b.coefficient(k)


def test_inner_potential_rejects_non_derivation(sym2):
    star = StarTruncation.moyal(sym2, 4)
    B = MultiDiffOp(R2, 1, 4, {(1, ((2, 0),)): Poly.const(R2, 1)})
    with pytest.raises(ValueError):
        inner_potential(B, star)


def test_evaluation_completeness():
    rng = random.Random(4)
    for arity in (1, 2):
        op = random_multidiffop(R2, rng, arity, 2, slot_degree=2, terms=4)
        rebuilt = operator_from_callable(
            op.apply, R2, arity, 2, lambda k, op=op: op.slot_order()
        )
        assert rebuilt == op


def test_compose_and_leibniz():
    p = MultiDiffOp(R2, 1, 4, {(0, ((2, 0),)): parse_poly("x2", R2)})
    q = MultiDiffOp(R2, 1, 4, {(0, ((0, 1),)): parse_poly("x1", R2)})
    f = parse_poly("x1^2*x2^2", R2)
    assert p.compose(q).apply(f) == p.apply(q.apply(f).coefficient(0))
    comm = p.commutator(q)
    assert comm.apply(f) == p.apply(q.apply(f).coefficient(0)) - q.apply(p.apply(f).coefficient(0))


def test_partial_apply(sym2):
    star = StarTruncation.moyal(sym2, 3)
    b = parse_poly("x1^2", R2)
    left = star.op.partial_apply(0, b)
    f = parse_poly("x2^2", R2)
    assert left.apply(f) == star.apply(b, f)


def test_operator_serialization_golden():
    op = MultiDiffOp(R2, 2, 2, {
        (1, ((1, 0), (0, 1))): parse_poly("1/2*x1", R2),
        (0, (Z, Z)): Poly.const(R2, 1),
    })
    assert op.serialize() == "\n".join([
        "h^0 * 1 * D[(0,0),(0,0)]",
        "h^1 * 1/2*x1 * D[(1,0),(0,1)]",
    ])


def test_moyal_matches_pointwise_at_h0(sym2):
    star = StarTruncation.moyal(sym2, 3)
    assert star.coefficient(0).apply(parse_poly("x1", R2), parse_poly("x2", R2)).coefficient(0) \
        == parse_poly("x1*x2", R2)


def test_inner_potential_rejects_non_symplectic_field(sym2):
    star = StarTruncation.moyal(sym2, 4)
    # h x1 d/dx1 is a vector field, but i_X omega is not closed
    B = MultiDiffOp(R2, 1, 4, {(1, ((1, 0),)): parse_poly("x1", R2)})
    with pytest.raises(ValueError, match="not symplectic|not closed"):
        inner_potential(B, star)
