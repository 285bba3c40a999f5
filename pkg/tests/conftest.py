import itertools

import pytest

from fedconn import (
    SymplecticData, ConnectionFamily, FedosovSetup, FamilyContext,
    Poly, WeylForm, parse_poly,
    trivialize_alpha, solve_s, connection_form,
)


def connection_from_T(sym, T):
    """Gamma^k_ij = pi^{kl} T_lij for a totally symmetric T given sparsely."""
    full = {}
    for (l, i, j), p in T.items():
        for perm in set(itertools.permutations((l, i, j))):
            full[perm] = p
    gamma = {}
    n = sym.dim
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = Poly.zero(sym.roster)
                for l in range(n):
                    v = sym.pi[k][l]
                    if not v.is_zero() and (l, i, j) in full:
                        acc = acc + full[(l, i, j)].scale(v)
                if not acc.is_zero():
                    gamma[(k, i, j)] = acc
    return ConnectionFamily(sym, gamma)


class FamilyBundle:
    """A family with its trivialization, s-forms and connection form, built once."""

    def __init__(self, family):
        self.family = family
        self.beta = trivialize_alpha(family)
        self.s = {p: solve_s(family, self.beta, p) for p in family.params}
        self.A = connection_form(family, self.s)


@pytest.fixture(scope="session")
def sym2():
    return SymplecticData([[0, -1], [1, 0]])


@pytest.fixture(scope="session")
def sym4():
    return SymplecticData([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])


@pytest.fixture(scope="session")
def flat2(sym2):
    return ConnectionFamily(sym2)


@pytest.fixture(scope="session")
def curved_setup(sym2):
    """Curved R^2 setup: degree-1 Christoffels, h^1 and h^2 perturbation."""
    r = sym2.roster
    conn = connection_from_T(sym2, {(0, 0, 0): parse_poly("x2", r), (0, 0, 1): Poly.const(r, 1)})
    alpha = (
        WeylForm.omega_form(sym2, 8)
        + WeylForm.two_form(sym2, 8, {(1, 0, 1): parse_poly("x1", r)})
        + WeylForm.two_form(sym2, 8, {(2, 0, 1): Poly.const(r, 2)})
    )
    return FedosovSetup(conn, alpha, trunc=8)


@pytest.fixture(scope="session")
def bundle_f1(sym2, flat2):
    """Flat connection, alpha = omega + h t1 dx1^dx2: the running R^2 family."""
    alpha = WeylForm.omega_form(sym2, 8) + WeylForm.two_form(
        sym2, 8, {(1, 0, 1): parse_poly("t1", sym2.roster)}
    )
    return FamilyBundle(FamilyContext(flat2, alpha, ["t1"], trunc=8, order=3))


@pytest.fixture(scope="session")
def bundle_f2(sym2):
    """Curved t-dependent connection with h^1 + h^2 perturbation."""
    r = sym2.roster
    conn = connection_from_T(
        sym2, {(0, 0, 0): parse_poly("t1*x2", r), (0, 0, 1): parse_poly("t1", r)}
    )
    alpha = (
        WeylForm.omega_form(sym2, 8)
        + WeylForm.two_form(sym2, 8, {(1, 0, 1): parse_poly("(1+t1)*x1", r)})
        + WeylForm.two_form(sym2, 8, {(2, 0, 1): parse_poly("t1^2", r)})
    )
    return FamilyBundle(FamilyContext(conn, alpha, ["t1"], trunc=8, order=3))


@pytest.fixture(scope="session")
def bundle_f3(sym2):
    """Two-parameter family mixing connection and form dependence."""
    r = sym2.roster
    conn = connection_from_T(sym2, {(0, 0, 0): parse_poly("t2*x2", r)})
    alpha = (
        WeylForm.omega_form(sym2, 8)
        + WeylForm.two_form(sym2, 8, {(1, 0, 1): parse_poly("t1*x1 + t2*x2", r)})
        + WeylForm.two_form(sym2, 8, {(2, 0, 1): parse_poly("t1*t2", r)})
    )
    return FamilyBundle(FamilyContext(conn, alpha, ["t1", "t2"], trunc=8, order=3))
