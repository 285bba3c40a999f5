"""Parallel transport of formal connections and gauge equivalence.

Transport along a coordinate axis solves dPhi/dt = -A(d/dt) o Phi order by
order in h; each order is an explicit antiderivative of polynomial data since
A = O(h), so Phi = id + sum_l Phi_l h^l stays exact.

Gauge equivalence of two flat compatible connections over a star-shaped
parameter space is built by the induction

    B_{l+1}(V) h^{l+1} = V[P^{(l)}] - (P^{(l)} A'(V) - A(V) P^{(l)})  mod h^{l+2},

checking that the operator-valued 1-form B_{l+1} is closed (this is where
flatness enters) and integrating it with the Poincare homotopy on R^m.
"""

from __future__ import annotations

from fractions import Fraction

from .polynomials import Poly, ParamRational, ParamPoly, PP_ONE, mono_degree, monomials_up_to
from .multidiff import MultiDiffOp, StarTruncation
from .families import FamilyContext, ConnectionOneForm


class GaugeError(ValueError):
    """The gauge induction hit a non-closed defect: flatness hypothesis failed."""


def _op_t_antiderivative(op: MultiDiffOp, name: str) -> MultiDiffOp:
    out = {}
    for key, c in op.terms.items():
        out[key] = c.antiderivative(name)
    return MultiDiffOp(op.roster, op.arity, op.order, out)


def parallel_transport(family: FamilyContext, A: ConnectionOneForm, axis: str,
                       freeze: dict = None, order: int = None) -> MultiDiffOp:
    """Phi(t) = id + sum Phi_l h^l with dPhi/dt = -A(d/dt) o Phi, Phi(0) = id.

    Other parameters are frozen (default 0); the result depends on the axis
    variable only, polynomially.
    """
    K = order if order is not None else family.order
    values = dict(freeze or {})
    for p in family.params:
        if p != axis:
            values.setdefault(p, 0)
    Aj = A[axis].subs_params(values)
    if not Aj.is_O_h():
        raise ValueError("transport needs a connection form with A = 0 mod h")
    roster = family.sym.roster
    layers = {0: MultiDiffOp.identity(roster, 0)}
    a_layers = {k: Aj.h_coefficient(k) for k in range(1, K + 1)}
    for l in range(1, K + 1):
        rhs = MultiDiffOp.zero(roster, 1, 0)
        for k in range(1, l + 1):
            rhs = rhs + a_layers[k].compose(layers[l - k])
        layers[l] = _op_t_antiderivative(-rhs, axis)
    phi = MultiDiffOp.zero(roster, 1, K)
    for l, op in layers.items():
        phi = phi + MultiDiffOp(roster, 1, K, {(l, slots): c for (_, slots), c in op.terms.items()})
    return phi


def invert(P: MultiDiffOp) -> MultiDiffOp:
    """Inverse of id + O(h) mod h^{K+1} by the geometric series."""
    if P.arity != 1:
        raise ValueError("invert needs an arity-1 operator")
    K = P.order
    ident = MultiDiffOp.identity(P.roster, K)
    Q = P - ident
    if not Q.is_O_h():
        raise ValueError("invert needs h^0 part equal to the identity")
    out = ident
    power = ident
    sign = 1
    for _ in range(1, K + 1):
        power = Q.compose(power)
        if power.is_zero():
            break
        sign = -sign
        out = out + (power if sign > 0 else -power)
    return out


def conjugation_check(family: FamilyContext, phi: MultiDiffOp, axis: str,
                      freeze: dict = None, basis_degree: int = 2):
    """star_t = Phi o star_0 o (Phi^{-1} (x) Phi^{-1}) on the basis; (ok, witness)."""
    values = dict(freeze or {})
    for p in family.params:
        if p != axis:
            values.setdefault(p, 0)
    star_t = family.star.subs_params(values)
    at_zero = dict(values)
    at_zero[axis] = 0
    star_0 = family.star.subs_params(at_zero)
    phi_inv = invert(phi)
    basis = monomials_up_to(family.sym.roster, basis_degree)
    for f in basis:
        for g in basis:
            lhs = star_t.apply(f, g)
            rhs = phi.apply(star_0.apply(phi_inv.apply(f), phi_inv.apply(g)))
            if lhs != rhs:
                return False, f"conjugation fails on ({f}, {g})"
    return True, None


def _t_poincare_oneform(coeffs: dict, params) -> Poly:
    """Potential of a closed 1-form on parameter space with Poly-in-x values.

    coeffs maps direction -> Poly; every coefficient must be polynomial in t.
    A monomial of t-degree m in the direction-j component contributes
    t_j * monomial / (m + 1).
    """
    roster = None
    acc_terms = {}
    for j, c in coeffs.items():
        roster = c.roster
        tj = ParamPoly.var(j)
        for exps, pr in c.terms.items():
            if not pr.is_polynomial():
                raise ValueError("gauge data must be polynomial in the parameters")
            for mono, z in pr.num.terms.items():
                m = mono_degree(mono)
                piece = ParamPoly({mono: z * Fraction(1, m + 1)}) * tj
                cur = acc_terms.get(exps)
                acc_terms[exps] = piece if cur is None else cur + piece
    out = {e: ParamRational(p, PP_ONE) for e, p in acc_terms.items() if not p.is_zero()}
    return Poly(roster, out)


def _op_oneform_potential(forms: dict, params, roster, arity=1) -> MultiDiffOp:
    """Integrate an operator-valued closed 1-form on R^m from the origin."""
    keys = set()
    for op in forms.values():
        keys |= set(op.terms)
    terms = {}
    for key in keys:
        coeffs = {j: forms[j].terms.get(key, Poly.zero(roster)) for j in forms}
        p = _t_poincare_oneform(coeffs, params)
        if not p.is_zero():
            terms[key] = p
    order = min(op.order for op in forms.values())
    return MultiDiffOp(roster, arity, order, terms)


def gauge_equivalence(family: FamilyContext, A: ConnectionOneForm, A2: ConnectionOneForm,
                      order: int = None) -> MultiDiffOp:
    """P = id + O(h) with V[P] = P A'(V) - A(V) P mod h^{K+1} (A' = A2).

    Requires both connections flat; for one parameter this is automatic, for
    more the closedness of each induction defect is exactly what flatness
    guarantees, and a non-closed defect raises GaugeError with its order.
    """
    K = order if order is not None else family.order
    roster = family.sym.roster
    params = family.params
    ident = MultiDiffOp.identity(roster, K)
    P = ident

    def defect(P):
        # V[P] - (P A'(V) - A(V) P), per direction
        return {
            p: P.t_derivative(p) - (P.compose(A2[p]) - A[p].compose(P))
            for p in params
        }

    for l in range(K):
        E = defect(P)
        for p in params:
            for k in range(l + 1):
                if not E[p].h_coefficient(k).is_zero():
                    raise AssertionError(
                        f"gauge induction lost its invariant at order h^{k}"
                    )
        B = {p: E[p].h_coefficient(l + 1) for p in params}
        if all(op.is_zero() for op in B.values()):
            continue
        # closedness of B is the flatness hypothesis
        for a in range(len(params)):
            for b in range(a + 1, len(params)):
                v, w = params[a], params[b]
                closed = B[w].t_derivative(v) - B[v].t_derivative(w)
                if not closed.is_zero():
                    raise GaugeError(
                        f"connections not flat / hypothesis violated at order h^{l+1}: "
                        f"d_T B({v},{w}) = {closed}"
                    )
        Pl = -_op_oneform_potential(B, params, roster)
        for p in params:
            if Pl.t_derivative(p) != -B[p]:
                raise GaugeError(
                    f"potential of the order-h^{l+1} defect failed; "
                    f"parameter space integration hypothesis violated"
                )
        P = P + MultiDiffOp(roster, 1, K,
                            {(l + 1, slots): c for (_, slots), c in Pl.terms.items()})
    E = defect(P)
    for p in params:
        if not E[p].is_zero():
            raise AssertionError("gauge equation fails below the truncation order")
    return P


def self_equivalence_check(family: FamilyContext, P: MultiDiffOp, basis_degree: int = 2):
    """P(f star_t g) = P(f) star_t P(g) mod h^{K+1} on the basis; (ok, witness)."""
    star = family.star
    basis = monomials_up_to(family.sym.roster, basis_degree)
    for f in basis:
        for g in basis:
            lhs = P.apply(star.apply(f, g))
            rhs = star.apply(P.apply(f), P.apply(g))
            if lhs != rhs:
                return False, f"self-equivalence fails on ({f}, {g})"
    return True, None


def flatness_check(family: FamilyContext, A: ConnectionOneForm):
    """Direct curvature V[A(W)] - W[A(V)] + [A(V), A(W)] must vanish; (ok, witness)."""
    params = family.params
    for a in range(len(params)):
        for b in range(a + 1, len(params)):
            v, w = params[a], params[b]
            F = A[w].t_derivative(v) - A[v].t_derivative(w) + A[v].commutator(A[w])
            if not F.is_zero():
                return False, f"curvature in directions ({v},{w}) is {F}"
    return True, None
