"""Formal multidifferential operators as Hochschild cochains.

A MultiDiffOp of arity m is a finite sum of terms

    h^k * c(x) * (d^{a_1} (x) ... (x) d^{a_m})

acting on m functions; ``apply`` extends multilinearly over h so arguments may
be Polys or FormalFunctions.  Term tables are canonical, so structural
equality is exact; nevertheless equality of operators is *decided* by
evaluation on a monomial basis (complete once the basis degree reaches the
differential order), and brackets are built that way too.

The Gerstenhaber bracket follows the double-sum sign rule: for psi of arity
r+1 and phi of arity s+1,

    [psi, phi](a_0..a_{r+s}) =
        sum_{i=0..r} (-1)^{is} psi(.., phi(a_i..a_{i+s}), ..)
      - (-1)^{rs} sum_{j=0..s} (-1)^{jr} phi(.., psi(a_j..a_{j+r}), ..)

and the Hochschild differential of a star truncation m is d_H(phi) = [m, phi].
"""

from __future__ import annotations

import math
from fractions import Fraction

from .scalars import Scalar, ONE, I
from .polynomials import (
    Poly, ParamRational, PR_ONE, FormalFunction, monomials_up_to, merge_rosters,
)


def _falling(a, b):
    """Scalar factor of d^b applied to x^a (0 when b exceeds a somewhere)."""
    out = 1
    for ea, eb in zip(a, b):
        if eb > ea:
            return 0
        out *= math.factorial(ea) // math.factorial(ea - eb)
    return out


class MultiDiffOp:
    """Explicit h-graded multidifferential operator."""

    __slots__ = ("roster", "arity", "order", "terms")

    def __init__(self, roster, arity: int, order: int, terms=None):
        self.roster = tuple(roster)
        self.arity = arity
        self.order = order  # h-truncation: terms with h-power <= order are kept
        self.terms = {}
        if terms:
            for (k, slots), c in terms.items():
                if k > order or c.is_zero():
                    continue
                self.terms[(k, tuple(tuple(s) for s in slots))] = c

    # -- constructors ------------------------------------------------------------

    @staticmethod
    def zero(roster, arity, order) -> "MultiDiffOp":
        return MultiDiffOp(roster, arity, order)

    @staticmethod
    def identity(roster, order) -> "MultiDiffOp":
        roster = tuple(roster)
        z = (0,) * len(roster)
        return MultiDiffOp(roster, 1, order, {(0, (z,)): Poly.const(roster, 1)})

    @staticmethod
    def from_terms(roster, arity, order, terms) -> "MultiDiffOp":
        return MultiDiffOp(roster, arity, order, terms)

    # -- inspection ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def h_coefficient(self, k: int) -> "MultiDiffOp":
        """The h^k layer as an operator concentrated at h-power 0."""
        out = {}
        for (kk, slots), c in self.terms.items():
            if kk == k:
                out[(0, slots)] = c
        return MultiDiffOp(self.roster, self.arity, 0, out)

    def h_support(self):
        return sorted({k for (k, _) in self.terms})

    def is_O_h(self) -> bool:
        return all(k >= 1 for (k, _) in self.terms)

    def slot_order(self, k=None) -> int:
        orders = [
            max(sum(s) for s in slots)
            for (kk, slots) in self.terms
            if k is None or kk == k
        ]
        return max(orders, default=0)

    def first_order_part(self, k: int):
        """(vector field components, leftover) of the h^k layer of an arity-1 op."""
        if self.arity != 1:
            raise ValueError("first_order_part needs an arity-1 operator")
        n = len(self.roster)
        comps = [Poly.zero(self.roster) for _ in range(n)]
        leftover = {}
        for (kk, slots), c in self.terms.items():
            if kk != k:
                continue
            (a,) = slots
            if sum(a) == 1:
                comps[a.index(1)] = comps[a.index(1)] + c
            else:
                leftover[(0, slots)] = c
        return tuple(comps), MultiDiffOp(self.roster, 1, 0, leftover)

    # -- linear structure -------------------------------------------------------------

    def __add__(self, other: "MultiDiffOp") -> "MultiDiffOp":
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        order = min(self.order, other.order)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
        return MultiDiffOp(merge_rosters(self.roster, other.roster), self.arity, order, out)

    def __neg__(self):
        return MultiDiffOp(self.roster, self.arity, self.order,
                           {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value) -> "MultiDiffOp":
        c = ParamRational.of(value)
        return MultiDiffOp(self.roster, self.arity, self.order,
                           {k: p.scale(c) for k, p in self.terms.items()})

    def shift_h(self, j: int) -> "MultiDiffOp":
        out = {}
        for (k, slots), c in self.terms.items():
            if k + j < 0:
                raise ValueError("h-division leaves a remainder")
            out[(k + j, slots)] = c
        return MultiDiffOp(self.roster, self.arity, self.order + j, out)

    def truncate(self, order: int) -> "MultiDiffOp":
        return MultiDiffOp(self.roster, self.arity, min(self.order, order), self.terms)

    def t_derivative(self, name: str) -> "MultiDiffOp":
        out = {}
        for key, c in self.terms.items():
            d = c.differentiate(name)
            if not d.is_zero():
                out[key] = d
        return MultiDiffOp(self.roster, self.arity, self.order, out)

    def subs_params(self, values: dict) -> "MultiDiffOp":
        out = {}
        for key, c in self.terms.items():
            v = c.subs_params(values)
            if not v.is_zero():
                out[key] = v
        return MultiDiffOp(self.roster, self.arity, self.order, out)

    def __eq__(self, other):
        if not isinstance(other, MultiDiffOp):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    # -- action ----------------------------------------------------------------------

    def apply(self, *args) -> FormalFunction:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        ffs = []
        order = self.order
        for a in args:
            if isinstance(a, Poly):
                a = FormalFunction.from_poly(a.with_roster(self.roster), order)
            order = min(order, a.order)
            ffs.append(a)
        out = FormalFunction(self.roster, order, {})
        for (k, slots), c in self.terms.items():
            if k > order:
                continue
            pieces = [c]
            for s, arg in zip(slots, ffs):
                derived = {kk: p.deriv_multi(s) for kk, p in arg.coeffs.items()}
                pieces.append(FormalFunction(self.roster, arg.order, derived))
            acc = FormalFunction.from_poly(pieces[0], order)
            for piece in pieces[1:]:
                acc = acc * piece
            out = out + acc.shift_h(k).truncate(order)
        return out.truncate(order)

    def __call__(self, *args):
        return self.apply(*args)

    # -- composition (arity 1) ----------------------------------------------------------

    def compose(self, other: "MultiDiffOp") -> "MultiDiffOp":
        """self after other, both arity 1, by the Leibniz expansion."""
        if self.arity != 1 or other.arity != 1:
            raise ValueError("compose needs arity-1 operators")
        order = min(self.order, other.order)
        roster = merge_rosters(self.roster, other.roster)
        out = {}
        for (k1, (a,)), p in self.terms.items():
            for (k2, (b,)), q in other.terms.items():
                k = k1 + k2
                if k > order:
                    continue
                # d^a (q * d^b f) = sum_{e <= a} C(a, e) d^{a-e} q * d^{b+e} f
                for e in _sub_multiindices(a):
                    binom = 1
                    for ea, ee in zip(a, e):
                        binom *= math.comb(ea, ee)
                    dq = q.with_roster(roster).deriv_multi(tuple(x - y for x, y in zip(a, e)))
                    if dq.is_zero():
                        continue
                    coeff = p.with_roster(roster) * dq
                    if binom != 1:
                        coeff = coeff.scale(binom)
                    key = (k, (tuple(x + y for x, y in zip(b, e)),))
                    s = out.get(key)
                    if s is None:
                        out[key] = coeff
                    else:
                        s = s + coeff
                        if s.is_zero():
                            del out[key]
                        else:
                            out[key] = s
        return MultiDiffOp(roster, 1, order, out)

    def commutator(self, other: "MultiDiffOp") -> "MultiDiffOp":
        return self.compose(other) - other.compose(self)

    def partial_apply(self, slot: int, value) -> "MultiDiffOp":
        """Freeze one argument slot at a fixed Poly or FormalFunction."""
        if isinstance(value, Poly):
            value = FormalFunction.from_poly(value.with_roster(self.roster), self.order)
        out = {}
        order = min(self.order, value.order)
        for (k, slots), c in self.terms.items():
            a = slots[slot]
            rest = slots[:slot] + slots[slot + 1:]
            for kv, p in value.coeffs.items():
                if k + kv > order:
                    continue
                dp = p.deriv_multi(a)
                if dp.is_zero():
                    continue
                key = (k + kv, rest)
                add = c * dp
                s = out.get(key)
                if s is None:
                    out[key] = add
                else:
                    s = s + add
                    if s.is_zero():
                        del out[key]
                    else:
                        out[key] = s
        return MultiDiffOp(self.roster, self.arity - 1, order, out)

    # -- printing -----------------------------------------------------------------------

    def serialize(self) -> str:
        lines = []
        for (k, slots) in sorted(self.terms):
            c = self.terms[(k, slots)]
            body = str(c)
            if len(c.terms) > 1:
                body = f"({body})"
            ds = ",".join("(" + ",".join(str(e) for e in s) + ")" for s in slots)
            lines.append(f"h^{k} * {body} * D[{ds}]")
        return "\n".join(lines) if lines else "0"

    def __str__(self):
        return self.serialize().replace("\n", "  +  ")

    def __repr__(self):
        return f"MultiDiffOp(arity={self.arity}, order={self.order}: {self})"


def _sub_multiindices(a):
    if not a:
        yield ()
        return
    head = a[0]
    for rest in _sub_multiindices(a[1:]):
        for e in range(head + 1):
            yield (e,) + rest


# ---------------------------------------------------------------------------
# reconstruction of operators from their action on monomials
# ---------------------------------------------------------------------------

def operator_from_values(roster, arity, order, slot_bound, values) -> MultiDiffOp:
    """Triangular solve: values maps tuples of exponent keys to FormalFunctions.

    ``slot_bound(k)`` bounds the differential order of the h^k layer; values
    must cover all argument tuples of monomials with degree <= max bound.
    The subtraction step enumerates componentwise sub-multi-indices directly,
    which keeps the solve fast on larger bases.
    """
    import itertools
    roster = tuple(roster)
    bounds = [slot_bound(k) for k in range(order + 1)]
    terms = {}
    for k in range(order + 1):
        d = bounds[k]
        keys = [tuple(key) for key in _exponent_keys(len(roster), d)]
        solved = {}
        for A in sorted(_tuples_of(keys, arity), key=lambda tt: sum(sum(s) for s in tt)):
            val = values[A].coefficient(k)
            for B in itertools.product(*(list(_sub_multiindices(a)) for a in A)):
                if B == A:
                    continue
                DB = solved.get(B)
                if DB is None:
                    continue
                factor = 1
                mono = []
                for a, b in zip(A, B):
                    factor *= _falling(a, b)
                    mono.append(tuple(ea - eb for ea, eb in zip(a, b)))
                total = tuple(sum(col) for col in zip(*mono))
                val = val - (DB * Poly.monomial(roster, total, factor))
            fact = 1
            for a in A:
                for e in a:
                    fact *= math.factorial(e)
            D = val.scale(Fraction(1, fact)) if fact != 1 else val
            if not D.is_zero():
                solved[A] = D
        for A, D in solved.items():
            terms[(k, A)] = D
    return MultiDiffOp(roster, arity, order, terms)


def _exponent_keys(n, degree):
    def gen(rest, budget):
        if rest == 1:
            for e in range(budget + 1):
                yield (e,)
            return
        for e in range(budget + 1):
            for tail in gen(rest - 1, budget - e):
                yield (e,) + tail
    return sorted(gen(n, degree), key=lambda m: (sum(m), m))


def _tuples_of(keys, arity):
    if arity == 1:
        for a in keys:
            yield (a,)
        return
    for rest in _tuples_of(keys, arity - 1):
        for a in keys:
            yield (a,) + rest


def operator_from_callable(fn, roster, arity, order, slot_bound) -> MultiDiffOp:
    """Materialize an operator from an evaluation callable.

    The reconstruction is verified on a handful of extra monomials one degree
    past the declared bound, so an understated bound fails loudly instead of
    silently producing the wrong operator.
    """
    roster = tuple(roster)
    bound = max(slot_bound(k) for k in range(order + 1))
    keys = [tuple(k) for k in _exponent_keys(len(roster), bound)]
    values = {}
    for A in _tuples_of(keys, arity):
        args = [Poly.monomial(roster, a) for a in A]
        values[A] = fn(*args)
    op = operator_from_values(roster, arity, order, slot_bound, values)
    probe = _exponent_keys(len(roster), bound + 1)[-len(roster):]
    for a in probe:
        args = [Poly.monomial(roster, a)] * arity
        if op.apply(*args) != fn(*args):
            raise AssertionError("operator reconstruction bound was too small")
    return op


# ---------------------------------------------------------------------------
# star truncations
# ---------------------------------------------------------------------------

class StarTruncation:
    """A star product to order K: arity-2 h-graded operator with c^0 = product."""

    def __init__(self, op: MultiDiffOp, setup=None, symplectic=None):
        if op.arity != 2:
            raise ValueError("a star truncation is an arity-2 operator")
        self.op = op
        self.order = op.order
        self.setup = setup
        self.symplectic = symplectic if symplectic is not None else getattr(setup, "sym", None)

    @staticmethod
    def pointwise(roster, order) -> "StarTruncation":
        roster = tuple(roster)
        z = (0,) * len(roster)
        op = MultiDiffOp(roster, 2, order, {(0, (z, z)): Poly.const(roster, 1)})
        return StarTruncation(op)

    @staticmethod
    def moyal(sym, order: int) -> "StarTruncation":
        """Closed-form Moyal coefficients c^k = (i/2)^k/k! pi^{..} d^k f d^k g.

        Built directly from the contraction recurrence on derivative
        multi-indices; independent of the Weyl-bundle machinery.
        """
        roster = sym.roster
        n = sym.dim
        zero = (0,) * n
        terms = {}
        state = {(zero, zero): ONE}
        for k in range(order + 1):
            w_k = sym.moyal_factor(k)
            for (g1, g2), w in state.items():
                c = w * w_k
                if not c.is_zero():
                    terms[(k, (g1, g2))] = Poly.const(roster, c)
            if k == order:
                break
            nxt = {}
            for (g1, g2), w in state.items():
                for (i, j, v) in sym._pi_entries:
                    key = (
                        g1[:i] + (g1[i] + 1,) + g1[i + 1:],
                        g2[:j] + (g2[j] + 1,) + g2[j + 1:],
                    )
                    s = nxt.get(key)
                    add = w * v
                    nxt[key] = add if s is None else s + add
            state = {k2: v for k2, v in nxt.items() if not v.is_zero()}
        op = MultiDiffOp(roster, 2, order, terms)
        return StarTruncation(op, symplectic=sym)

    @property
    def roster(self):
        return self.op.roster

    def coefficient(self, k: int) -> MultiDiffOp:
        return self.op.h_coefficient(k)

    def apply(self, f, g) -> FormalFunction:
        return self.op.apply(f, g)

    def __call__(self, f, g):
        return self.op.apply(f, g)

    def variation(self, name: str) -> MultiDiffOp:
        """Coefficientwise t-derivative: the arity-2 cochain V[star]."""
        return self.op.t_derivative(name)

    def subs_params(self, values: dict) -> "StarTruncation":
        return StarTruncation(self.op.subs_params(values), setup=self.setup)

    def ad_over_h(self, b) -> MultiDiffOp:
        """(1/h) ad_star(b) as an arity-1 operator (order drops by one)."""
        left = self.op.partial_apply(0, b)
        right = self.op.partial_apply(1, b)
        return (left - right).shift_h(-1)

    def slot_order(self) -> int:
        return self.op.slot_order()

    def left_unital(self, f) -> bool:
        one = Poly.const(self.roster, 1)
        return self.apply(one, f) == FormalFunction.from_poly(f, self.order)


# ---------------------------------------------------------------------------
# Gerstenhaber bracket and the Hochschild differential
# ---------------------------------------------------------------------------

class Cochain:
    """A lazily evaluated multilinear cochain (for nested brackets)."""

    def __init__(self, arity: int, fn, order: int, slot_bound=None):
        self.arity = arity
        self.fn = fn
        self.order = order
        self.slot_bound = slot_bound

    def apply(self, *args):
        return self.fn(*args)

    def __call__(self, *args):
        return self.fn(*args)


def _as_cochain(op):
    if isinstance(op, StarTruncation):
        return Cochain(2, op.apply, op.order, lambda k: op.op.slot_order())
    if isinstance(op, MultiDiffOp):
        return Cochain(op.arity, op.apply, op.order, lambda k: op.slot_order())
    if isinstance(op, Cochain):
        return op
    raise TypeError(f"not a cochain: {op!r}")


def gerstenhaber(psi, phi) -> Cochain:
    """The Gerstenhaber bracket [psi, phi]_G as a lazy cochain."""
    psi = _as_cochain(psi)
    phi = _as_cochain(phi)
    r = psi.arity - 1
    s = phi.arity - 1
    arity = r + s + 1
    order = min(psi.order, phi.order)

    def apply(*args):
        if len(args) != arity:
            raise ValueError(f"expected {arity} arguments")
        out = None
        for i in range(r + 1):
            inner = phi(*args[i:i + s + 1])
            term = psi(*args[:i], inner, *args[i + s + 1:])
            if i * s % 2:
                term = -term
            out = term if out is None else out + term
        for j in range(s + 1):
            inner = psi(*args[j:j + r + 1])
            term = phi(*args[:j], inner, *args[j + r + 1:])
            if (r * s + j * r) % 2:
                term = -term
            out = out - term
        return out.truncate(order)

    bound = None
    if psi.slot_bound and phi.slot_bound:
        bound = lambda k: psi.slot_bound(k) + phi.slot_bound(k)
    return Cochain(arity, apply, order, bound)


def hochschild_d(phi, star: StarTruncation) -> Cochain:
    """d_H(phi) = [star, phi]_G relative to the (truncated) star product."""
    return gerstenhaber(star, phi)


def materialize(cochain: Cochain, roster, slot_bound=None) -> MultiDiffOp:
    bound = slot_bound or cochain.slot_bound
    if bound is None:
        raise ValueError("no differential-order bound available for materialization")
    return operator_from_callable(cochain.apply, roster, cochain.arity, cochain.order, bound)


def is_derivation(B, star: StarTruncation, basis_degree=None):
    """(ok, witness): whether d_H B = 0 mod h^{K+1} on the monomial basis."""
    B = _as_cochain(B)
    if basis_degree is None:
        basis_degree = star.slot_order() + (B.slot_bound(0) if B.slot_bound else star.order)
    basis = monomials_up_to(star.roster, basis_degree)
    for f in basis:
        for g in basis:
            lhs = star.apply(B(f), g) + star.apply(f, B(g)) - B(star.apply(f, g))
            if not lhs.is_zero():
                k = min(k for k in lhs.coeffs)
                return False, f"d_H B ({f}, {g}) has h^{k} coefficient {lhs.coefficient(k)}"
    return True, None


def inner_potential(B: MultiDiffOp, star: StarTruncation) -> FormalFunction:
    """Recover b with (1/h) ad_star(b) = B mod h^K, normalized by b_k(0) = 0.

    Works order by order: the h^k residual must be a vector field, which is
    checked to be symplectic and then integrated to a Hamiltonian.
    """
    sym = star.symplectic
    if sym is None:
        raise ValueError("star truncation carries no symplectic data")
    if B.arity != 1:
        raise ValueError("inner_potential needs an arity-1 operator")
    if not B.is_O_h():
        raise ValueError("a formal-series derivation must vanish at h^0")
    roster = star.roster
    K = star.order
    b = FormalFunction(roster, K, {})
    residual = B
    for k in range(1, K):
        comps, leftover = residual.first_order_part(k)
        if not leftover.is_zero():
            raise ValueError(
                f"not a derivation / not symplectic at order h^{k}: "
                f"residual is not a vector field ({leftover})"
            )
        if all(c.is_zero() for c in comps):
            continue
        # residual_k = i {b_k, .}  -->  grad b_k = i * omega * X
        eta = [p.scale(I) for p in sym.gradient_of_potential(comps)]
        try:
            bk = sym.potential_of_gradient(eta)
        except ValueError as exc:
            raise ValueError(f"not a derivation / not symplectic at order h^{k}: {exc}") from None
        b = b + FormalFunction.from_poly(bk, K, h_power=k)
        residual = B - star.ad_over_h(b)
    return b
