"""Truncated Weyl-algebra-valued differential forms on R^(2n).

A WeylForm is a finite sum of terms

    h^k * c(x) * y^alpha * dx^J

with c a Poly in the base variables, alpha a fiber multi-index, and J a
strictly increasing tuple of form indices.  The total degree of a term is
|alpha| + 2k (form indices do not count); every stored term satisfies
total degree <= the form's truncation bound, and binary operations truncate
to the minimum of the operands' bounds.

The fiberwise product is the Moyal-Weyl series

    a o b = sum_k (i*h/2)^k / k! * pi^{i1 j1} ... pi^{ik jk}
            * d^k a / dy^{i1}..dy^{ik} * d^k b / dy^{j1}..dy^{jk}

contracted with the Poisson matrix pi carried by the WeylContext; dx parts
multiply by wedge with the usual antisymmetry sign and no extra Koszul sign
against the fiber part.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, ZERO, ONE, I
from .polynomials import Poly, ParamRational, PR_ONE, x_roster


def invert_scalar_matrix(m):
    """Exact inverse of a square Scalar matrix (Gauss-Jordan)."""
    n = len(m)
    a = [[Scalar.of(m[r][c]) for c in range(n)] for r in range(n)]
    inv = [[ONE if r == c else ZERO for c in range(n)] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        a[col] = [v / d for v in a[col]]
        inv[col] = [v / d for v in inv[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return inv


class WeylContext:
    """Dimension, symplectic matrix omega, and its inverse pi with omega*pi = Id."""

    def __init__(self, omega):
        self.dim = len(omega)
        if self.dim % 2 or self.dim == 0:
            raise ValueError("dimension must be a positive even number")
        self.omega = tuple(tuple(Scalar.of(v) for v in row) for row in omega)
        for i in range(self.dim):
            for j in range(self.dim):
                if self.omega[i][j] != -self.omega[j][i]:
                    raise ValueError("omega must be antisymmetric")
        self.pi = tuple(tuple(v for v in row) for row in invert_scalar_matrix(self.omega))
        self.roster = x_roster(self.dim)
        self._pi_entries = [
            (i, j, self.pi[i][j])
            for i in range(self.dim)
            for j in range(self.dim)
            if not self.pi[i][j].is_zero()
        ]
        self._moyal_factor = [ONE]  # (i/2)^k / k!

    def moyal_factor(self, k: int) -> Scalar:
        while len(self._moyal_factor) <= k:
            n = len(self._moyal_factor)
            self._moyal_factor.append(self._moyal_factor[-1] * I * Scalar(Fraction(1, 2 * n)))
        return self._moyal_factor[k]

    def zero_poly(self) -> Poly:
        return Poly.zero(self.roster)

    def __eq__(self, other):
        return isinstance(other, WeylContext) and self.omega == other.omega

    def __hash__(self):
        return hash(self.omega)


def _wedge_sign(J1, J2) -> int:
    inv = 0
    for a in J1:
        for b in J2:
            if b < a:
                inv += 1
    return -1 if inv % 2 else 1


def _merge_J(J1, J2):
    return tuple(sorted(J1 + J2))


class WeylForm:
    """Element of the truncated Weyl bundle; immutable value semantics."""

    __slots__ = ("ctx", "trunc", "terms")

    def __init__(self, ctx: WeylContext, trunc: int, terms=None):
        self.ctx = ctx
        self.trunc = trunc
        self.terms = {}
        if terms:
            for key, c in terms.items():
                k, alpha, J = key
                if 2 * k + sum(alpha) > trunc:
                    continue
                if not c.is_zero():
                    self.terms[key] = c

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(ctx, trunc) -> "WeylForm":
        return WeylForm(ctx, trunc)

    @staticmethod
    def from_poly(ctx, trunc, p: Poly, h_power=0, J=()) -> "WeylForm":
        key = (h_power, (0,) * ctx.dim, tuple(J))
        return WeylForm(ctx, trunc, {key: p.with_roster(ctx.roster)})

    @staticmethod
    def unit(ctx, trunc) -> "WeylForm":
        return WeylForm.from_poly(ctx, trunc, Poly.const(ctx.roster, 1))

    @staticmethod
    def y_monomial(ctx, trunc, alpha, coeff=1, h_power=0, J=()) -> "WeylForm":
        c = Poly.const(ctx.roster, coeff) if not isinstance(coeff, Poly) else coeff
        return WeylForm(ctx, trunc, {(h_power, tuple(alpha), tuple(J)): c.with_roster(ctx.roster)})

    @staticmethod
    def two_form(ctx, trunc, coeff_table) -> "WeylForm":
        """Scalar 2-form from entries {(h, i, j): Poly} with i < j (0-based)."""
        terms = {}
        zero_alpha = (0,) * ctx.dim
        for (h, i, j), c in coeff_table.items():
            if i >= j:
                raise ValueError("two_form expects strictly increasing index pairs i < j")
            key = (h, zero_alpha, (i, j))
            terms[key] = terms.get(key, ctx.zero_poly()) + c.with_roster(ctx.roster)
        return WeylForm(ctx, trunc, terms)

    @staticmethod
    def omega_form(ctx, trunc) -> "WeylForm":
        """The constant symplectic form as a scalar 2-form sum_{i<j} omega_ij dx^i dx^j."""
        table = {}
        for i in range(ctx.dim):
            for j in range(i + 1, ctx.dim):
                if not ctx.omega[i][j].is_zero():
                    table[(0, i, j)] = Poly.const(ctx.roster, ctx.omega[i][j])
        return WeylForm.two_form(ctx, trunc, table)

    def _check(self, other: "WeylForm"):
        if self.ctx != other.ctx:
            raise ValueError("dimension/context mismatch between Weyl forms")

    # -- structure -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, trunc: int) -> "WeylForm":
        return WeylForm(self.ctx, min(self.trunc, trunc), self.terms)

    def homogeneous(self, degree: int) -> "WeylForm":
        return WeylForm(
            self.ctx, self.trunc,
            {key: c for key, c in self.terms.items() if 2 * key[0] + sum(key[1]) == degree},
        )

    def max_degree(self) -> int:
        return max((2 * k + sum(a) for (k, a, J) in self.terms), default=0)

    def form_degrees(self):
        return sorted({len(key[2]) for key in self.terms})

    def y_degree_zero(self) -> bool:
        return all(not any(a) for (_, a, _) in self.terms)

    def __eq__(self, other):
        if not isinstance(other, WeylForm):
            return NotImplemented
        self._check(other)
        return self.terms == other.terms

    # -- linear operations -------------------------------------------------------

    def __add__(self, other: "WeylForm") -> "WeylForm":
        self._check(other)
        trunc = min(self.trunc, other.trunc)
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
        return WeylForm(self.ctx, trunc, out)

    def __neg__(self):
        return WeylForm(self.ctx, self.trunc, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value) -> "WeylForm":
        c = ParamRational.of(value)
        if c.is_zero():
            return WeylForm(self.ctx, self.trunc)
        return WeylForm(self.ctx, self.trunc, {k: p.scale(c) for k, p in self.terms.items()})

    def mul_poly(self, p: Poly) -> "WeylForm":
        p = p.with_roster(self.ctx.roster)
        return WeylForm(self.ctx, self.trunc, {k: c * p for k, c in self.terms.items()})

    def shift_h(self, j: int) -> "WeylForm":
        out = {}
        for (k, a, J), c in self.terms.items():
            if k + j < 0:
                raise ValueError("h-division leaves a remainder")
            out[(k + j, a, J)] = c
        return WeylForm(self.ctx, self.trunc + 2 * j, out)

    # -- Moyal-Weyl product --------------------------------------------------------

    def mw(self, other: "WeylForm") -> "WeylForm":
        """Fiberwise Moyal-Weyl product, wedging the form parts."""
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        out = {}
        for key1, c1 in self.terms.items():
            for key2, c2 in other.terms.items():
                self._mw_pair(key1, c1, key2, c2, trunc, out, parity=None)
        return WeylForm(self.ctx, trunc, out)

    def graded_comm(self, other: "WeylForm") -> "WeylForm":
        """a o b - (-1)^{|a||b|} b o a on form degrees, computed termwise."""
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        out = {}
        for key1, c1 in self.terms.items():
            for key2, c2 in other.terms.items():
                self._mw_pair(key1, c1, key2, c2, trunc, out, parity=1)
        return WeylForm(self.ctx, trunc, out)

    def ad_over_h(self, other: "WeylForm") -> "WeylForm":
        """(i/h) * graded_comm(self, other); exact because only odd contraction
        orders survive in the commutator."""
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        out = {}
        for key1, c1 in self.terms.items():
            for key2, c2 in other.terms.items():
                self._mw_pair(key1, c1, key2, c2, trunc, out, parity=1, over_h=True)
        return WeylForm(self.ctx, trunc, out)

    def _mw_pair(self, key1, c1, key2, c2, trunc, out, parity, over_h=False):
        k1, a1, J1 = key1
        k2, a2, J2 = key2
        if set(J1) & set(J2):
            return
        base_degree = sum(a1) + sum(a2) + 2 * (k1 + k2)
        if not over_h and base_degree > trunc:
            return
        if over_h and base_degree - 2 > trunc:
            return
        ctx = self.ctx
        sign = _wedge_sign(J1, J2)
        J = _merge_J(J1, J2)
        cc = c1 * c2
        if cc.is_zero():
            return
        kmax = min(sum(a1), sum(a2))
        state = {(a1, a2): ONE}
        for k in range(kmax + 1):
            use = k % 2 == 1 if parity else True
            if use and state:
                factor = ctx.moyal_factor(k)
                if parity:
                    factor = factor * 2  # odd orders double in the commutator
                if over_h:
                    factor = factor * I
                h_power = k1 + k2 + k + (-1 if over_h else 0)
                if h_power < 0:
                    raise AssertionError("h-division left a remainder in ad_over_h")
                for (b1, b2), w in state.items():
                    key = (h_power, tuple(e1 + e2 for e1, e2 in zip(b1, b2)), J)
                    if 2 * key[0] + sum(key[1]) > trunc:
                        continue
                    c = cc.scale(w * factor) if sign > 0 else cc.scale(-(w * factor))
                    s = out.get(key)
                    if s is None:
                        out[key] = c
                    else:
                        s = s + c
                        if s.is_zero():
                            del out[key]
                        else:
                            out[key] = s
            if k == kmax:
                break
            nxt = {}
            for (b1, b2), w in state.items():
                for (pi_i, pi_j, pv) in ctx._pi_entries:
                    e1 = b1[pi_i]
                    if not e1:
                        continue
                    e2 = b2[pi_j]
                    if not e2:
                        continue
                    nb1 = b1[:pi_i] + (e1 - 1,) + b1[pi_i + 1:]
                    nb2 = b2[:pi_j] + (e2 - 1,) + b2[pi_j + 1:]
                    add = (w * pv).mul_int(e1 * e2)
                    key = (nb1, nb2)
                    s = nxt.get(key)
                    if s is None:
                        nxt[key] = add
                    else:
                        s = s + add
                        if s.is_zero():
                            del nxt[key]
                        else:
                            nxt[key] = s
            state = nxt
            if not state:
                break

    # -- delta calculus ---------------------------------------------------------

    def delta(self) -> "WeylForm":
        """delta(a) = sum_i dx^i wedge da/dy^i."""
        out = {}
        for (k, a, J), c in self.terms.items():
            for i, e in enumerate(a):
                if not e or i in J:
                    continue
                na = a[:i] + (e - 1,) + a[i + 1:]
                before = sum(1 for j in J if j < i)
                sign = -1 if before % 2 else 1
                nc = c.scale(e if sign > 0 else -e)
                key = (k, na, tuple(sorted(J + (i,))))
                s = out.get(key)
                out[key] = nc if s is None else s + nc
        return WeylForm(self.ctx, self.trunc, out)

    def delta_star(self) -> "WeylForm":
        """delta*(a) = sum_i y^i iota_{d/dx^i}(a).

        Raises the total degree by one, and its degree-(d+1) output depends
        only on the degree-d input, so the result is complete one degree
        beyond the input truncation; nothing may be dropped.
        """
        out = {}
        for (k, a, J), c in self.terms.items():
            for pos, i in enumerate(J):
                na = a[:i] + (a[i] + 1,) + a[i + 1:]
                nJ = J[:pos] + J[pos + 1:]
                nc = c if pos % 2 == 0 else -c
                key = (k, na, nJ)
                s = out.get(key)
                out[key] = nc if s is None else s + nc
        return WeylForm(self.ctx, self.trunc + 1, out)

    def delta_inv(self) -> "WeylForm":
        """(1/(p+q)) delta* on the (y-degree p, form-degree q) component; 0 on p+q=0.

        Like delta*, complete one degree past the input truncation.
        """
        out = {}
        for (k, a, J), c in self.terms.items():
            p, q = sum(a), len(J)
            if p + q == 0:
                continue
            w = ParamRational.const(Fraction(1, p + q))
            for pos, i in enumerate(J):
                na = a[:i] + (a[i] + 1,) + a[i + 1:]
                nJ = J[:pos] + J[pos + 1:]
                nc = c.scale(w) if pos % 2 == 0 else -c.scale(w)
                key = (k, na, nJ)
                s = out.get(key)
                out[key] = nc if s is None else s + nc
        return WeylForm(self.ctx, self.trunc + 1, out)

    def center_part(self) -> "WeylForm":
        return WeylForm(
            self.ctx, self.trunc,
            {key: c for key, c in self.terms.items() if not any(key[1]) and not key[2]},
        )

    def project_function(self, order=None) -> "FormalFunctionView":
        """The map p: form-degree-0 sections to formal functions."""
        from .polynomials import FormalFunction
        if any(key[2] for key in self.terms):
            raise ValueError("projection requires a form of dx-degree zero")
        if order is None:
            order = self.trunc // 2
        coeffs = {}
        for (k, a, J), c in self.terms.items():
            if any(a):
                continue
            coeffs[k] = coeffs.get(k, self.ctx.zero_poly()) + c
        return FormalFunction(self.ctx.roster, order, coeffs)

    # -- flat exterior derivative in x -------------------------------------------

    def d_x(self) -> "WeylForm":
        """sum_i dx^i wedge da/dx^i (the de Rham part of a covariant derivative)."""
        out = {}
        for (k, a, J), c in self.terms.items():
            for i in range(self.ctx.dim):
                if i in J:
                    continue
                dc = c.differentiate(self.ctx.roster[i])
                if dc.is_zero():
                    continue
                before = sum(1 for j in J if j < i)
                if before % 2:
                    dc = -dc
                key = (k, a, tuple(sorted(J + (i,))))
                s = out.get(key)
                out[key] = dc if s is None else s + dc
        return WeylForm(self.ctx, self.trunc, out)

    # -- parameter dependence ------------------------------------------------------

    def t_derivative(self, name: str) -> "WeylForm":
        out = {}
        for key, c in self.terms.items():
            d = c.differentiate(name)
            if not d.is_zero():
                out[key] = d
        return WeylForm(self.ctx, self.trunc, out)

    def subs_params(self, values: dict) -> "WeylForm":
        out = {}
        for key, c in self.terms.items():
            v = c.subs_params(values)
            if not v.is_zero():
                out[key] = v
        return WeylForm(self.ctx, self.trunc, out)

    # -- printing -------------------------------------------------------------------

    def serialize(self) -> str:
        """Canonical term-per-line form: h^k * <poly> * y^(alpha) * dx{J}."""
        lines = []
        for (k, a, J) in sorted(self.terms):
            c = self.terms[(k, a, J)]
            alpha = ",".join(str(e) for e in a)
            dxs = ",".join(str(j + 1) for j in J)
            body = str(c)
            if len(c.terms) > 1:
                body = f"({body})"
            lines.append(f"h^{k} * {body} * y^({alpha}) * dx{{{dxs}}}")
        return "\n".join(lines) if lines else "0"

    def __str__(self):
        return self.serialize().replace("\n", "  +  ")

    def __repr__(self):
        return f"WeylForm[N={self.trunc}]({self})"


def omega_tilde(ctx: WeylContext, trunc: int) -> WeylForm:
    """The element sum omega_ij y^j dx^i, for which delta = -ad_over_h(omega_tilde)."""
    terms = {}
    for i in range(ctx.dim):
        for j in range(ctx.dim):
            v = ctx.omega[i][j]
            if v.is_zero():
                continue
            alpha = tuple(1 if m == j else 0 for m in range(ctx.dim))
            key = (0, alpha, (i,))
            c = Poly.const(ctx.roster, v)
            terms[key] = terms.get(key, ctx.zero_poly()) + c
    return WeylForm(ctx, trunc, terms)


def poincare_potential(form: WeylForm) -> WeylForm:
    """Homotopy operator for the de Rham differential on star-shaped domains.

    For a closed y-free q-form (q >= 1) with polynomial coefficients returns P
    with d_x P = form.  Acts per x-homogeneous piece: a monomial coefficient of
    degree m in a q-form is contracted with the Euler field and weighted
    1/(m+q).
    """
    ctx = form.ctx
    terms = {}
    for (k, a, J), c in form.terms.items():
        if any(a):
            raise ValueError("Poincare potential needs a y-free form")
        q = len(J)
        if q == 0:
            raise ValueError("Poincare potential needs form-degree >= 1")
        for exps, coeff in c.terms.items():
            m = sum(exps)
            w = ParamRational.const(Fraction(1, m + q))
            for pos, j in enumerate(J):
                nJ = J[:pos] + J[pos + 1:]
                ne = exps[:j] + (exps[j] + 1,) + exps[j + 1:]
                sign_c = coeff * w if pos % 2 == 0 else -(coeff * w)
                key = (k, a, nJ)
                p = terms.get(key)
                add = Poly(ctx.roster, {ne: sign_c})
                terms[key] = add if p is None else p + add
    return WeylForm(ctx, form.trunc, terms)
