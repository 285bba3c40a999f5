"""Scenario files: a line-oriented key-value format with the polynomial grammar.

Example::

    # one-parameter curved family on R^2
    dimension = 2
    params = 1
    order = 3
    basis_degree = 2
    seed = 7

    omega = [[0, -1], [1, 0]]

    Gamma[2][1][1] = t1*x2
    alpha[1][1][2] = (1+t1)*x1
    alpha[2][1][2] = t1^2

    beta = auto
    gauge_shift[t1][1][1] = 2*x1*x2
    gauge_shift[t1][1][2] = x1^2

    I[1][2] = 1 + t1
    I[2][1] = -1/(1+t1)
    F = t1*x1^2*x2
    samples = t1=0 ; t1=1/2

All indices are 1-based.  ``alpha[k][i][j]`` gives the h^k coefficient of
dx^i wedge dx^j (i < j); the h^0 layer is always the symplectic form itself
and is not written.  ``beta[tj][k][i]`` gives the h^k dx^i coefficient of the
direction-tj component; ``gauge_shift`` uses the same scheme and must be
closed.  Parse errors carry their line number.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .scalars import Scalar
from .polynomials import Poly, ParamRational, parse_poly, x_roster, ExprError, is_param_name
from .weylforms import WeylForm
from .symplectic import SymplecticData, ConnectionFamily
from .fedosov import FedosovSetup
from .families import FamilyContext, TrivializationBeta, trivialize_alpha
from .kahler import LinearKahlerFamily


class ScenarioError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


_KEY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)((?:\[[^\]]+\])*)$")


def _parse_key(text, lineno):
    m = _KEY_RE.match(text.strip())
    if not m:
        raise ScenarioError(f"malformed key {text!r}", lineno)
    name = m.group(1)
    idx = re.findall(r"\[([^\]]+)\]", m.group(2))
    return name, [s.strip() for s in idx]


def _parse_matrix(text, lineno):
    text = text.strip()
    if not (text.startswith("[[") and text.endswith("]]")):
        raise ScenarioError("matrix literal must look like [[a, b], [c, d]]", lineno)
    rows = []
    for row_text in re.findall(r"\[([^\[\]]*)\]", text):
        row = []
        for cell in row_text.split(","):
            cell = cell.strip()
            if not cell:
                continue
            try:
                p = parse_poly(cell, ())
            except ExprError as exc:
                raise ScenarioError(f"bad matrix entry {cell!r}: {exc}", lineno) from None
            c = p.constant_coefficient()
            if not c.is_constant():
                raise ScenarioError(f"matrix entry {cell!r} must be a constant", lineno)
            row.append(c.constant_value())
        rows.append(row)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ScenarioError("matrix literal must be square", lineno)
    return rows


def _parse_samples(text, lineno):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        point = {}
        for assign in chunk.split(","):
            assign = assign.strip()
            if "=" not in assign:
                raise ScenarioError(f"sample point entry {assign!r} needs name=value", lineno)
            name, val = (s.strip() for s in assign.split("=", 1))
            if not is_param_name(name):
                raise ScenarioError(f"{name!r} is not a parameter name", lineno)
            try:
                point[name] = Fraction(val)
            except (ValueError, ZeroDivisionError):
                raise ScenarioError(f"bad rational {val!r}", lineno) from None
        out.append(point)
    return out


class Scenario:
    """Parsed scenario; build_* methods assemble validated module inputs."""

    def __init__(self):
        self.dimension = None
        self.params = 0
        self.order = 3
        self.truncation = None
        self.basis_degree = 2
        self.seed = 0
        self.omega = None
        self.gamma = {}        # (k, i, j) 0-based -> expression text
        self.alpha = {}        # (h, i, j) 0-based, i < j -> expression text
        self.beta_mode = "auto"
        self.beta = {}         # (direction, h, i) -> expression text
        self.gauge_shift = {}  # (direction, h, i) -> expression text
        self.I_entries = {}    # (a, b) 0-based -> expression text
        self.F_text = None
        self.samples = []

    # -- parsing --------------------------------------------------------------

    @staticmethod
    def parse(text: str) -> "Scenario":
        sc = Scenario()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ScenarioError("expected key = value", lineno)
            key_text, value = (s.strip() for s in line.split("=", 1))
            name, idx = _parse_key(key_text, lineno)
            sc._assign(name, idx, value, lineno)
        sc._finalize()
        return sc

    @staticmethod
    def load(path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fh:
            return Scenario.parse(fh.read())

    def _int(self, value, lineno, what):
        try:
            return int(value)
        except ValueError:
            raise ScenarioError(f"{what} must be an integer, got {value!r}", lineno) from None

    def _assign(self, name, idx, value, lineno):
        if name == "dimension":
            self.dimension = self._int(value, lineno, "dimension")
        elif name == "params":
            self.params = self._int(value, lineno, "params")
        elif name == "order":
            self.order = self._int(value, lineno, "order")
        elif name == "truncation":
            self.truncation = self._int(value, lineno, "truncation")
        elif name == "basis_degree":
            self.basis_degree = self._int(value, lineno, "basis_degree")
        elif name == "seed":
            self.seed = self._int(value, lineno, "seed")
        elif name == "omega":
            self.omega = _parse_matrix(value, lineno)
        elif name == "samples":
            self.samples = _parse_samples(value, lineno)
        elif name == "F":
            self.F_text = (value, lineno)
        elif name == "beta" and not idx:
            if value != "auto":
                raise ScenarioError("beta without indices must be 'auto'", lineno)
            self.beta_mode = "auto"
        elif name == "Gamma":
            if len(idx) != 3:
                raise ScenarioError("Gamma needs three indices Gamma[k][i][j]", lineno)
            k, i, j = (self._int(v, lineno, "Gamma index") - 1 for v in idx)
            self.gamma[(k, i, j)] = (value, lineno)
        elif name == "alpha":
            if len(idx) != 3:
                raise ScenarioError("alpha needs indices alpha[h][i][j]", lineno)
            h = self._int(idx[0], lineno, "alpha h-power")
            i = self._int(idx[1], lineno, "alpha index") - 1
            j = self._int(idx[2], lineno, "alpha index") - 1
            if h < 1:
                raise ScenarioError("alpha entries start at h^1; h^0 is omega", lineno)
            if not i < j:
                raise ScenarioError("alpha needs i < j", lineno)
            self.alpha[(h, i, j)] = (value, lineno)
        elif name in ("beta", "gauge_shift"):
            if len(idx) != 3:
                raise ScenarioError(f"{name} needs indices {name}[tj][k][i]", lineno)
            direction = idx[0]
            if not is_param_name(direction):
                raise ScenarioError(f"{direction!r} is not a parameter direction", lineno)
            h = self._int(idx[1], lineno, "h-power")
            i = self._int(idx[2], lineno, "dx index") - 1
            table = self.beta if name == "beta" else self.gauge_shift
            table[(direction, h, i)] = (value, lineno)
            if name == "beta":
                self.beta_mode = "explicit"
        elif name == "I":
            if len(idx) != 2:
                raise ScenarioError("I needs two indices I[a][b]", lineno)
            a = self._int(idx[0], lineno, "I index") - 1
            b = self._int(idx[1], lineno, "I index") - 1
            self.I_entries[(a, b)] = (value, lineno)
        else:
            raise ScenarioError(f"unknown key {name!r}", lineno)

    def _finalize(self):
        if self.dimension is None:
            raise ScenarioError("missing 'dimension'")
        if self.dimension % 2 or self.dimension <= 0:
            raise ScenarioError("dimension must be a positive even integer")
        if self.omega is None:
            raise ScenarioError("missing 'omega'")
        if len(self.omega) != self.dimension:
            raise ScenarioError("omega has the wrong dimension")
        if self.truncation is None:
            self.truncation = 2 * self.order + 2

    # -- assembly ----------------------------------------------------------------

    @property
    def param_names(self):
        return tuple(f"t{i}" for i in range(1, self.params + 1))

    def _poly(self, entry, roster):
        text, lineno = entry
        try:
            return parse_poly(text, roster)
        except ExprError as exc:
            raise ScenarioError(str(exc), lineno) from None

    def build_symplectic(self) -> SymplecticData:
        try:
            return SymplecticData(self.omega)
        except ValueError as exc:
            raise ScenarioError(f"bad omega: {exc}") from None

    def build_connection(self, sym: SymplecticData) -> ConnectionFamily:
        roster = sym.roster
        gamma = {}
        for (k, i, j), entry in self.gamma.items():
            for n in (k, i, j):
                if not 0 <= n < self.dimension:
                    raise ScenarioError("Gamma index out of range", entry[1])
            gamma[(k, i, j)] = self._poly(entry, roster)
        return ConnectionFamily(sym, gamma)

    def build_alpha(self, sym: SymplecticData) -> WeylForm:
        table = {}
        for (h, i, j), entry in self.alpha.items():
            if not (0 <= i < j < self.dimension):
                raise ScenarioError("alpha index out of range", entry[1])
            table[(h, i, j)] = self._poly(entry, sym.roster)
        alpha = WeylForm.omega_form(sym, self.truncation)
        if table:
            alpha = alpha + WeylForm.two_form(sym, self.truncation, table)
        return alpha

    def build_setup(self) -> FedosovSetup:
        sym = self.build_symplectic()
        return FedosovSetup(self.build_connection(sym), self.build_alpha(sym),
                            trunc=self.truncation)

    def build_family(self) -> FamilyContext:
        if self.params < 1:
            raise ScenarioError("this command needs 'params >= 1'")
        sym = self.build_symplectic()
        return FamilyContext(
            self.build_connection(sym), self.build_alpha(sym), self.param_names,
            trunc=self.truncation, order=self.order,
        )

    def _one_form_table(self, family, table) -> dict:
        sym = family.sym
        forms = {}
        for p in family.params:
            entries = {}
            for (direction, h, i), entry in table.items():
                if direction != p:
                    continue
                if not 0 <= i < self.dimension:
                    raise ScenarioError("dx index out of range", entry[1])
                key = (h, (0,) * self.dimension, (i,))
                poly = self._poly(entry, sym.roster)
                entries[key] = entries.get(key, Poly.zero(sym.roster)) + poly
            forms[p] = WeylForm(sym, self.truncation, entries)
        return forms

    def build_beta(self, family: FamilyContext) -> TrivializationBeta:
        if self.beta_mode == "auto":
            return trivialize_alpha(family)
        return TrivializationBeta(family, self._one_form_table(family, self.beta),
                                  provenance="explicit")

    def build_gauge_pair(self, family: FamilyContext):
        if not self.gauge_shift:
            raise ScenarioError("the gauge command needs gauge_shift entries")
        base = self.build_beta(family)
        shifts = self._one_form_table(family, self.gauge_shift)
        second = base
        for p, form in shifts.items():
            if form.is_zero():
                continue
            if not form.d_x().is_zero():
                raise ScenarioError(f"gauge_shift for {p} must be closed in x")
            second = second.shifted_by_closed(p, form)
        return base, second

    def build_kahler(self) -> LinearKahlerFamily:
        if not self.I_entries:
            raise ScenarioError("the kahler command needs I[a][b] entries")
        sym = self.build_symplectic()
        n = self.dimension
        rows = []
        for a in range(n):
            row = []
            for b in range(n):
                entry = self.I_entries.get((a, b))
                if entry is None:
                    row.append(ParamRational.const(0))
                else:
                    p = self._poly(entry, ())
                    row.append(p.constant_coefficient())
            rows.append(row)
        try:
            return LinearKahlerFamily(sym, rows, samples=self.samples)
        except ValueError as exc:
            raise ScenarioError(f"bad Kahler family: {exc}") from None

    def build_F(self, sym) -> Poly:
        if self.F_text is None:
            return Poly.zero(sym.roster)
        return self._poly(self.F_text, sym.roster)
