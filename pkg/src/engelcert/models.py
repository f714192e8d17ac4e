"""Coframe models: structure equations built from the six Engel invariants."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .exterior import Form, conjugate_form, linear_substitute
from .scalar import (
    CIRCLE_COS,
    CIRCLE_SIN,
    CONJUGATE,
    GaussianRational,
    Scalar,
    Symbol,
    SymbolTable,
    UsageError,
    parse_scalar,
    to_fraction,
)

__all__ = [
    "STANDARD_TABLE",
    "INVARIANT_NAMES",
    "FAMILY_NAMES",
    "EngelConstants",
    "CoframeModel",
    "FamilyId",
    "from_constants",
    "family",
    "family_model",
    "transform",
    "degeneration_check",
    "load_model_file",
    "symbolic_constants",
]

INVARIANT_NAMES = ("p1", "p2", "q1", "q2", "r1", "r2")
FAMILY_NAMES = ("C1", "C2", "C3", "C4", "C5", "C6")


def _standard_table() -> SymbolTable:
    entries = [
        Symbol("a"),
        Symbol("b"),
        Symbol("cos_a", CIRCLE_COS, "sin_a"),
        Symbol("sin_a", CIRCLE_SIN, "cos_a"),
    ]
    for n in INVARIANT_NAMES:
        entries.append(Symbol(n, CONJUGATE, n + "bar"))
        entries.append(Symbol(n + "bar", CONJUGATE, n))
    return SymbolTable(entries)


STANDARD_TABLE = _standard_table()

# constants (p1, p2, q1, q2, r1, r2) of the six homogeneous families, a, b real
_C6_BRACKET_R = "(2*i*b*sin_a + i*cos_a + 2*b*cos_a - 2*i*b - sin_a - 1)"
_FAMILY_TEXT = {
    "C1": ("a + i*b", "0", "0", "0", "0", "0"),
    "C2": ("1/2 + i*b", "0", "2*i*a", "0", "0", "0"),
    "C3": (
        "1/2 - i*b",
        "0",
        "2*i*b",
        "1/2*(2*b + i)*(2*i*a - b)",
        "2*b^2 - i*b",
        "(b^2 + 1/4)*(2*a + i*b)",
    ),
    "C4": ("0", "a - i*b", "2*i*b", "a - i*b", "-a - i*b", "0"),
    "C5": (
        "a*(1 - 2*i*b)",
        "1/4*(2*a - 1)*(2*b + i)^2",
        "2*i*b",
        "-1/4*(2*b + i)^2",
        "-1/4*(2*b + 4*a*b + i*(2*a - 1))*(-2*b + i)",
        "1/4*a*(-1 + 2*b*i)*(1 + 4*b^2)",
    ),
    "C6": (
        "1/2*(cos_a + i*sin_a)*(2*b + i)",
        "1/4*(-sin_a + 2*b*cos_a - 1)*(2*b + i)^2",
        "2*i*b",
        "-1/8*(2*i*b*sin_a + i*cos_a - 2*b*cos_a - 2*i*b + sin_a + 1)*(2*b + i)^2",
        "1/4*(1 + 2*b*i)*" + _C6_BRACKET_R,
        "1/16*(1 + 4*b^2)*(-1 + 2*i*b)*" + _C6_BRACKET_R,
    ),
}


@dataclass(frozen=True)
class EngelConstants:
    p1: Scalar
    p2: Scalar
    q1: Scalar
    q2: Scalar
    r1: Scalar
    r2: Scalar

    @property
    def table(self) -> SymbolTable:
        return self.p1.table

    def as_tuple(self) -> tuple[Scalar, ...]:
        return tuple(getattr(self, n) for n in INVARIANT_NAMES)

    def substitute(self, bindings, target=None) -> "EngelConstants":
        if not bindings and target is None:
            return self
        return EngelConstants(*(s.substitute(bindings, target) for s in self.as_tuple()))

    def perturbed(self, name: str, delta=1) -> "EngelConstants":
        return replace(self, **{name: getattr(self, name) + delta})

    def to_json(self) -> dict:
        return {n: str(getattr(self, n)) for n in INVARIANT_NAMES}


def symbolic_constants(table: SymbolTable = STANDARD_TABLE) -> EngelConstants:
    """The six invariants as free conjugate-pair symbols."""
    return EngelConstants(*(Scalar.symbol(n, table) for n in INVARIANT_NAMES))


@dataclass(frozen=True)
class CoframeModel:
    """Exterior derivatives of the four generators (degree-2 forms)."""

    d_gen: tuple[Form, Form, Form, Form]
    table: SymbolTable

    @classmethod
    def from_pair(cls, d_w1: Form, d_w2: Form) -> "CoframeModel":
        return cls((d_w1, conjugate_form(d_w1), d_w2, conjugate_form(d_w2)), d_w1.table)

    @property
    def d_w1(self):
        return self.d_gen[0]

    @property
    def d_w2(self):
        return self.d_gen[2]

    @property
    def d_w1bar(self):
        return self.d_gen[1]

    @property
    def d_w2bar(self):
        return self.d_gen[3]

    def is_conjugation_closed(self) -> bool:
        return (
            self.d_gen[1] == conjugate_form(self.d_gen[0])
            and self.d_gen[3] == conjugate_form(self.d_gen[2])
        )

    def is_constant(self) -> bool:
        return all(c.is_constant() for f in self.d_gen for c in f.comps.values())

    def map_coefficients(self, fn) -> "CoframeModel":
        gens = tuple(f.map_coefficients(fn) for f in self.d_gen)
        table = gens[0].table if gens[0].comps else self.table
        for g in gens:
            for c in g.comps.values():
                table = c.table
                break
        return CoframeModel(gens, table)

    def substitute(self, bindings, target=None) -> "CoframeModel":
        out = tuple(f.map_coefficients(lambda s: s.substitute(bindings, target)) for f in self.d_gen)
        return CoframeModel(tuple(Form(g.comps, target or self.table) for g in out), target or self.table)

    def to_json(self) -> dict:
        return {name: str(f) for name, f in zip(("d_w1", "d_w1bar", "d_w2", "d_w2bar"), self.d_gen)}


def from_constants(c: EngelConstants) -> CoframeModel:
    table = c.table
    w1, w1b, w2, w2b = (Form.generator(k, table) for k in range(4))
    cj = {n: getattr(c, n).conjugate() for n in INVARIANT_NAMES}
    first = Form.one_form([c.p1, cj["q1"], c.p2, cj["q2"]], table)
    second = Form.one_form([c.q2, cj["r1"], 0, cj["r2"]], table)
    d_w1 = -first.wedge(w1) - second.wedge(w2)
    pform = Form.one_form([c.p1, cj["p1"], c.p2, cj["p2"]], table)
    d_w2 = (w1 - w2).wedge(w1b) - pform.wedge(w2)
    return CoframeModel.from_pair(d_w1, d_w2)


@dataclass(frozen=True)
class FamilyId:
    """One of C1..C6 with parameter bindings.

    ``a``/``b`` are ``None`` (symbolic), exact rationals (int, Fraction,
    ``"p/q"``) or Scalars over :data:`STANDARD_TABLE`.  C6 binds the circle
    pair instead of ``a``: either ``t`` (rational circle parameter) or the
    explicit pair ``cos``/``sin``.
    """

    name: str
    a: object = None
    b: object = None
    t: object = None
    cos: object = None
    sin: object = None

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise UsageError(f"unknown family {self.name!r}")
        if self.name == "C6" and self.a is not None:
            raise UsageError("C6 binds (cos a, sin a) or t, never a directly")
        if self.name != "C6" and (self.t is not None or self.cos is not None or self.sin is not None):
            raise UsageError("only C6 takes circle bindings")
        if self.t is not None and (self.cos is not None or self.sin is not None):
            raise UsageError("give either t or (cos, sin)")
        if (self.cos is None) != (self.sin is None):
            raise UsageError("cos and sin must be given together")

    def bindings(self, table: SymbolTable = STANDARD_TABLE) -> dict:
        out = {}
        for name in ("a", "b"):
            v = getattr(self, name)
            if v is not None:
                out[name] = _as_scalar(v, table)
        if self.t is not None:
            t = to_fraction(self.t)
            den = 1 + t * t
            out["cos_a"] = Scalar.const((1 - t * t) / den, table)
            out["sin_a"] = Scalar.const(2 * t / den, table)
        if self.cos is not None:
            out["cos_a"] = _as_scalar(self.cos, table)
            out["sin_a"] = _as_scalar(self.sin, table)
        return out

    def label(self) -> str:
        parts = [self.name]
        for n in ("a", "b", "t", "cos", "sin"):
            v = getattr(self, n)
            if v is not None:
                parts.append(f"{n}={v}")
        return " ".join(parts)


def _as_scalar(v, table):
    if isinstance(v, Scalar):
        return v.rename_into(table) if v.table != table else v
    if isinstance(v, str):
        try:
            return Scalar.const(to_fraction(v), table)
        except UsageError:
            return parse_scalar(v, table)
    if isinstance(v, GaussianRational):
        return Scalar.const(v, table)
    return Scalar.const(to_fraction(v), table)


_FAMILY_CACHE: dict = {}


def _family_symbolic(name: str) -> EngelConstants:
    if name not in _FAMILY_CACHE:
        texts = _FAMILY_TEXT[name]
        _FAMILY_CACHE[name] = EngelConstants(*(parse_scalar(t, STANDARD_TABLE) for t in texts))
    return _FAMILY_CACHE[name]


def family(fid: FamilyId | str) -> EngelConstants:
    """Constants of a homogeneous family, instantiated at its bindings."""
    if isinstance(fid, str):
        fid = FamilyId(fid)
    return _family_symbolic(fid.name).substitute(fid.bindings())


def family_model(fid: FamilyId | str) -> CoframeModel:
    return from_constants(family(fid))


def _as_matrix(M, table):
    return [[_as_scalar(x, table) if not isinstance(x, Scalar) else x for x in row] for row in M]


def transform(m: CoframeModel, M: Sequence[Sequence]) -> CoframeModel:
    """Basis change ``theta_i = sum_j M[i][j] w_j`` (and conjugate block).

    The returned model is the structure equation of (theta1, theta2) written
    in the theta basis; generators keep their slot names.
    """
    table = m.table
    M = _as_matrix(M, table)
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if not det.is_constant() or det.is_zero():
        raise UsageError("basis change is not invertible as a constant matrix")
    inv_det = det.constant_value().inverse()
    Minv = [[M[1][1] * inv_det, -M[0][1] * inv_det], [-M[1][0] * inv_det, M[0][0] * inv_det]]
    th = [Form.generator(k, table) for k in range(4)]

    def image(row, conj):
        c0, c1 = Minv[row]
        if conj:
            return th[1] * c0.conjugate() + th[3] * c1.conjugate()
        return th[0] * c0 + th[2] * c1

    images = [image(0, False), image(0, True), image(1, False), image(1, True)]
    d_old = [m.d_gen[0], m.d_gen[2]]
    new = []
    for i in range(2):
        dtheta = d_old[0] * M[i][0] + d_old[1] * M[i][1]
        new.append(linear_substitute(dtheta, images))
    return CoframeModel.from_pair(new[0], new[1])


def degeneration_check(id1: FamilyId, id2: FamilyId, binding: Mapping | None = None) -> bool:
    """True iff the two instantiated constant lists agree as Scalars."""
    binding = {k: _as_scalar(v, STANDARD_TABLE) for k, v in (binding or {}).items()}
    c1 = family(id1).substitute(binding)
    c2 = family(id2).substitute(binding)
    return c1.as_tuple() == c2.as_tuple()


def load_model_file(path) -> EngelConstants:
    """Read a model JSON document.

    Either ``{"symbols": [...], "constants": {"p1": "...", ...}}`` (missing
    constants are zero) or ``{"family": "C3", "a": "1/2", "b": "0"}``
    (``"t"`` for C6).
    """
    data = json.loads(Path(path).read_text())
    return constants_from_json(data)


def constants_from_json(data: dict) -> EngelConstants:
    if "family" in data:
        kwargs = {k: data[k] for k in ("a", "b", "t") if k in data and data[k] is not None}
        return family(FamilyId(data["family"], **kwargs))
    table = SymbolTable.from_json(data.get("symbols", []))
    consts = data.get("constants", {})
    unknown = set(consts) - set(INVARIANT_NAMES)
    if unknown:
        raise UsageError(f"unknown constants {sorted(unknown)}")
    return EngelConstants(*(parse_scalar(consts.get(n, "0"), table) for n in INVARIANT_NAMES))


def rational_point(a=None, b=None) -> dict:
    out = {}
    if a is not None:
        out["a"] = Fraction(to_fraction(a))
    if b is not None:
        out["b"] = Fraction(to_fraction(b))
    return out
