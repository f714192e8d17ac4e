"""Graded exterior algebra on the coframe generators w1, w1bar, w2, w2bar.

Monomials are strictly increasing index tuples in the fixed order
``w1 < w1bar < w2 < w2bar``; the volume monomial is ``w1^w1bar^w2^w2bar``.
The same machinery serves real coframes (generators are just indices 0..3
with conjugation unused).
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .scalar import Scalar, SymbolTable, UsageError

__all__ = [
    "GENERATORS",
    "VOLUME",
    "Form",
    "wedge",
    "conjugate_form",
    "d",
    "coefficient",
    "monomial",
    "parse_monomial_word",
    "linear_substitute",
]

GENERATORS = ("w1", "w1bar", "w2", "w2bar")
_GEN_INDEX = {g: k for k, g in enumerate(GENERATORS)}
_CONJ = (1, 0, 3, 2)
VOLUME = (0, 1, 2, 3)


def _merge_sign(left: tuple, right: tuple):
    """Sorted union of two disjoint index tuples and the permutation sign."""
    if set(left) & set(right):
        return None, 0
    inversions = sum(1 for x in left for y in right if x > y)
    return tuple(sorted(left + right)), (-1 if inversions % 2 else 1)


def _sort_sign(indices: Sequence[int]):
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


def monomial(spec) -> tuple:
    """Normalize a monomial given as names or indices; must be sorted."""
    if isinstance(spec, str):
        spec = [p for p in spec.replace("^", " ").split() if p]
    out = []
    for g in spec:
        if isinstance(g, str):
            if g not in _GEN_INDEX:
                raise UsageError(f"unknown generator {g!r}")
            out.append(_GEN_INDEX[g])
        elif isinstance(g, int) and 0 <= g < 4:
            out.append(g)
        else:
            raise UsageError(f"bad generator {g!r}")
    if any(out[k] >= out[k + 1] for k in range(len(out) - 1)):
        raise UsageError(f"monomial {spec!r} is not strictly increasing")
    return tuple(out)


class Form:
    """Immutable mixed-degree exterior form with Scalar coefficients."""

    __slots__ = ("comps", "table")

    def __init__(self, comps: Mapping[tuple, Scalar], table: SymbolTable):
        self.table = table
        self.comps = {k: v for k, v in comps.items() if not v.is_zero()}

    @classmethod
    def zero(cls, table):
        return cls({}, table)

    @classmethod
    def scalar(cls, value, table):
        if not isinstance(value, Scalar):
            value = Scalar.const(value, table)
        return cls({(): value}, table)

    @classmethod
    def generator(cls, g, table):
        k = _GEN_INDEX[g] if isinstance(g, str) else g
        return cls({(k,): Scalar.one(table)}, table)

    @classmethod
    def one_form(cls, coeffs: Sequence, table):
        """Linear combination ``sum coeffs[k] * gen_k``."""
        comps = {}
        for k, c in enumerate(coeffs):
            if not isinstance(c, Scalar):
                c = Scalar.const(c, table)
            comps[(k,)] = c
        return cls(comps, table)

    # structure ---------------------------------------------------------------
    def degrees(self) -> set[int]:
        return {len(k) for k in self.comps}

    def is_zero(self) -> bool:
        return not self.comps

    def homogeneous(self, degree: int) -> "Form":
        return Form({k: v for k, v in self.comps.items() if len(k) == degree}, self.table)

    def map_coefficients(self, fn) -> "Form":
        return Form({k: fn(v) for k, v in self.comps.items()}, self.table)

    # algebra -----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return Form(out, self.table)

    def __neg__(self):
        return Form({k: -v for k, v in self.comps.items()}, self.table)

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Form):
            return NotImplemented
        return Form({k: v * c for k, v in self.comps.items()}, self.table)

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        out: dict = {}
        for k1, v1 in self.comps.items():
            for k2, v2 in other.comps.items():
                key, sign = _merge_sign(k1, k2)
                if key is None:
                    continue
                term = v1 * v2
                if sign < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term
        return Form(out, self.table)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.comps == other.comps

    def __hash__(self):
        return hash(frozenset(self.comps.items()))

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for k in sorted(self.comps, key=lambda m: (len(m), m)):
            word = "^".join(GENERATORS[i] for i in k) or "1"
            parts.append(f"({self.comps[k]})*{word}")
        return " + ".join(parts)

    __repr__ = __str__


def wedge(*forms: Form) -> Form:
    result = forms[0]
    for f in forms[1:]:
        result = result.wedge(f)
    return result


def conjugate_form(f: Form) -> Form:
    out: dict = {}
    for k, v in f.comps.items():
        key, sign = _sort_sign([_CONJ[i] for i in k])
        c = v.conjugate()
        out[key] = -c if sign < 0 else c
    return Form(out, f.table)


def d(f: Form, model) -> Form:
    """Exterior derivative driven by ``model.d_gen`` (four 2-forms).

    Coefficients are constants in the homogeneous setting, so only the
    generators are differentiated (graded Leibniz rule).
    """
    gens = model.d_gen
    table = f.table
    out = Form.zero(table)
    for k, v in f.comps.items():
        for j, g in enumerate(k):
            prefix = Form({k[:j]: Scalar.one(table)}, table)
            suffix = Form({k[j + 1:]: Scalar.one(table)}, table)
            piece = wedge(prefix, gens[g], suffix) * v
            out = out + (-piece if j % 2 else piece)
    return out


def coefficient(f: Form, mono) -> Scalar:
    key = monomial(mono)
    return f.comps.get(key, Scalar.zero(f.table))


def parse_monomial_word(word: str, table: SymbolTable) -> Form:
    """``"w1^w2bar^w2"`` -> wedge of generators in the written order."""
    names = [p.strip() for p in word.split("^") if p.strip()]
    if not names:
        raise UsageError("empty monomial word")
    for n in names:
        if n not in _GEN_INDEX:
            raise UsageError(f"unknown generator {n!r}")
    return wedge(*[Form.generator(n, table) for n in names])


def linear_substitute(f: Form, images: Sequence[Form]) -> Form:
    """Replace generator k by the 1-form ``images[k]`` and re-expand."""
    table = f.table
    out = Form.zero(table)
    for k, v in f.comps.items():
        term = Form.scalar(v, table)
        for g in k:
            term = term.wedge(images[g])
        out = out + term
    return out
