"""Exact coefficient arithmetic.

A :class:`Scalar` is a polynomial over the Gaussian rationals Q(i) in the
symbols of a :class:`SymbolTable`.  Symbols are real parameters, members of
a conjugate pair (swapped by :meth:`Scalar.conjugate`), or the two halves of
a circle pair ``cos``/``sin`` tied by ``sin^2 = 1 - cos^2``.  The canonical
form keeps the exponent of a circle-sine symbol at most one, so equality of
term maps is equality of values.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from .parsing import ParseError, parse

__all__ = [
    "REAL",
    "CONJUGATE",
    "CIRCLE_COS",
    "CIRCLE_SIN",
    "Symbol",
    "SymbolTable",
    "GaussianRational",
    "Scalar",
    "UsageError",
    "InvalidBinding",
    "parse_scalar",
    "to_fraction",
]

REAL = "real"
CONJUGATE = "conjugate"
CIRCLE_COS = "cos"
CIRCLE_SIN = "sin"


class UsageError(ValueError):
    """Raised when an operation is called outside its contract."""


class InvalidBinding(UsageError):
    """A substitution that breaks conjugation or the circle relation."""


def to_fraction(value) -> Fraction:
    """Exact rational from int, Fraction or a ``"p/q"`` string (no floats)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise UsageError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise UsageError(f"not an exact rational: {value!r}") from exc
    raise UsageError(f"not an exact rational: {value!r}")


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise UsageError("floating complex values are not exact")
        return cls(to_fraction(value))

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise UsageError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = f"{self.im}*i"
        if self.re == 0:
            return imag
        sign = "" if imag.startswith("-") else "+"
        return f"({self.re}{sign}{imag})"


_ZERO = GaussianRational(0)
_ONE = GaussianRational(1)
_I = GaussianRational(0, 1)


# --------------------------------------------------------------------------
# symbol tables


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str = REAL
    partner: str | None = None


class SymbolTable:
    """Ordered, immutable declaration of the symbols a Scalar may use."""

    def __init__(self, entries: Iterable[Symbol | str | tuple]):
        syms = []
        for e in entries:
            if isinstance(e, Symbol):
                syms.append(e)
            elif isinstance(e, str):
                syms.append(Symbol(e))
            else:
                syms.append(Symbol(*e))
        self.symbols: tuple[Symbol, ...] = tuple(syms)
        self.names: tuple[str, ...] = tuple(s.name for s in syms)
        self._index = {n: k for k, n in enumerate(self.names)}
        if len(self._index) != len(self.names):
            raise UsageError("symbol names must be unique")
        perm = list(range(len(syms)))
        self.cos_index = self.sin_index = None
        for k, s in enumerate(syms):
            if s.kind == REAL:
                if s.partner is not None:
                    raise UsageError(f"real symbol {s.name} cannot have a partner")
            elif s.kind == CONJUGATE:
                if s.partner == s.name or s.partner not in self._index:
                    raise UsageError(f"bad conjugate partner for {s.name}")
                other = syms[self._index[s.partner]]
                if other.kind != CONJUGATE or other.partner != s.name:
                    raise UsageError(f"conjugate pairing of {s.name} is not symmetric")
                perm[k] = self._index[s.partner]
            elif s.kind in (CIRCLE_COS, CIRCLE_SIN):
                want = CIRCLE_SIN if s.kind == CIRCLE_COS else CIRCLE_COS
                other = syms[self._index[s.partner]] if s.partner in self._index else None
                if other is None or other.kind != want or other.partner != s.name:
                    raise UsageError(f"circle symbol {s.name} must be matched")
                attr = "cos_index" if s.kind == CIRCLE_COS else "sin_index"
                if getattr(self, attr) is not None:
                    raise UsageError("at most one circle pair per table")
                setattr(self, attr, k)
            else:
                raise UsageError(f"unknown symbol kind {s.kind!r}")
        self.conj_perm: tuple[int, ...] = tuple(perm)
        self.nvars = len(syms)
        self.zero_exp: tuple[int, ...] = (0,) * self.nvars

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown symbol {name!r}") from None

    def __contains__(self, name):
        return name in self._index

    def kind(self, name: str) -> str:
        return self.symbols[self.index(name)].kind

    def partner(self, name: str) -> str | None:
        return self.symbols[self.index(name)].partner

    def extend(self, entries) -> "SymbolTable":
        return SymbolTable(list(self.symbols) + list(entries))

    def __eq__(self, other):
        return isinstance(other, SymbolTable) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"SymbolTable({list(self.names)})"

    def to_json(self):
        out = []
        for s in self.symbols:
            d = {"name": s.name, "kind": s.kind}
            if s.partner is not None:
                d["partner"] = s.partner
            out.append(d)
        return out

    @classmethod
    def from_json(cls, data) -> "SymbolTable":
        entries = []
        for d in data:
            entries.append(Symbol(d["name"], d.get("kind", REAL), d.get("partner")))
        names = {e.name for e in entries}
        # a conjugate declared without its partner gets the partner implied
        for e in list(entries):
            if e.kind == CONJUGATE and e.partner not in names:
                entries.append(Symbol(e.partner, CONJUGATE, e.name))
                names.add(e.partner)
        return cls(entries)


# --------------------------------------------------------------------------
# scalars


def _add_into(acc: dict, key, coeff: GaussianRational):
    old = acc.get(key)
    new = coeff if old is None else old + coeff
    if new:
        acc[key] = new
    elif old is not None:
        del acc[key]


class Scalar:
    """Immutable polynomial over Q(i) in the symbols of ``table``."""

    __slots__ = ("terms", "table", "_hash")

    def __init__(self, terms: Mapping, table: SymbolTable, _canonical: bool = False):
        self.table = table
        if _canonical:
            self.terms = terms
        else:
            acc: dict = {}
            s = table.sin_index
            for exp, c in terms.items():
                c = GaussianRational.coerce(c)
                if not c:
                    continue
                exp = tuple(exp)
                if len(exp) != table.nvars:
                    raise UsageError("exponent vector does not match table")
                if s is not None and exp[s] >= 2:
                    for e2, c2 in _reduce_sin(exp, c, table):
                        _add_into(acc, e2, c2)
                else:
                    _add_into(acc, exp, c)
            self.terms = acc
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, table):
        return cls({}, table, True)

    @classmethod
    def const(cls, value, table):
        c = GaussianRational.coerce(value)
        return cls({table.zero_exp: c} if c else {}, table, True)

    @classmethod
    def one(cls, table):
        return cls.const(1, table)

    @classmethod
    def imag_unit(cls, table):
        return cls.const(_I, table)

    @classmethod
    def symbol(cls, name, table):
        k = table.index(name)
        exp = [0] * table.nvars
        exp[k] = 1
        return cls({tuple(exp): _ONE}, table, True)

    @classmethod
    def parse(cls, text, table):
        return parse_scalar(text, table)

    # helpers -------------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.table is not self.table and other.table != self.table:
                raise UsageError("mismatched symbol tables")
            return other
        if isinstance(other, (int, Fraction, GaussianRational)) and not isinstance(other, bool):
            return Scalar.const(other, self.table)
        return NotImplemented

    # ring operations -----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(acc, e, c)
        return Scalar(acc, self.table, True)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({e: -c for e, c in self.terms.items()}, self.table, True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)) and not isinstance(other, bool):
            c = GaussianRational.coerce(other)
            if not c:
                return Scalar.zero(self.table)
            return Scalar({e: v * c for e, v in self.terms.items()}, self.table, True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        s = self.table.sin_index
        table = self.table
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                c = c1 * c2
                if s is not None and e[s] >= 2:
                    for e3, c3 in _reduce_sin(e, c, table):
                        _add_into(acc, e3, c3)
                else:
                    _add_into(acc, e, c)
        return Scalar(acc, table, True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            if not other.is_constant() or other.is_zero():
                raise UsageError("division by a non-constant or zero Scalar")
            other = other.constant_value()
        c = GaussianRational.coerce(other)
        return self * c.inverse()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise UsageError("Scalar powers need a non-negative integer exponent")
        result = Scalar.one(self.table)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.table is other.table or self.table == other.table) and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)) and not isinstance(other, bool):
            return self.terms == Scalar.const(other, self.table).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # queries ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(e == self.table.zero_exp for e in self.terms)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise UsageError(f"{self} is not constant")
        return self.terms.get(self.table.zero_exp, _ZERO)

    def free_symbols(self) -> set[str]:
        used = set()
        for e in self.terms:
            for k, x in enumerate(e):
                if x:
                    used.add(self.table.names[k])
        return used

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def leading_term(self):
        """Lex-largest (exponent, coefficient); raises on zero."""
        if not self.terms:
            raise UsageError("zero has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    # involutions and maps ---------------------------------------------------
    def conjugate(self) -> "Scalar":
        perm = self.table.conj_perm
        n = self.table.nvars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for k, x in enumerate(e):
                if x:
                    ne[perm[k]] = x
            out[tuple(ne)] = c.conjugate()
        return Scalar(out, self.table, True)

    def real_part(self) -> "Scalar":
        return (self + self.conjugate()) * Fraction(1, 2)

    def imag_part(self) -> "Scalar":
        return (self - self.conjugate()) * GaussianRational(0, Fraction(-1, 2))

    def diff(self, name: str) -> "Scalar":
        """Formal partial derivative; conjugate-pair symbols are independent."""
        k = self.table.index(name)
        if self.table.symbols[k].kind in (CIRCLE_COS, CIRCLE_SIN):
            raise UsageError("circle symbols are not differentiable coordinates")
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return Scalar(out, self.table, True)

    def substitute(self, bindings: Mapping[str, "Scalar"], target: SymbolTable | None = None,
                   check: bool = True) -> "Scalar":
        """Simultaneous substitution.

        Unbound symbols are carried over by name into ``target`` (default:
        the same table).  Binding one member of a conjugate pair implies the
        conjugate binding for its partner; binding ``cos`` or ``sin`` requires
        the pair to be bound together with ``cos^2 + sin^2 = 1``.
        """
        src = self.table
        target = target or src
        full = _complete_bindings(src, target, bindings, check)
        images = []
        for k, name in enumerate(src.names):
            if name in full:
                images.append(full[name])
            else:
                images.append(Scalar.symbol(name, target))
        return _evaluate_terms(self.terms, images, Scalar.zero(target), Scalar.one(target))

    def rename_into(self, target: SymbolTable) -> "Scalar":
        """Re-home onto another table that declares every used symbol."""
        if target is self.table or target == self.table:
            return self
        used = self.free_symbols()
        idx = [target.index(self.table.names[k]) if self.table.names[k] in used else None
               for k in range(self.table.nvars)]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * target.nvars
            for k, x in enumerate(e):
                if x:
                    ne[idx[k]] = x
            out[tuple(ne)] = c
        return Scalar(out, target)

    def eval(self, point: Mapping[str, object], t=None) -> GaussianRational:
        """Exact value at a point.

        ``point`` maps symbol names to rationals (or Gaussian rationals for
        conjugate-pair symbols; a missing partner is the conjugate).  Circle
        symbols are evaluated through ``cos=(1-t^2)/(1+t^2)``,
        ``sin=2t/(1+t^2)`` unless bound directly.
        """
        table = self.table
        values = []
        for k, sym in enumerate(table.symbols):
            if sym.name in point:
                values.append(GaussianRational.coerce(point[sym.name]))
            elif sym.kind == CONJUGATE and sym.partner in point:
                values.append(GaussianRational.coerce(point[sym.partner]).conjugate())
            elif sym.kind in (CIRCLE_COS, CIRCLE_SIN) and t is not None:
                tt = to_fraction(t)
                den = 1 + tt * tt
                v = (1 - tt * tt) / den if sym.kind == CIRCLE_COS else 2 * tt / den
                values.append(GaussianRational(v))
            else:
                needed = any(e[k] for e in self.terms)
                if needed:
                    raise UsageError(f"unbound symbol {sym.name!r}")
                values.append(_ZERO)
        if table.cos_index is not None and any(
            e[table.cos_index] or e[table.sin_index] for e in self.terms
        ):
            c, s = values[table.cos_index], values[table.sin_index]
            if c * c + s * s != 1:
                raise InvalidBinding("cos^2 + sin^2 != 1 at the evaluation point")
        total = _ZERO
        for e, coef in self.terms.items():
            term = coef
            for k, x in enumerate(e):
                if x:
                    term = term * values[k] ** x
            total = total + term
        return total

    def circle_rational(self, t_name: str, target: SymbolTable):
        """Clear the circle parametrization in a fresh real symbol.

        Returns ``(numerator, power)`` with
        ``self = numerator / (1 + t^2)^power`` after substituting
        ``cos=(1-t^2)/(1+t^2)`` and ``sin=2t/(1+t^2)``.
        """
        ci, si = self.table.cos_index, self.table.sin_index
        if ci is None:
            return self.rename_into(target), 0
        power = max((e[ci] + e[si] for e in self.terms), default=0)
        t = Scalar.symbol(t_name, target)
        den = 1 + t * t
        cnum = 1 - t * t
        snum = 2 * t
        total = Scalar.zero(target)
        for e, coef in self.terms.items():
            mono = Scalar.const(coef, target)
            for k, x in enumerate(e):
                if x and k not in (ci, si):
                    mono = mono * Scalar.symbol(self.table.names[k], target) ** x
            deg = e[ci] + e[si]
            mono = mono * cnum ** e[ci] * snum ** e[si] * den ** (power - deg)
            total = total + mono
        return total, power

    def divexact(self, other: "Scalar") -> "Scalar | None":
        """Quotient when ``other`` divides ``self`` exactly, else ``None``."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        if self.table.sin_index is not None and (
            any(e[self.table.sin_index] for e in self.terms)
            or any(e[self.table.sin_index] for e in other.terms)
        ):
            raise UsageError("exact division is not defined modulo the circle relation")
        le, lc = other.leading_term()
        lc_inv = lc.inverse()
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            if any(x < y for x, y in zip(e, le)):
                return None
            qe = tuple(x - y for x, y in zip(e, le))
            qc = rem[e] * lc_inv
            quot[qe] = qc
            for oe, oc in other.terms.items():
                _add_into(rem, tuple(x + y for x, y in zip(oe, qe)), -(oc * qc))
        return Scalar(quot, self.table, True)

    # text ------------------------------------------------------------------
    def sort_key(self):
        return tuple(sorted(((e, c.re, c.im) for e, c in self.terms.items()), reverse=True))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            factors = []
            for k, x in enumerate(e):
                if x == 1:
                    factors.append(self.table.names[k])
                elif x:
                    factors.append(f"{self.table.names[k]}^{x}")
            if not factors:
                parts.append(str(c))
                continue
            mono = "*".join(factors)
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __repr__(self):
        return f"Scalar({str(self)!r})"


def _reduce_sin(exp, coef, table):
    """Rewrite sin^k with k >= 2 via sin^2 = 1 - cos^2."""
    s, c = table.sin_index, table.cos_index
    k = exp[s]
    base = list(exp)
    base[s] = k % 2
    pairs = k // 2
    # (1 - cos^2)^pairs = sum_j binom(pairs, j) (-1)^j cos^(2j)
    out = []
    binom = 1
    for j in range(pairs + 1):
        e = list(base)
        e[c] += 2 * j
        out.append((tuple(e), coef * (binom if j % 2 == 0 else -binom)))
        binom = binom * (pairs - j) // (j + 1)
    return out


def _complete_bindings(src, target, bindings, check):
    full = {}
    for name, value in bindings.items():
        if not isinstance(value, Scalar):
            value = Scalar.const(value, target)
        elif value.table != target:
            value = value.rename_into(target)
        src.index(name)
        full[name] = value
    for name in list(full):
        sym = src.symbols[src.index(name)]
        if sym.kind == CONJUGATE and sym.partner not in full:
            full[sym.partner] = full[name].conjugate()
        elif sym.kind == CONJUGATE and check:
            if full[sym.partner] != full[name].conjugate():
                raise InvalidBinding(f"bindings for {name} and {sym.partner} are not conjugate")
    if src.cos_index is not None:
        cname, sname = src.names[src.cos_index], src.names[src.sin_index]
        if (cname in full) != (sname in full):
            raise InvalidBinding("cos and sin must be bound together")
        if cname in full and check:
            c, s = full[cname], full[sname]
            if not (c * c + s * s - 1).is_zero():
                raise InvalidBinding("binding violates cos^2 + sin^2 = 1")
    return full


def _evaluate_terms(terms, images, zero, one):
    total = zero
    cache: dict = {}
    for e, coef in terms.items():
        term = one * coef
        for k, x in enumerate(e):
            if x:
                key = (k, x)
                if key not in cache:
                    cache[key] = images[k] ** x
                term = term * cache[key]
        total = total + term
    return total


# --------------------------------------------------------------------------
# text grammar


def parse_scalar(text: str, table: SymbolTable) -> Scalar:
    """Parse the scalar grammar: integers, ``p/q``, ``i``, identifiers,
    ``+ - * ( )``, ``conj(...)`` and ``^`` with non-negative integer exponents.
    ``cos(x)``/``sin(x)`` name the table's circle pair."""
    return _eval_scalar(parse(text), table, text)


def _eval_scalar(node, table, text):
    tag = node[0]
    if tag == "num":
        return Scalar.const(node[1], table)
    if tag == "sym":
        name = node[1]
        if name == "i" and "i" not in table:
            return Scalar.imag_unit(table)
        if name not in table:
            raise ParseError(f"unknown symbol {name!r}", text, 0)
        return Scalar.symbol(name, table)
    if tag == "add":
        total = Scalar.zero(table)
        for n in node[1]:
            total = total + _eval_scalar(n, table, text)
        return total
    if tag == "neg":
        return -_eval_scalar(node[1], table, text)
    if tag == "mul":
        return _eval_scalar(node[1], table, text) * _eval_scalar(node[2], table, text)
    if tag == "div":
        num = _eval_scalar(node[1], table, text)
        den = _eval_scalar(node[2], table, text)
        if not den.is_constant() or den.is_zero():
            raise ParseError("division only by non-zero constants", text, 0)
        return num / den
    if tag == "pow":
        base = _eval_scalar(node[1], table, text)
        exp = _eval_scalar(node[2], table, text)
        if not exp.is_constant():
            raise ParseError("exponent must be a constant", text, 0)
        v = exp.constant_value()
        if v.im != 0 or v.re.denominator != 1 or v.re < 0:
            raise ParseError("exponent must be a non-negative integer", text, 0)
        return base ** int(v.re)
    if tag == "call":
        name, args = node[1], node[2]
        if name == "conj" and len(args) == 1:
            return _eval_scalar(args[0], table, text).conjugate()
        if name in ("cos", "sin") and len(args) == 1 and table.cos_index is not None:
            idx = table.cos_index if name == "cos" else table.sin_index
            return Scalar.symbol(table.names[idx], table)
        raise ParseError(f"unsupported function {name!r}", text, 0)
    raise ParseError(f"unsupported construct {tag!r}", text, 0)
