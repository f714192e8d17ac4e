"""Coordinate expressions for local coframings and their verification.

A :class:`CoordScalar` is a finite sum of terms

    N / (A_1^m_1 ... A_k^m_k) * exp(P) * pow(B_1, e_1) ... * log(L_1) ...

where ``N``, ``A_j``, ``P``, ``B_j`` and ``L_j`` are polynomials in the
coordinates, their conjugates and the parameters, and each exponent ``e_j``
is a rational function of the parameters only.  Denominator atoms are kept
monic, so a sum normalizes to zero exactly when every numerator vanishes.
``pow`` and ``log`` are formal symbols obeying the chain rule; they are never
evaluated on complex charts.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

import mpmath

from .exterior import GENERATORS
from .models import STANDARD_TABLE, CoframeModel, EngelConstants, FamilyId, family_model, from_constants
from .parsing import ParseError, parse as parse_tree
from .scalar import CONJUGATE, GaussianRational, Scalar, Symbol, SymbolTable, UsageError, parse_scalar

__all__ = [
    "Chart",
    "CoordScalar",
    "CoordForm",
    "parse",
    "partial",
    "d_coord",
    "wedge",
    "zero_test",
    "pullback",
    "real_chart",
    "ResidueEntry",
    "LocalModelReport",
    "check_local_model",
    "load_chart",
    "fixture_charts",
]


# --------------------------------------------------------------------------
# rational parts


def _monic(p: Scalar) -> tuple[GaussianRational, Scalar]:
    _, c = p.leading_term()
    return c, p * c.inverse()


def _is_integer(c: GaussianRational) -> bool:
    return c.im == 0 and c.re.denominator == 1


class _Rat:
    """``num / prod(atom^m)`` with monic, pairwise distinct atoms."""

    __slots__ = ("num", "den")

    def __init__(self, num: Scalar, den: tuple = ()):
        self.num = num
        self.den = den

    @classmethod
    def make(cls, num: Scalar, den_items=()) -> "_Rat":
        acc: dict[Scalar, int] = {}
        for atom, m in den_items:
            if m == 0:
                continue
            if atom.is_zero():
                raise ZeroDivisionError("division by zero in a coordinate expression")
            if atom.is_constant():
                num = num * (atom.constant_value() ** -m)
                continue
            c, a = _monic(atom)
            num = num * (c ** -m)
            acc[a] = acc.get(a, 0) + m
        neg = [(a, m) for a, m in acc.items() if m < 0]
        for a, m in neg:
            num = num * a ** (-m)
            del acc[a]
        return cls._cancel(num, acc)

    @classmethod
    def _cancel(cls, num: Scalar, acc: dict) -> "_Rat":
        if num.is_zero():
            return cls(num, ())
        for a in list(acc):
            m = acc[a]
            while m:
                q = num.divexact(a)
                if q is None:
                    break
                num, m = q, m - 1
            if m:
                acc[a] = m
            else:
                del acc[a]
        return cls(num, tuple(sorted(acc.items(), key=lambda kv: kv[0].sort_key())))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "_Rat") -> "_Rat":
        d1, d2 = dict(self.den), dict(other.den)
        lcm = {a: max(d1.get(a, 0), d2.get(a, 0)) for a in set(d1) | set(d2)}
        n1, n2 = self.num, other.num
        for a, m in lcm.items():
            if m - d1.get(a, 0):
                n1 = n1 * a ** (m - d1.get(a, 0))
            if m - d2.get(a, 0):
                n2 = n2 * a ** (m - d2.get(a, 0))
        return _Rat._cancel(n1 + n2, lcm)

    def __mul__(self, other: "_Rat") -> "_Rat":
        acc = dict(self.den)
        for a, m in other.den:
            acc[a] = acc.get(a, 0) + m
        return _Rat._cancel(self.num * other.num, acc)

    def __neg__(self):
        return _Rat(-self.num, self.den)

    def scale(self, s: Scalar) -> "_Rat":
        return _Rat._cancel(self.num * s, dict(self.den))

    def over(self, poly: Scalar, m: int = 1) -> "_Rat":
        return _Rat.make(self.num, list(self.den) + [(poly, m)])

    def diff(self, name: str) -> "_Rat":
        out = _Rat._cancel(self.num.diff(name), dict(self.den))
        for a, m in self.den:
            da = a.diff(name)
            if not da.is_zero():
                out = out + _Rat(-self.num * da * m, self.den).over(a)
        return out

    def map(self, fn) -> "_Rat":
        return _Rat.make(fn(self.num), [(fn(a), m) for a, m in self.den])

    def eval(self, point) -> GaussianRational:
        v = self.num.eval(point)
        for a, m in self.den:
            av = a.eval(point)
            if not av:
                raise ZeroDivisionError("pole")
            v = v * av ** -m
        return v

    def __str__(self):
        if not self.den:
            return f"({self.num})"
        den = "*".join(f"({a})^{m}" if m != 1 else f"({a})" for a, m in self.den)
        return f"({self.num})/({den})"


# --------------------------------------------------------------------------
# transcendental keys


@dataclass(frozen=True)
class _Pow:
    base: Scalar
    en: Scalar
    ed: Scalar


@dataclass(frozen=True)
class _Key:
    exp: Scalar | None = None
    pows: tuple[_Pow, ...] = ()
    logs: tuple[Scalar, ...] = ()

    def is_trivial(self) -> bool:
        return self.exp is None and not self.pows and not self.logs


_UNIT = _Key()


def _norm_exponent(en: Scalar, ed: Scalar):
    """Canonical ``(en, ed)`` for the exponent ``en/ed``."""
    if ed.is_zero():
        raise ZeroDivisionError("exponent has a zero denominator")
    if ed.is_constant():
        return en * ed.constant_value().inverse(), Scalar.one(ed.table)
    c, ed = _monic(ed)
    en = en * c.inverse()
    q = en.divexact(ed)
    if q is not None:
        return q, Scalar.one(ed.table)
    return en, ed


def _integer_exponent(en: Scalar, ed: Scalar):
    if ed.is_constant() and en.is_constant():
        c = en.constant_value() * ed.constant_value().inverse()
        if _is_integer(c):
            return int(c.re)
    return None


def _exponent_difference(p: _Pow, q: _Pow):
    """``p - q`` as an integer, or None when it is not a constant integer."""
    num = p.en * q.ed - q.en * p.ed
    den = p.ed * q.ed
    quo = num.divexact(den)
    if quo is None or not quo.is_constant():
        return None
    c = quo.constant_value()
    return int(c.re) if _is_integer(c) else None


def _power_rat(base: Scalar, k: int) -> _Rat:
    one = Scalar.one(base.table)
    if k >= 0:
        return _Rat(base ** k)
    return _Rat(one).over(base, -k)


def _sorted_pows(pows) -> tuple[_Pow, ...]:
    return tuple(sorted(pows, key=lambda p: (p.base.sort_key(), p.en.sort_key(), p.ed.sort_key())))


def _sorted_logs(logs) -> tuple[Scalar, ...]:
    return tuple(sorted(logs, key=lambda s: s.sort_key()))


def _mul_keys(k1: _Key, k2: _Key, table) -> tuple[_Key, _Rat]:
    extra = _Rat(Scalar.one(table))
    if k1.exp is None:
        exp = k2.exp
    elif k2.exp is None:
        exp = k1.exp
    else:
        exp = k1.exp + k2.exp
        if exp.is_zero():
            exp = None
    pows = {p.base: p for p in k1.pows}
    for p in k2.pows:
        q = pows.get(p.base)
        if q is None:
            pows[p.base] = p
            continue
        if q.ed == p.ed:
            en, ed = q.en + p.en, p.ed
        else:
            en, ed = q.en * p.ed + p.en * q.ed, q.ed * p.ed
        en, ed = _norm_exponent(en, ed)
        k = _integer_exponent(en, ed)
        if k is None:
            pows[p.base] = _Pow(p.base, en, ed)
        else:
            del pows[p.base]
            if k:
                extra = extra * _power_rat(p.base, k)
    key = _Key(exp, _sorted_pows(pows.values()), _sorted_logs(k1.logs + k2.logs))
    return key, extra


def _insert(terms: dict, key: _Key, rat: _Rat) -> None:
    if rat.is_zero():
        return
    if key in terms:
        total = terms[key] + rat
        if total.is_zero():
            del terms[key]
        else:
            terms[key] = total
        return
    if key.pows:
        bases = [p.base for p in key.pows]
        for other in terms:
            if other.exp != key.exp or other.logs != key.logs or [p.base for p in other.pows] != bases:
                continue
            shifts = [_exponent_difference(p, q) for p, q in zip(key.pows, other.pows)]
            if any(s is None for s in shifts):
                continue
            for p, s in zip(key.pows, shifts):
                if s:
                    rat = rat * _power_rat(p.base, s)
            _insert(terms, other, rat)
            return
    terms[key] = rat


# --------------------------------------------------------------------------
# scalars


class CoordScalar:
    """Normalized sum of transcendental terms with rational coefficients."""

    __slots__ = ("terms", "table")

    def __init__(self, terms: dict, table: SymbolTable):
        self.terms = terms
        self.table = table

    # constructors
    @classmethod
    def zero(cls, table):
        return cls({}, table)

    @classmethod
    def from_scalar(cls, s: Scalar) -> "CoordScalar":
        return cls({_UNIT: _Rat(s)} if not s.is_zero() else {}, s.table)

    @classmethod
    def const(cls, value, table):
        return cls.from_scalar(Scalar.const(value, table))

    @classmethod
    def exp_of(cls, arg: Scalar) -> "CoordScalar":
        one = Scalar.one(arg.table)
        if arg.is_zero():
            return cls.from_scalar(one)
        return cls({_Key(exp=arg): _Rat(one)}, arg.table)

    @classmethod
    def pow_of(cls, base: Scalar, en: Scalar, ed: Scalar | None = None) -> "CoordScalar":
        table = base.table
        one = Scalar.one(table)
        en, ed = _norm_exponent(en, one if ed is None else ed)
        k = _integer_exponent(en, ed)
        if k is not None:
            return cls({_UNIT: _power_rat(base, k)}, table)
        if base.is_zero():
            raise ZeroDivisionError("pow of zero with a non-integer exponent")
        return cls({_Key(pows=(_Pow(base, en, ed),)): _Rat(one)}, table)

    @classmethod
    def log_of(cls, base: Scalar) -> "CoordScalar":
        if base.is_zero():
            raise ZeroDivisionError("log of zero")
        return cls({_Key(logs=(base,)): _Rat(Scalar.one(base.table))}, base.table)

    # arithmetic
    def _coerce(self, other) -> "CoordScalar":
        if isinstance(other, CoordScalar):
            if other.table != self.table:
                raise UsageError("mismatched symbol tables")
            return other
        if isinstance(other, Scalar):
            return CoordScalar.from_scalar(other)
        if isinstance(other, (int, Fraction, GaussianRational)) and not isinstance(other, bool):
            return CoordScalar.const(other, self.table)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, r in other.terms.items():
            _insert(terms, k, r)
        return CoordScalar(terms, self.table)

    __radd__ = __add__

    def __neg__(self):
        return CoordScalar({k: -r for k, r in self.terms.items()}, self.table)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for k1, r1 in self.terms.items():
            for k2, r2 in other.terms.items():
                key, extra = _mul_keys(k1, k2, self.table)
                _insert(terms, key, r1 * r2 * extra)
        return CoordScalar(terms, self.table)

    __rmul__ = __mul__

    def inverse(self) -> "CoordScalar":
        if not self.terms:
            raise ZeroDivisionError("division by zero")
        if len(self.terms) != 1:
            raise UsageError("cannot divide by a sum of distinct transcendental terms")
        (key, rat), = self.terms.items()
        if key.logs:
            raise UsageError("cannot divide by a log factor")
        one = Scalar.one(self.table)
        inv = _Rat.make(one, [(rat.num, 1)])
        for a, m in rat.den:
            inv = inv.scale(a ** m)
        out = CoordScalar({_UNIT: inv}, self.table)
        if key.exp is not None:
            out = out * CoordScalar.exp_of(-key.exp)
        for p in key.pows:
            out = out * CoordScalar.pow_of(p.base, -p.en, p.ed)
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise UsageError("integer exponent expected")
        base = self if k >= 0 else self.inverse()
        out = CoordScalar.const(1, self.table)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        if not isinstance(other, CoordScalar):
            other = self._coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(k.is_trivial() for k in self.terms)

    def has_formal_factors(self) -> bool:
        return any(k.pows or k.logs for k in self.terms)

    def as_polynomial(self) -> Scalar | None:
        if not self.terms:
            return Scalar.zero(self.table)
        if len(self.terms) == 1:
            (key, rat), = self.terms.items()
            if key.is_trivial() and not rat.den:
                return rat.num
        return None

    def free_symbols(self) -> set[str]:
        out: set[str] = set()
        for key, rat in self.terms.items():
            out |= rat.num.free_symbols()
            for a, _ in rat.den:
                out |= a.free_symbols()
            if key.exp is not None:
                out |= key.exp.free_symbols()
            for p in key.pows:
                out |= p.base.free_symbols() | p.en.free_symbols() | p.ed.free_symbols()
            for lg in key.logs:
                out |= lg.free_symbols()
        return out

    # maps
    def map_scalars(self, fn, table=None) -> "CoordScalar":
        """Apply ``fn`` to every polynomial ingredient and renormalize."""
        table = table or self.table
        out = CoordScalar.zero(table)
        for key, rat in self.terms.items():
            piece = CoordScalar({_UNIT: rat.map(fn)} if not rat.is_zero() else {}, table)
            if key.exp is not None:
                piece = piece * CoordScalar.exp_of(fn(key.exp))
            for p in key.pows:
                piece = piece * CoordScalar.pow_of(fn(p.base), fn(p.en), fn(p.ed))
            for lg in key.logs:
                piece = piece * CoordScalar.log_of(fn(lg))
            out = out + piece
        return out

    def conjugate(self) -> "CoordScalar":
        return self.map_scalars(lambda s: s.conjugate())

    def substitute(self, bindings: Mapping[str, Scalar], target: SymbolTable | None = None) -> "CoordScalar":
        return self.map_scalars(lambda s: s.substitute(bindings, target), target)

    def partial(self, name: str) -> "CoordScalar":
        table = self.table
        terms: dict = {}
        for key, rat in self.terms.items():
            _insert(terms, key, rat.diff(name))
            if key.exp is not None:
                dp = key.exp.diff(name)
                if not dp.is_zero():
                    _insert(terms, key, rat.scale(dp))
            for p in key.pows:
                db = p.base.diff(name)
                if not db.is_zero():
                    _insert(terms, key, rat.scale(p.en * db).over(p.ed).over(p.base))
            for j, lg in enumerate(key.logs):
                dl = lg.diff(name)
                if dl.is_zero():
                    continue
                rest = _Key(key.exp, key.pows, key.logs[:j] + key.logs[j + 1:])
                _insert(terms, rest, rat.scale(dl).over(lg))
        return CoordScalar(terms, table)

    def eval(self, point) -> mpmath.mpc:
        """Numeric value; pow and log use principal branches."""
        total = mpmath.mpc(0)
        for key, rat in self.terms.items():
            v = _to_mp(rat.eval(point))
            if key.exp is not None:
                v *= mpmath.exp(_to_mp(key.exp.eval(point)))
            for p in key.pows:
                e = _to_mp(p.en.eval(point)) / _to_mp(p.ed.eval(point))
                v *= mpmath.power(_to_mp(p.base.eval(point)), e)
            for lg in key.logs:
                v *= mpmath.log(_to_mp(lg.eval(point)))
            total += v
        return total

    def formal_bases(self):
        for key in self.terms:
            for p in key.pows:
                yield p.base
            yield from key.logs

    def denominators(self):
        for rat in self.terms.values():
            for a, _ in rat.den:
                yield a

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, rat in sorted(self.terms.items(), key=lambda kv: _key_sort(kv[0])):
            bits = [str(rat)]
            if key.exp is not None:
                bits.append(f"exp({key.exp})")
            for p in key.pows:
                bits.append(f"pow({p.base}, ({p.en})/({p.ed}))")
            for lg in key.logs:
                bits.append(f"log({lg})")
            parts.append("*".join(bits))
        return " + ".join(parts)

    def __repr__(self):
        return f"CoordScalar({self})"


def _key_sort(key: _Key):
    return (
        key.exp.sort_key() if key.exp is not None else (),
        tuple((p.base.sort_key(), p.en.sort_key(), p.ed.sort_key()) for p in key.pows),
        tuple(lg.sort_key() for lg in key.logs),
    )


def _to_mp(c: GaussianRational) -> mpmath.mpc:
    return mpmath.mpc(mpmath.mpf(c.re.numerator) / c.re.denominator,
                      mpmath.mpf(c.im.numerator) / c.im.denominator)


# --------------------------------------------------------------------------
# forms


def _sort_sign(idx: Sequence[int]):
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


class CoordForm:
    """Differential form in the chart differentials with CoordScalar coefficients."""

    __slots__ = ("comps", "chart", "table")

    def __init__(self, comps: Mapping[tuple, CoordScalar], chart: "Chart", table: SymbolTable):
        self.comps = {k: v for k, v in comps.items() if not v.is_zero()}
        self.chart = chart
        self.table = table

    @classmethod
    def differential(cls, name: str, chart: "Chart", table) -> "CoordForm":
        k = chart.variables.index(name)
        return cls({(k,): CoordScalar.const(1, table)}, chart, table)

    def degree(self) -> int | None:
        degs = {len(k) for k in self.comps}
        return degs.pop() if len(degs) == 1 else (None if degs else 0)

    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "CoordForm") -> "CoordForm":
        if not isinstance(other, CoordForm):
            return NotImplemented
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return CoordForm(out, self.chart, self.table)

    def __neg__(self):
        return CoordForm({k: -v for k, v in self.comps.items()}, self.chart, self.table)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "CoordForm":
        return CoordForm({k: v * f for k, v in self.comps.items()}, self.chart, self.table)

    def wedge(self, other: "CoordForm") -> "CoordForm":
        out: dict = {}
        for k1, v1 in self.comps.items():
            for k2, v2 in other.comps.items():
                key, sign = _sort_sign(k1 + k2)
                if key is None:
                    continue
                term = v1 * v2 if sign > 0 else -(v1 * v2)
                out[key] = out[key] + term if key in out else term
        return CoordForm(out, self.chart, self.table)

    def conjugate(self) -> "CoordForm":
        perm = self.chart.conj_perm
        out: dict = {}
        for k, v in self.comps.items():
            key, sign = _sort_sign([perm[i] for i in k])
            cv = v.conjugate()
            out[key] = cv if sign > 0 else -cv
        return CoordForm(out, self.chart, self.table)

    def substitute(self, bindings, target=None) -> "CoordForm":
        return CoordForm({k: v.substitute(bindings, target) for k, v in self.comps.items()},
                         self.chart, target or self.table)

    def component(self, names: Sequence[str]) -> CoordScalar:
        key, sign = _sort_sign([self.chart.variables.index(n) for n in names])
        v = self.comps.get(key, CoordScalar.zero(self.table))
        return v if sign > 0 else -v

    def monomial_name(self, key) -> str:
        return "^".join("d" + self.chart.variables[i] for i in key)

    def __eq__(self, other):
        if not isinstance(other, CoordForm):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self):
        if not self.comps:
            return "0"
        return " + ".join(f"({v})*{self.monomial_name(k)}" for k, v in sorted(self.comps.items()))


def wedge(*forms: CoordForm) -> CoordForm:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def partial(f: CoordScalar, coord: str) -> CoordScalar:
    return f.partial(coord)


def d_coord(f: CoordForm) -> CoordForm:
    """Exterior derivative in the chart variables."""
    out: dict = {}
    for k, v in f.comps.items():
        for j, name in enumerate(f.chart.variables):
            dv = v.partial(name)
            if dv.is_zero():
                continue
            key, sign = _sort_sign((j,) + k)
            if key is None:
                continue
            term = dv if sign > 0 else -dv
            out[key] = out[key] + term if key in out else term
    return CoordForm(out, f.chart, f.table)


# --------------------------------------------------------------------------
# charts and parsing


@dataclass(frozen=True)
class Chart:
    """Holomorphic coordinates (conjugates implied) plus optional real ones."""

    coordinates: tuple[str, ...] = ("z", "w")
    real_coordinates: tuple[str, ...] = ()
    parameters: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "real_coordinates", tuple(self.real_coordinates))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        names = self.variables + self.parameters
        if len(set(names)) != len(names):
            raise UsageError("chart names must be distinct")

    @property
    def variables(self) -> tuple[str, ...]:
        out = []
        for z in self.coordinates:
            out += [z, z + "bar"]
        return tuple(out) + self.real_coordinates

    @property
    def conj_perm(self) -> tuple[int, ...]:
        perm = []
        for k in range(len(self.coordinates)):
            perm += [2 * k + 1, 2 * k]
        n = 2 * len(self.coordinates)
        return tuple(perm) + tuple(range(n, n + len(self.real_coordinates)))

    def table(self, base: SymbolTable = STANDARD_TABLE) -> SymbolTable:
        return _chart_table(self, base)

    def parse(self, text: str, base: SymbolTable = STANDARD_TABLE):
        return parse(text, self, self.table(base))

    def to_json(self) -> dict:
        return {
            "coordinates": list(self.coordinates),
            "real_coordinates": list(self.real_coordinates),
            "parameters": list(self.parameters),
        }


@lru_cache(maxsize=None)
def _chart_table(chart: Chart, base: SymbolTable) -> SymbolTable:
    extra = []
    for p in chart.parameters:
        if p not in base:
            extra.append(Symbol(p))
    for z in chart.coordinates:
        extra += [Symbol(z, CONJUGATE, z + "bar"), Symbol(z + "bar", CONJUGATE, z)]
    extra += [Symbol(x) for x in chart.real_coordinates]
    return base.extend(extra)


class _Evaluator:
    def __init__(self, chart: Chart, table: SymbolTable, text: str):
        self.chart = chart
        self.table = table
        self.text = text
        self.diffs = {"d" + v: v for v in chart.variables}

    def fail(self, msg):
        raise ParseError(msg, self.text, 0)

    def scalar(self, value) -> CoordScalar:
        if isinstance(value, CoordForm):
            self.fail("differential where a scalar is required")
        return value

    def polynomial(self, value, what) -> Scalar:
        p = self.scalar(value).as_polynomial()
        if p is None:
            self.fail(f"{what} must be a polynomial")
        return p

    def run(self, node):
        tag = node[0]
        if tag == "num":
            return CoordScalar.const(node[1], self.table)
        if tag == "sym":
            name = node[1]
            if name in self.diffs:
                return CoordForm.differential(self.diffs[name], self.chart, self.table)
            if name in self.table:
                return CoordScalar.from_scalar(Scalar.symbol(name, self.table))
            if name == "i":
                return CoordScalar.from_scalar(Scalar.imag_unit(self.table))
            self.fail(f"unknown identifier {name!r}")
        if tag == "add":
            vals = [self.run(n) for n in node[1]]
            if any(isinstance(v, CoordForm) for v in vals):
                if not all(isinstance(v, CoordForm) for v in vals):
                    self.fail("cannot add a scalar to a form")
            out = vals[0]
            for v in vals[1:]:
                out = out + v
            return out
        if tag == "neg":
            return -self.run(node[1])
        if tag == "mul":
            left, right = self.run(node[1]), self.run(node[2])
            if isinstance(left, CoordForm) and isinstance(right, CoordForm):
                self.fail("differentials must appear linearly")
            if isinstance(left, CoordForm):
                return left.scale(right)
            if isinstance(right, CoordForm):
                return right.scale(left)
            return left * right
        if tag == "div":
            left = self.run(node[1])
            inv = self.invert(node[2])
            return left.scale(inv) if isinstance(left, CoordForm) else left * inv
        if tag == "pow":
            base = self.scalar(self.run(node[1]))
            k = self.integer(self.scalar(self.run(node[2])))
            if k is not None:
                return base ** k
            return self.make_pow(base, self.run(node[2]))
        if tag == "call":
            return self.call(node[1], node[2])
        self.fail(f"unsupported node {tag}")

    def integer(self, value: CoordScalar):
        p = value.as_polynomial()
        if p is not None and p.is_constant() and _is_integer(p.constant_value()):
            return int(p.constant_value().re)
        return None

    def invert(self, node) -> CoordScalar:
        if node[0] == "mul":
            return self.invert(node[1]) * self.invert(node[2])
        if node[0] == "neg":
            return -self.invert(node[1])
        if node[0] == "div":
            return self.invert(node[1]) * self.scalar(self.run(node[2]))
        value = self.scalar(self.run(node))
        try:
            return value.inverse()
        except ZeroDivisionError:
            self.fail("division by zero")
        except UsageError as exc:
            self.fail(str(exc))

    def make_pow(self, base, exponent) -> CoordScalar:
        b = self.polynomial(base, "pow base")
        e = self.scalar(exponent)
        coords = set(self.chart.variables)
        if e.free_symbols() & coords:
            self.fail("pow exponent must not depend on the coordinates")
        if e.is_zero():
            return CoordScalar.const(1, self.table)
        if len(e.terms) != 1:
            self.fail("pow exponent must be a rational function of the parameters")
        (key, rat), = e.terms.items()
        if not key.is_trivial():
            self.fail("pow exponent must be a rational function of the parameters")
        den = Scalar.one(self.table)
        for a, m in rat.den:
            den = den * a ** m
        return CoordScalar.pow_of(b, rat.num, den)

    def call(self, name, args):
        vals = [self.run(a) for a in args]
        if name == "conj" and len(vals) == 1:
            return vals[0].conjugate()
        if name == "exp" and len(vals) == 1:
            return CoordScalar.exp_of(self.polynomial(vals[0], "exp argument"))
        if name == "log" and len(vals) == 1:
            return CoordScalar.log_of(self.polynomial(vals[0], "log argument"))
        if name == "pow" and len(vals) == 2:
            k = self.integer(self.scalar(vals[1]))
            if k is not None:
                return self.scalar(vals[0]) ** k
            return self.make_pow(vals[0], vals[1])
        self.fail(f"unknown function {name}/{len(vals)}")


def parse(text: str, chart: Chart | None = None, table: SymbolTable | None = None):
    """Parse a chart expression into a :class:`CoordScalar` or :class:`CoordForm`."""
    chart = chart or Chart()
    table = table or chart.table()
    return _Evaluator(chart, table, text).run(parse_tree(text))


# --------------------------------------------------------------------------
# change of coordinates


def pullback(f: CoordForm, images: Mapping[str, Scalar], chart: Chart, table: SymbolTable) -> CoordForm:
    """Pull ``f`` back along polynomial coordinate images in ``chart``.

    ``images`` maps every variable of ``f.chart`` to a polynomial over
    ``table`` in the variables of ``chart``.
    """
    names = f.chart.variables
    missing = [v for v in names if v not in images]
    if missing:
        raise UsageError(f"no image for {missing}")
    d_images = []
    for v in names:
        img = images[v]
        d_images.append(CoordForm(
            {(j,): CoordScalar.from_scalar(img.diff(x)) for j, x in enumerate(chart.variables)},
            chart, table,
        ))
    binding = {v: images[v] for v in names}
    out = CoordForm({}, chart, table)
    for k, v in f.comps.items():
        coeff = v.map_scalars(lambda s: _substitute_all(s, binding, table), table)
        piece = wedge(*(d_images[i] for i in k)).scale(coeff)
        out = out + piece
    return out


def _substitute_all(s: Scalar, binding, table):
    # conjugate-pair images are given explicitly, so skip the implied-partner check
    return s.substitute(binding, table, check=False)


def real_chart(chart: Chart, names: Sequence[tuple[str, str]] | None = None) -> tuple[Chart, dict]:
    """Real chart with ``z = x + i y`` per holomorphic coordinate.

    Returns the new chart and the image map suitable for :func:`pullback`.
    """
    if names is None:
        defaults = [("x", "y"), ("u", "v"), ("s", "t")]
        names = defaults[: len(chart.coordinates)]
    reals = tuple(n for pair in names for n in pair)
    new = Chart((), reals + chart.real_coordinates, chart.parameters)
    table = new.table()
    images = {}
    i = Scalar.imag_unit(table)
    for z, (x, y) in zip(chart.coordinates, names):
        X, Y = Scalar.symbol(x, table), Scalar.symbol(y, table)
        images[z] = X + i * Y
        images[z + "bar"] = X - i * Y
    for r in chart.real_coordinates:
        images[r] = Scalar.symbol(r, table)
    return new, images


# --------------------------------------------------------------------------
# zero testing


def zero_test(f: CoordScalar, chart: Chart | None = None, samples: int = 32, seed: int = 0) -> str:
    """``"zero"``, ``"nonzero"`` or ``"undetermined"``.

    The normal form decides zero.  A nonzero normal form is confirmed by a
    nonzero value at random rational points.  Formal ``pow``/``log`` factors
    are only evaluated on real charts and only where their base is a positive
    rational; on complex charts such expressions are judged by normal form.
    """
    if f.is_zero():
        return "zero"
    real = chart is not None and not chart.coordinates
    if f.has_formal_factors() and not real:
        return "nonzero"
    rng = random.Random(seed)
    free = sorted(f.free_symbols())
    table = f.table
    for _ in range(samples * 4):
        point = {}
        for name in free:
            if table.kind(name) == CONJUGATE and table.partner(name) in point:
                continue
            re = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            im = Fraction(rng.randint(-40, 40), rng.randint(1, 9)) if table.kind(name) == CONJUGATE else 0
            point[name] = GaussianRational(re, im)
        try:
            if any(a.eval(point).norm() < Fraction(1, 10**6) for a in f.denominators()):
                continue
            bad = False
            for b in f.formal_bases():
                v = b.eval(point)
                if v.im != 0 or v.re <= Fraction(1, 1000):
                    bad = True
            if bad:
                continue
            with mpmath.workdps(50):
                value = f.eval(point)
        except (ZeroDivisionError, UsageError):
            continue
        samples -= 1
        if abs(value) > mpmath.mpf(10) ** -20:
            return "nonzero"
        if samples == 0:
            break
    return "undetermined"


# --------------------------------------------------------------------------
# local model verification


@dataclass(frozen=True)
class ResidueEntry:
    equation: str
    component: str
    value: str
    verdict: str

    def to_json(self) -> dict:
        return {"equation": self.equation, "component": self.component, "value": self.value,
                "verdict": self.verdict}


@dataclass(frozen=True)
class LocalModelReport:
    name: str
    entries: tuple[ResidueEntry, ...]
    volume: str = ""

    @property
    def ok(self) -> bool:
        return all(e.verdict == "zero" for e in self.entries)

    def failures(self) -> list[ResidueEntry]:
        return [e for e in self.entries if e.verdict != "zero"]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "volume_coefficient": self.volume,
            "residues": [e.to_json() for e in self.entries],
        }


def _resolve_model(model, point_bindings: dict) -> tuple[CoframeModel, dict]:
    bindings = dict(point_bindings)
    if isinstance(model, str):
        model = FamilyId(model)
    if isinstance(model, FamilyId):
        bindings = {**model.bindings(), **bindings}
        model = family_model(model)
    elif isinstance(model, EngelConstants):
        model = from_constants(model)
    if not isinstance(model, CoframeModel):
        raise UsageError("expected a family id, constants or a coframe model")
    return model, bindings


def _binding_scalars(point: Mapping | None, table: SymbolTable) -> dict:
    out = {}
    for name, v in (point or {}).items():
        if isinstance(v, Scalar):
            out[name] = v.rename_into(table)
        elif isinstance(v, str):
            out[name] = parse_scalar(v, table)
        else:
            out[name] = Scalar.const(v, table)
    return out


def _chain_bindings(bindings: dict) -> dict:
    """Resolve values that mention other bound parameters (``a = 1/4 - b^2``)."""
    for _ in range(len(bindings)):
        new = {k: v.substitute({j: w for j, w in bindings.items() if j != k}, check=False)
               for k, v in bindings.items()}
        if new == bindings:
            break
        bindings = new
    return bindings


def check_local_model(chart: Chart, omega1, omega2, model, point: Mapping | None = None,
                      name: str = "chart") -> LocalModelReport:
    """Residues of the structure equations evaluated on a coordinate coframing.

    ``model`` is a family name, :class:`FamilyId`, constants or an explicit
    :class:`CoframeModel`; ``point`` binds parameters (values or expression
    strings) in both the model and the chart expressions.
    """
    base = model.table if isinstance(model, (CoframeModel, EngelConstants)) else STANDARD_TABLE
    table = chart.table(base)
    model, raw = _resolve_model(model, {})
    bindings = {k: v.rename_into(table) for k, v in raw.items()}
    bindings.update(_binding_scalars(point, table))
    bindings = _chain_bindings(bindings)

    forms = []
    for om in (omega1, omega2):
        if isinstance(om, str):
            om = parse(om, chart, table)
        if not isinstance(om, CoordForm) or om.degree() not in (1,):
            raise UsageError("each omega must be a 1-form")
        forms.append(om.substitute(bindings) if bindings else om)
    w1, w2 = forms
    images = (w1, w1.conjugate(), w2, w2.conjugate())

    vol = wedge(*images)
    n = len(chart.variables)
    vol_coeff = vol.comps.get(tuple(range(n)), CoordScalar.zero(table)) if n == 4 else None
    if vol_coeff is not None and zero_test(vol_coeff, chart) == "zero":
        raise UsageError("degenerate coframing: w1^w1bar^w2^w2bar vanishes identically")

    entries = []
    residues = []
    pairs = list(combinations(range(n), 2))
    for g in range(4):
        rhs = CoordForm({}, chart, table)
        for mono, coeff in model.d_gen[g].comps.items():
            c = coeff.rename_into(table)
            if bindings:
                c = c.substitute(bindings, check=False)
            if not c.is_zero():
                rhs = rhs + wedge(*(images[i] for i in mono)).scale(CoordScalar.from_scalar(c))
        residue = d_coord(images[g]) - rhs
        residues.append(residue)
        for key in pairs:
            val = residue.comps.get(key, CoordScalar.zero(table))
            entries.append(ResidueEntry(
                f"d{GENERATORS[g]}", residue.monomial_name(key), str(val), zero_test(val, chart),
            ))
    for g in (0, 2):
        if residues[g + 1] != residues[g].conjugate():
            raise AssertionError(f"residue of d{GENERATORS[g + 1]} is not the conjugate of d{GENERATORS[g]}")
    volume = str(vol_coeff) if vol_coeff is not None else ""
    return LocalModelReport(name, tuple(entries), volume)


def load_chart(path_or_data) -> dict:
    """Read a chart file: returns ``chart``, ``omega1``, ``omega2`` and metadata."""
    import json
    from pathlib import Path

    if isinstance(path_or_data, (str, Path)):
        data = json.loads(Path(path_or_data).read_text())
    else:
        data = dict(path_or_data)
    for key in ("coordinates", "omega1", "omega2"):
        if key not in data:
            raise UsageError(f"chart file lacks {key!r}")
    chart = Chart(tuple(data["coordinates"]), tuple(data.get("real_coordinates", ())),
                  tuple(data.get("parameters", ())))
    return {
        "chart": chart,
        "omega1": data["omega1"],
        "omega2": data["omega2"],
        "case": data.get("case"),
        "point": data.get("point", {}),
        "bindings": data.get("bindings", {}),
        "name": data.get("name", "chart"),
        "comment": data.get("comment", ""),
    }


def fixture_charts(kind: str = "printed") -> list[dict]:
    """Bundled charts: ``"printed"`` displays, their ``"corrected"`` versions, or ``"all"``."""
    import json
    from importlib import resources

    out = []
    for entry in sorted(resources.files("engelcert.data.charts").iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".json"):
            continue
        data = json.loads(entry.read_text())
        is_fix = "corrects" in data
        if kind == "all" or (kind == "corrected") == is_fix:
            item = load_chart(data)
            item["file"] = entry.name
            item["corrects"] = data.get("corrects")
            out.append(item)
    return out
