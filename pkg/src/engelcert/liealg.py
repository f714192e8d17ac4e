"""Real Lie algebras from instantiated coframe models, with exact invariants."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from itertools import combinations

from . import linalg
from .models import CoframeModel, transform
from .scalar import GaussianRational, Scalar, SymbolTable, UsageError, parse_scalar, to_fraction

__all__ = [
    "REAL_LABELS",
    "RealCoframe",
    "RealLieAlgebra",
    "Fingerprint",
    "instantiate",
    "real_coframe",
    "realify",
    "jacobi_check",
    "invariants",
    "identify",
    "change_basis",
    "named_targets",
    "ADAPTED_BASES",
    "R_PLUS_SL2R",
    "R_PLUS_SU2",
    "SOLVABLE_C3_MINUS_QUARTER_PATTERN",
    "SOLVABLE_G4_10",
    "SOLVABLE_C1_PATTERN",
    "OTHER",
]

R_PLUS_SL2R = "R_plus_sl2R"
R_PLUS_SU2 = "R_plus_su2"
SOLVABLE_C3_MINUS_QUARTER_PATTERN = "SOLVABLE_C3_MINUS_QUARTER_PATTERN"
SOLVABLE_G4_10 = "SOLVABLE_G4_10"
SOLVABLE_C1_PATTERN = "SOLVABLE_C1_PATTERN"
OTHER = "OTHER"

REAL_LABELS = ("alpha", "beta", "gamma", "delta")

# complex basis changes used before splitting into real and imaginary parts
ADAPTED_BASES = {
    "C1": (("-1", "0"), ("1", "-1/2")),
    "C2": (("1", "0"), ("1", "-1/2 + i*(2*a - b)")),
    "C3": (("1", "-1/2 + i*b"), ("0", "1")),
    "C5": (("1", "-1/2 + i*b"), ("0", "1")),
    "C6": (("1", "-1/2 + i*b"), ("0", "1")),
}

# w1 = alpha + i beta, w1bar = alpha - i beta, w2 = gamma + i delta, w2bar = gamma - i delta
_I = GaussianRational(0, 1)
_ONE = GaussianRational(1)
_ZERO = GaussianRational(0)
_REAL_IMAGES = (
    (_ONE, _I, _ZERO, _ZERO),
    (_ONE, -_I, _ZERO, _ZERO),
    (_ZERO, _ZERO, _ONE, _I),
    (_ZERO, _ZERO, _ONE, -_I),
)
_PAIRS = tuple(combinations(range(4), 2))


def _point_bindings(point, table: SymbolTable) -> dict:
    out = {}
    for name, v in (point or {}).items():
        if name == "t":
            t = to_fraction(v)
            den = 1 + t * t
            out["cos_a"] = Scalar.const((1 - t * t) / den, table)
            out["sin_a"] = Scalar.const(2 * t / den, table)
        elif isinstance(v, Scalar):
            out[name] = v
        else:
            out[name] = Scalar.const(to_fraction(v), table)
    return out


def instantiate(model: CoframeModel, point=None) -> CoframeModel:
    """Bind parameters; every coefficient must become a constant."""
    inst = model.substitute(_point_bindings(point, model.table)) if point else model
    free = set()
    for f in inst.d_gen:
        for c in f.comps.values():
            free |= c.free_symbols()
    if free:
        raise UsageError(f"unbound parameters after instantiation: {sorted(free)}")
    return inst


@dataclass(frozen=True)
class RealCoframe:
    """``d_theta[k][(i, j)] = T^k_ij`` for ``i < j`` over (alpha, beta, gamma, delta)."""

    d_theta: tuple[dict, ...]

    def to_json(self) -> dict:
        out = {}
        for k, label in enumerate(REAL_LABELS):
            out["d" + label] = {
                f"{REAL_LABELS[i]}^{REAL_LABELS[j]}": str(v) for (i, j), v in sorted(self.d_theta[k].items())
            }
        return out


def real_coframe(model: CoframeModel) -> RealCoframe:
    """Split a constant complex model into real structure equations."""
    # two-form in the real basis from each complex generator pair
    gen2 = {}
    for (g1, g2) in _PAIRS:
        u, v = _REAL_IMAGES[g1], _REAL_IMAGES[g2]
        gen2[(g1, g2)] = {(i, j): u[i] * v[j] - u[j] * v[i] for (i, j) in _PAIRS}

    def realize(form):
        acc = {p: _ZERO for p in _PAIRS}
        for mono, c in form.comps.items():
            cv = c.constant_value()
            for p, w in gen2[mono].items():
                acc[p] = acc[p] + cv * w
        return acc

    dw = [realize(f) for f in model.d_gen]
    half = GaussianRational(Fraction(1, 2))
    over_2i = GaussianRational(0, Fraction(-1, 2))
    complex_rows = [
        {p: (dw[0][p] + dw[1][p]) * half for p in _PAIRS},
        {p: (dw[0][p] - dw[1][p]) * over_2i for p in _PAIRS},
        {p: (dw[2][p] + dw[3][p]) * half for p in _PAIRS},
        {p: (dw[2][p] - dw[3][p]) * over_2i for p in _PAIRS},
    ]
    rows = []
    for row in complex_rows:
        out = {}
        for p, v in row.items():
            if v.im != 0:
                raise RuntimeError("non-real structure constant: model is not conjugation-closed")
            if v.re != 0:
                out[p] = v.re
        rows.append(out)
    return RealCoframe(tuple(rows))


class RealLieAlgebra:
    """Structure constants ``c[i][j][k]``: ``[e_i, e_j] = sum_k c[i][j][k] e_k``."""

    def __init__(self, c, labels=None):
        self.n = len(c)
        self.c = tuple(tuple(tuple(Fraction(x) for x in c[i][j]) for j in range(self.n)) for i in range(self.n))
        self.labels = tuple(labels) if labels else tuple(f"e{i + 1}" for i in range(self.n))
        for i in range(self.n):
            for j in range(self.n):
                if any(self.c[i][j][k] != -self.c[j][i][k] for k in range(self.n)):
                    raise UsageError("structure constants are not antisymmetric")

    @classmethod
    def from_brackets(cls, n: int, brackets: dict, labels=None) -> "RealLieAlgebra":
        """``brackets[(i, j)] = {k: coeff}`` (0-based), antisymmetry implied."""
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in brackets.items():
            for k, v in vec.items():
                c[i][j][k] += Fraction(v)
                c[j][i][k] -= Fraction(v)
        return cls(c, labels)

    @classmethod
    def from_coframe(cls, rc: RealCoframe) -> "RealLieAlgebra":
        n = len(rc.d_theta)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for k, row in enumerate(rc.d_theta):
            for (i, j), t in row.items():
                c[i][j][k] -= t
                c[j][i][k] += t
        return cls(c, REAL_LABELS)

    def bracket(self, x, y) -> list[Fraction]:
        n = self.n
        out = [Fraction(0)] * n
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if not y[j]:
                    continue
                s = x[i] * y[j]
                cij = self.c[i][j]
                for k in range(n):
                    if cij[k]:
                        out[k] += s * cij[k]
        return out

    def basis_vector(self, i) -> list[Fraction]:
        v = [Fraction(0)] * self.n
        v[i] = Fraction(1)
        return v

    def ad(self, x) -> linalg.Matrix:
        """Matrix of ``ad x`` acting on column coordinates."""
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(self.n)]
        return linalg.transpose(cols)

    def killing_matrix(self) -> linalg.Matrix:
        ads = [self.ad(self.basis_vector(i)) for i in range(self.n)]
        return [[linalg.trace(linalg.matmul(ads[i], ads[j])) for j in range(self.n)] for i in range(self.n)]

    def nonzero_brackets(self) -> dict:
        out = {}
        for i, j in combinations(range(self.n), 2):
            v = self.c[i][j]
            if any(v):
                out[(i, j)] = {k: x for k, x in enumerate(v) if x}
        return out

    def __eq__(self, other):
        return isinstance(other, RealLieAlgebra) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def negated(self) -> "RealLieAlgebra":
        return RealLieAlgebra([[[-x for x in v] for v in row] for row in self.c], self.labels)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "brackets": [
                {"pair": [self.labels[i], self.labels[j]], "value": {self.labels[k]: str(x) for k, x in vec.items()}}
                for (i, j), vec in self.nonzero_brackets().items()
            ],
        }

    def __repr__(self):
        parts = []
        for (i, j), vec in self.nonzero_brackets().items():
            rhs = " + ".join(f"{x}*{self.labels[k]}" for k, x in vec.items())
            parts.append(f"[{self.labels[i]},{self.labels[j]}]={rhs}")
        return "RealLieAlgebra(" + ", ".join(parts) + ")"


def _as_matrix_entries(M, table, bindings):
    out = []
    for row in M:
        r = []
        for x in row:
            if isinstance(x, str):
                x = parse_scalar(x, table)
            if isinstance(x, Scalar):
                x = x.substitute(bindings) if bindings else x
            r.append(x)
        out.append(r)
    return out


def realify(model: CoframeModel, point=None, pre_transform=None) -> RealLieAlgebra:
    """Instantiate, optionally change the complex basis, and split into real forms."""
    inst = instantiate(model, point)
    if pre_transform is not None:
        M = _as_matrix_entries(pre_transform, model.table, _point_bindings(point, model.table))
        inst = transform(inst, M)
    return RealLieAlgebra.from_coframe(real_coframe(inst))


def jacobi_check(L: RealLieAlgebra) -> bool:
    n = L.n
    e = [L.basis_vector(i) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        x, y, z = e[i], e[j], e[k]
        s = [a + b + c for a, b, c in zip(
            L.bracket(L.bracket(x, y), z), L.bracket(L.bracket(y, z), x), L.bracket(L.bracket(z, x), y))]
        if any(s):
            return False
    return True


def change_basis(L: RealLieAlgebra, P, labels=None) -> RealLieAlgebra:
    """New basis ``f_i = sum_j P[i][j] e_j`` (P invertible)."""
    P = linalg.as_matrix(P)
    Pinv = linalg.inverse(P)
    n = L.n
    c = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            v = L.bracket(P[i], P[j])
            # row vector v in e-coordinates -> f-coordinates: v Pinv
            c[i][j] = [sum((v[a] * Pinv[a][k] for a in range(n)), Fraction(0)) for k in range(n)]
    return RealLieAlgebra(c, labels)


def _derived(L: RealLieAlgebra, basis) -> list:
    vecs = [L.bracket(x, y) for x, y in combinations(basis, 2)]
    return linalg.span_basis(vecs)


@dataclass(frozen=True)
class Fingerprint:
    dim_center: int
    dim_derived: int
    derived_series_dims: tuple[int, ...]
    nilradical_dim: int
    radical_dim: int
    killing_rank: int
    killing_signature: tuple[int, int, int]
    unimodular: bool

    def to_json(self) -> dict:
        return {
            "dim_center": self.dim_center,
            "dim_derived": self.dim_derived,
            "derived_series_dims": list(self.derived_series_dims),
            "nilradical_dim": self.nilradical_dim,
            "radical_dim": self.radical_dim,
            "killing_rank": self.killing_rank,
            "killing_signature": list(self.killing_signature),
            "unimodular": self.unimodular,
        }

    @classmethod
    def from_json(cls, data) -> "Fingerprint":
        return cls(
            data["dim_center"],
            data["dim_derived"],
            tuple(data["derived_series_dims"]),
            data["nilradical_dim"],
            data["radical_dim"],
            data["killing_rank"],
            tuple(data["killing_signature"]),
            bool(data["unimodular"]),
        )


class _Analysis:
    def __init__(self, L: RealLieAlgebra):
        self.L = L
        self.n = L.n
        self.basis = [L.basis_vector(i) for i in range(self.n)]

    @cached_property
    def killing(self):
        return self.L.killing_matrix()

    @cached_property
    def derived_series(self):
        dims = [self.n]
        cur = self.basis
        while True:
            nxt = _derived(self.L, cur)
            if len(nxt) == len(cur):
                break
            dims.append(len(nxt))
            cur = nxt
            if not cur:
                break
        return tuple(dims)

    @cached_property
    def derived_algebra(self):
        return _derived(self.L, self.basis)

    def center_dim(self) -> int:
        rows = []
        for j in range(self.n):
            # coefficient of e_k in [x, e_j] is sum_i x_i c[i][j][k]
            for k in range(self.n):
                rows.append([self.L.c[i][j][k] for i in range(self.n)])
        return len(linalg.nullspace(rows, self.n))

    @cached_property
    def radical(self):
        """Killing-orthogonal complement of [g, g]."""
        rows = [linalg.matvec(self.killing, y) for y in self.derived_algebra]
        return linalg.nullspace(rows, self.n)

    def nilradical_dim(self) -> int:
        rad = self.radical
        if not rad:
            return 0
        ads = [self.L.ad(x) for x in rad]
        algebra = _associative_closure(ads, self.n)
        # ad x lies in the Jacobson radical iff Tr(ad x * b) = 0 for every b in the algebra
        rows = []
        for b in algebra:
            rows.append([linalg.trace(linalg.matmul(A, b)) for A in ads])
        coeffs = linalg.nullspace(rows, len(rad)) if rows else linalg.identity(len(rad))
        return len(coeffs)

    def unimodular(self) -> bool:
        return all(linalg.trace(self.L.ad(x)) == 0 for x in self.basis)

    def fingerprint(self) -> Fingerprint:
        ds = self.derived_series
        return Fingerprint(
            dim_center=self.center_dim(),
            dim_derived=ds[1] if len(ds) > 1 else self.n,
            derived_series_dims=ds,
            nilradical_dim=self.nilradical_dim(),
            radical_dim=len(self.radical),
            killing_rank=linalg.rank(self.killing),
            killing_signature=linalg.signature(self.killing),
            unimodular=self.unimodular(),
        )


def _flatten(A):
    return [x for row in A for x in row]


def _associative_closure(mats, n):
    """Basis (as matrices) of the associative algebra generated by ``mats``."""
    basis: list = []
    flat_basis: list = []

    def add(M):
        v = _flatten(M)
        if linalg.coordinates(flat_basis, v) is None and any(v):
            flat_basis.append(v)
            basis.append(M)
            return True
        return False

    frontier = [M for M in mats if add(M)]
    while frontier:
        new = []
        for A in frontier:
            for B in list(basis):
                for P in (linalg.matmul(A, B), linalg.matmul(B, A)):
                    if add(P):
                        new.append(P)
        frontier = new
    return basis


def invariants(L: RealLieAlgebra) -> Fingerprint:
    if not jacobi_check(L):
        raise UsageError("Jacobi identity fails; invariants are undefined")
    return _Analysis(L).fingerprint()


def quotient(L: RealLieAlgebra, ideal) -> RealLieAlgebra:
    """Quotient by an ideal given as spanning vectors."""
    ideal = linalg.span_basis(ideal)
    n = L.n
    # complement: standard basis vectors not in the span
    comp = []
    span = list(ideal)
    for i in range(n):
        e = L.basis_vector(i)
        if linalg.coordinates(span, e) is None:
            comp.append(e)
            span.append(e)
    m = len(comp)
    full = ideal + comp
    c = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            coords = linalg.coordinates(full, L.bracket(comp[i], comp[j]))
            c[i][j] = coords[len(ideal):]
    return RealLieAlgebra(c)


def named_targets() -> dict[str, Fingerprint]:
    """Stored fingerprints of the named solvable patterns."""
    data = json.loads(resources.files("engelcert.data").joinpath("lie_targets.json").read_text())
    return {name: Fingerprint.from_json(entry["fingerprint"]) for name, entry in data.items()}


def target_algebras() -> dict[str, RealLieAlgebra]:
    data = json.loads(resources.files("engelcert.data").joinpath("lie_targets.json").read_text())
    out = {}
    for name, entry in data.items():
        br = {}
        for (i, j), vec in (((b["pair"][0] - 1, b["pair"][1] - 1), b["value"]) for b in entry["brackets"]):
            br[(i, j)] = {int(k) - 1: Fraction(v) for k, v in vec.items()}
        out[name] = RealLieAlgebra.from_brackets(4, br, [f"X{k}" for k in range(1, 5)])
    return out


def identify(L: RealLieAlgebra) -> str:
    if not jacobi_check(L):
        return OTHER
    an = _Analysis(L)
    rad = an.radical
    if len(rad) == 1 and L.n == 4:
        q = quotient(L, rad)
        pos, neg, zero = linalg.signature(q.killing_matrix())
        if zero:
            return OTHER
        if neg == 3:
            return R_PLUS_SU2
        if pos and neg:
            return R_PLUS_SL2R
        return OTHER
    if len(rad) == L.n:
        fp = an.fingerprint()
        for name, target in named_targets().items():
            if fp == target:
                return name
    return OTHER


