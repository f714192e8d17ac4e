"""Obstructions to compact quotients and co-compact lattice certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import mpmath

from . import linalg
from .exterior import VOLUME, Form, d, parse_monomial_word
from .liealg import RealLieAlgebra
from .models import STANDARD_TABLE, CoframeModel, FamilyId, family_model
from .scalar import Scalar, SymbolTable, UsageError, parse_scalar, to_fraction

__all__ = [
    "ObstructionReport",
    "LocusCertificate",
    "WITNESSES",
    "stokes_factor",
    "obstruction",
    "locus_certificate",
    "c6_common_zero_certificate",
    "is_unimodular",
    "closed_three_forms",
    "c1_quotient_type",
    "GAMMA1_NONCOMPACT",
    "GAMMA2_COMPACT",
    "GAMMA3_NONCOMPACT",
    "SPECIAL_A1B0",
    "LatticeCertificate",
    "Rejection",
    "lattice_scan",
    "lattice_search",
    "verify_certificate",
]


# --------------------------------------------------------------------------
# Stokes obstruction factors


def stokes_factor(m: CoframeModel, witness: Form) -> Scalar:
    """Coefficient ``F`` in ``d(witness) = F * w1^w1bar^w2^w2bar``."""
    if witness.degrees() - {3}:
        raise UsageError("witness must be a 3-form")
    dw = d(witness, m)
    extra = set(dw.comps) - {VOLUME}
    assert not extra, "d of a 3-form has only the volume component"
    return dw.comps.get(VOLUME, Scalar.zero(m.table))


# written-order witnesses and the factored form of the expected factor
WITNESSES: dict[str, list[tuple[str, str]]] = {
    "C1": [("w1^w2^w2bar", "-(1 - 2*a + 2*b*i)")],
    "C2": [("w1^w2bar^w2", "2*i*(a + b)")],
    "C4": [("w1^w2bar^w2", "1 + 2*b*i")],
    "C5": [("w1^w2bar^w2", "(1 - 2*a)*(1 + 2*b*i)")],
    "C6": [
        ("w1bar^w2^w2bar", "-2*((b + 1/2*i)*cos_a + (-1/2 + b*i)*(sin_a + 1))"),
        ("w1^w1bar^w2bar", "-1/2*(-sin_a + 2*b*cos_a - 1)*(4*b^2 - 1 + 4*b*i)"),
    ],
}

_LOCUS_NOTES = {
    "C1": "a = 1/2 and b = 0",
    "C2": "a + b = 0",
    "C4": "never (real part is 1)",
    "C5": "a = 1/2",
}


@dataclass(frozen=True)
class ObstructionReport:
    witness: str
    factor: Scalar
    factored: str
    matches_factored: bool
    vanishing_locus_note: str

    def to_json(self) -> dict:
        return {
            "witness": self.witness,
            "factor": str(self.factor),
            "factored": self.factored,
            "matches_factored": self.matches_factored,
            "vanishing_locus": self.vanishing_locus_note,
        }


def obstruction(case: str, witness: str | None = None, model: CoframeModel | None = None) -> list[ObstructionReport]:
    if model is None:
        model = family_model(FamilyId(case))
    table = model.table
    entries = WITNESSES.get(case, [])
    if witness is not None:
        known = dict(entries)
        entries = [(witness, known.get(witness, ""))]
    if not entries:
        raise UsageError(f"no Stokes witness is recorded for {case}; pass one explicitly")
    out = []
    for word, factored in entries:
        f = stokes_factor(model, parse_monomial_word(word, table))
        matches = bool(factored) and parse_scalar(factored, table) == f
        if case == "C6":
            note = "cos a = 0 and sin a = -1" if word == "w1bar^w2^w2bar" else "2*b*cos a - sin a = 1"
        else:
            note = _LOCUS_NOTES.get(case, "")
        out.append(ObstructionReport(word, f, factored, matches, note))
    return out


# --------------------------------------------------------------------------
# vanishing loci


def _positive_certificate(u: Scalar) -> bool:
    """Sufficient positivity test for real parameters.

    Every term has a positive rational coefficient and only even exponents,
    and the constant term is positive.
    """
    table = u.table
    real = {k for k, s in enumerate(table.symbols) if s.kind == "real"}
    if not u.terms.get(table.zero_exp):
        return False
    for exp, c in u.terms.items():
        if c.im != 0 or c.re <= 0:
            return False
        if any(e and (k not in real or e % 2) for k, e in enumerate(exp)):
            return False
    return True


@dataclass(frozen=True)
class LocusCertificate:
    """The real zero set of ``factor`` equals ``{generators = 0}``.

    Certified by ``u_j * G_j = C[j][0] Re F + C[j][1] Im F`` with ``u_j``
    positive for real parameters, and ``(Re F, Im F) = D (G)``.
    """

    factor: Scalar
    generators: tuple[Scalar, ...]
    multipliers: tuple[Scalar, ...]
    to_generators: tuple[tuple[Scalar, Scalar], ...]
    from_generators: tuple[tuple[Scalar, ...], tuple[Scalar, ...]]

    def verify(self) -> bool:
        re, im = self.factor.real_part(), self.factor.imag_part()
        for g, u, (c0, c1) in zip(self.generators, self.multipliers, self.to_generators):
            if not _positive_certificate(u) or u * g != c0 * re + c1 * im:
                return False
        for part, row in zip((re, im), self.from_generators):
            acc = Scalar.zero(self.factor.table)
            for coeff, g in zip(row, self.generators):
                acc = acc + coeff * g
            if acc != part:
                return False
        return True

    def empty(self) -> bool:
        """A nonzero constant generator means the locus is empty."""
        return any(g.is_constant() and not g.is_zero() for g in self.generators)


def locus_certificate(case: str, index: int = 0) -> LocusCertificate:
    T = STANDARD_TABLE
    P = lambda s: parse_scalar(s, T)  # noqa: E731
    one, zero = P("1"), P("0")
    F = obstruction(case)[index].factor
    if case == "C1":
        # Re F = 2a - 1, Im F = -2b
        return LocusCertificate(F, (P("2*a - 1"), P("b")), (one, one),
                                ((one, zero), (zero, P("-1/2"))),
                                ((one, zero), (zero, P("-2"))))
    if case == "C2":
        return LocusCertificate(F, (P("a + b"),), (one,), ((zero, P("1/2")),),
                                ((zero,), (P("2"),)))
    if case == "C4":
        return LocusCertificate(F, (one,), (one,), ((one, zero),), ((one,), (P("2*b"),)))
    if case == "C5":
        return LocusCertificate(F, (P("1 - 2*a"),), (one,), ((one, zero),), ((one,), (P("2*b"),)))
    if case == "C6" and index == 0:
        # Re F = -2b cos + (sin + 1), Im F = -cos - 2b (sin + 1); determinant 4b^2 + 1
        u = P("4*b^2 + 1")
        return LocusCertificate(
            F,
            (P("cos_a"), P("sin_a + 1")),
            (u, u),
            ((P("-2*b"), P("-1")), (P("1"), P("-2*b"))),
            ((P("-2*b"), one), (P("-1"), P("-2*b"))),
        )
    if case == "C6" and index == 1:
        # (4b^2 - 1 + 4bi) = (2b + i)^2 has modulus 4b^2 + 1
        g = P("-sin_a + 2*b*cos_a - 1")
        u = P("(4*b^2 + 1)^2")
        return LocusCertificate(
            F, (g,), (u,),
            ((P("-2*(4*b^2 - 1)"), P("-2*4*b")),),
            ((P("-1/2*(4*b^2 - 1)"),), (P("-2*b"),)),
        )
    raise UsageError(f"no locus certificate for {case}[{index}]")


def c6_common_zero_certificate() -> bool:
    """Both C6 factors vanish together exactly at (cos a, sin a) = (0, -1)."""
    first = locus_certificate("C6", 0)
    if not first.verify():
        return False
    T = STANDARD_TABLE
    point = {"cos_a": Scalar.zero(T), "sin_a": Scalar.const(-1, T)}
    return all(r.factor.substitute(point).is_zero() for r in obstruction("C6"))


# --------------------------------------------------------------------------
# unimodularity


def is_unimodular(L: RealLieAlgebra) -> bool:
    return all(linalg.trace(L.ad(L.basis_vector(i))) == 0 for i in range(L.n))


_EMPTY = SymbolTable([])


def _dual_coframe_model(L: RealLieAlgebra):
    """d(theta^k) = sum_{i<j} T^k_ij theta^i ^ theta^j with T = -c."""
    gens = []
    for k in range(L.n):
        comps = {}
        for i in range(L.n):
            for j in range(i + 1, L.n):
                if L.c[i][j][k]:
                    comps[(i, j)] = Scalar.const(-L.c[i][j][k], _EMPTY)
        gens.append(Form(comps, _EMPTY))
    return SimpleNamespace(d_gen=tuple(gens), table=_EMPTY)


def closed_three_forms(L: RealLieAlgebra) -> list[bool]:
    """Closedness of each basis 3-form of the dual coframe (4-dim only)."""
    if L.n != 4:
        raise UsageError("closed_three_forms needs a 4-dimensional algebra")
    model = _dual_coframe_model(L)
    out = []
    for skip in range(4):
        mono = tuple(i for i in range(4) if i != skip)
        f = Form({mono: Scalar.one(_EMPTY)}, _EMPTY)
        out.append(d(f, model).is_zero())
    return out


# --------------------------------------------------------------------------
# C1 quotient typing

GAMMA1_NONCOMPACT = "GAMMA1_NONCOMPACT"
GAMMA2_COMPACT = "GAMMA2_COMPACT"
GAMMA3_NONCOMPACT = "GAMMA3_NONCOMPACT"
SPECIAL_A1B0 = "SPECIAL_A1B0"


def c1_quotient_type(a, b) -> tuple[str, ...]:
    """Quotient type; ``(a, b) = (1, 0)`` also carries the special flag."""
    a, b = to_fraction(a), to_fraction(b)
    if a != Fraction(1, 2):
        kind = GAMMA1_NONCOMPACT
    elif b == 0:
        kind = GAMMA2_COMPACT
    else:
        kind = GAMMA3_NONCOMPACT
    if a == 1 and b == 0:
        return (kind, SPECIAL_A1B0)
    return (kind,)


# --------------------------------------------------------------------------
# lattice search for the compact C2 case


def _cubic_scaled(m: int, n: int, num: int, k: int) -> int:
    """``2^(3k) f(num / 2^k)`` for ``f = x^3 - m x^2 + n x - 1``."""
    s = 1 << k
    return num ** 3 - m * num * num * s + n * num * s * s - s ** 3


def _discriminant(m: int, n: int) -> int:
    B, C, D = -m, n, -1
    return 18 * B * C * D - 4 * B ** 3 * D + B * B * C * C - 4 * C ** 3 - 27 * D * D


def _isolate_positive_root(m: int, n: int, bits: int) -> tuple[Fraction, Fraction]:
    """Interval of width <= 2^-bits around the unique real root (which is > 0)."""
    # f(0) = -1 < 0; find an upper bound with f > 0
    hi = 1
    while _cubic_scaled(m, n, hi, 0) <= 0:
        hi *= 2
    lo_num, hi_num, k = 0, hi, 0
    while k < bits + hi.bit_length():
        lo_num, hi_num, k = 2 * lo_num, 2 * hi_num, k + 1
        mid = (lo_num + hi_num) // 2
        v = _cubic_scaled(m, n, mid, k)
        if v == 0:
            return Fraction(mid, 1 << k), Fraction(mid, 1 << k)
        if v < 0:
            lo_num = mid
        else:
            hi_num = mid
    return Fraction(lo_num, 1 << k), Fraction(hi_num, 1 << k)


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class LatticeCertificate:
    m: int
    n: int
    k: int
    precision: int
    q_interval: tuple[Fraction, Fraction]
    q: str
    p: str
    lambda_re: str
    lambda_im: str
    a: str
    c: str
    A: tuple[tuple[int, int, int], ...]
    side: str
    minimal_polynomial: tuple[int, int, int, int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "minimal_polynomial", (1, -self.m, self.n, -1))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "precision": self.precision,
            "polynomial": "x^3 - ({})*x^2 + ({})*x - 1".format(self.m, self.n),
            "q_interval": [str(self.q_interval[0]), str(self.q_interval[1])],
            "q": self.q,
            "q_side": self.side,
            "p": self.p,
            "lambda": {"re": self.lambda_re, "im": self.lambda_im},
            "a": self.a,
            "c": self.c,
            "A": [list(r) for r in self.A],
        }


@dataclass(frozen=True)
class Rejection:
    m: int
    n: int
    reason: str

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "reason": self.reason}


def _digits(precision: int) -> int:
    return int(precision * 0.30103) + 5


def _eigen_data(m: int, n: int, k: int, precision: int, interval):
    with mpmath.workprec(precision + 20):
        lo, hi = interval
        q = (_mpf(lo) + _mpf(hi)) / 2
        p = m - q
        lam = mpmath.mpc(p / 2, mpmath.sqrt(1 / q - p * p / 4))
        mod = abs(lam)
        a = -mpmath.log(mod) / (2 * (mpmath.arg(lam) + 2 * k * mpmath.pi))
        c = mod ** (-1 / (2 * a))
        return q, p, lam, a, c


def _certify(m: int, n: int, k: int, precision: int):
    if n == m:
        return Rejection(m, n, "|λ| = 1")
    disc = _discriminant(m, n)
    if disc >= 0:
        return Rejection(m, n, "no complex-conjugate eigenvalue pair")
    interval = _isolate_positive_root(m, n, precision + 16)
    q, p, lam, a, c = _eigen_data(m, n, k, precision, interval)
    dg = _digits(precision)
    s = lambda x: mpmath.nstr(x, dg, strip_zeros=False)  # noqa: E731
    side = "q<1" if interval[1] < 1 else "q>1"
    return LatticeCertificate(
        m, n, k, precision, interval, s(q), s(p), s(lam.real), s(lam.imag), s(a), s(c),
        ((0, 0, 1), (1, 0, -n), (0, 1, m)), side,
    )


def lattice_scan(m_range, n_range, k: int = 0, precision: int = 128):
    """All (m, n) in the inclusive ranges; returns (certificates, rejections)."""
    if precision < 64:
        raise UsageError("precision must be at least 64 bits")
    certs, rejects = [], []
    for m in range(m_range[0], m_range[1] + 1):
        for n in range(n_range[0], n_range[1] + 1):
            r = _certify(m, n, k, precision)
            (rejects if isinstance(r, Rejection) else certs).append(r)
    return certs, rejects


def lattice_search(m_range, n_range, k: int = 0, precision: int = 128) -> list[LatticeCertificate]:
    return lattice_scan(m_range, n_range, k, precision)[0]


def _charpoly3(A) -> tuple[int, int, int, int]:
    tr = sum(A[i][i] for i in range(3))
    minors = sum(A[i][i] * A[j][j] - A[i][j] * A[j][i] for i in range(3) for j in range(i + 1, 3))
    det = linalg.det(linalg.as_matrix(A))
    return (1, -tr, minors, -int(det))


def verify_certificate(cert: LatticeCertificate) -> bool:
    """Recheck every certificate invariant at twice the stated precision."""
    m, n = cert.m, cert.n
    A = cert.A
    if linalg.det(linalg.as_matrix(A)) != 1 or _charpoly3(A) != (1, -m, n, -1):
        return False
    if n == m or _discriminant(m, n) >= 0:
        return False
    lo, hi = cert.q_interval
    if lo <= 0 or lo == 1 or hi == 1 or (lo < 1 < hi):
        return False
    f = lambda x: x ** 3 - m * x * x + n * x - 1  # noqa: E731
    if not (f(lo) <= 0 <= f(hi)):
        return False
    prec = 2 * cert.precision
    with mpmath.workprec(prec):
        tol = mpmath.mpf(2) ** (-(cert.precision - 8))
        q = mpmath.mpf(cert.q)
        p = mpmath.mpf(cert.p)
        lam = mpmath.mpc(mpmath.mpf(cert.lambda_re), mpmath.mpf(cert.lambda_im))
        a = mpmath.mpf(cert.a)
        c = mpmath.mpf(cert.c)
        if not (_mpf(lo) - tol <= q <= _mpf(hi) + tol):
            return False
        if abs(p - (m - q)) > tol or abs(lam.real - p / 2) > tol:
            return False
        if abs(q * abs(lam) ** 2 - 1) > tol or abs(abs(lam) - 1) <= tol:
            return False
        if abs(lam ** 3 - m * lam ** 2 + n * lam - 1) > tol * (1 + abs(m) + abs(n)):
            return False
        lhs = -mpmath.log(abs(lam)) / (2 * a)
        rhs = mpmath.arg(lam) + 2 * cert.k * mpmath.pi
        if abs(lhs - rhs) > tol * (1 + abs(rhs)):
            return False
        if abs(c - abs(lam) ** (-1 / (2 * a))) > tol * (1 + abs(c)):
            return False
    return True
