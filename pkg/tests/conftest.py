from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from engelcert.exterior import Form
from engelcert.models import STANDARD_TABLE
from engelcert.scalar import GaussianRational, Scalar

settings.register_profile(
    "engelcert",
    max_examples=120,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("engelcert")

T = STANDARD_TABLE
# a compact symbol subset keeps generated polynomials small
SYMBOLS = ("a", "b", "cos_a", "sin_a", "p1", "p1bar", "q2")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gaussian = st.builds(GaussianRational, small_fractions, small_fractions)


@st.composite
def scalars(draw, symbols=SYMBOLS, max_terms=4, max_deg=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = [0] * T.nvars
        for name in symbols:
            exp[T.index(name)] = draw(st.integers(0, max_deg))
        terms[tuple(exp)] = draw(gaussian)
    return Scalar(terms, T)


@st.composite
def forms(draw, degrees=(0, 1, 2, 3, 4), symbols=("a", "b", "p1", "p1bar")):
    from itertools import combinations

    comps = {}
    for deg in draw(st.lists(st.sampled_from(degrees), min_size=1, max_size=2, unique=True)):
        monos = list(combinations(range(4), deg))
        for mono in draw(st.lists(st.sampled_from(monos), min_size=1, max_size=3, unique=True)):
            comps[mono] = draw(scalars(symbols=symbols, max_terms=2, max_deg=1))
    return Form(comps, T)


rational_points = st.fixed_dictionaries({"a": small_fractions, "b": small_fractions})


# ---------------------------------------------------------------- sympy oracle

SYM = {name: sympy.Symbol(name) for name in T.names}


def to_sympy(x: Scalar):
    total = sympy.Integer(0)
    for exp, c in x.terms.items():
        term = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator
        )
        for k, e in enumerate(exp):
            if e:
                term *= SYM[T.names[k]] ** e
        total += term
    return sympy.expand(total)


def reduce_circle(expr):
    """Canonical representative modulo sin^2 = 1 - cos^2."""
    s, c = SYM["sin_a"], SYM["cos_a"]
    poly = sympy.Poly(sympy.expand(expr), s)
    out = 0
    for (k,), coeff in poly.terms():
        out += coeff * s ** (k % 2) * (1 - c**2) ** (k // 2)
    return sympy.expand(out)


def sympy_equal(x, y) -> bool:
    return sympy.expand(reduce_circle(x) - reduce_circle(y)) == 0


def fraction_to_sympy(q: Fraction):
    return sympy.Rational(q.numerator, q.denominator)


@pytest.fixture(scope="session")
def table():
    return T
