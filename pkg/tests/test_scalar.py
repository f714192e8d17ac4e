from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import T, gaussian, reduce_circle, scalars, small_fractions, sympy_equal, to_sympy
from engelcert.parsing import ParseError
from engelcert.scalar import (
    GaussianRational,
    InvalidBinding,
    Scalar,
    Symbol,
    SymbolTable,
    UsageError,
    parse_scalar,
)


def P(text):
    return parse_scalar(text, T)


class TestExamples:
    def test_conjugate_sum(self):
        assert P("a + i*b") + P("a - i*b") == P("2*a")

    def test_modulus_product(self):
        assert P("(2*b + i)*(2*b - i)") == P("4*b^2 + 1")

    def test_sin_squared(self):
        assert P("sin_a") * P("sin_a") == P("1 - cos_a^2")

    def test_conjugate_examples(self):
        assert P("2*i*a").conjugate() == P("-2*i*a")
        assert P("p1").conjugate() == P("p1bar")

    def test_substitute_family_constant(self):
        assert P("p1").substitute({"p1": P("a + i*b")}) == P("a + i*b")
        assert P("p1bar").substitute({"p1": P("a + i*b")}) == P("a - i*b")

    def test_identity_binding(self):
        x = P("3*a^2*p1 - i*sin_a + q2bar")
        assert x.substitute({}) == x
        assert x.substitute({"a": P("a")}) == x

    def test_circle_parametrization_binding(self):
        table = T.extend([Symbol("t")])
        t = Scalar.symbol("t", table)
        den = 1 + t * t
        # cos^2 and sin^2 are stored in different canonical shapes; their images still sum to 1
        c2, pc = Scalar.symbol("cos_a", T).__pow__(2).rename_into(table).circle_rational("t", table)
        s2, ps = P("sin_a^2").rename_into(table).circle_rational("t", table)
        assert pc == ps == 2
        assert c2 + s2 == den * den
        num, power = P("sin_a*cos_a").rename_into(table).circle_rational("t", table)
        assert power == 2 and num == 2 * t * (1 - t * t)

    def test_invalid_circle_binding(self):
        with pytest.raises(InvalidBinding):
            P("cos_a").substitute({"cos_a": P("1"), "sin_a": P("1")})

    def test_eval_examples(self):
        assert P("4*b^2 + 1").eval({"b": Fraction(1, 2)}) == GaussianRational(2)
        assert P("cos_a").eval({}, t=-1) == GaussianRational(0)
        assert P("sin_a").eval({}, t=-1) == GaussianRational(-1)
        assert P("-(1 - 2*a + 2*b*i)").eval({"a": Fraction(1, 2), "b": 0}) == GaussianRational(0)

    def test_eval_unbound(self):
        with pytest.raises(UsageError):
            P("a + b").eval({"a": 1})

    def test_is_zero_examples(self):
        x = P("a*p1 - 7*q2bar")
        assert (x - x).is_zero()
        assert (P("sin_a^2 + cos_a^2 - 1")).is_zero()
        assert not P("2*i*(a + b)").is_zero()

    def test_mismatched_tables(self):
        other = SymbolTable(["a", "b"])
        with pytest.raises(UsageError):
            P("a") + Scalar.symbol("a", other)

    def test_sin_exponent_canonical(self):
        x = P("sin_a^5 + b*sin_a^2")
        s = T.sin_index
        assert all(e[s] <= 1 for e in x.terms)

    def test_no_zero_coefficients(self):
        x = P("a - a + 0*b + i - i")
        assert x.terms == {}


class TestTable:
    def test_unique_names(self):
        with pytest.raises(UsageError):
            SymbolTable(["a", "a"])

    def test_asymmetric_pair(self):
        with pytest.raises(UsageError):
            SymbolTable([Symbol("u", "conjugate", "v"), Symbol("v", "conjugate", "w"), Symbol("w")])

    def test_self_partner(self):
        with pytest.raises(UsageError):
            SymbolTable([Symbol("u", "conjugate", "u")])

    def test_unmatched_circle(self):
        with pytest.raises(UsageError):
            SymbolTable([Symbol("c", "cos", "s")])

    def test_json_round_trip(self):
        assert SymbolTable.from_json(T.to_json()) == T


class TestParsing:
    @given(scalars())
    def test_print_parse_round_trip(self, x):
        assert P(str(x)) == x

    def test_rejects_fractional_exponent(self):
        with pytest.raises(Exception):
            P("a^(1/2)")

    def test_rejects_unknown_symbol(self):
        with pytest.raises(ParseError):
            P("zeta + 1")

    def test_conj_function(self):
        assert P("conj(p1 + i*a)") == P("p1bar - i*a")

    def test_whitespace_insensitive(self):
        assert P(" 2 *  a ^2+ i ") == P("2*a^2+i")


class TestRingAxioms:
    @given(scalars(), scalars(), scalars())
    def test_associativity(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)

    @given(scalars(), scalars())
    def test_commutativity(self, x, y):
        assert x + y == y + x
        assert x * y == y * x

    @given(scalars(), scalars(), scalars())
    def test_distributivity(self, x, y, z):
        assert x * (y + z) == x * y + x * z

    @given(scalars())
    def test_additive_inverse_is_empty(self, x):
        assert (x + (-x)).terms == {}

    @given(scalars(), scalars())
    def test_product_matches_sympy(self, x, y):
        assert sympy_equal(to_sympy(x * y), to_sympy(x) * to_sympy(y))

    @given(scalars(), scalars())
    def test_sum_matches_sympy(self, x, y):
        assert sympy_equal(to_sympy(x + y), to_sympy(x) + to_sympy(y))

    @given(scalars())
    def test_canonical_form_is_circle_reduced(self, x):
        assert reduce_circle(to_sympy(x)) == to_sympy(x)


class TestConjugation:
    @given(scalars())
    def test_involution(self, x):
        assert x.conjugate().conjugate() == x

    @given(scalars(), scalars())
    def test_ring_homomorphism(self, x, y):
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()
        assert (x + y).conjugate() == x.conjugate() + y.conjugate()

    @given(scalars())
    def test_real_and_imaginary_parts(self, x):
        re, im = x.real_part(), x.imag_part()
        assert re + Scalar.imag_unit(T) * im == x
        assert re.conjugate() == re and im.conjugate() == im


complex_points = st.tuples(small_fractions, small_fractions, gaussian, gaussian).map(
    lambda v: {"a": v[0], "b": v[1], "p1": v[2], "q2": v[3]}
)


class TestEval:
    @given(scalars(), scalars(), complex_points, small_fractions)
    def test_homomorphism(self, x, y, pt, t):
        assert (x * y).eval(pt, t) == x.eval(pt, t) * y.eval(pt, t)
        assert (x + y).eval(pt, t) == x.eval(pt, t) + y.eval(pt, t)

    @given(scalars(), complex_points, small_fractions)
    def test_conjugate_commutes_with_eval(self, x, pt, t):
        assert x.conjugate().eval(pt, t) == x.eval(pt, t).conjugate()

    @given(scalars(), scalars(symbols=("a", "b", "p1"), max_terms=3), complex_points, small_fractions)
    def test_eval_after_substitute(self, x, image, pt, t):
        # binding q2 implies the conjugate binding for q2bar
        composed = dict(pt, q2=image.eval(pt, t))
        assert x.substitute({"q2": image}).eval(pt, t) == x.eval(composed, t)

    @given(scalars(), complex_points, small_fractions)
    def test_eval_matches_sympy(self, x, pt, t):
        import sympy

        from conftest import SYM, fraction_to_sympy

        den = 1 + t * t
        values = {
            SYM["a"]: fraction_to_sympy(pt["a"]),
            SYM["b"]: fraction_to_sympy(pt["b"]),
            SYM["cos_a"]: fraction_to_sympy((1 - t * t) / den),
            SYM["sin_a"]: fraction_to_sympy(2 * t / den),
        }
        for name in ("p1", "q2"):
            g = pt[name]
            values[SYM[name]] = fraction_to_sympy(g.re) + sympy.I * fraction_to_sympy(g.im)
            values[SYM[name + "bar"]] = fraction_to_sympy(g.re) - sympy.I * fraction_to_sympy(g.im)
        expected = sympy.expand(to_sympy(x).subs(values))
        got = x.eval(pt, t)
        assert sympy.expand(expected - (fraction_to_sympy(got.re) + sympy.I * fraction_to_sympy(got.im))) == 0


class TestGaussianRational:
    @given(gaussian, gaussian)
    def test_field_inverse(self, x, y):
        if x:
            assert x * x.inverse() == GaussianRational(1)
            assert (y / x) * x == y

    def test_canonical_components(self):
        g = GaussianRational(Fraction(2, 4), Fraction(-3, 9))
        assert g.re == Fraction(1, 2) and g.im == Fraction(-1, 3)
