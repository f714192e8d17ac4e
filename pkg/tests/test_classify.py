import json
from dataclasses import replace
from importlib import resources
from itertools import combinations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import SYM, T, rational_points, small_fractions, to_sympy
from engelcert.classify import (
    check_derived_relations,
    d2_residues,
    generic_system,
    mutation_survey,
    relation_residues,
    verify_constants,
    verify_family,
)
from engelcert.models import (
    FAMILY_NAMES,
    INVARIANT_NAMES,
    EngelConstants,
    FamilyId,
    family,
    from_constants,
)
from engelcert.scalar import parse_scalar


def P(text):
    return parse_scalar(text, T)


def consts(*texts):
    return EngelConstants(*(P(t) for t in texts))


# ------------------------------------------------------------------ oracle
# An independent exterior calculus: forms are dicts from sorted index tuples to
# sympy expressions; signs come from counting inversions of the concatenation.

def _sign(seq):
    inv = sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def _wedge(f, g):
    out = {}
    for k1, c1 in f.items():
        for k2, c2 in g.items():
            seq = k1 + k2
            if len(set(seq)) < len(seq):
                continue
            key = tuple(sorted(seq))
            out[key] = out.get(key, 0) + _sign(seq) * c1 * c2
    return out


def _d(f, dgen):
    out = {}
    for key, c in f.items():
        for pos, g in enumerate(key):
            left = {key[:pos]: 1}
            right = {key[pos + 1:]: 1}
            piece = _wedge(_wedge(left, dgen[g]), right)
            for k, v in piece.items():
                out[k] = out.get(k, 0) + (-1) ** pos * c * v
    return {k: sympy.expand(v) for k, v in out.items() if sympy.expand(v) != 0}


def _oracle_model():
    p1, p2, q1, q2, r1, r2 = (SYM[n] for n in INVARIANT_NAMES)
    p1b, p2b, q1b, q2b, r1b, r2b = (SYM[n + "bar"] for n in INVARIANT_NAMES)
    W1, W1B, W2, W2B = ({(k,): 1} for k in range(4))

    def lin(*pairs):
        out = {}
        for coeff, gen in pairs:
            for k, v in gen.items():
                out[k] = out.get(k, 0) + coeff * v
        return out

    dw1 = lin(
        (-1, _wedge(lin((p1, W1), (p2, W2), (q1b, W1B), (q2b, W2B)), W1)),
        (-1, _wedge(lin((q2, W1), (r1b, W1B), (r2b, W2B)), W2)),
    )
    dw2 = lin(
        (1, _wedge(lin((1, W1), (-1, W2)), W1B)),
        (-1, _wedge(lin((p1, W1), (p2, W2), (p1b, W1B), (p2b, W2B)), W2)),
    )

    def bar(expr):
        swap = {}
        for n in INVARIANT_NAMES:
            swap[SYM[n]] = SYM[n + "bar"]
            swap[SYM[n + "bar"]] = SYM[n]
        return sympy.conjugate(expr).subs(
            {sympy.conjugate(s): s for s in swap}, simultaneous=True
        ).subs(swap, simultaneous=True)

    def bar_form(f):
        conj_idx = (1, 0, 3, 2)
        out = {}
        for k, v in f.items():
            seq = tuple(conj_idx[i] for i in k)
            out[tuple(sorted(seq))] = _sign(seq) * bar(v)
        return out

    return (dw1, bar_form(dw1), dw2, bar_form(dw2))


@pytest.fixture(scope="module")
def oracle_residues():
    dgen = _oracle_model()
    names = ("w1", "w1bar", "w2", "w2bar")
    return {names[i]: _d(dgen[i], dgen) for i in range(4)}


class TestGenericSystem:
    def test_sixteen_entries(self):
        assert len(generic_system().residues) == 16

    def test_matches_independent_expansion(self, oracle_residues):
        gens = ("w1", "w1bar", "w2", "w2bar")
        for r in generic_system().residues:
            expected = oracle_residues[r.generator].get(r.monomial, 0)
            assert sympy.expand(to_sympy(r.value) - expected) == 0, (r.generator, r.monomial_name)
        assert set(gens) == {r.generator for r in generic_system().residues}

    def test_matches_bundled_fixture(self):
        data = json.loads(resources.files("engelcert.data").joinpath("residues_generic.json").read_text())
        assert data["residues"] == generic_system().to_json()

    def test_contains_r2_relation(self):
        sys = generic_system()
        entry = next(r for r in sys.residues if r.generator == "w2bar" and r.monomial_name == "w1^w2^w2bar")
        assert entry.value == P("p1*q2 + p2 - q2 - r2")


class TestVerify:
    @pytest.mark.parametrize("name", FAMILY_NAMES)
    def test_each_family(self, name):
        assert verify_family(name)

    def test_all_zero_constants(self):
        assert verify_constants(consts("0", "0", "0", "0", "0", "0"))

    def test_lone_p2(self):
        system = d2_residues(from_constants(consts("0", "1", "0", "0", "0", "0")))
        assert system.nonzero()

    def test_c3_r2_shift(self):
        assert not verify_constants(family("C3").perturbed("r2"))

    def test_c2_real_q1(self):
        assert not verify_constants(replace(family("C2"), q1=P("2*a")))

    def test_mutation_survey_frozen(self):
        survey = mutation_survey()
        assert len(survey) == 36
        survivors = sorted(k for k, broken in survey.items() if not broken)
        # p1 -> p1 + 1 on C1 is the same family with a shifted by one
        assert survivors == [("C1", "p1")]

    def test_c1_shift_is_reparametrization(self):
        shifted = family("C1").perturbed("p1")
        assert shifted == family(FamilyId("C1", a=P("a + 1")))


class TestRelations:
    def test_c3(self):
        rel = check_derived_relations(family("C3"))
        assert rel.all()
        assert relation_residues(family("C3"))["r2_identity"].is_zero()

    def test_c1(self):
        assert check_derived_relations(family("C1")).all()

    def test_imaginary_p2_without_q0(self):
        rel = check_derived_relations(consts("0", "i", "0", "0", "0", "0"))
        assert not rel.im_p2

    @pytest.mark.parametrize("name", FAMILY_NAMES)
    def test_all_families(self, name):
        assert check_derived_relations(family(name)).all()

    def test_real_q1_flagged(self):
        assert not check_derived_relations(consts("0", "0", "1", "0", "0", "0")).q1_imaginary


class TestPointAgreement:
    @given(st.sampled_from(FAMILY_NAMES), rational_points, small_fractions)
    def test_residues_commute_with_instantiation(self, name, pt, t):
        symbolic = d2_residues(from_constants(family(name)))
        fid = FamilyId(name, b=pt["b"], t=t) if name == "C6" else FamilyId(name, a=pt["a"], b=pt["b"])
        instantiated = d2_residues(from_constants(family(fid)))
        assert symbolic.evaluate(pt, t) == instantiated.evaluate({}, t)

    @given(rational_points, small_fractions)
    def test_generic_residues_at_family_points(self, pt, t):
        # evaluating the generic system at C5's constants gives zero everywhere
        c = family(FamilyId("C5", a=pt["a"], b=pt["b"]))
        point = {n: getattr(c, n).constant_value() for n in INVARIANT_NAMES}
        assert all(v == 0 for v in generic_system().evaluate(point))

    @given(rational_points)
    def test_generic_residues_flag_corruption(self, pt):
        c = family(FamilyId("C3", a=pt["a"], b=pt["b"])).perturbed("r2")
        point = {n: getattr(c, n).constant_value() for n in INVARIANT_NAMES}
        assert any(v != 0 for v in generic_system().evaluate(point))

