"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import random
import time
from fractions import Fraction

import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T, forms, scalars, small_fractions
from engelcert.classify import check_derived_relations, d2_residues, mutation_survey, verify_family
from engelcert.compactness import (
    c6_common_zero_certificate,
    closed_three_forms,
    is_unimodular,
    lattice_scan,
    lattice_search,
    obstruction,
    verify_certificate,
)
from engelcert.coords import check_local_model, fixture_charts, partial
from engelcert.exterior import conjugate_form, d, wedge
from engelcert.liealg import (
    R_PLUS_SL2R,
    R_PLUS_SU2,
    SOLVABLE_C3_MINUS_QUARTER_PATTERN,
    SOLVABLE_G4_10,
    identify,
    jacobi_check,
    realify,
)
from engelcert.models import FAMILY_NAMES, INVARIANT_NAMES, FamilyId, family, family_model, from_constants
from engelcert.scalar import parse_scalar
from test_coords import E, expressions, variables


def report(n, ok, detail=""):
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}{'  ' + detail if detail else ''}")
    return ok


def P(text):
    return parse_scalar(text, T)


def rand_fraction(rng, span=6, den=7):
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def random_fid(rng, name):
    if name == "C6":
        return FamilyId(name, b=rand_fraction(rng), t=rand_fraction(rng))
    return FamilyId(name, a=rand_fraction(rng), b=rand_fraction(rng))


# 1 -----------------------------------------------------------------------

def test_criterion_1_family_certification():
    start = time.perf_counter()
    verified = {name: verify_family(name) for name in FAMILY_NAMES}
    survey = mutation_survey()
    elapsed = time.perf_counter() - start
    survivors = sorted(k for k, broken in survey.items() if not broken)
    ok = all(verified.values()) and len(survey) == 36 and not survivors and elapsed < 10
    report(1, ok, f"verified={verified} mutants={len(survey)} survivors={survivors} elapsed={elapsed:.2f}s")
    assert all(verified.values())
    assert elapsed < 10
    assert not survivors, f"mutants with all residues zero: {survivors}"


# 2 -----------------------------------------------------------------------

def test_criterion_2_derived_relations():
    results = {name: check_derived_relations(family(name)) for name in FAMILY_NAMES}
    ok = all(r.all() for r in results.values())
    report(2, ok, " ".join(f"{n}={r.all()}" for n, r in results.items()))
    assert ok


# 3 -----------------------------------------------------------------------

EXPECTED_FACTORS = {
    "C1": ["-(1 - 2*a + 2*b*i)"],
    "C2": ["2*i*(a + b)"],
    "C4": ["1 + 2*b*i"],
    "C5": ["(1 - 2*a)*(1 + 2*b*i)"],
    "C6": [
        "-2*((b + 1/2*i)*cos_a + (-1/2 + b*i)*(sin_a + 1))",
        "-1/2*(-sin_a + 2*b*cos_a - 1)*(4*b^2 - 1 + 4*b*i)",
    ],
}


def test_criterion_3_obstruction_factors():
    checks = {}
    for case, texts in EXPECTED_FACTORS.items():
        got = [r.factor for r in obstruction(case)]
        checks[case] = got == [P(t) for t in texts]
    checks["C6 common zero (0,-1)"] = c6_common_zero_certificate()
    # the common zero really sits at (cos, sin) = (0, -1) for every b
    at_zero = [r.factor.substitute({"cos_a": P("0"), "sin_a": P("-1")}) for r in obstruction("C6")]
    checks["C6 vanish at (0,-1)"] = all(f.is_zero() for f in at_zero)
    ok = all(checks.values())
    report(3, ok, str(checks))
    assert ok


# 4 -----------------------------------------------------------------------

C3_ACCEPTANCE_GRID = [
    ((-1, 0), R_PLUS_SL2R),
    ((-1, 3), R_PLUS_SL2R),
    ((1, 0), R_PLUS_SU2),
    ((5, 2), R_PLUS_SU2),
    (("-1/4", 0), SOLVABLE_C3_MINUS_QUARTER_PATTERN),
    (("-1/4", 1), SOLVABLE_C3_MINUS_QUARTER_PATTERN),
    (("-1/4", 2), SOLVABLE_C3_MINUS_QUARTER_PATTERN),
    ((1, 1), SOLVABLE_G4_10),
    ((4, 2), SOLVABLE_G4_10),
]


def test_criterion_4_c3_identification_grid():
    mismatches = []
    for (a, b), expected in C3_ACCEPTANCE_GRID:
        got = identify(realify(family_model("C3"), {"a": a, "b": b}))
        print(f"  C3 a={a} b={b}: expected {expected}, got {got}")
        if got != expected:
            mismatches.append(((a, b), expected, got))
    report(4, not mismatches, f"mismatches={mismatches}")
    assert not mismatches


# 5 -----------------------------------------------------------------------

def test_criterion_5_jacobi_matches_residues():
    rng = random.Random(5)
    disagreements = []
    counts = {"clean_ok": 0, "corrupt_broken": 0}
    for name in FAMILY_NAMES:
        for _ in range(50):
            consts = family(random_fid(rng, name))
            for corrupt in (False, True):
                c = consts.perturbed(rng.choice(INVARIANT_NAMES), rand_fraction(rng) or 1) if corrupt else consts
                model = from_constants(c)
                residues_zero = d2_residues(model).is_zero()
                jacobi = jacobi_check(realify(model))
                if residues_zero != jacobi:
                    disagreements.append((name, c.to_json()))
                if not corrupt and residues_zero:
                    counts["clean_ok"] += 1
                if corrupt and not residues_zero:
                    counts["corrupt_broken"] += 1
    ok = not disagreements and counts["clean_ok"] == 300
    report(5, ok, f"{counts} disagreements={len(disagreements)}")
    assert not disagreements
    assert counts["clean_ok"] == 300
    # the corrupted half must actually exercise the failing branch
    assert counts["corrupt_broken"] > 250


# 6 -----------------------------------------------------------------------

def test_criterion_6_unimodularity():
    rng = random.Random(6)
    algebras = []
    c1_half = realify(family_model("C1"), {"a": "1/2", "b": 0})
    algebras.append(c1_half)
    compact_ok = is_unimodular(c1_half)

    elsewhere = []
    while len(elsewhere) < 20:
        a, b = rand_fraction(rng), rand_fraction(rng)
        if (a, b) != (Fraction(1, 2), 0):
            elsewhere.append(realify(family_model("C1"), {"a": a, "b": b}))
    algebras += elsewhere
    elsewhere_ok = not any(is_unimodular(L) for L in elsewhere)

    grid = [realify(family_model("C4"), {"a": Fraction(i, 2), "b": Fraction(j, 3)})
            for i in range(-2, 3) for j in range(-2, 3)]
    algebras += grid
    c4_ok = not any(is_unimodular(L) for L in grid)

    equivalence_ok = all(is_unimodular(L) == all(closed_three_forms(L)) for L in algebras)
    ok = compact_ok and elsewhere_ok and c4_ok and equivalence_ok
    report(6, ok, f"C1(1/2,0)={compact_ok} C1 elsewhere={elsewhere_ok} C4 grid={c4_ok} "
                  f"3-form equivalence on {len(algebras)} algebras={equivalence_ok}")
    assert ok


# 7 -----------------------------------------------------------------------

def test_criterion_7_lattice_certificate():
    start = time.perf_counter()
    (cert,) = lattice_search((0, 0), (-1, -1), k=0, precision=128)
    verified = verify_certificate(cert)
    rejections = {mn: lattice_scan((mn[0], mn[0]), (mn[1], mn[1])) for mn in [(3, 3), (1, 1)]}
    elapsed = time.perf_counter() - start
    with mpmath.workprec(256):
        s = mpmath.cbrt(108 + 12 * mpmath.sqrt(69))
        re = -s / 12 - 1 / s
        im = mpmath.sqrt(3) * (s / 6 - 2 / s) / 2
        err = max(abs(mpmath.mpf(cert.lambda_re) - re), abs(mpmath.mpf(cert.lambda_im) - im))
    rejected = all(not certs and [r.reason for r in rej] == ["|λ| = 1"] for certs, rej in rejections.values())
    ok = err < 1e-9 and verified and rejected and elapsed < 1
    report(7, ok, f"error={mpmath.nstr(err, 5)} verified={verified} rejected={rejected} elapsed={elapsed:.3f}s")
    assert err < 1e-9
    assert verified and rejected
    assert elapsed < 1


# 8 -----------------------------------------------------------------------

def test_criterion_8_chart_verification():
    start = time.perf_counter()
    failures = []
    for item in fixture_charts("printed"):
        rep = check_local_model(item["chart"], item["omega1"], item["omega2"], item["case"], item["point"], item["name"])
        print(f"  {item['file']}: {'ok' if rep.ok else 'nonzero residues'}")
        if not rep.ok:
            failures.append(item["file"])
    elapsed = time.perf_counter() - start
    report(8, not failures and elapsed < 60, f"failing={sorted(failures)} elapsed={elapsed:.1f}s")
    assert elapsed < 60
    assert not failures, f"charts with nonzero residues: {sorted(failures)}"


# 9 -----------------------------------------------------------------------

MIN_CASES = 100
MODELS = [family_model(name) for name in FAMILY_NAMES]


def _counted(prop, strategies):
    calls = []

    @settings(max_examples=MIN_CASES, deadline=None, database=None)
    @given(st.tuples(*strategies))
    def runner(args):
        calls.append(1)
        prop(*args)

    runner()
    return len(calls)


def _assoc(f, g, h):
    assert wedge(wedge(f, g), h) == wedge(f, wedge(g, h))


def _graded(f, g):
    (p,), (q,) = f.degrees(), g.degrees()
    assert wedge(f, g) == wedge(g, f) * ((-1) ** (p * q))


def _conj_involution(x, f):
    assert x.conjugate().conjugate() == x
    assert conjugate_form(conjugate_form(f)) == f


def _d_squared(k, f):
    m = MODELS[k]
    assert d(d(f, m), m).is_zero()


def _partials_commute(text, s, t):
    f = E(text)
    assert partial(partial(f, s), t) == partial(partial(f, t), s)


def _eval_hom(x, y, a, b):
    pt = {"a": a, "b": b, "cos_a": Fraction(3, 5), "sin_a": Fraction(4, 5), "p1": 1, "p1bar": 1, "q2": 2, "q2bar": 2}
    assert (x * y).eval(pt) == x.eval(pt) * y.eval(pt)
    assert (x + y).eval(pt) == x.eval(pt) + y.eval(pt)


homogeneous = forms().filter(lambda f: len(f.degrees()) == 1)


PROPERTY_SUITES = {
    "wedge associativity": (_assoc, (forms(), forms(), forms())),
    "graded commutativity": (_graded, (homogeneous, homogeneous)),
    "conjugation involution": (_conj_involution, (scalars(), forms())),
    "d^2 = 0": (_d_squared, (st.integers(0, 5), forms(symbols=()))),
    "partials commute": (_partials_commute, (expressions(), variables, variables)),
    "eval homomorphism": (_eval_hom, (scalars(), scalars(), small_fractions, small_fractions)),
}


def test_criterion_9_property_suites():
    counts = {name: _counted(prop, strats) for name, (prop, strats) in PROPERTY_SUITES.items()}
    ok = all(c >= MIN_CASES for c in counts.values())
    report(9, ok, str(counts))
    assert ok
