"""Independent chart check in real coordinates using sympy.

z = x + i y and w = u + i v; forms are coefficient vectors over
(dx, dy, du, dv).  Used only as a cross-check of the coords module.
"""
import random
import re
from itertools import combinations

import mpmath
import sympy
from sympy.parsing.sympy_parser import parse_expr

from conftest import to_sympy
from engelcert.models import FamilyId, family_model

x, y, u, v = COORDS = sympy.symbols("x y u v", real=True)
a, b, c = PARAMS = sympy.symbols("a b c", real=True)
DIFFS = sympy.symbols("DX DY DU DV")

# parameter values used when a chart leaves a parameter free
DEFAULTS = {"a": sympy.Rational(3, 7), "b": sympy.Rational(1, 3), "c": sympy.Rational(2, 5)}


def _locals():
    DX, DY, DU, DV = DIFFS
    return {
        "z": x + sympy.I * y,
        "zbar": x - sympy.I * y,
        "w": u + sympy.I * v,
        "wbar": u - sympy.I * v,
        "dz": DX + sympy.I * DY,
        "dzbar": DX - sympy.I * DY,
        "dw": DU + sympy.I * DV,
        "dwbar": DU - sympy.I * DV,
        "i": sympy.I,
        "a": a,
        "b": b,
        "c": c,
        "exp": sympy.exp,
        "log": sympy.log,
        "pow": lambda base, e: base**e,
    }


def parse_form(text):
    text = re.sub(r"conj\((z|w)\)", r"\1bar", text)
    if "conj" in text:
        raise ValueError("oracle only conjugates bare coordinates")
    expr = parse_expr(text.replace("^", "**"), local_dict=_locals())
    return [sympy.diff(expr, dd) for dd in DIFFS]


def d(form):
    return {(j, k): sympy.diff(form[k], COORDS[j]) - sympy.diff(form[j], COORDS[k])
            for j, k in combinations(range(4), 2)}


def wedge(f, g):
    return {(j, k): f[j] * g[k] - f[k] * g[j] for j, k in combinations(range(4), 2)}


def conj(expr):
    # every symbol is real, so conjugation is i -> -i
    return expr.subs(sympy.I, -sympy.I)


def parameter_values(item):
    vals = {}
    point = dict(item["point"])
    for name in ("b", "c"):
        if name in point:
            vals[name] = sympy.Rational(point[name])
        elif name == "b" or name in item["chart"].parameters:
            vals[name] = DEFAULTS[name]
    if "a" in point:
        expr = parse_expr(point["a"].replace("^", "**"), local_dict={"b": b, "c": c})
        vals["a"] = sympy.nsimplify(expr.subs({b: vals["b"], c: vals.get("c", 0)}))
    else:
        vals["a"] = DEFAULTS["a"]
    return vals


def residues(item, values=None):
    values = values or parameter_values(item)
    subs = {sympy.Symbol(k, real=True): v for k, v in values.items()}
    om1 = [e.subs(subs) for e in parse_form(item["omega1"])]
    om2 = [e.subs(subs) for e in parse_form(item["omega2"])]
    images = (om1, [conj(e) for e in om1], om2, [conj(e) for e in om2])
    fid = FamilyId(item["case"])
    model = family_model(fid)
    ab = {sympy.Symbol("a"): values["a"], sympy.Symbol("b"): values["b"]}
    out = []
    for g in (0, 2):
        lhs = d(images[g])
        rhs = {key: 0 for key in lhs}
        for (i, j), coeff in model.d_gen[g].comps.items():
            cv = to_sympy(coeff).subs(ab)
            for key, val in wedge(images[i], images[j]).items():
                rhs[key] += cv * val
        out.extend(lhs[key] - rhs[key] for key in lhs)
    return out


def max_residue(item, points=3, seed=1, values=None):
    """Largest |residue| over random sample points (log arguments kept positive)."""
    rng = random.Random(seed)
    exprs = residues(item, values)
    logs = set()
    for e in exprs:
        logs |= {arg.args[0] for arg in e.atoms(sympy.log)}
    worst = mpmath.mpf(0)
    found = 0
    while found < points:
        pt = {s: sympy.Rational(rng.randint(-30, 30), rng.randint(1, 7)) for s in COORDS}
        if any(not (arg.subs(pt).is_positive) for arg in logs):
            continue
        try:
            vals = [complex(sympy.N(e.subs(pt), 40)) for e in exprs]
        except (TypeError, ZeroDivisionError):
            continue
        if any(val != val for val in vals):
            continue
        found += 1
        worst = max([worst] + [mpmath.mpf(abs(val)) for val in vals])
    return worst
