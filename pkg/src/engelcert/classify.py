"""Homogeneity constraints from d(d w) = 0 and certification of the families."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .exterior import GENERATORS, d
from .models import (
    EngelConstants,
    FamilyId,
    family,
    from_constants,
    symbolic_constants,
)
from .scalar import Scalar

__all__ = [
    "Residue",
    "ConstraintSystem",
    "d2_residues",
    "verify_family",
    "verify_constants",
    "DerivedRelations",
    "check_derived_relations",
    "generic_system",
    "mutation_survey",
]

_TRIPLES = tuple(combinations(range(4), 3))


@dataclass(frozen=True)
class Residue:
    generator: str
    monomial: tuple[int, ...]
    value: Scalar

    @property
    def monomial_name(self) -> str:
        return "^".join(GENERATORS[i] for i in self.monomial)

    def to_json(self) -> dict:
        return {"generator": self.generator, "monomial": self.monomial_name, "value": str(self.value)}


@dataclass(frozen=True)
class ConstraintSystem:
    """Every degree-3 coefficient of d applied to each d(generator)."""

    residues: tuple[Residue, ...]

    def nonzero(self) -> list[Residue]:
        return [r for r in self.residues if not r.value.is_zero()]

    def is_zero(self) -> bool:
        return not self.nonzero()

    def values(self) -> list[Scalar]:
        return [r.value for r in self.residues]

    def evaluate(self, point, t=None) -> list:
        return [r.value.eval(point, t) for r in self.residues]

    def to_json(self) -> list[dict]:
        return [r.to_json() for r in self.residues]


def d2_residues(model) -> ConstraintSystem:
    zero = Scalar.zero(model.table)
    out = []
    for name, dg in zip(GENERATORS, model.d_gen):
        dd = d(dg, model)
        for mono in _TRIPLES:
            out.append(Residue(name, mono, dd.comps.get(mono, zero)))
    return ConstraintSystem(tuple(out))


def verify_constants(c: EngelConstants) -> bool:
    return d2_residues(from_constants(c)).is_zero()


def verify_family(fid: FamilyId | str) -> bool:
    return verify_constants(family(fid))


@dataclass(frozen=True)
class DerivedRelations:
    r2_identity: bool
    q1_imaginary: bool
    im_p2: bool

    def all(self) -> bool:
        return self.r2_identity and self.q1_imaginary and self.im_p2

    def to_json(self) -> dict:
        return {"r2_identity": self.r2_identity, "q1_imaginary": self.q1_imaginary, "im_p2": self.im_p2}


def relation_residues(c: EngelConstants) -> dict[str, Scalar]:
    """The three differences whose vanishing is checked."""
    p1, p2, q1, q2, r2 = c.p1, c.p2, c.q1, c.q2, c.r2
    i = Scalar.imag_unit(c.table)
    q0 = -(i * q1) / 2
    return {
        "r2_identity": r2 - (p1 * q2 + p2 - q2),
        "q1_imaginary": q1 + q1.conjugate(),
        "im_p2": p2.imag_part() - q0 * (p1 + p1.conjugate() - 1),
    }


def check_derived_relations(c: EngelConstants) -> DerivedRelations:
    res = relation_residues(c)
    return DerivedRelations(*(res[k].is_zero() for k in ("r2_identity", "q1_imaginary", "im_p2")))


def generic_system() -> ConstraintSystem:
    """Residues for the six invariants left as free conjugate-pair symbols."""
    return d2_residues(from_constants(symbolic_constants()))


def mutation_survey(delta=1) -> dict[tuple[str, str], bool]:
    """For every family and invariant: does adding ``delta`` break d^2 = 0?"""
    from .models import FAMILY_NAMES, INVARIANT_NAMES

    out = {}
    for fam in FAMILY_NAMES:
        base = family(fam)
        for name in INVARIANT_NAMES:
            out[(fam, name)] = not verify_constants(base.perturbed(name, delta))
    return out
