"""Client-side query optimizer driven by the four ontology rule families.

Applied in the order: inverse normalization, sub-property expansion,
redundant class-atom pruning, attribute-domain validation.  Pruning runs
last so it sees the final atom set; validation has no effect on the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .datalog import (
    Atom,
    AttrAtom,
    ClassAtom,
    DatalogQuery,
    QueryUnion,
    RelAtom,
    SourceAtom,
    Term,
)
from .ontology import Ontology
from .rules import RuleRepository


class ReasoningError(Exception):
    pass


class UnknownPredicateError(ReasoningError):
    def __init__(self, atom: Atom, name: str):
        super().__init__(f"predicate {name!r} is not declared in the ontology")
        self.atom = atom


class AttrDomainError(ReasoningError):
    """An attribute's subject is provably constrained to a different class."""


@dataclass
class ReasoningReport:
    removed_atoms: list[Atom] = field(default_factory=list)
    flipped_atoms: list[tuple[RelAtom, RelAtom]] = field(default_factory=list)
    expansions: list[tuple[RelAtom, list[RelAtom]]] = field(default_factory=list)
    validation_notes: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.removed_atoms
            or self.flipped_atoms
            or self.expansions
            or self.validation_notes
        )


def _check_predicates(query: DatalogQuery, ontology: Ontology) -> None:
    for atom in query.body:
        if isinstance(atom, ClassAtom):
            if atom.class_name not in ontology.classes:
                raise UnknownPredicateError(atom, atom.class_name)
        elif isinstance(atom, RelAtom):
            prop = ontology.object_properties.get(atom.prop_name)
            if prop is None:
                raise UnknownPredicateError(atom, atom.prop_name)
            if len(atom.terms) != prop.arity:
                raise ReasoningError(
                    f"relationship {atom.prop_name} takes {prop.arity} terms, "
                    f"got {len(atom.terms)}"
                )
        elif isinstance(atom, AttrAtom):
            if atom.prop_name not in ontology.data_properties:
                raise UnknownPredicateError(atom, atom.prop_name)


def _flip_inverses(
    body: list[Atom], ontology: Ontology, repo: RuleRepository, report: ReasoningReport
) -> list[Atom]:
    out: list[Atom] = []
    for atom in body:
        if isinstance(atom, RelAtom):
            prop = ontology.object_properties[atom.prop_name]
            inv = prop.inverse_of
            if (
                inv is not None
                and repo.has_mapping("relationship", inv)
                and not repo.has_mapping("relationship", atom.prop_name)
            ):
                flipped = RelAtom(
                    inv, (atom.terms[1], atom.terms[0]) + atom.terms[2:]
                )
                report.flipped_atoms.append((atom, flipped))
                out.append(flipped)
                continue
        out.append(atom)
    return out


def _expand_subproperties(
    body: list[Atom], ontology: Ontology, repo: RuleRepository, report: ReasoningReport
) -> list[list[Atom]]:
    """Expand general, unmapped relationships into per-sub-property branches."""
    for i, atom in enumerate(body):
        if not isinstance(atom, RelAtom):
            continue
        if repo.has_mapping("relationship", atom.prop_name):
            continue
        children = ontology.sub_properties(atom.prop_name)
        if not children:
            continue
        replacements = [RelAtom(child, atom.terms) for child in children]
        report.expansions.append((atom, replacements))
        branches: list[list[Atom]] = []
        for repl in replacements:
            branch = body[:i] + [repl] + body[i + 1 :]
            branches.extend(
                _expand_subproperties(branch, ontology, repo, report)
            )
        return branches
    return [body]


def _binders(body: list[Atom], ontology: Ontology) -> dict[Term, set[str]]:
    """Classes each term is bound to by surviving relationship/attribute atoms."""
    bound: dict[Term, set[str]] = {}
    for atom in body:
        if isinstance(atom, RelAtom):
            prop = ontology.object_properties[atom.prop_name]
            bound.setdefault(atom.terms[0], set()).add(prop.domain)
            bound.setdefault(atom.terms[1], set()).add(prop.range)
        elif isinstance(atom, AttrAtom):
            prop = ontology.data_properties[atom.prop_name]
            bound.setdefault(atom.subject, set()).add(prop.domain)
    return bound


def _prune_class_atoms(
    body: list[Atom], ontology: Ontology, report: ReasoningReport
) -> list[Atom]:
    # Only class atoms are ever removed and binders are rel/attr atoms, so
    # removal never invalidates another removal; a single pass is a fixpoint.
    bound = _binders(body, ontology)
    out: list[Atom] = []
    for atom in body:
        if isinstance(atom, ClassAtom) and atom.class_name in bound.get(
            atom.term, set()
        ):
            report.removed_atoms.append(atom)
            continue
        out.append(atom)
    return out


def _validate_attr_domains(
    body: list[Atom], ontology: Ontology, report: ReasoningReport
) -> None:
    constraints: dict[Term, set[str]] = {}
    for atom in body:
        if isinstance(atom, ClassAtom):
            constraints.setdefault(atom.term, set()).add(atom.class_name)
    for term, classes in _binders(body, ontology).items():
        constraints.setdefault(term, set()).update(classes)
    for atom in body:
        if not isinstance(atom, AttrAtom):
            continue
        domain = ontology.data_properties[atom.prop_name].domain
        others = constraints.get(atom.subject, set()) - {domain}
        if others:
            raise AttrDomainError(
                f"attribute {atom.prop_name} expects subject class {domain} "
                f"but its subject is also constrained to {sorted(others)}"
            )


def reason(
    query: DatalogQuery, ontology: Ontology, repo: RuleRepository
) -> tuple[Union[DatalogQuery, QueryUnion], ReasoningReport]:
    """Optimize a query; the head is always preserved.

    Returns a ``QueryUnion`` when sub-property expansion produced more than
    one branch, otherwise a plain query.
    """
    _check_predicates(query, ontology)
    report = ReasoningReport()
    body = _flip_inverses(list(query.body), ontology, repo, report)
    branches = _expand_subproperties(body, ontology, repo, report)
    results: list[DatalogQuery] = []
    for branch in branches:
        pruned = _prune_class_atoms(branch, ontology, report)
        _validate_attr_domains(pruned, ontology, report)
        if not pruned:
            raise ReasoningError("reasoning removed every body atom")
        results.append(DatalogQuery(query.head_vars, tuple(pruned)))
    if len(results) == 1:
        return results[0], report
    return QueryUnion(tuple(results)), report
