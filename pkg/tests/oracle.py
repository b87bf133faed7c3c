"""Independent oracles used by the test suite.

Everything here is deliberately naive: hand-rolled nested-loop joins over
flat CSV files and an interpreter for ontology-level queries over explicit
fact sets.  None of it shares code with the engine's SQL generation,
scheduling, or adapters, so agreement between the two is meaningful.
"""

from __future__ import annotations

import csv
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
DATA = FIXTURES / "data"


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_replicas() -> dict[str, list[dict[str, str]]]:
    tables: dict[str, list[dict[str, str]]] = {}
    for file in sorted(DATA.glob("*/*.csv")):
        tables[file.stem] = read_csv(file)
    return tables


# ---------------------------------------------------------------------------
# Hand-coded joins for the four shipped query shapes.  Each returns the
# expected head tuples as a set.


def q1_expected(day: str) -> set[tuple[str, str, str]]:
    """Differential microbes at `day` with their genes and KEGG pathways."""
    t = load_replicas()
    out = set()
    for host in t["relationship_entity.is_host_of"]:
        if host["sampling_day"] != day:
            continue
        for microbe in t["fsmm.microbe"]:
            if microbe["microbe_id"] != host["microbe_id"]:
                continue
            if microbe["microbe_dpf_tpf_difference"] != "1":
                continue
            if microbe["days"] != day:
                continue
            for mg in t["gutmgene.microbe_gene"]:
                if mg["microbe_id"] != microbe["microbe_id"]:
                    continue
                for gp in t["kegg.gene_pathway"]:
                    if gp["gene_id"] != mg["gene_id"]:
                        continue
                    out.add(
                        (
                            microbe["microbe_name"],
                            mg["gene_symbol"],
                            gp["pathway_link"],
                        )
                    )
    return out


def q2_expected(day: str) -> set[tuple[str, str, str]]:
    """Differential metabolites at `day` with their HMDB class and link."""
    t = load_replicas()
    out = set()
    for prod in t["relationship_entity.produces_metabolome"]:
        if prod["sampling_day"] != day:
            continue
        for met in t["fsmm.metabolome"]:
            if met["metabolome_id"] != prod["metabolome_id"]:
                continue
            if met["metabolome_difference"] != "1":
                continue
            if met["metabolome_time"] != day:
                continue
            for h in t["hmdb.metabolite"]:
                if h["metabolome_id"] != met["metabolome_id"]:
                    continue
                out.add(
                    (met["metabolome_name"], h["hmdb_class"], h["hmdb_link"])
                )
    return out


def q3_expected(day_a: str, day_b: str) -> set[tuple[str, str, str]]:
    """Microbes differential between two ages, with genes and pathways."""
    t = load_replicas()
    diff = f"{day_a}-{day_b}"
    out = set()
    for microbe in t["fsmm.microbe"]:
        if microbe["microbe_age_difference"] != diff:
            continue
        for mg in t["gutmgene.microbe_gene"]:
            if mg["microbe_id"] != microbe["microbe_id"]:
                continue
            for gp in t["kegg.gene_pathway"]:
                if gp["gene_id"] != mg["gene_id"]:
                    continue
                out.add(
                    (
                        microbe["microbe_name"],
                        mg["gene_symbol"],
                        gp["pathway_link"],
                    )
                )
    return out


def q4_expected(day_a: str, day_b: str) -> set[tuple[str, str, str]]:
    """Same shape as q3; the two differ only in the age pair queried."""
    return q3_expected(day_a, day_b)


# ---------------------------------------------------------------------------
# Naive interpreter for ontology-level queries over explicit fact sets.
#
# A fact base maps:
#   classes:    class name -> set of individuals
#   relations:  property name -> set of argument tuples
#   attributes: property name -> set of (subject, value) pairs


class FactBase:
    def __init__(self):
        self.classes: dict[str, set[str]] = {}
        self.relations: dict[str, set[tuple[str, ...]]] = {}
        self.attributes: dict[str, set[tuple[str, str]]] = {}

    def add_class(self, name: str, individual: str) -> None:
        self.classes.setdefault(name, set()).add(individual)

    def add_relation(self, name: str, args: tuple[str, ...]) -> None:
        self.relations.setdefault(name, set()).add(args)

    def add_attribute(self, name: str, subject: str, value: str) -> None:
        self.attributes.setdefault(name, set()).add((subject, value))


def _atom_rows(atom, facts: FactBase) -> list[tuple[str, ...]]:
    kind = type(atom).__name__
    if kind == "ClassAtom":
        return [(x,) for x in facts.classes.get(atom.class_name, ())]
    if kind == "RelAtom":
        return [t for t in facts.relations.get(atom.prop_name, ())]
    if kind == "AttrAtom":
        return [t for t in facts.attributes.get(atom.prop_name, ())]
    raise TypeError(f"unsupported atom {atom!r}")


def _terms(atom):
    kind = type(atom).__name__
    if kind == "ClassAtom":
        return (atom.term,)
    return tuple(atom.terms)


def evaluate(query, facts: FactBase) -> set[tuple[str, ...]]:
    """Nested-loop evaluation of one conjunctive query over a fact base."""
    answers: set[tuple[str, ...]] = set()

    def extend(index: int, binding: dict):
        if index == len(query.body):
            answers.add(tuple(binding[v] for v in query.head_vars))
            return
        atom = query.body[index]
        terms = _terms(atom)
        for row in _atom_rows(atom, facts):
            if len(row) != len(terms):
                continue
            trial = dict(binding)
            ok = True
            for term, value in zip(terms, row):
                if type(term).__name__ == "Constant":
                    if term.value != value:
                        ok = False
                        break
                else:
                    prev = trial.get(term)
                    if prev is None:
                        trial[term] = value
                    elif prev != value:
                        ok = False
                        break
            if ok:
                extend(index + 1, trial)

    extend(0, {})
    return answers


def evaluate_any(reasoned, facts: FactBase) -> set[tuple[str, ...]]:
    """Evaluate a single query or a union of branch queries."""
    branches = getattr(reasoned, "branches", None)
    if branches is None:
        return evaluate(reasoned, facts)
    out: set[tuple[str, ...]] = set()
    for branch in branches:
        out |= evaluate(branch, facts)
    return out
