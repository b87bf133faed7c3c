"""Rule repository: ontology-derived reasoning rules and per-source mapping rules.

Reasoning rules are generated from the ontology (one per property per rule
kind); mapping rules are loaded from ``<source_id>.map.dlog`` files.  The
repository is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .datalog import AttrAtom, ClassAtom, MappingRule, RelAtom, parse_mapping_rules
from .ontology import Ontology

ATTR_INCLUSION = "AttrInclusion"
DOMAIN_RANGE = "DomainRange"
INVERSE_EQUIV = "InverseEquiv"
SUBPROP_INHERIT = "SubPropInherit"


class RuleRepositoryError(Exception):
    pass


@dataclass(frozen=True)
class ReasoningRule:
    kind: str
    symbols: tuple[str, ...]


def generate_reasoning_rules(ontology: Ontology) -> list[ReasoningRule]:
    """Derive the four first-order rule families from the ontology.

    Pure function of the ontology; output is order-normalized so equal
    ontologies yield structurally identical rule lists.
    """
    rules: list[ReasoningRule] = []
    for prop in ontology.data_properties.values():
        rules.append(ReasoningRule(ATTR_INCLUSION, (prop.name, prop.domain)))
    for prop in ontology.object_properties.values():
        rules.append(ReasoningRule(DOMAIN_RANGE, (prop.name, prop.domain, prop.range)))
    seen_pairs: set[frozenset] = set()
    for prop in ontology.object_properties.values():
        if prop.inverse_of is None:
            continue
        pair = frozenset((prop.name, prop.inverse_of))
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        a, b = sorted(pair)
        rules.append(ReasoningRule(INVERSE_EQUIV, (a, b)))
    for prop in ontology.object_properties.values():
        if prop.parent is not None:
            rules.append(ReasoningRule(SUBPROP_INHERIT, (prop.name, prop.parent)))
    rules.sort(key=lambda r: (r.kind, r.symbols))
    return rules


def _head_kind(rule: MappingRule) -> str:
    if isinstance(rule.head, RelAtom):
        return "relationship"
    if isinstance(rule.head, AttrAtom):
        return "attribute"
    if isinstance(rule.head, ClassAtom):
        return "class"
    raise RuleRepositoryError("mapping rule head must be an ontology-level atom")


def _head_name(rule: MappingRule) -> str:
    if isinstance(rule.head, ClassAtom):
        return rule.head.class_name
    return rule.head.prop_name


class RuleRepository:
    """Indexed access to reasoning and mapping rules."""

    def __init__(self, ontology: Ontology, mapping_rules: Iterable[MappingRule] = ()):
        self.ontology = ontology
        self.reasoning_rules = generate_reasoning_rules(ontology)
        self._reasoning_by_subject: dict[str, list[ReasoningRule]] = {}
        for rule in self.reasoning_rules:
            self._reasoning_by_subject.setdefault(rule.symbols[0], []).append(rule)
        self._mappings: dict[tuple[str, str], MappingRule] = {}
        for rule in mapping_rules:
            key = (_head_kind(rule), _head_name(rule))
            if key in self._mappings:
                raise RuleRepositoryError(
                    f"duplicate mapping rule for {key[0]} {key[1]}"
                )
            self._mappings[key] = rule

    def reasoning_for(self, subject: str) -> list[ReasoningRule]:
        return list(self._reasoning_by_subject.get(subject, []))

    def find_mapping(self, kind: str, predicate: str) -> Optional[MappingRule]:
        return self._mappings.get((kind, predicate))

    def has_mapping(self, kind: str, predicate: str) -> bool:
        return (kind, predicate) in self._mappings

    @property
    def mapping_rules(self) -> list[MappingRule]:
        return list(self._mappings.values())


def load_mapping_dir(path) -> list[MappingRule]:
    """Load every ``*.map.dlog`` file under ``path``, in name order."""
    rules: list[MappingRule] = []
    for file in sorted(Path(path).glob("*.map.dlog")):
        rules.extend(parse_mapping_rules(file.read_text(encoding="utf-8")))
    return rules
