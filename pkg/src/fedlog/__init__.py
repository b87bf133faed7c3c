"""fedlog: an ontology-mediated federated query engine for Datalog queries."""

from .datalog import (
    AttrAtom,
    ClassAtom,
    Constant,
    DatalogQuery,
    FreshVar,
    MappingRule,
    ParseError,
    QueryUnion,
    RelAtom,
    SafetyError,
    SourceAtom,
    Variable,
    parse_mapping_rules,
    parse_query,
    print_canonical,
    print_source_statements,
)
from .engine import EngineConfig, EngineError, QueryEngine, QueryResponse
from .ontology import Ontology, load_ontology, serialize_ontology
from .reasoner import AttrDomainError, UnknownPredicateError, reason
from .rewriter import ArityMismatchError, UnificationError, UnmappedPredicateError, rewrite
from .rules import RuleRepository, generate_reasoning_rules, load_mapping_dir

__version__ = "0.1.0"

__all__ = [
    "AttrAtom",
    "AttrDomainError",
    "ArityMismatchError",
    "ClassAtom",
    "Constant",
    "DatalogQuery",
    "EngineConfig",
    "EngineError",
    "FreshVar",
    "MappingRule",
    "Ontology",
    "ParseError",
    "QueryEngine",
    "QueryResponse",
    "QueryUnion",
    "RelAtom",
    "RuleRepository",
    "SafetyError",
    "SourceAtom",
    "UnificationError",
    "UnknownPredicateError",
    "UnmappedPredicateError",
    "Variable",
    "generate_reasoning_rules",
    "load_mapping_dir",
    "load_ontology",
    "parse_mapping_rules",
    "parse_query",
    "print_canonical",
    "print_source_statements",
    "reason",
    "rewrite",
    "serialize_ontology",
]
