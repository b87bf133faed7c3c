"""Unification-based rewriting of ontology-level atoms into source atoms.

Each relationship/attribute atom is unified with its mapping rule's head;
the rule's single body atom is instantiated under the resulting binding.
Rule-body placeholders that stay unbound become fresh variables whose
display index is their column position minus one (so the placeholder in
column 10 prints ``VAR_9``), scoped per rewritten atom.
"""

from __future__ import annotations

from .datalog import (
    Atom,
    AttrAtom,
    ClassAtom,
    Constant,
    DatalogQuery,
    FreshVar,
    RelAtom,
    SourceAtom,
    Term,
    Variable,
    print_canonical,
)
from .rules import RuleRepository


class RewriteError(Exception):
    pass


class UnmappedPredicateError(RewriteError):
    def __init__(self, kind: str, name: str):
        super().__init__(f"no mapping rule for {kind} {name!r}")
        self.kind = kind
        self.name = name


class UnificationError(RewriteError):
    pass


class ArityMismatchError(RewriteError):
    pass


def _atom_kind_and_name(atom: Atom) -> tuple[str, str]:
    if isinstance(atom, ClassAtom):
        return "class", atom.class_name
    if isinstance(atom, RelAtom):
        return "relationship", atom.prop_name
    if isinstance(atom, AttrAtom):
        return "attribute", atom.prop_name
    raise TypeError(f"not an ontology-level atom: {atom!r}")


def _unify_head(head: Atom, atom: Atom) -> dict[Variable, Term]:
    """Bind the mapping rule's head variables to the query atom's terms."""
    head_terms = head.terms
    atom_terms = atom.terms
    if len(head_terms) != len(atom_terms):
        raise ArityMismatchError(
            f"atom {print_canonical_atom(atom)} has {len(atom_terms)} terms but "
            f"its mapping rule head takes {len(head_terms)}"
        )
    binding: dict[Variable, Term] = {}
    for h, a in zip(head_terms, atom_terms):
        if isinstance(h, Constant):
            if h != a:
                raise UnificationError(
                    f"constant clash: rule head expects <{h.value}>, atom has "
                    f"{a!r}"
                )
            continue
        if not isinstance(h, Variable):
            raise UnificationError("mapping rule heads may only use variables "
                                   "and constants")
        if h in binding and binding[h] != a:
            raise UnificationError(
                f"rule head variable {h.name} cannot bind both "
                f"{binding[h]!r} and {a!r}"
            )
        binding[h] = a
    return binding


def print_canonical_atom(atom: Atom) -> str:
    return print_canonical(DatalogQuery((), (atom,))).split(":- ", 1)[1].rstrip(".")


def rewrite(query: DatalogQuery, repo: RuleRepository, catalog=None) -> DatalogQuery:
    """Rewrite every ontology-level atom to a source atom.

    ``catalog`` (a :class:`~fedlog.adapters.SourceCatalog`), when given, is
    used to check source-atom arities against declared relation schemas.
    """
    out: list[Atom] = []
    for ordinal, atom in enumerate(query.body):
        if isinstance(atom, SourceAtom):
            rewritten = atom
        else:
            kind, name = _atom_kind_and_name(atom)
            rule = repo.find_mapping(kind, name)
            if rule is None:
                raise UnmappedPredicateError(kind, name)
            binding = _unify_head(rule.head, atom)
            terms: list[Term] = []
            for position, body_term in enumerate(rule.body.terms, start=1):
                if isinstance(body_term, Variable) and body_term in binding:
                    terms.append(binding[body_term])
                elif isinstance(body_term, Constant):
                    terms.append(body_term)
                else:
                    terms.append(FreshVar(index=position - 1, scope=ordinal))
            rewritten = SourceAtom(rule.body.schema, rule.body.relation, tuple(terms))
        if catalog is not None:
            schema = catalog.relation(rewritten.qualified_name)
            if schema is None:
                raise RewriteError(
                    f"relation {rewritten.qualified_name} is not in the catalog"
                )
            if len(schema.columns) != len(rewritten.terms):
                raise ArityMismatchError(
                    f"{rewritten.qualified_name} has {len(schema.columns)} "
                    f"columns but the atom carries {len(rewritten.terms)} terms"
                )
        out.append(rewritten)
    return DatalogQuery(query.head_vars, tuple(out))
