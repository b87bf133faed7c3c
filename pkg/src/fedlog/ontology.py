"""In-memory model of the domain ontology plus its declarative text format.

The format carries exactly the constructs the engine consumes: classes,
data properties (with a value kind) and object properties (with
domain/range, optional inverse, optional parent, optional qualifier
positions).  One declaration per line::

    class Swine
    dataprop microbe_name domain=Microbiota kind=text
    objprop is_host_of domain=Swine range=Microbiota inverse=is_hosted_by qualifiers=1

``#`` begins a comment.  The model is immutable after load and safe to
share across concurrent query executions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

VALUE_KINDS = ("text", "integer", "decimal", "flag")


class OntologyError(Exception):
    """Raised for syntax or referential problems in an ontology definition."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class OntoClass:
    name: str
    attributes: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataProperty:
    name: str
    domain: str
    value_kind: str = "text"


@dataclass(frozen=True)
class ObjectProperty:
    name: str
    domain: str
    range: str
    inverse_of: Optional[str] = None
    parent: Optional[str] = None
    qualifier_arity: int = 0

    @property
    def arity(self) -> int:
        return 2 + self.qualifier_arity


@dataclass(frozen=True)
class Ontology:
    classes: dict[str, OntoClass] = field(default_factory=dict)
    data_properties: dict[str, DataProperty] = field(default_factory=dict)
    object_properties: dict[str, ObjectProperty] = field(default_factory=dict)

    def lookup_property(self, name: str, kind: str):
        """Exact-name lookup; returns None when absent.

        ``kind`` is ``"object"`` or ``"data"``.
        """
        if kind == "object":
            return self.object_properties.get(name)
        if kind == "data":
            return self.data_properties.get(name)
        raise ValueError(f"unknown property kind {kind!r}")

    def sub_properties(self, name: str) -> list[str]:
        return sorted(
            p.name for p in self.object_properties.values() if p.parent == name
        )


def lookup_property_by_atom(ontology: Ontology, name: str, kind: str):
    return ontology.lookup_property(name, kind)


def _parse_kv(parts: list[str], allowed: dict[str, bool], line: int) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in parts:
        if "=" not in part:
            raise OntologyError(f"expected key=value, found {part!r}", line)
        key, value = part.split("=", 1)
        if key not in allowed:
            raise OntologyError(f"unknown option {key!r}", line)
        if key in out:
            raise OntologyError(f"duplicate option {key!r}", line)
        out[key] = value
    for key, required in allowed.items():
        if required and key not in out:
            raise OntologyError(f"missing required option {key!r}", line)
    return out


def load_ontology(text: str) -> Ontology:
    classes: dict[str, OntoClass] = {}
    dataprops: dict[str, DataProperty] = {}
    objprops: dict[str, ObjectProperty] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        decl, args = parts[0], parts[1:]
        if decl == "class":
            if len(args) != 1:
                raise OntologyError("class declaration takes one name", lineno)
            name = args[0]
            if name in classes:
                raise OntologyError(f"duplicate class {name}", lineno)
            classes[name] = OntoClass(name)
        elif decl == "dataprop":
            if not args:
                raise OntologyError("dataprop declaration needs a name", lineno)
            name = args[0]
            kv = _parse_kv(args[1:], {"domain": True, "kind": False}, lineno)
            kind = kv.get("kind", "text")
            if kind not in VALUE_KINDS:
                raise OntologyError(f"unknown value kind {kind!r}", lineno)
            if name in dataprops:
                raise OntologyError(f"duplicate data property {name}", lineno)
            dataprops[name] = DataProperty(name, kv["domain"], kind)
        elif decl == "objprop":
            if not args:
                raise OntologyError("objprop declaration needs a name", lineno)
            name = args[0]
            kv = _parse_kv(
                args[1:],
                {"domain": True, "range": True, "inverse": False,
                 "parent": False, "qualifiers": False},
                lineno,
            )
            try:
                quals = int(kv.get("qualifiers", "0"))
            except ValueError:
                raise OntologyError("qualifiers must be an integer", lineno) from None
            if quals < 0:
                raise OntologyError("qualifiers must be >= 0", lineno)
            if name in objprops:
                raise OntologyError(f"duplicate object property {name}", lineno)
            objprops[name] = ObjectProperty(
                name, kv["domain"], kv["range"],
                inverse_of=kv.get("inverse"), parent=kv.get("parent"),
                qualifier_arity=quals,
            )
        else:
            raise OntologyError(f"unknown declaration {decl!r}", lineno)

    _validate(classes, dataprops, objprops)

    # Attach attribute lists to their domain classes.
    by_class: dict[str, list[str]] = {name: [] for name in classes}
    for prop in dataprops.values():
        by_class[prop.domain].append(prop.name)
    resolved = {
        name: OntoClass(name, tuple(sorted(by_class[name]))) for name in classes
    }
    return Ontology(resolved, dict(dataprops), dict(objprops))


def _validate(classes, dataprops, objprops) -> None:
    names = list(classes) + list(dataprops) + list(objprops)
    seen: set[str] = set()
    for name in names:
        if name in seen:
            raise OntologyError(f"name {name!r} used in more than one namespace")
        seen.add(name)

    for prop in dataprops.values():
        if prop.domain not in classes:
            raise OntologyError(
                f"data property {prop.name} references undeclared class {prop.domain}"
            )
    for prop in objprops.values():
        for ref, what in ((prop.domain, "domain"), (prop.range, "range")):
            if ref not in classes:
                raise OntologyError(
                    f"object property {prop.name} references undeclared "
                    f"{what} class {ref}"
                )
        if prop.inverse_of is not None:
            other = objprops.get(prop.inverse_of)
            if other is None:
                raise OntologyError(
                    f"object property {prop.name} references undeclared "
                    f"inverse {prop.inverse_of}"
                )
            if other.inverse_of != prop.name:
                raise OntologyError(
                    f"inverse link between {prop.name} and {other.name} "
                    "is not symmetric"
                )
            if other.domain != prop.range or other.range != prop.domain:
                raise OntologyError(
                    f"inverse properties {prop.name}/{other.name} must have "
                    "swapped domain and range"
                )
        if prop.parent is not None and prop.parent not in objprops:
            raise OntologyError(
                f"object property {prop.name} references undeclared "
                f"parent {prop.parent}"
            )

    # Sub-property links must form a forest.
    for start in objprops:
        seen_chain = {start}
        cur = objprops[start].parent
        while cur is not None:
            if cur in seen_chain:
                raise OntologyError(
                    f"sub-property cycle through {start}"
                )
            seen_chain.add(cur)
            cur = objprops[cur].parent


def serialize_ontology(ontology: Ontology) -> str:
    """Text form that loads back to the same resolved model."""
    lines = []
    for name in ontology.classes:
        lines.append(f"class {name}")
    for prop in ontology.data_properties.values():
        lines.append(f"dataprop {prop.name} domain={prop.domain} kind={prop.value_kind}")
    for prop in ontology.object_properties.values():
        parts = [f"objprop {prop.name} domain={prop.domain} range={prop.range}"]
        if prop.inverse_of:
            parts.append(f"inverse={prop.inverse_of}")
        if prop.parent:
            parts.append(f"parent={prop.parent}")
        if prop.qualifier_arity:
            parts.append(f"qualifiers={prop.qualifier_arity}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
