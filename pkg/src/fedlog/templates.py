"""Parameterized natural-language query templates.

Templates live in a TOML file; each carries display text with ``{slot}``
placeholders and a Datalog skeleton with the same placeholders inside
constant (``<...>``) positions, so every instantiation stays safe by
construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .datalog import DatalogQuery, parse_query

_SLOT_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


class TemplateError(Exception):
    pass


@dataclass(frozen=True)
class TemplateSlot:
    name: str
    kind: str  # "enum" | "integer"
    values: tuple[str, ...] = ()  # enum vocabulary
    minimum: Optional[int] = None
    maximum: Optional[int] = None

    def check(self, value: str) -> None:
        if self.kind == "enum":
            if value not in self.values:
                raise TemplateError(
                    f"slot {self.name}: value {value!r} not in allowed set "
                    f"{list(self.values)}"
                )
        elif self.kind == "integer":
            try:
                n = int(value)
            except ValueError:
                raise TemplateError(
                    f"slot {self.name}: {value!r} is not an integer"
                ) from None
            if self.minimum is not None and n < self.minimum:
                raise TemplateError(f"slot {self.name}: {n} below {self.minimum}")
            if self.maximum is not None and n > self.maximum:
                raise TemplateError(f"slot {self.name}: {n} above {self.maximum}")
        else:
            raise TemplateError(f"slot {self.name}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class QueryTemplate:
    id: str
    display_text: str
    slots: tuple[TemplateSlot, ...]
    skeleton: str

    def slot(self, name: str) -> Optional[TemplateSlot]:
        for s in self.slots:
            if s.name == name:
                return s
        return None


def _validate_template(template: QueryTemplate) -> None:
    display_slots = set(_SLOT_RE.findall(template.display_text))
    skeleton_slots = set(_SLOT_RE.findall(template.skeleton))
    declared = {s.name for s in template.slots}
    for name in display_slots:
        if name not in skeleton_slots:
            raise TemplateError(
                f"template {template.id}: display slot {{{name}}} missing from "
                "the skeleton"
            )
    for name in display_slots | skeleton_slots:
        if name not in declared:
            raise TemplateError(
                f"template {template.id}: slot {{{name}}} is not declared"
            )
    for name in declared:
        if name not in skeleton_slots:
            raise TemplateError(
                f"template {template.id}: declared slot {name} never used in "
                "the skeleton"
            )
    # Placeholders must sit inside <...> constants.
    stripped = re.sub(r"<[^>]*>", "<>", template.skeleton)
    if _SLOT_RE.search(stripped):
        raise TemplateError(
            f"template {template.id}: slots may only appear inside <...> "
            "constants"
        )
    # The skeleton must instantiate to a safe query with sample values.
    sample = {}
    for s in template.slots:
        sample[s.name] = s.values[0] if s.values else str(s.minimum or 0)
    instantiate(template, sample)


def load_templates(path) -> list[QueryTemplate]:
    with open(Path(path), "rb") as fh:
        doc = tomllib.load(fh)
    templates = []
    for entry in doc.get("templates", []):
        slots = []
        for s in entry.get("slots", []):
            slots.append(
                TemplateSlot(
                    name=s["name"],
                    kind=s.get("kind", "enum"),
                    values=tuple(str(v) for v in s.get("values", [])),
                    minimum=s.get("min"),
                    maximum=s.get("max"),
                )
            )
        template = QueryTemplate(
            id=entry["id"],
            display_text=entry["text"],
            slots=tuple(slots),
            skeleton=entry["skeleton"],
        )
        _validate_template(template)
        templates.append(template)
    return templates


def instantiate(template: QueryTemplate, slot_values: dict[str, str]) -> DatalogQuery:
    """Textual substitution into constant positions, then parse."""
    text = template.skeleton
    for slot in template.slots:
        if slot.name not in slot_values:
            raise TemplateError(f"missing value for slot {slot.name}")
        value = str(slot_values[slot.name])
        slot.check(value)
        text = text.replace(f"{{{slot.name}}}", value)
    extra = set(slot_values) - {s.name for s in template.slots}
    if extra:
        raise TemplateError(f"unknown slots supplied: {sorted(extra)}")
    return parse_query(text)
