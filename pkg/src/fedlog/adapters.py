"""Source catalog and per-source adapters.

The relational adapter loads a source's CSV replica into an in-memory
sqlite database (one attached schema per relation prefix) and runs the
SQL emitted by :func:`to_sql`.  The REST adapter answers from the same
replica files in ``local`` mode and from HTTP calls in ``online`` mode.
"""

from __future__ import annotations

import csv
import sqlite3
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional
from urllib.parse import quote, urljoin

import httpx

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .datalog import Constant, FreshVar, SourceAtom, Term, Variable


class AdapterError(Exception):
    pass


class CatalogError(Exception):
    pass


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class RelationSchema:
    name: str  # qualified, e.g. "fsmm.microbe"
    columns: tuple[str, ...]
    key: str
    link_columns: tuple[str, ...] = ()
    response_fields: Optional[dict[str, str]] = None  # column -> JSON field

    def __post_init__(self):
        if self.key not in self.columns:
            raise CatalogError(
                f"relation {self.name}: key column {self.key!r} not in columns"
            )

    @property
    def short_name(self) -> str:
        return self.name.split(".", 1)[-1]

    @property
    def key_index(self) -> int:
        return self.columns.index(self.key)


@dataclass(frozen=True)
class SourceDescriptor:
    id: str
    kind: str  # "relational" | "rest"
    mode: str  # "local" | "online"
    relations: dict[str, RelationSchema]
    data_dir: Optional[Path] = None
    endpoint: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("relational", "rest"):
            raise CatalogError(f"source {self.id}: unknown kind {self.kind!r}")
        if self.mode not in ("local", "online"):
            raise CatalogError(f"source {self.id}: unknown mode {self.mode!r}")


class SourceCatalog:
    def __init__(self, sources: list[SourceDescriptor]):
        self.sources: dict[str, SourceDescriptor] = {}
        self._relation_owner: dict[str, str] = {}
        for src in sources:
            if src.id in self.sources:
                raise CatalogError(f"duplicate source id {src.id}")
            self.sources[src.id] = src
            for name in src.relations:
                if name in self._relation_owner:
                    raise CatalogError(f"relation {name} declared by two sources")
                self._relation_owner[name] = src.id

    def relation(self, qualified: str) -> Optional[RelationSchema]:
        owner = self._relation_owner.get(qualified)
        if owner is None:
            return None
        return self.sources[owner].relations[qualified]

    def source_of(self, qualified: str) -> Optional[SourceDescriptor]:
        owner = self._relation_owner.get(qualified)
        return self.sources.get(owner) if owner else None

    def source_order(self, source_id: str) -> int:
        return list(self.sources).index(source_id)

    def with_modes(self, overrides: dict[str, str]) -> "SourceCatalog":
        out = []
        for src in self.sources.values():
            mode = overrides.get(src.id, src.mode)
            out.append(
                SourceDescriptor(src.id, src.kind, mode, src.relations,
                                 src.data_dir, src.endpoint)
            )
        return SourceCatalog(out)


def load_catalog(path) -> SourceCatalog:
    path = Path(path)
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    sources = []
    for entry in doc.get("sources", []):
        relations: dict[str, RelationSchema] = {}
        for rel in entry.get("relations", []):
            schema = RelationSchema(
                name=rel["name"],
                columns=tuple(rel["columns"]),
                key=rel["key"],
                link_columns=tuple(rel.get("link_columns", [])),
                response_fields=rel.get("response_fields"),
            )
            relations[schema.name] = schema
        data_dir = entry.get("data_dir")
        sources.append(
            SourceDescriptor(
                id=entry["id"],
                kind=entry["kind"],
                mode=entry.get("mode", "local"),
                relations=relations,
                data_dir=(path.parent / data_dir) if data_dir else None,
                endpoint=entry.get("endpoint"),
            )
        )
    return SourceCatalog(sources)


def load_relation_csv(data_dir: Path, schema: RelationSchema) -> list[tuple[str, ...]]:
    file = Path(data_dir) / f"{schema.name}.csv"
    with open(file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != schema.columns:
            raise AdapterError(
                f"{file}: header {header} does not match declared columns "
                f"{list(schema.columns)}"
            )
        rows = []
        for row in reader:
            if len(row) != len(schema.columns):
                raise AdapterError(f"{file}: row width mismatch: {row}")
            rows.append(tuple(row))
    return rows


# ---------------------------------------------------------------------------
# SQL generation


@dataclass(frozen=True)
class SqlStatement:
    text: str
    unsatisfiable: bool = False


def _quote_value(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def to_sql(subquery, schemas: dict[str, RelationSchema], bindings=None) -> SqlStatement:
    """Emit a SELECT for a relational sub-query.

    Atoms over the same relation that share the key variable merge into one
    table reference; remaining relations are joined through shared-variable
    equalities.  A contradictory merge (two constants in one column) yields
    a ``WHERE 1=0`` statement flagged unsatisfiable.
    """
    aliases: list[tuple[str, str]] = []  # (alias, relation qualified name)
    group_index: dict[tuple[str, Term], int] = {}
    const_assign: dict[tuple[str, str], str] = {}
    var_locs: dict[Variable, list[tuple[str, str]]] = {}
    var_order: list[Variable] = []
    unsat = False

    for atom in subquery.atoms:
        schema = schemas.get(atom.qualified_name)
        if schema is None:
            raise AdapterError(f"unknown relation {atom.qualified_name}")
        if len(atom.terms) != len(schema.columns):
            raise AdapterError(
                f"atom over {atom.qualified_name} has {len(atom.terms)} terms, "
                f"relation has {len(schema.columns)} columns"
            )
        key_term = atom.terms[schema.key_index]
        if isinstance(key_term, Variable):
            group = (atom.qualified_name, key_term)
            if group in group_index:
                alias = aliases[group_index[group]][0]
            else:
                alias = f"t{len(aliases) + 1}"
                group_index[group] = len(aliases)
                aliases.append((alias, atom.qualified_name))
        else:
            alias = f"t{len(aliases) + 1}"
            aliases.append((alias, atom.qualified_name))

        for col, term in zip(schema.columns, atom.terms):
            if isinstance(term, FreshVar):
                continue
            if isinstance(term, Constant):
                prev = const_assign.get((alias, col))
                if prev is not None and prev != term.value:
                    unsat = True
                const_assign[(alias, col)] = term.value
            else:
                loc = (alias, col)
                locs = var_locs.setdefault(term, [])
                if term not in var_order:
                    var_order.append(term)
                if loc not in locs:
                    locs.append(loc)

    select_parts = []
    for var in subquery.output_vars:
        if var not in var_locs:
            raise AdapterError(
                f"output variable {var.name} does not occur in the sub-query"
            )
        alias, col = var_locs[var][0]
        select_parts.append(f"{alias}.{col} AS {var.name}")
    from_parts = [f"{rel} AS {alias}" for alias, rel in aliases]

    where = []
    for (alias, col), value in const_assign.items():
        where.append(f"{alias}.{col} = {_quote_value(value)}")
    for var in var_order:
        locs = var_locs[var]
        a0, c0 = locs[0]
        for alias, col in locs[1:]:
            where.append(f"{a0}.{c0} = {alias}.{col}")
    if bindings:
        for var in subquery.input_vars:
            if var not in var_locs:
                continue
            values = []
            for row in bindings:
                value = row.get(var.name)
                if value is not None and value not in values:
                    values.append(value)
            if not values:
                continue
            alias, col = var_locs[var][0]
            quoted = ", ".join(_quote_value(v) for v in values)
            where.append(f"{alias}.{col} IN ({quoted})")
    if unsat:
        where = ["1=0"]

    text = f"SELECT {', '.join(select_parts)} FROM {', '.join(from_parts)}"
    if where:
        text += " WHERE " + " AND ".join(where)
    return SqlStatement(text, unsatisfiable=unsat)


# ---------------------------------------------------------------------------
# Replica database


def open_replica_db(source: SourceDescriptor) -> sqlite3.Connection:
    """Load a source's CSV replica into an in-memory sqlite database."""
    if source.data_dir is None:
        raise AdapterError(f"source {source.id} has no data directory")
    conn = sqlite3.connect(":memory:", check_same_thread=False)
    prefixes = sorted({name.split(".", 1)[0] for name in source.relations})
    for prefix in prefixes:
        conn.execute(f"ATTACH ':memory:' AS \"{prefix}\"")
    for schema in source.relations.values():
        prefix, short = schema.name.split(".", 1)
        cols = ", ".join(f'"{c}" TEXT' for c in schema.columns)
        conn.execute(f'CREATE TABLE "{prefix}"."{short}" ({cols})')
        rows = load_relation_csv(source.data_dir, schema)
        placeholders = ", ".join("?" for _ in schema.columns)
        conn.executemany(
            f'INSERT INTO "{prefix}"."{short}" VALUES ({placeholders})', rows
        )
    conn.commit()
    return conn


class RelationalAdapter:
    """Executes sub-queries over the local replica via generated SQL."""

    def __init__(self, source: SourceDescriptor):
        self.source = source
        self.call_count = 0
        self._conn: Optional[sqlite3.Connection] = None
        self._lock = threading.Lock()

    def _connection(self) -> sqlite3.Connection:
        if self._conn is None:
            self._conn = open_replica_db(self.source)
        return self._conn

    def run_sql(self, text: str) -> list[tuple]:
        with self._lock:
            cur = self._connection().execute(text)
            return cur.fetchall()

    def execute(self, subquery, bindings=None) -> list[dict[str, str]]:
        self.call_count += 1
        if bindings is not None and len(bindings) == 0:
            return []
        stmt = to_sql(subquery, self.source.relations, bindings)
        with self._lock:
            cur = self._connection().execute(stmt.text)
            names = [d[0] for d in cur.description]
            return [dict(zip(names, row)) for row in cur.fetchall()]


# ---------------------------------------------------------------------------
# Conjunctive matching over in-memory rows (REST online path)


def match_atoms(
    atoms: list[SourceAtom], tables: dict[str, list[tuple[str, ...]]]
) -> list[dict]:
    """Nested-loop evaluation of a conjunction over named row sets.

    Returns one binding per result, mapping each variable (and fresh
    variable) to its string value.
    """
    results: list[dict] = []

    def extend(index: int, binding: dict):
        if index == len(atoms):
            results.append(dict(binding))
            return
        atom = atoms[index]
        for row in tables.get(atom.qualified_name, []):
            trial = dict(binding)
            if _match_row(atom, row, trial):
                extend(index + 1, trial)

    extend(0, {})
    return results


def _match_row(atom: SourceAtom, row: tuple[str, ...], binding: dict) -> bool:
    if len(row) != len(atom.terms):
        return False
    for term, value in zip(atom.terms, row):
        if isinstance(term, Constant):
            if term.value != value:
                return False
        else:
            prev = binding.get(term)
            if prev is None:
                binding[term] = value
            elif prev != value:
                return False
    return True


# ---------------------------------------------------------------------------
# REST adapter


class RestError(AdapterError):
    pass


class RestAdapter:
    """Answers sub-queries from an HTTP endpoint (or its local replica).

    Online mode issues one GET per distinct key binding against
    ``<endpoint>/<relation>/<key>``, retrying up to ``max_retries`` times
    with exponential backoff, then evaluates the sub-query atoms over the
    fetched rows.
    """

    def __init__(
        self,
        source: SourceDescriptor,
        *,
        endpoint: Optional[str] = None,
        timeout: float = 5.0,
        max_retries: int = 3,
        retry_base: float = 0.2,
    ):
        self.source = source
        self.endpoint = (endpoint or source.endpoint or "").rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.retry_base = retry_base
        self.call_count = 0
        self._local: Optional[RelationalAdapter] = None
        if source.mode == "local":
            self._local = RelationalAdapter(source)

    def execute(self, subquery, bindings=None) -> list[dict[str, str]]:
        if self._local is not None:
            rows = self._local.execute(subquery, bindings)
            self.call_count = self._local.call_count
            return rows
        self.call_count += 1
        if bindings is not None and len(bindings) == 0:
            return []
        relations = {a.qualified_name for a in subquery.atoms}
        if len(relations) != 1:
            raise RestError(
                f"REST sub-query must target one relation, got {sorted(relations)}"
            )
        qualified = relations.pop()
        schema = self.source.relations.get(qualified)
        if schema is None:
            raise RestError(f"unknown relation {qualified}")
        rows = self._fetch_rows(subquery, schema, bindings)
        matches = match_atoms(list(subquery.atoms), {qualified: rows})
        out = []
        for binding in matches:
            out.append({v.name: binding[v] for v in subquery.output_vars
                        if v in binding})
        return out

    def _key_variable(self, subquery, schema: RelationSchema):
        input_names = {v.name for v in subquery.input_vars}
        for atom in subquery.atoms:
            term = atom.terms[schema.key_index]
            if isinstance(term, Variable) and term.name in input_names:
                return term
        return None

    def _fetch_rows(self, subquery, schema, bindings) -> list[tuple[str, ...]]:
        key_var = self._key_variable(subquery, schema) if bindings else None
        if key_var is not None:
            keys = []
            for row in bindings:
                value = row.get(key_var.name)
                if value is not None and value not in keys:
                    keys.append(value)
            records = []
            for key in keys:
                records.extend(
                    self._get_json(f"{self.endpoint}/{schema.short_name}/{quote(key)}")
                )
        else:
            records = self._get_json(f"{self.endpoint}/{schema.short_name}")
        rows = []
        for record in records:
            fields = schema.response_fields or {}
            row = []
            for col in schema.columns:
                value = str(record.get(fields.get(col, col), ""))
                if col in schema.link_columns:
                    value = self._absolutize(value)
                row.append(value)
            rows.append(tuple(row))
        return rows

    def _absolutize(self, value: str) -> str:
        if value.startswith("http://") or value.startswith("https://"):
            return value
        return urljoin(self.endpoint + "/", value)

    def _get_json(self, url: str):
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.retry_base * (2 ** (attempt - 1)))
            try:
                resp = httpx.get(url, timeout=self.timeout)
                if resp.status_code >= 500:
                    last_error = RestError(f"GET {url} -> {resp.status_code}")
                    continue
                if resp.status_code != 200:
                    raise RestError(f"GET {url} -> {resp.status_code}")
                body = resp.json()
            except (httpx.HTTPError, ValueError) as exc:
                last_error = exc
                continue
            if not isinstance(body, list):
                raise RestError(f"GET {url}: expected a JSON list")
            return body
        raise RestError(
            f"GET {url} failed after {self.max_retries} retries: {last_error}"
        )


def build_adapters(catalog: SourceCatalog, *, endpoints: Optional[dict[str, str]] = None):
    """One adapter per catalog source, keyed by source id."""
    endpoints = endpoints or {}
    adapters = {}
    for src in catalog.sources.values():
        if src.kind == "relational":
            adapters[src.id] = RelationalAdapter(src)
        else:
            adapters[src.id] = RestAdapter(src, endpoint=endpoints.get(src.id))
    return adapters
