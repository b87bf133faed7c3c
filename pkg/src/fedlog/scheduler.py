"""Scheduling plans: decompose a rewritten query into per-source sub-queries
and execute them as bind-joins, consolidating into one result table.

Atoms are grouped by owning source, then into connected components by
shared variables; components are ordered greedily so each consumes only
variables produced earlier, ties broken by catalog declaration order.
Groups sharing no variable with anything placed before them trigger a
Cartesian-product warning but still plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .adapters import SourceCatalog
from .datalog import DatalogQuery, SourceAtom, Variable


class PlanError(Exception):
    pass


@dataclass(frozen=True)
class SubQuery:
    id: int
    source_id: str
    atoms: tuple[SourceAtom, ...]
    input_vars: tuple[Variable, ...]
    output_vars: tuple[Variable, ...]


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "scalar"  # "scalar" | "link"


@dataclass
class ResultTable:
    columns: list[Column]
    rows: list[tuple[str, ...]]

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]


@dataclass
class SchedulingPlan:
    subqueries: list[SubQuery]
    head_vars: tuple[Variable, ...]
    join_keys: list[tuple[Variable, ...]]  # per sub-query, shared with earlier
    head_columns: list[Column]
    warnings: list[str] = field(default_factory=list)


def _atom_vars(atom: SourceAtom) -> list[Variable]:
    return [t for t in atom.terms if isinstance(t, Variable)]


def _connected_components(atoms: list[SourceAtom]) -> list[list[SourceAtom]]:
    remaining = list(atoms)
    components: list[list[SourceAtom]] = []
    while remaining:
        seed = remaining.pop(0)
        group = [seed]
        group_vars = set(_atom_vars(seed))
        changed = True
        while changed:
            changed = False
            for atom in list(remaining):
                if group_vars & set(_atom_vars(atom)):
                    group.append(atom)
                    group_vars |= set(_atom_vars(atom))
                    remaining.remove(atom)
                    changed = True
        components.append(group)
    return components


def _head_column(var: Variable, subqueries, catalog: SourceCatalog) -> Column:
    for sq in subqueries:
        for atom in sq.atoms:
            schema = catalog.relation(atom.qualified_name)
            for col, term in zip(schema.columns, atom.terms):
                if term == var:
                    kind = "link" if col in schema.link_columns else "scalar"
                    return Column(var.name, kind)
    return Column(var.name, "scalar")


def plan(query: DatalogQuery, catalog: SourceCatalog) -> SchedulingPlan:
    """Build a dependency-ordered scheduling plan for a rewritten query."""
    if not query.body:
        raise PlanError("query body is empty")
    by_source: dict[str, list[SourceAtom]] = {}
    for atom in query.body:
        if not isinstance(atom, SourceAtom):
            raise PlanError(
                f"plan() expects a rewritten query; found ontology-level atom "
                f"{atom!r}"
            )
        source = catalog.source_of(atom.qualified_name)
        if source is None:
            raise PlanError(f"relation {atom.qualified_name} not in catalog")
        by_source.setdefault(source.id, []).append(atom)

    groups: list[tuple[str, list[SourceAtom]]] = []
    for source_id in sorted(by_source, key=catalog.source_order):
        for component in _connected_components(by_source[source_id]):
            groups.append((source_id, component))

    # Greedy dependency order: prefer groups sharing a variable with what is
    # already placed; fall back (with a warning) to catalog order.
    ordered: list[tuple[str, list[SourceAtom]]] = []
    warnings: list[str] = []
    placed_vars: set[Variable] = set()
    remaining = list(groups)
    while remaining:
        pick = None
        for cand in remaining:
            cand_vars = {v for a in cand[1] for v in _atom_vars(a)}
            if not ordered or placed_vars & cand_vars:
                pick = cand
                break
        if pick is None:
            pick = remaining[0]
            warnings.append(
                f"sub-query over source {pick[0]} shares no variable with any "
                "earlier sub-query; the final join is a Cartesian product"
            )
        remaining.remove(pick)
        ordered.append(pick)
        placed_vars |= {v for a in pick[1] for v in _atom_vars(a)}

    head_set = list(query.head_vars)
    group_vars = [
        [v for a in atoms for v in _atom_vars(a)] for _, atoms in ordered
    ]
    subqueries: list[SubQuery] = []
    join_keys: list[tuple[Variable, ...]] = []
    earlier: set[Variable] = set()
    for i, (source_id, atoms) in enumerate(ordered):
        own = []
        for v in group_vars[i]:
            if v not in own:
                own.append(v)
        later: set[Variable] = set()
        for j in range(i + 1, len(ordered)):
            later |= set(group_vars[j])
        input_vars = tuple(v for v in own if v in earlier)
        # Join variables stay in the projection so the accumulator can
        # match fetched rows back to the bindings that produced them.
        output_vars = tuple(
            v for v in own if v in later or v in head_set or v in earlier
        )
        join_keys.append(input_vars)
        subqueries.append(
            SubQuery(
                id=i + 1,
                source_id=source_id,
                atoms=tuple(atoms),
                input_vars=input_vars,
                output_vars=output_vars,
            )
        )
        earlier |= set(own)

    covered = {v for sq in subqueries for v in sq.output_vars}
    for v in query.head_vars:
        if v not in covered:
            raise PlanError(f"head variable {v.name} is not produced by any "
                            "sub-query")

    head_columns = [_head_column(v, subqueries, catalog) for v in query.head_vars]
    return SchedulingPlan(
        subqueries=subqueries,
        head_vars=query.head_vars,
        join_keys=join_keys,
        head_columns=head_columns,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Execution


def _natural_join(
    left: Optional[list[dict]], right: list[dict]
) -> list[dict]:
    if left is None:
        return [dict(r) for r in right]
    if not left or not right:
        return []
    shared = [k for k in left[0] if right and k in right[0]]
    out = []
    for lrow in left:
        for rrow in right:
            if all(lrow[k] == rrow[k] for k in shared):
                merged = dict(lrow)
                merged.update(rrow)
                out.append(merged)
    return out


class PlanExecution:
    """Stepwise bind-join execution of one plan (one query, one context)."""

    def __init__(self, plan: SchedulingPlan, adapters: dict):
        self.plan = plan
        self.adapters = adapters
        self.accumulator: Optional[list[dict]] = None
        self._ran: set[int] = set()

    def run_subquery(self, index: int) -> str:
        """Execute sub-query ``index`` (0-based).  Returns a short summary."""
        sq = self.plan.subqueries[index]
        adapter = self.adapters.get(sq.source_id)
        if adapter is None:
            raise PlanError(f"no adapter registered for source {sq.source_id}")
        if self.accumulator is not None and not self.accumulator:
            self._ran.add(index)
            return "skipped (empty input)"
        bindings = None
        if sq.input_vars and self.accumulator is not None:
            seen = set()
            bindings = []
            for row in self.accumulator:
                key = tuple(row.get(v.name) for v in sq.input_vars)
                if key not in seen:
                    seen.add(key)
                    bindings.append({v.name: row.get(v.name) for v in sq.input_vars})
        try:
            rows = adapter.execute(sq, bindings)
        except Exception as exc:
            raise AdapterFailure(sq, exc) from exc
        self.accumulator = _natural_join(self.accumulator, rows)
        self._ran.add(index)
        return f"{len(rows)} rows fetched, {len(self.accumulator)} joined"

    def consolidate(self) -> ResultTable:
        if len(self._ran) != len(self.plan.subqueries):
            raise PlanError("consolidate() called before all sub-queries ran")
        rows: list[tuple[str, ...]] = []
        seen: set[tuple[str, ...]] = set()
        for row in self.accumulator or []:
            tup = tuple(str(row.get(v.name, "")) for v in self.plan.head_vars)
            if tup not in seen:
                seen.add(tup)
                rows.append(tup)
        return ResultTable(columns=list(self.plan.head_columns), rows=rows)


class AdapterFailure(Exception):
    def __init__(self, subquery: SubQuery, cause: Exception):
        super().__init__(
            f"adapter for source {subquery.source_id} failed on sub-query "
            f"{subquery.id}: {cause}"
        )
        self.subquery = subquery
        self.cause = cause


def execute(plan: SchedulingPlan, adapters: dict) -> ResultTable:
    """Run a whole plan in order and consolidate."""
    execution = PlanExecution(plan, adapters)
    for i in range(len(plan.subqueries)):
        execution.run_subquery(i)
    return execution.consolidate()


def union_tables(tables: list[ResultTable]) -> ResultTable:
    if not tables:
        raise PlanError("no tables to union")
    columns = tables[0].columns
    rows: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()
    for table in tables:
        if table.column_names != tables[0].column_names:
            raise PlanError("union branches disagree on columns")
        for row in table.rows:
            if row not in seen:
                seen.add(row)
                rows.append(row)
    return ResultTable(columns=list(columns), rows=rows)
