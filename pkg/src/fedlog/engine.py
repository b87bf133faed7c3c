"""The end-to-end pipeline: cache -> reason -> rewrite -> plan ->
workflow-orchestrated execution -> consolidation.

One :class:`QueryEngine` serves many concurrent queries; each query gets
its own workflow instance whose node records land in the execution store.
"""

from __future__ import annotations

import tempfile
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import scheduler as sched
from .adapters import SourceCatalog, build_adapters, load_catalog
from .cache import ResultCache, cache_key
from .datalog import DatalogQuery, QueryUnion, parse_query, print_canonical
from .ontology import Ontology, load_ontology
from .reasoner import ReasoningReport, reason
from .rewriter import rewrite
from .rules import RuleRepository, load_mapping_dir
from .scheduler import PlanExecution, ResultTable, SchedulingPlan, union_tables
from .templates import QueryTemplate, TemplateError, instantiate, load_templates
from .workflow import ExecutionStore, model_plan, run, serialize_bpmn


class EngineError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


@dataclass
class QueryResponse:
    query_id: str
    table: ResultTable
    timings: dict[str, float]
    cache_hit: bool
    status: str = "done"
    canonical_query: str = ""
    warnings: list[str] = field(default_factory=list)


@dataclass
class EngineConfig:
    ontology_path: Path
    templates_path: Path
    catalog_path: Path
    maps_dir: Path
    run_dir: Optional[Path] = None
    cache_ttl_seconds: float = 30.0
    cache_max_entries: int = 1024
    port: int = 8000

    @classmethod
    def load(cls, path) -> "EngineConfig":
        path = Path(path)
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        base = path.parent

        def resolve(key: str) -> Path:
            return base / doc[key]

        run_dir = (base / doc["run_dir"]) if "run_dir" in doc else None
        cache = doc.get("cache", {})
        server = doc.get("server", {})
        return cls(
            ontology_path=resolve("ontology"),
            templates_path=resolve("templates"),
            catalog_path=resolve("catalog"),
            maps_dir=resolve("maps_dir"),
            run_dir=run_dir,
            cache_ttl_seconds=float(cache.get("ttl_seconds", 30)),
            cache_max_entries=int(cache.get("max_entries", 1024)),
            port=int(server.get("port", 8000)),
        )


class QueryEngine:
    def __init__(
        self,
        ontology: Ontology,
        repo: RuleRepository,
        catalog: SourceCatalog,
        templates: list[QueryTemplate],
        *,
        adapters: Optional[dict] = None,
        cache: Optional[ResultCache] = None,
        run_dir=None,
        endpoints: Optional[dict[str, str]] = None,
    ):
        self.ontology = ontology
        self.repo = repo
        self.catalog = catalog
        self.templates = templates
        self.endpoints = endpoints or {}
        if adapters is None:
            adapters = build_adapters(catalog, endpoints=self.endpoints)
        self.adapters = adapters
        # "cache or ..." would discard an empty ResultCache (len() == 0).
        self.cache = cache if cache is not None else ResultCache()
        if run_dir is None:
            run_dir = tempfile.mkdtemp(prefix="fedlog-runs-")
        self.store = ExecutionStore(run_dir)

    @classmethod
    def from_config(cls, config: Union[EngineConfig, str, Path], **kwargs) -> "QueryEngine":
        if not isinstance(config, EngineConfig):
            config = EngineConfig.load(config)
        ontology = load_ontology(config.ontology_path.read_text(encoding="utf-8"))
        repo = RuleRepository(ontology, load_mapping_dir(config.maps_dir))
        catalog = load_catalog(config.catalog_path)
        templates = load_templates(config.templates_path)
        kwargs.setdefault(
            "cache",
            ResultCache(config.cache_ttl_seconds, config.cache_max_entries),
        )
        kwargs.setdefault("run_dir", config.run_dir)
        return cls(ontology, repo, catalog, templates, **kwargs)

    # -- template access ------------------------------------------------

    def template(self, template_id: str) -> QueryTemplate:
        for t in self.templates:
            if t.id == template_id:
                return t
        raise EngineError("template", f"unknown template {template_id!r}")

    # -- pipeline --------------------------------------------------------

    def _resolve_query(self, template_id, slot_values, raw_text) -> DatalogQuery:
        if raw_text is not None:
            try:
                return parse_query(raw_text)
            except Exception as exc:
                raise EngineError("parse", str(exc)) from exc
        if template_id is None:
            raise EngineError("parse", "either a template or raw query text "
                              "is required")
        template = self.template(template_id)
        try:
            return instantiate(template, slot_values or {})
        except TemplateError as exc:
            raise EngineError("template", str(exc)) from exc

    def _adapters_for(self, mode_overrides: Optional[dict[str, str]]):
        if not mode_overrides:
            return self.adapters, self.catalog
        catalog = self.catalog.with_modes(mode_overrides)
        return build_adapters(catalog, endpoints=self.endpoints), catalog

    def handle_query(
        self,
        *,
        template_id: Optional[str] = None,
        slot_values: Optional[dict[str, str]] = None,
        raw_text: Optional[str] = None,
        no_cache: bool = False,
        mode_overrides: Optional[dict[str, str]] = None,
    ) -> QueryResponse:
        total_start = time.perf_counter()
        query = self._resolve_query(template_id, slot_values, raw_text)
        canonical = print_canonical(query)
        key = cache_key(query)
        if not no_cache:
            cached = self.cache.get(key)
            if cached is not None:
                table, query_id = cached
                total = time.perf_counter() - total_start
                return QueryResponse(
                    query_id=query_id,
                    table=table,
                    timings={"total": total},
                    cache_hit=True,
                    canonical_query=canonical,
                )

        adapters, catalog = self._adapters_for(mode_overrides)
        timings: dict[str, float] = {}

        def timed(stage: str, fn):
            start = time.perf_counter()
            try:
                result = fn()
            except EngineError:
                raise
            except Exception as exc:
                raise EngineError(stage, str(exc)) from exc
            timings[stage] = time.perf_counter() - start
            return result

        reasoned, report = timed("reason", lambda: reason(query, self.ontology,
                                                          self.repo))
        branches = (
            list(reasoned.branches)
            if isinstance(reasoned, QueryUnion)
            else [reasoned]
        )
        rewritten = timed(
            "rewrite",
            lambda: [rewrite(b, self.repo, catalog) for b in branches],
        )
        plans = timed("plan", lambda: [sched.plan(q, catalog) for q in rewritten])

        # Map global sub-query ordinals onto (branch, local index).
        steps: list[tuple[int, int]] = []
        for bi, p in enumerate(plans):
            for li in range(len(p.subqueries)):
                steps.append((bi, li))

        @dataclass
        class _Shell:
            subqueries: list

        model = model_plan(_Shell([None] * len(steps)))
        executions = [PlanExecution(p, adapters) for p in plans]
        result: dict[str, ResultTable] = {}

        def run_step(i: int):
            bi, li = steps[i]
            start = time.perf_counter()
            detail = executions[bi].run_subquery(li)
            timings[f"subquery({i + 1})"] = time.perf_counter() - start
            return detail

        def consolidate():
            start = time.perf_counter()
            result["table"] = union_tables([e.consolidate() for e in executions])
            timings["consolidate"] = time.perf_counter() - start
            rows = len(result["table"].rows)
            return f"{rows} rows"

        callbacks = {
            "reason": lambda: self._stage_detail_reason(report),
            "rewrite": lambda: f"{sum(len(q.body) for q in rewritten)} source atoms",
            "plan": lambda: f"{len(steps)} sub-queries",
            "consolidate": consolidate,
        }
        for i in range(len(steps)):
            callbacks[f"subquery({i + 1})"] = (lambda i=i: run_step(i))

        query_id = uuid.uuid4().hex
        instance_id, status = run(model, callbacks, self.store,
                                  instance_id=query_id)
        total = time.perf_counter() - total_start
        timings["orchestration"] = max(0.0, total - sum(timings.values()))
        timings["total"] = total
        if status == "failed":
            events = self.store.node_states(query_id)
            failed = next((e for e in events if e["status"] == "failed"), None)
            raise EngineError(
                "execute",
                failed["detail"] if failed else "workflow execution failed",
            )
        table = result["table"]
        warnings = [w for p in plans for w in p.warnings]
        if not no_cache:
            self.cache.put(key, (table, query_id))
        return QueryResponse(
            query_id=query_id,
            table=table,
            timings=timings,
            cache_hit=False,
            canonical_query=canonical,
            warnings=warnings,
        )

    @staticmethod
    def _stage_detail_reason(report: ReasoningReport) -> str:
        return (
            f"{len(report.removed_atoms)} removed, "
            f"{len(report.flipped_atoms)} flipped, "
            f"{len(report.expansions)} expanded"
        )

    def workflow_records(self, query_id: str) -> list[dict]:
        return self.store.node_states(query_id)

    def workflow_bpmn(self, subquery_count: int) -> str:
        @dataclass
        class _Shell:
            subqueries: list

        return serialize_bpmn(model_plan(_Shell([None] * subquery_count)))
