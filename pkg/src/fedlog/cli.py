"""Command-line surface mirroring the HTTP service plus pipeline debugging."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .adapters import load_catalog
from .datalog import (
    QueryUnion,
    parse_query,
    print_canonical,
    print_source_statements,
)
from .engine import EngineConfig, EngineError, QueryEngine
from .ontology import load_ontology
from .reasoner import reason
from .rewriter import rewrite
from .rules import RuleRepository, load_mapping_dir
from .scheduler import plan as build_plan


def _engine(ctx) -> QueryEngine:
    if ctx.obj.get("engine") is None:
        ctx.obj["engine"] = QueryEngine.from_config(ctx.obj["config"])
    return ctx.obj["engine"]


def _config(ctx) -> EngineConfig:
    return ctx.obj["config"]


@click.group()
@click.option(
    "--config",
    "-c",
    "config_path",
    default="fedlog.toml",
    show_default=True,
    type=click.Path(),
    help="Engine configuration file.",
)
@click.pass_context
def main(ctx, config_path):
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    if Path(config_path).exists():
        ctx.obj["config"] = EngineConfig.load(config_path)
    else:
        ctx.obj["config"] = None
    ctx.obj["engine"] = None


def _require_config(ctx) -> EngineConfig:
    config = ctx.obj["config"]
    if config is None:
        raise click.ClickException(
            f"config file {ctx.obj['config_path']} not found (use --config)"
        )
    return config


@main.group()
def templates():
    """Template inspection."""


@templates.command("list")
@click.pass_context
def templates_list(ctx):
    _require_config(ctx)
    engine = _engine(ctx)
    for t in engine.templates:
        click.echo(f"{t.id}: {t.display_text}")
        for s in t.slots:
            vocab = ", ".join(s.values) if s.values else f"{s.minimum}..{s.maximum}"
            click.echo(f"    {s.name} ({s.kind}): {vocab}")


@main.command("reason")
@click.argument("query_file", type=click.Path(exists=True))
@click.pass_context
def reason_cmd(ctx, query_file):
    """Print the reasoned form of a query and what changed."""
    config = _require_config(ctx)
    ontology = load_ontology(config.ontology_path.read_text(encoding="utf-8"))
    repo = RuleRepository(ontology, load_mapping_dir(config.maps_dir))
    query = parse_query(Path(query_file).read_text(encoding="utf-8"),
                        require_safety=False)
    reasoned, report = reason(query, ontology, repo)
    click.echo(print_canonical(reasoned))
    for atom in report.removed_atoms:
        click.echo(f"# removed: {print_canonical_atom(atom)}")
    for before, after in report.flipped_atoms:
        click.echo(
            f"# flipped: {print_canonical_atom(before)} -> "
            f"{print_canonical_atom(after)}"
        )
    for general, branches in report.expansions:
        names = ", ".join(b.prop_name for b in branches)
        click.echo(f"# expanded {general.prop_name} into: {names}")


def print_canonical_atom(atom) -> str:
    from .rewriter import print_canonical_atom as _pca

    return _pca(atom)


@main.command("rewrite")
@click.argument("query_file", type=click.Path(exists=True))
@click.option("--maps", "maps_dir", type=click.Path(exists=True),
              help="Mapping-rule directory (defaults to the config's).")
@click.pass_context
def rewrite_cmd(ctx, query_file, maps_dir):
    """Rewrite a query to source-level statements."""
    config = _require_config(ctx)
    ontology = load_ontology(config.ontology_path.read_text(encoding="utf-8"))
    rules = load_mapping_dir(maps_dir or config.maps_dir)
    repo = RuleRepository(ontology, rules)
    catalog = load_catalog(config.catalog_path)
    query = parse_query(Path(query_file).read_text(encoding="utf-8"),
                        require_safety=False)
    reasoned, _ = reason(query, ontology, repo)
    branches = (
        reasoned.branches if isinstance(reasoned, QueryUnion) else [reasoned]
    )
    for branch in branches:
        click.echo(print_source_statements(rewrite(branch, repo, catalog)))


@main.command("plan")
@click.argument("query_file", type=click.Path(exists=True))
@click.pass_context
def plan_cmd(ctx, query_file):
    """Print the scheduling plan for a query."""
    config = _require_config(ctx)
    ontology = load_ontology(config.ontology_path.read_text(encoding="utf-8"))
    repo = RuleRepository(ontology, load_mapping_dir(config.maps_dir))
    catalog = load_catalog(config.catalog_path)
    query = parse_query(Path(query_file).read_text(encoding="utf-8"),
                        require_safety=False)
    reasoned, _ = reason(query, ontology, repo)
    branches = (
        reasoned.branches if isinstance(reasoned, QueryUnion) else [reasoned]
    )
    for branch in branches:
        scheduling = build_plan(rewrite(branch, repo, catalog), catalog)
        for sq in scheduling.subqueries:
            inputs = ", ".join(v.name for v in sq.input_vars) or "-"
            outputs = ", ".join(v.name for v in sq.output_vars) or "-"
            atoms = "; ".join(a.qualified_name for a in sq.atoms)
            click.echo(
                f"subquery {sq.id} [{sq.source_id}] atoms: {atoms} | "
                f"in: {inputs} | out: {outputs}"
            )
        for warning in scheduling.warnings:
            click.echo(f"# warning: {warning}")


@main.command("query")
@click.option("--template", "template_id", help="Template id to instantiate.")
@click.option("--set", "assignments", multiple=True,
              help="Slot assignment k=v (repeatable).")
@click.option("--raw", "raw_file", type=click.Path(exists=True),
              help="File with a raw Datalog query.")
@click.option("--no-cache", is_flag=True, default=False)
@click.option("--mode", "modes", multiple=True,
              help="Per-source mode override source=local|online (repeatable).")
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Emit the service-style JSON payload.")
@click.pass_context
def query_cmd(ctx, template_id, assignments, raw_file, no_cache, modes, as_json):
    """Run a query through the full pipeline."""
    _require_config(ctx)
    engine = _engine(ctx)
    slot_values = {}
    for item in assignments:
        if "=" not in item:
            raise click.ClickException(f"--set needs k=v, got {item!r}")
        k, v = item.split("=", 1)
        slot_values[k] = v
    overrides = {}
    for item in modes:
        if "=" not in item:
            raise click.ClickException(f"--mode needs source=mode, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k] = v
    raw_text = Path(raw_file).read_text(encoding="utf-8") if raw_file else None
    try:
        response = engine.handle_query(
            template_id=template_id,
            slot_values=slot_values or None,
            raw_text=raw_text,
            no_cache=no_cache,
            mode_overrides=overrides or None,
        )
    except EngineError as exc:
        raise click.ClickException(f"[{exc.stage}] {exc}")
    if as_json:
        from .service import _table_payload

        click.echo(json.dumps(_table_payload(response), indent=2))
        return
    table = response.table
    click.echo("\t".join(c.name for c in table.columns))
    for row in table.rows:
        click.echo("\t".join(row))
    click.echo(
        f"# {len(table.rows)} rows, cache_hit={response.cache_hit}, "
        f"total={response.timings.get('total', 0):.3f}s, "
        f"query_id={response.query_id}"
    )


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help="Overrides the config's server port.")
@click.pass_context
def serve_cmd(ctx, host, port):
    """Run the HTTP query service."""
    import uvicorn

    config = _require_config(ctx)
    engine = _engine(ctx)
    from .service import create_app

    uvicorn.run(create_app(engine), host=host, port=port or config.port)


@main.command("mock")
@click.option("--fixtures", "fixture_dir", required=True,
              type=click.Path(exists=True),
              help="Directory with relation CSV fixtures.")
@click.option("--source", "source_id", required=True,
              help="Catalog source whose relations to serve.")
@click.option("--port", type=int, default=0, show_default=True)
@click.pass_context
def mock_cmd(ctx, fixture_dir, source_id, port):
    """Serve mock REST fixtures for a catalog source."""
    from .mock_server import MockRestServer

    config = _require_config(ctx)
    catalog = load_catalog(config.catalog_path)
    source = catalog.sources.get(source_id)
    if source is None:
        raise click.ClickException(f"unknown source {source_id!r}")
    server = MockRestServer(fixture_dir, source.relations.values(), port=port)
    click.echo(f"mock REST server for {source_id} at {server.api_url}")
    try:
        server.start()
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
