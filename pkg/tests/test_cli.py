from click.testing import CliRunner

from fedlog.cli import main

import oracle

CONFIG = ["--config", "fixtures/fedlog.toml"]


def _run(*args):
    return CliRunner().invoke(main, [*CONFIG, *args])


def test_templates_list():
    result = _run("templates", "list")
    assert result.exit_code == 0, result.output
    assert "microbe-feeding-diff" in result.output
    assert "day (enum)" in result.output


def test_reason_reports_removed_atoms():
    result = _run("reason", "fixtures/queries/q1.dlog")
    assert result.exit_code == 0, result.output
    assert "# removed: class:Swine(Swine_index)" in result.output
    assert "class:Microbiota" in result.output


def test_rewrite_prints_source_statements():
    result = _run("rewrite", "fixtures/queries/q1.dlog")
    assert result.exit_code == 0, result.output
    assert (
        "fsmm.microbe(Microbe_id,VAR_1,VAR_2,VAR_3,VAR_4,VAR_5,VAR_6,VAR_7,"
        "<1>,VAR_9)." in result.output
    )


def test_plan_lists_subqueries_in_order():
    result = _run("plan", "fixtures/queries/q1.dlog")
    assert result.exit_code == 0, result.output
    lines = [l for l in result.output.splitlines() if l.startswith("subquery")]
    assert "[pgmdb]" in lines[0]
    assert "[gutmgene]" in lines[1]
    assert "[kegg]" in lines[2]


def test_query_by_template():
    result = _run(
        "query", "--template", "microbe-feeding-diff", "--set", "day=100"
    )
    assert result.exit_code == 0, result.output
    for row in oracle.q1_expected("100"):
        assert "\t".join(row) in result.output
    assert "# 3 rows" in result.output


def test_query_raw_file():
    result = _run("query", "--raw", "fixtures/queries/q4.dlog", "--no-cache")
    assert result.exit_code == 0, result.output
    assert "# 1 rows" in result.output


def test_query_json_output():
    result = _run(
        "query", "--template", "metabolite-feeding-diff", "--set", "day=155",
        "--json",
    )
    assert result.exit_code == 0, result.output
    import json

    payload = json.loads(result.output)
    assert {tuple(r) for r in payload["rows"]} == oracle.q2_expected("155")


def test_query_engine_error_is_clean():
    result = _run("query", "--template", "nope")
    assert result.exit_code != 0
    assert "[template]" in result.output


def test_bad_set_syntax_rejected():
    result = _run("query", "--template", "microbe-feeding-diff", "--set", "day")
    assert result.exit_code != 0
    assert "k=v" in result.output


def test_missing_config_reported():
    result = CliRunner().invoke(
        main, ["--config", "does-not-exist.toml", "templates", "list"]
    )
    assert result.exit_code != 0
    assert "not found" in result.output
