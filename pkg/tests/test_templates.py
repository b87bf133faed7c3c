import pytest

from fedlog.datalog import Constant, parse_query, print_canonical
from fedlog.templates import (
    QueryTemplate,
    TemplateError,
    TemplateSlot,
    instantiate,
    load_templates,
)


def _template(skeleton, slots=None, text="Query at {day} d"):
    return QueryTemplate(
        id="t",
        display_text=text,
        slots=tuple(
            slots
            or [TemplateSlot("day", "enum", values=("80", "100"))]
        ),
        skeleton=skeleton,
    )


def test_shipped_templates_load(templates):
    assert [t.id for t in templates] == [
        "microbe-feeding-diff",
        "metabolite-feeding-diff",
        "microbe-age-diff",
    ]
    micro = templates[0]
    assert micro.slot("day").values == (
        "80", "82", "100", "102", "131", "133", "155", "180",
    )


def test_instantiation_fills_constants(templates):
    q = instantiate(templates[0], {"day": "100"})
    consts = [t.value for a in q.body for t in a.terms
              if isinstance(t, Constant)]
    assert consts.count("100") == 2
    assert q.is_safe()


def test_instantiation_equals_handwritten_query(templates, fixtures_dir):
    q = instantiate(templates[0], {"day": "100"})
    handwritten = parse_query(
        (fixtures_dir / "queries" / "q1.dlog").read_text(encoding="utf-8")
    )
    assert print_canonical(q) == print_canonical(handwritten)


def test_two_slot_template(templates):
    q = instantiate(templates[2], {"day_a": "180", "day_b": "80"})
    consts = [t.value for a in q.body for t in a.terms
              if isinstance(t, Constant)]
    assert "180-80" in consts


def test_enum_slot_rejects_unknown_value(templates):
    with pytest.raises(TemplateError, match="not in allowed set"):
        instantiate(templates[0], {"day": "999"})


def test_missing_slot_value_rejected(templates):
    with pytest.raises(TemplateError, match="missing value"):
        instantiate(templates[2], {"day_a": "180"})


def test_unknown_slot_value_rejected(templates):
    with pytest.raises(TemplateError, match="unknown slots"):
        instantiate(templates[0], {"day": "100", "bogus": "1"})


def test_integer_slot_bounds():
    slot = TemplateSlot("n", "integer", minimum=1, maximum=10)
    slot.check("5")
    with pytest.raises(TemplateError):
        slot.check("0")
    with pytest.raises(TemplateError):
        slot.check("11")
    with pytest.raises(TemplateError):
        slot.check("five")


def test_slot_must_sit_inside_constant(tmp_path):
    template = _template("?(X):- attribute:a(X,<1>), attribute:b(X,{day}).")
    with pytest.raises(TemplateError, match="inside"):
        from fedlog.templates import _validate_template

        _validate_template(template)


def test_undeclared_slot_rejected():
    template = _template("?(X):- attribute:a(X,<{day}>), attribute:b(X,<{other}>).")
    from fedlog.templates import _validate_template

    with pytest.raises(TemplateError, match="not declared"):
        _validate_template(template)


def test_display_slot_must_exist_in_skeleton():
    template = _template("?(X):- attribute:a(X,<1>).",
                         slots=[], text="Query at {day} d")
    from fedlog.templates import _validate_template

    with pytest.raises(TemplateError, match="missing from"):
        _validate_template(template)


def test_unused_declared_slot_rejected():
    template = _template("?(X):- attribute:a(X,<1>).", text="Query")
    from fedlog.templates import _validate_template

    with pytest.raises(TemplateError, match="never used"):
        _validate_template(template)


def test_load_templates_validates(tmp_path):
    bad = tmp_path / "templates.toml"
    bad.write_text(
        """
[[templates]]
id = "broken"
text = "at {day}"
skeleton = "?(X):- attribute:a(X,<1>)."
""",
        encoding="utf-8",
    )
    with pytest.raises(TemplateError):
        load_templates(bad)
