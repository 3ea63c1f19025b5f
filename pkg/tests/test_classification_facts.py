import dataclasses
import json

import pytest

from planelab import classification_facts as facts
from planelab.errors import NotFoundError, ParameterError


def test_golden_round_trip():
    assert facts.serialize_table() == facts.checked_in_table()


def test_tampered_table_is_detected():
    rows = facts.rows()
    rows[0] = dataclasses.replace(rows[0], bounds={**rows[0].bounds, "b_star": 13})
    assert facts.serialize_table(rows) != facts.checked_in_table()


def test_spot_queries():
    row = facts.lookup("∅", "semisimple")
    assert row.bound("b_star") == 12 and row.footnotes == (1,)
    row = facts.lookup("flag", "arbitrary")
    assert (row.bound("b"), row.bound("c")) == (17, 19)
    assert facts.lookup("{o,W}", "normal-torus").bound("c") == 13


def test_absent_bounds_are_none():
    row = facts.lookup("empty", "semisimple")
    assert row.bound("b") is None and row.bound("d") is None


def test_every_row_has_citation_and_nonnegative_bounds():
    rows = facts.rows()
    assert len(rows) == 36
    for row in rows:
        assert row.citation
        assert all(v >= 0 for v in row.bounds.values())
        assert row.fixed_configuration in facts.CONFIGURATIONS and row.group_class in facts.GROUP_CLASSES
    notes = facts.footnotes()
    assert all(f in notes for row in rows for f in row.footnotes)


def test_unknown_values():
    with pytest.raises(ParameterError):
        facts.lookup("pentagon", "semisimple")
    with pytest.raises(NotFoundError):
        facts.unital_summary(plane_dimension=32)


def test_unital_summary():
    (row,) = facts.unital_summary(8, "mutations")
    assert row.unitals == "S7, S5" and row.motion_group_dimensions == "11, 7"
    (row,) = facts.unital_summary(16, "mutations")
    assert row.unitals == "S15, S11"


def test_query_and_format():
    rows = facts.query(group_class="normal-torus")
    assert {r.group_class for r in rows} == {"normal-torus"}
    assert json.loads(facts.format_rows(rows, "json"))[0]["group_class"] == "normal-torus"
    assert facts.format_rows(rows).splitlines()[0].startswith("configuration")
