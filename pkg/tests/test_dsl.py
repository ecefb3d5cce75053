import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagramkit.dsl import (
    DanglingReferenceError,
    MissingLayoutError,
    PlanParseError,
    parse_plan,
    serialize_plan,
)
from diagramkit.model import DiagramPlan, RelationKind, validate_structure
from planfactory import random_plan


class TestParseButterfly:
    def test_component_counts(self, butterfly_plan):
        assert len(butterfly_plan.objects) == 4
        assert len(butterfly_plan.text_labels) == 4
        assert len(butterfly_plan.relationships_of_kind(RelationKind.ARROW)) == 4
        assert len(butterfly_plan.relationships_of_kind(RelationKind.LABELS)) == 4
        assert len(butterfly_plan.layouts) == 8

    def test_descriptions_and_boxes(self, butterfly_plan):
        assert butterfly_plan.entity("I3").description == "adult butterfly"
        assert butterfly_plan.entity("T3").description == "adult butterfly"
        assert butterfly_plan.layouts["I0"].as_list() == [24, 50, 14, 14]

    def test_serialize_is_byte_identical(self, butterfly_plan, butterfly_text):
        assert serialize_plan(butterfly_plan) == butterfly_text

    def test_parser_output_is_structurally_valid(self, butterfly_plan):
        assert validate_structure(butterfly_plan) == []


class TestParseErrors:
    def test_dangling_relationship(self):
        text = "Required Entities:\negg image (I0)\nEntity Relationships:\nI9 has an arrow to I0\n"
        with pytest.raises(DanglingReferenceError) as err:
            parse_plan(text)
        assert err.value.entity_id == "I9"
        assert err.value.line_no == 4

    def test_zero_width_box(self):
        text = (
            "Required Entities:\negg image (I0)\n"
            "Entity Locations:\nI0 is located at [24, 50, 0, 14]\n"
        )
        with pytest.raises(PlanParseError):
            parse_plan(text)

    def test_missing_location(self):
        text = "Required Entities:\negg image (I0)\n"
        with pytest.raises(MissingLayoutError) as err:
            parse_plan(text)
        assert err.value.entity_ids == ["I0"]

    def test_duplicate_entity_id(self):
        text = "Required Entities:\negg image (I0)\nlarva image (I0)\n"
        with pytest.raises(PlanParseError):
            parse_plan(text)

    def test_labels_kind_rule(self):
        text = (
            'Required Entities:\n"a" text label (T0)\n"b" text label (T1)\n'
            "Entity Relationships:\nT0 labels T1\n"
        )
        with pytest.raises(PlanParseError):
            parse_plan(text)

    def test_malformed_declaration_is_an_error_not_a_skip(self):
        text = "Required Entities:\negg image (Q0)\n"
        with pytest.raises(PlanParseError):
            parse_plan(text)


class TestTolerantParsing:
    def test_unknown_lines_skipped_with_warning(self):
        text = (
            "Required Entities:\negg image (I0)\n"
            "this line is chatter\n"
            "Entity Locations:\nI0 is located at [1, 1, 5, 5]\n"
        )
        warnings: list[str] = []
        plan = parse_plan(text, warnings=warnings)
        assert len(plan.entities) == 1
        assert len(warnings) == 1 and "chatter" in warnings[0]

    def test_duplicate_location_last_wins(self):
        text = (
            "Required Entities:\negg image (I0)\nEntity Locations:\n"
            "I0 is located at [1, 1, 5, 5]\nI0 is located at [2, 2, 6, 6]\n"
        )
        warnings: list[str] = []
        plan = parse_plan(text, warnings=warnings)
        assert plan.layouts["I0"].as_list() == [2, 2, 6, 6]
        assert any("duplicate location" in w for w in warnings)

    def test_headers_case_insensitive_and_spacing_tolerant(self):
        text = (
            "REQUIRED ENTITIES:\n  egg image (I0)\n"
            "entity locations:\nI0 is located at [1,1, 5,  5]\n"
        )
        plan = parse_plan(text)
        assert plan.layouts["I0"].as_list() == [1, 1, 5, 5]

    def test_escaped_quotes_in_label(self):
        text = (
            'Required Entities:\n"the \\"new\\" moon" text label (T0)\n'
            "Entity Locations:\nT0 is located at [1, 1, 5, 5]\n"
        )
        plan = parse_plan(text)
        assert plan.entity("T0").description == 'the "new" moon'


class TestSerialize:
    def test_empty_plan_is_three_headers(self):
        text = serialize_plan(DiagramPlan("caption"))
        assert text == "Required Entities:\nEntity Relationships:\nEntity Locations:\n"

    def test_rejects_invalid_plan(self, butterfly_plan):
        broken = DiagramPlan(
            butterfly_plan.caption,
            butterfly_plan.entities,
            butterfly_plan.relationships,
            {},
        )
        with pytest.raises(ValueError):
            serialize_plan(broken)

    def test_line_relationship_round_trip(self):
        text = (
            "Required Entities:\nbattery image (I0)\nbulb image (I1)\n"
            "Entity Relationships:\nI0 has a line to I1\n"
            "Entity Locations:\nI0 is located at [5, 5, 10, 10]\n"
            "I1 is located at [40, 5, 10, 10]\n"
        )
        plan = parse_plan(text)
        assert plan.relationships[0].kind is RelationKind.LINE
        assert serialize_plan(plan) == text


class TestRoundTrip:
    @given(st.integers(0, 10**9))
    @settings(max_examples=150, deadline=None)
    def test_parse_serialize_fixpoint(self, seed):
        plan = random_plan(random.Random(seed))
        text = serialize_plan(plan)
        again = parse_plan(text, plan.caption)
        assert again == plan
        assert serialize_plan(again) == text

    def test_idempotence_from_noisy_text(self, butterfly_text):
        noisy = "Here is a plan:\n" + butterfly_text + "\nthanks!\n"
        warnings: list[str] = []
        once = serialize_plan(parse_plan(noisy, warnings=warnings))
        twice = serialize_plan(parse_plan(once))
        assert once == twice
