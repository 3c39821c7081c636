import pytest

from pointrel.algebra import PointEndpoint, Side
from pointrel.corpus import parse_tml
from pointrel.encoding import (
    DCT_PREAMBLE,
    Direction,
    OverlappingSpans,
    TaggedQuery,
    UnknownEntity,
    read_queries,
    strip_tags,
    tag_interval_pair,
    tag_point_pair,
    truncate_around_tags,
    write_queries,
)

from tml_fixtures import FIG2_TML


@pytest.fixture()
def fig2_doc():
    return parse_tml(FIG2_TML.encode())


def pe(entity, side):
    return PointEndpoint(entity, Side(side))


class TestTagPointPair:
    def test_forward_example(self, fig2_doc):
        query = tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"), Direction.FORWARD)
        assert query.text == (
            "Document creation time: <dct> John <xs> arrived </xs> "
            "in Boston after <ye> 10 p.m. </ye>"
        )
        assert query.direction is Direction.FORWARD

    def test_swapped_exchanges_tag_families_and_sides(self, fig2_doc):
        query = tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"), Direction.SWAPPED)
        assert query.text == (
            "Document creation time: <dct> John <ys> arrived </ys> "
            "in Boston after <xe> 10 p.m. </xe>"
        )

    def test_dct_tags_wrap_anchor(self, fig2_doc):
        query = tag_point_pair(fig2_doc, pe("t0", "s"), pe("e1", "e"), Direction.FORWARD)
        assert query.text.startswith("Document creation time: <xs> <dct> </xs> ")
        assert "<ye> arrived </ye>" in query.text

    def test_same_entity_rejected(self, fig2_doc):
        with pytest.raises(UnknownEntity):
            tag_point_pair(fig2_doc, pe("e1", "s"), pe("e1", "e"))

    def test_unknown_entity(self, fig2_doc):
        with pytest.raises(UnknownEntity):
            tag_point_pair(fig2_doc, pe("e9", "s"), pe("t1", "e"))

    def test_forward_and_swapped_mark_same_spans(self, fig2_doc):
        fwd = tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"), Direction.FORWARD)
        swp = tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"), Direction.SWAPPED)
        assert strip_tags(fwd.text) == strip_tags(swp.text)

    def test_strip_round_trip(self, fig2_doc):
        for direction in Direction:
            query = tag_point_pair(fig2_doc, pe("e1", "e"), pe("t0", "s"), direction)
            assert strip_tags(query.text) == DCT_PREAMBLE + fig2_doc.text


class TestTagIntervalPair:
    def test_example(self, fig2_doc):
        query = tag_interval_pair(fig2_doc, "e1", "t1")
        assert query.text == (
            "Document creation time: <dct> John <x> arrived </x> "
            "in Boston after <y> 10 p.m. </y>"
        )

    def test_identity_rejected(self, fig2_doc):
        with pytest.raises(UnknownEntity):
            tag_interval_pair(fig2_doc, "e1", "e1")

    def test_strip_round_trip(self, fig2_doc):
        query = tag_interval_pair(fig2_doc, "t1", "e1")
        assert strip_tags(query.text) == DCT_PREAMBLE + fig2_doc.text


class TestTruncation:
    def test_short_text_untouched(self, fig2_doc):
        query = tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"))
        assert truncate_around_tags(query.text, 10_000) == query.text

    def test_window_keeps_tags_and_preamble(self):
        text = DCT_PREAMBLE + "a " * 500 + "<xs> left </xs> middle <ye> right </ye>" + " b" * 500
        out = truncate_around_tags(text, 200)
        assert len(out) <= 200 + len(DCT_PREAMBLE)
        assert out.startswith(DCT_PREAMBLE)
        assert "<xs>" in out and "</ye>" in out


class TestQueryFiles:
    def test_round_trip(self, tmp_path, fig2_doc):
        queries = [
            tag_point_pair(fig2_doc, pe("e1", "s"), pe("t1", "e"), d) for d in Direction
        ]
        path = tmp_path / "queries.jsonl"
        write_queries(path, queries)
        assert read_queries(path) == queries
