import pytest
from hypothesis import given, strategies as st

from bibliocheck.table import (
    CITS_HEADER,
    META_HEADER,
    ComponentKind,
    DecodeError,
    MalformedCsv,
    MissingSchemeSeparator,
    TableKind,
    UnknownTableType,
    detect_table_type,
    parse_agent_item,
    parse_id_item,
    parse_table,
    split_items,
)

from conftest import build_csv, meta_csv

SAMPLE_AUTHORS = (
    "Peroni, Silvio [orcid:0000-0003-0530-4305 viaf:309649450]; "
    "Shotton, David [orcid:0000-0051-5506-523X]"
)


class TestDetectTableType:
    def test_meta_header(self):
        assert detect_table_type(META_HEADER) is TableKind.META

    def test_cits_header(self):
        assert detect_table_type(CITS_HEADER) is TableKind.CITS

    def test_order_insensitive(self):
        assert detect_table_type(list(reversed(META_HEADER))) is TableKind.META

    def test_unknown_header_lists_columns(self):
        with pytest.raises(UnknownTableType) as excinfo:
            detect_table_type(["id", "name"])
        assert "missing" in str(excinfo.value)
        assert "name" in str(excinfo.value)

    def test_case_sensitive(self):
        header = ["ID"] + META_HEADER[1:]
        with pytest.raises(UnknownTableType):
            detect_table_type(header)

    @given(st.permutations(META_HEADER))
    def test_permutation_invariance(self, header):
        assert detect_table_type(list(header)) is TableKind.META


class TestParseTable:
    def test_sample_row(self):
        data = meta_csv([{
            "id": "doi:10.1000/182",
            "title": "Example",
            "author": SAMPLE_AUTHORS,
            "pub_date": "2023-03-13",
        }])
        document = parse_table(data)
        assert document.kind is TableKind.META
        assert len(document.rows) == 1
        assert len(document.cell(0, "author").items) == 2
        assert len(document.cell(0, "pub_date").items) == 1

    def test_header_only(self):
        document = parse_table(meta_csv([]))
        assert document.rows == []

    def test_ragged_row(self):
        data = ",".join(META_HEADER).encode() + b"\nonly,two\n"
        with pytest.raises(MalformedCsv):
            parse_table(data)

    def test_not_utf8(self):
        with pytest.raises(DecodeError):
            parse_table(b"\xff\xfe broken")

    def test_empty_cells_have_no_items(self):
        document = parse_table(meta_csv([{"id": "doi:10.1/x", "title": "T"}]))
        assert document.cell(0, "venue").items == ()

    def test_quoted_delimiters(self):
        data = meta_csv([{"id": "doi:10.1/x", "title": 'A "quoted, title"'}])
        document = parse_table(data)
        assert document.cell(0, "title").raw == 'A "quoted, title"'

    def test_unknown_header_raises(self):
        with pytest.raises(UnknownTableType):
            parse_table(build_csv(["id", "name"], [{"id": "1", "name": "x"}]))


class TestSplitItems:
    def test_author_cell(self):
        items = split_items(SAMPLE_AUTHORS, "author")
        assert items == [
            "Peroni, Silvio [orcid:0000-0003-0530-4305 viaf:309649450]",
            "Shotton, David [orcid:0000-0051-5506-523X]",
        ]

    def test_empty_cell(self):
        assert split_items("", "author") == []
        assert split_items("   ", "id") == []

    def test_id_cell_space_delimiter(self):
        assert split_items("doi:10.1000/182 pmid:12345", "id") == [
            "doi:10.1000/182", "pmid:12345",
        ]

    def test_single_item_fields(self):
        assert split_items(" 2023-03-13 ", "pub_date") == ["2023-03-13"]
        assert split_items("A; B: a title", "title") == ["A; B: a title"]

    def test_delimiter_inside_brackets_not_split(self):
        items = split_items("One [a; b]; Two", "author")
        assert items == ["One [a; b]", "Two"]

    @given(
        st.lists(
            st.from_regex(r"[A-Za-z][A-Za-z ]{0,10}(\[[a-z]+:[a-z0-9; ]{1,10}\])?", fullmatch=True),
            min_size=1, max_size=5,
        )
    )
    def test_never_splits_inside_brackets(self, pieces):
        cell = "; ".join(piece.strip() for piece in pieces if piece.strip())
        for item in split_items(cell, "author"):
            assert item.count("[") == item.count("]")

    @given(
        st.lists(
            st.from_regex(r"[a-z]{2,6}:[A-Za-z0-9./-]{1,12}", fullmatch=True),
            min_size=0, max_size=5,
        )
    )
    def test_round_trip_id_cells(self, raws):
        cell = " ".join(raws)
        items = split_items(cell, "id")
        assert " ".join(items) == " ".join(cell.split())

    @given(
        st.lists(
            st.from_regex(r"[A-Za-z][A-Za-z ]{0,8}[A-Za-z](\s\[[a-z]+:[a-z0-9;: ]{1,10}\])?",
                          fullmatch=True),
            min_size=1, max_size=4,
        )
    )
    def test_round_trip_agent_cells(self, pieces):
        cell = "; ".join(pieces)
        rebuilt = "; ".join(split_items(cell, "author"))
        normalized = "; ".join(p.strip() for p in pieces)
        assert rebuilt == normalized


class TestParseIdItem:
    def test_orcid(self):
        component = parse_id_item("orcid:0000-0003-0530-4305")
        assert component.scheme == "orcid"
        assert component.value == "0000-0003-0530-4305"

    def test_doi(self):
        component = parse_id_item("doi:10.1000/182")
        assert (component.scheme, component.value) == ("doi", "10.1000/182")

    def test_scheme_lowercased_value_verbatim(self):
        component = parse_id_item("DOI:10.1000/X.Y")
        assert component.scheme == "doi"
        assert component.value == "10.1000/X.Y"

    def test_missing_separator(self):
        with pytest.raises(MissingSchemeSeparator):
            parse_id_item("10.1000/182")

    def test_empty_sides_rejected(self):
        with pytest.raises(MissingSchemeSeparator):
            parse_id_item(":value")
        with pytest.raises(MissingSchemeSeparator):
            parse_id_item("doi:")


class TestParseAgentItem:
    def test_person_with_ids(self):
        item = parse_agent_item(0, "Peroni, Silvio [orcid:0000-0003-0530-4305 viaf:309649450]")
        by_kind = {}
        for component in item.components:
            by_kind.setdefault(component.kind, []).append(component)
        assert by_kind[ComponentKind.FAMILY_NAME][0].value == "Peroni"
        assert by_kind[ComponentKind.GIVEN_NAME][0].value == "Silvio"
        ids = {(c.scheme, c.value) for c in by_kind[ComponentKind.IDENTIFIER]}
        assert ids == {("orcid", "0000-0003-0530-4305"), ("viaf", "309649450")}

    def test_person_single_id(self):
        item = parse_agent_item(1, "Shotton, David [orcid:0000-0051-5506-523X]")
        assert len(item.identifiers()) == 1
        assert item.identifiers()[0].scheme == "orcid"

    def test_organization_plain_name(self):
        item = parse_agent_item(0, "ACME Publishing")
        kinds = [c.kind for c in item.components]
        assert kinds == [ComponentKind.PLAIN_NAME]
        assert item.identifiers() == []

    def test_ids_only_keeps_identifiers(self):
        item = parse_agent_item(0, "[orcid:0000-0003-0530-4305]")
        assert [c.kind for c in item.components] == [ComponentKind.IDENTIFIER]


class TestPositionSoundness:
    def test_items_are_substrings_of_cells(self):
        data = meta_csv([{
            "id": "doi:10.1000/182 pmid:12345",
            "title": "Example",
            "author": SAMPLE_AUTHORS,
            "pub_date": "2023-03-13",
            "page": "1-10",
        }])
        document = parse_table(data)
        for row in document.rows:
            for field_name in document.header:
                cell = row[field_name]
                for item in cell.items:
                    assert item.raw
                    assert item.raw in cell.raw
