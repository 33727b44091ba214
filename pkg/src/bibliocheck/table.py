"""Layered model of META-CSV and CITS-CSV tables.

A parsed table is a list of rows; each row holds one cell per header column;
each cell holds zero or more items (the minimal units of information, split
on field-specific delimiters); each item is made of typed components such as
a family name or a ``scheme:value`` identifier. Parsing never validates:
malformed content is preserved verbatim so the rule levels can point at it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum


class TableKind(Enum):
    META = "meta"
    CITS = "cits"


META_HEADER = [
    "id", "title", "author", "pub_date", "venue", "volume",
    "issue", "page", "type", "publisher", "editor",
]
CITS_HEADER = [
    "citing_id", "citing_publication_date", "cited_id", "cited_publication_date",
]

ID_FIELDS = {"id", "citing_id", "cited_id"}
AGENT_FIELDS = {"author", "editor", "publisher"}
DATE_FIELDS = {"pub_date", "citing_publication_date", "cited_publication_date"}
VENUE_FIELD = "venue"

# Fields whose cell is one item at most; the whole trimmed cell is the item.
SINGLE_ITEM_FIELDS = DATE_FIELDS | {"title", "volume", "issue", "page", "type"}

AGENT_ITEM_DELIMITER = "; "
ID_ITEM_DELIMITER = " "


class ComponentKind(Enum):
    PLAIN_NAME = "plain_name"
    GIVEN_NAME = "given_name"
    FAMILY_NAME = "family_name"
    IDENTIFIER = "identifier"
    DATE_VALUE = "date_value"
    PAGE_RANGE = "page_range"
    TYPE_VALUE = "type_value"
    VOLUME_VALUE = "volume_value"
    ISSUE_VALUE = "issue_value"
    TITLE_VALUE = "title_value"


_SINGLE_ITEM_COMPONENT = {
    "title": ComponentKind.TITLE_VALUE,
    "volume": ComponentKind.VOLUME_VALUE,
    "issue": ComponentKind.ISSUE_VALUE,
    "page": ComponentKind.PAGE_RANGE,
    "type": ComponentKind.TYPE_VALUE,
    "pub_date": ComponentKind.DATE_VALUE,
    "citing_publication_date": ComponentKind.DATE_VALUE,
    "cited_publication_date": ComponentKind.DATE_VALUE,
}


class DecodeError(Exception):
    """Input bytes are not valid UTF-8."""


class MalformedCsv(Exception):
    """A data row has a different number of cells than the header."""


class UnknownTableType(Exception):
    """The header matches neither the META nor the CITS column set."""

    def __init__(self, header: list[str]):
        self.header = list(header)
        missing_meta = sorted(set(META_HEADER) - set(header))
        extra_meta = sorted(set(header) - set(META_HEADER))
        missing_cits = sorted(set(CITS_HEADER) - set(header))
        extra_cits = sorted(set(header) - set(CITS_HEADER))
        super().__init__(
            "header matches neither META-CSV nor CITS-CSV; "
            f"vs META missing {missing_meta} extra {extra_meta}; "
            f"vs CITS missing {missing_cits} extra {extra_cits}"
        )


class MissingSchemeSeparator(ValueError):
    """An identifier item does not contain a ':' separating scheme and value."""


@dataclass(frozen=True)
class Component:
    kind: ComponentKind
    value: str
    scheme: str | None = None  # set only for IDENTIFIER


@dataclass(frozen=True)
class Item:
    item_index: int
    raw: str
    components: tuple[Component, ...] = ()

    def identifiers(self) -> list[Component]:
        return [c for c in self.components if c.kind is ComponentKind.IDENTIFIER]


@dataclass(frozen=True)
class Cell:
    row_index: int
    field_name: str
    raw: str
    items: tuple[Item, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.raw.strip()


@dataclass(frozen=True)
class Row:
    index: int
    cells: dict[str, Cell]

    def __getitem__(self, field_name: str) -> Cell:
        return self.cells[field_name]


@dataclass(frozen=True)
class TableDocument:
    kind: TableKind
    header: list[str]
    rows: list[Row]

    def cell(self, row_index: int, field_name: str) -> Cell:
        return self.rows[row_index].cells[field_name]


def detect_table_type(header: list[str]) -> TableKind:
    """Decide META vs CITS from the header column set.

    The comparison ignores column order but is case-sensitive. Raises
    UnknownTableType, listing the offending columns, when neither set matches.
    """
    names = set(header)
    if names == set(META_HEADER) and len(header) == len(META_HEADER):
        return TableKind.META
    if names == set(CITS_HEADER) and len(header) == len(CITS_HEADER):
        return TableKind.CITS
    raise UnknownTableType(header)


def _split_outside_brackets(raw: str, delimiter: str) -> list[str]:
    """Split on the exact delimiter, skipping anything inside square brackets."""
    parts = []
    depth = 0
    start = 0
    i = 0
    n = len(raw)
    step = len(delimiter)
    while i < n:
        ch = raw[i]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        elif depth == 0 and raw.startswith(delimiter, i):
            parts.append(raw[start:i])
            i += step
            start = i
            continue
        i += 1
    parts.append(raw[start:])
    return parts


def _split_on_spaces_outside_brackets(raw: str) -> list[str]:
    """Split on whitespace runs, skipping anything inside square brackets."""
    parts = []
    depth = 0
    current = []
    for ch in raw:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        if depth == 0 and ch.isspace():
            if current:
                parts.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        parts.append("".join(current))
    return parts


def split_items(cell_raw: str, field_name: str) -> list[str]:
    """Split a cell into trimmed item strings using the field's delimiter.

    Agent and venue cells split on "; ", identifier cells on single spaces;
    delimiters inside square brackets are never split points. Single-item
    fields return the whole trimmed cell. Empty cells yield no items.
    """
    text = cell_raw.strip()
    if not text:
        return []
    if field_name in SINGLE_ITEM_FIELDS:
        return [text]
    if field_name in ID_FIELDS:
        return _split_on_spaces_outside_brackets(text)
    if field_name in AGENT_FIELDS or field_name == VENUE_FIELD:
        return [p.strip() for p in _split_outside_brackets(text, AGENT_ITEM_DELIMITER) if p.strip()]
    return [text]


def parse_id_item(item_raw: str) -> Component:
    """Parse "scheme:value" into an identifier component.

    The scheme is lowercased, the value kept verbatim. Raises
    MissingSchemeSeparator when no ':' splits the item into two
    non-empty parts.
    """
    scheme, sep, value = item_raw.partition(":")
    if not sep or not scheme.strip() or not value.strip():
        raise MissingSchemeSeparator(item_raw)
    return Component(ComponentKind.IDENTIFIER, value=value, scheme=scheme.lower())


def bracket_content(item_raw: str) -> str | None:
    """Return the text inside the first '[' and its matching final ']', if any."""
    start = item_raw.find("[")
    if start == -1:
        return None
    end = item_raw.rfind("]")
    if end == -1 or end < start:
        return None
    return item_raw[start + 1:end]


def _name_components(name: str) -> list[Component]:
    name = name.strip()
    if not name:
        return []
    family, sep, given = name.partition(", ")
    if sep:
        return [
            Component(ComponentKind.FAMILY_NAME, family.strip()),
            Component(ComponentKind.GIVEN_NAME, given.strip()),
        ]
    return [Component(ComponentKind.PLAIN_NAME, name)]


def _bracket_identifiers(item_raw: str) -> list[Component]:
    inner = bracket_content(item_raw)
    if inner is None:
        return []
    components = []
    for token in inner.split():
        try:
            components.append(parse_id_item(token))
        except MissingSchemeSeparator:
            continue  # judged by the wellformedness level, not here
    return components


def parse_agent_item(item_index: int, item_raw: str) -> Item:
    """Parse one author/editor/publisher item into name and identifier parts.

    The grammar is "Name [scheme:value ...]"; a name with a ", " separator
    is split into family and given name, anything else is a plain name
    (e.g. an organization). Parsing is best-effort: structural violations
    are preserved in the raw and flagged later.
    """
    bracket_pos = item_raw.find("[")
    name_part = item_raw[:bracket_pos] if bracket_pos != -1 else item_raw
    components = _name_components(name_part) + _bracket_identifiers(item_raw)
    return Item(item_index, item_raw, tuple(components))


def parse_venue_item(item_index: int, item_raw: str) -> Item:
    """Parse one venue item: "Name [scheme:value ...]" with a plain name."""
    bracket_pos = item_raw.find("[")
    name_part = (item_raw[:bracket_pos] if bracket_pos != -1 else item_raw).strip()
    components = []
    if name_part:
        components.append(Component(ComponentKind.PLAIN_NAME, name_part))
    components.extend(_bracket_identifiers(item_raw))
    return Item(item_index, item_raw, tuple(components))


def _build_items(field_name: str, raws: list[str]) -> tuple[Item, ...]:
    items = []
    for index, raw in enumerate(raws):
        if field_name in ID_FIELDS:
            try:
                components: tuple[Component, ...] = (parse_id_item(raw),)
            except MissingSchemeSeparator:
                components = ()
            items.append(Item(index, raw, components))
        elif field_name in AGENT_FIELDS:
            items.append(parse_agent_item(index, raw))
        elif field_name == VENUE_FIELD:
            items.append(parse_venue_item(index, raw))
        else:
            kind = _SINGLE_ITEM_COMPONENT.get(field_name, ComponentKind.PLAIN_NAME)
            items.append(Item(index, raw, (Component(kind, raw),)))
    return tuple(items)


def parse_table(csv_bytes: bytes) -> TableDocument:
    """Parse CSV bytes into a fully indexed document.

    The input must be UTF-8 with a header row; the table type is detected
    from the header. Raises DecodeError, MalformedCsv (ragged row) or
    UnknownTableType. No validation happens here: empty cells simply have
    zero items and malformed ones keep their raw text.
    """
    try:
        text = csv_bytes.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DecodeError(str(exc)) from exc

    records = [rec for rec in csv.reader(io.StringIO(text, newline="")) if rec]
    if not records:
        raise MalformedCsv("empty input: missing header row")
    header = records[0]
    kind = detect_table_type(header)

    rows = []
    for row_index, record in enumerate(records[1:]):
        if len(record) != len(header):
            raise MalformedCsv(
                f"row {row_index} has {len(record)} cells, header has {len(header)}"
            )
        cells = {}
        for field_name, raw in zip(header, record):
            raws = split_items(raw, field_name)
            cells[field_name] = Cell(row_index, field_name, raw, _build_items(field_name, raws))
        rows.append(Row(row_index, cells))
    return TableDocument(kind, list(header), rows)


def parse_table_file(path: str) -> TableDocument:
    with open(path, "rb") as fh:
        return parse_table(fh.read())
