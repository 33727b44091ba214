"""Level 1: table-syntax rules for well-formed META-CSV/CITS-CSV documents.

Findings from this level mark their items as failed, which blocks the
deeper levels for those items. Checks inside one cell are ordered so that
structural judgements come first: identifiers inside an agent bracket are
only inspected once the item's overall shape is acceptable.
"""

from __future__ import annotations

import re
from datetime import date

from .catalog import make_error
from .config import RuleConfig
from .errors import LocatedIn, ValidationError, ValidationLevel
from .table import (
    AGENT_FIELDS,
    DATE_FIELDS,
    ID_FIELDS,
    VENUE_FIELD,
    Cell,
    MissingSchemeSeparator,
    Row,
    TableDocument,
    TableKind,
    bracket_content,
    parse_id_item,
)

_L1 = ValidationLevel.WELLFORMEDNESS

# "Name [id ...]": non-empty bracket-free name, one space, non-empty id list.
_BRACKETED_ITEM = re.compile(r"([^\[\]]*[^\s\[\]]) \[([^\[\]]+)\]")
_DATE_SHAPE = re.compile(r"(\d{4})(?:-(\d{2})(?:-(\d{2}))?)?")
_PAGE_SHAPE = re.compile(r"[^-\s]+-[^-\s]+")


def _item_error(label: str, cell: Cell, item_index: int) -> ValidationError:
    return make_error(label, _L1, LocatedIn.ITEM, [(cell.row_index, cell.field_name, [item_index])])


def check_id_wellformedness(cell: Cell, config: RuleConfig) -> list[ValidationError]:
    """Flag id/citing_id/cited_id items without 'scheme:value' shape or with
    an unsupported scheme."""
    errors = []
    for item in cell.items:
        identifiers = item.identifiers()
        if not identifiers or identifiers[0].scheme not in config.br_id_schemes:
            errors.append(_item_error("br_id_format", cell, item.item_index))
    return errors


def check_date_wellformedness(cell: Cell) -> list[ValidationError]:
    """Accept ISO dates YYYY, YYYY-MM or YYYY-MM-DD with real calendar values."""
    errors = []
    for item in cell.items:
        if not _valid_date(item.raw):
            errors.append(_item_error("date_format", cell, item.item_index))
    return errors


def _valid_date(text: str) -> bool:
    match = _DATE_SHAPE.fullmatch(text)
    if not match:
        return False
    year, month, day = match.group(1), match.group(2), match.group(3)
    try:
        date(int(year), int(month) if month else 1, int(day) if day else 1)
    except ValueError:
        return False
    return True


def check_page_format(cell: Cell) -> list[ValidationError]:
    """Non-empty page cells must read '<start>-<end>'."""
    errors = []
    for item in cell.items:
        if not _PAGE_SHAPE.fullmatch(item.raw):
            errors.append(_item_error("page_format", cell, item.item_index))
    return errors


def _structure_ok(raw: str) -> bool:
    if "[" not in raw and "]" not in raw:
        return bool(raw.strip())
    return _BRACKETED_ITEM.fullmatch(raw) is not None


def _bracket_id_errors(cell: Cell, item_index: int, raw: str,
                       schemes: frozenset[str], label: str) -> list[ValidationError]:
    inner = bracket_content(raw)
    if inner is None:
        return []
    errors = []
    for token in inner.split():
        try:
            component = parse_id_item(token)
        except MissingSchemeSeparator:
            errors.append(_item_error(label, cell, item_index))
            continue
        if component.scheme not in schemes:
            errors.append(_item_error(label, cell, item_index))
    return errors


def check_people_item_format(cell: Cell, config: RuleConfig) -> list[ValidationError]:
    """Check agent items against the 'Name [ids]' grammar, then their ids.

    An item that fails the structural grammar gets a people_item_format
    error and its bracket content is not judged further.
    """
    errors = []
    for item in cell.items:
        if not _structure_ok(item.raw):
            errors.append(_item_error("people_item_format", cell, item.item_index))
            continue
        errors.extend(
            _bracket_id_errors(cell, item.item_index, item.raw,
                               config.ra_id_schemes, "ra_id_format")
        )
    return errors


def check_venue_wellformedness(cell: Cell, config: RuleConfig) -> list[ValidationError]:
    """Venue items mirror the agent grammar; their ids are br identifiers."""
    errors = []
    for item in cell.items:
        if not _structure_ok(item.raw):
            errors.append(_item_error("br_id_format", cell, item.item_index))
            continue
        errors.extend(
            _bracket_id_errors(cell, item.item_index, item.raw,
                               config.venue_id_schemes, "br_id_format")
        )
    return errors


def check_uppercase_title(cell: Cell) -> list[ValidationError]:
    errors = []
    for item in cell.items:
        text = item.raw
        if any(c.isalpha() for c in text) and not any(c.islower() for c in text):
            errors.append(_item_error("uppercase_title", cell, item.item_index))
    return errors


def check_required_and_vocab(row: Row, config: RuleConfig) -> list[ValidationError]:
    """META rows must carry an id or a title; types come from the vocabulary."""
    errors = []
    if not row["id"].items and row["title"].is_empty:
        errors.append(
            make_error("required_field", _L1, LocatedIn.ROW,
                       [(row.index, "id", []), (row.index, "title", [])])
        )
    for item in row["type"].items:
        if item.raw.lower() not in config.type_vocabulary:
            errors.append(_item_error("type_vocab", row["type"], item.item_index))
    return errors


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, key):
        self.parent.setdefault(key, key)
        root = key
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[key] != root:
            self.parent[key], key = root, self.parent[key]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def check_duplicates(document: TableDocument, config: RuleConfig) -> list[ValidationError]:
    """Cross-row duplicate_br over 'id' cells and within-cell duplicate_ra.

    Rows connected through any chain of shared identifier values form one
    duplicate_br error; its position spans all id items of the affected rows.
    Agents in one cell are duplicates when their normalized names coincide
    or they share any identifier.
    """
    errors = []
    if document.kind is TableKind.META:
        errors.extend(_duplicate_br(document))
        for row in document.rows:
            for field_name in sorted(AGENT_FIELDS):
                errors.extend(_duplicate_ra(row[field_name]))
    return errors


def _duplicate_br(document: TableDocument) -> list[ValidationError]:
    value_rows: dict[str, list[int]] = {}
    for row in document.rows:
        for item in row["id"].items:
            value_rows.setdefault(item.raw, []).append(row.index)

    groups = _UnionFind()
    involved = set()
    for rows in value_rows.values():
        distinct = sorted(set(rows))
        if len(distinct) > 1:
            involved.update(distinct)
            for other in distinct[1:]:
                groups.union(distinct[0], other)

    by_root: dict[int, list[int]] = {}
    for row_index in sorted(involved):
        by_root.setdefault(groups.find(row_index), []).append(row_index)

    errors = []
    for rows in sorted(by_root.values()):
        entries = [
            (row_index, "id",
             [item.item_index for item in document.rows[row_index]["id"].items])
            for row_index in rows
        ]
        errors.append(make_error("duplicate_br", _L1, LocatedIn.ROW, entries))
    return errors


def _agent_key(raw: str) -> tuple[str, frozenset[str]]:
    bracket_pos = raw.find("[")
    name = raw[:bracket_pos] if bracket_pos != -1 else raw
    name = " ".join(name.split()).casefold()
    inner = bracket_content(raw) or ""
    ids = frozenset(token.lower() for token in inner.split() if ":" in token)
    return name, ids


def _duplicate_ra(cell: Cell) -> list[ValidationError]:
    if len(cell.items) < 2:
        return []
    keys = {item.item_index: _agent_key(item.raw) for item in cell.items}
    groups = _UnionFind()
    by_name: dict[str, int] = {}
    by_id: dict[str, int] = {}
    for index in sorted(keys):
        name, ids = keys[index]
        if name:
            if name in by_name:
                groups.union(by_name[name], index)
            else:
                by_name[name] = index
        for identifier in ids:
            if identifier in by_id:
                groups.union(by_id[identifier], index)
            else:
                by_id[identifier] = index

    members: dict[int, list[int]] = {}
    for index in sorted(keys):
        members.setdefault(groups.find(index), []).append(index)

    errors = []
    for indices in sorted(members.values()):
        if len(indices) > 1:
            errors.append(
                make_error("duplicate_ra", _L1, LocatedIn.FIELD,
                           [(cell.row_index, cell.field_name, indices)])
            )
    return errors


def check_document(document: TableDocument, config: RuleConfig) -> list[ValidationError]:
    """Run the whole wellformedness level over a parsed document."""
    errors = []
    for row in document.rows:
        for field_name in document.header:
            cell = row[field_name]
            if field_name in ID_FIELDS:
                errors.extend(check_id_wellformedness(cell, config))
            elif field_name in DATE_FIELDS:
                errors.extend(check_date_wellformedness(cell))
            elif field_name in AGENT_FIELDS:
                errors.extend(check_people_item_format(cell, config))
            elif field_name == VENUE_FIELD:
                errors.extend(check_venue_wellformedness(cell, config))
            elif field_name == "page":
                errors.extend(check_page_format(cell))
            elif field_name == "title":
                errors.extend(check_uppercase_title(cell))
        if document.kind is TableKind.META:
            errors.extend(check_required_and_vocab(row, config))
    errors.extend(check_duplicates(document, config))
    return errors
