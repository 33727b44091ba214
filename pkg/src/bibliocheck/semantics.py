"""Level 4: consistency of relationships inside and across documents.

Checks receive a ``passed`` predicate so the orchestrator can exclude items
that already failed a prerequisite level; standalone use (tests, library
callers) defaults to judging everything.
"""

from __future__ import annotations

import re
from typing import Callable

from .catalog import make_error
from .config import RuleConfig
from .errors import LocatedIn, ValidationError, ValidationLevel
from .table import Row, TableDocument

_L4 = ValidationLevel.SEMANTICS
_NUMERIC_INTERVAL = re.compile(r"(\d+)-(\d+)")

Passed = Callable[[int, str, int], bool]


def _all_pass(row_index: int, field_name: str, item_index: int) -> bool:
    return True


def allowed_schemes_for_type(config: RuleConfig, publication_type: str) -> frozenset[str]:
    """Compatibility entry for a type; unmapped types allow the full br set."""
    return config.type_id_compatibility.get(publication_type, config.br_id_schemes)


def check_type_id_compatibility(row: Row, config: RuleConfig,
                                passed: Passed = _all_pass) -> list[ValidationError]:
    """Flag id items whose scheme the row's publication type does not admit."""
    type_items = row["type"].items
    if not type_items or not passed(row.index, "type", 0):
        return []
    allowed = allowed_schemes_for_type(config, type_items[0].raw.lower())
    errors = []
    for item in row["id"].items:
        if not passed(row.index, "id", item.item_index):
            continue
        identifiers = item.identifiers()
        if identifiers and identifiers[0].scheme not in allowed:
            errors.append(
                make_error("type_id_mismatch", _L4, LocatedIn.FIELD,
                           [(row.index, "id", [item.item_index]), (row.index, "type", [0])])
            )
    return errors


def check_page_interval(row: Row, passed: Passed = _all_pass) -> list[ValidationError]:
    """Warn when a numeric page interval runs backwards; non-numeric bounds
    (roman numerals, alphanumeric pagination) are left alone."""
    items = row["page"].items
    if not items or not passed(row.index, "page", 0):
        return []
    match = _NUMERIC_INTERVAL.fullmatch(items[0].raw)
    if match and int(match.group(1)) > int(match.group(2)):
        return [make_error("page_interval", _L4, LocatedIn.ITEM,
                           [(row.index, "page", [0])])]
    return []


def check_container_consistency(row: Row, config: RuleConfig,
                                passed: Passed = _all_pass) -> list[ValidationError]:
    """Volume/issue require a venue; containerless types should have none."""
    errors = []
    venue_items = [i for i in row["venue"].items if passed(row.index, "venue", i.item_index)]
    container_entries = [
        (row.index, field_name, [0])
        for field_name in ("volume", "issue")
        if row[field_name].items and passed(row.index, field_name, 0)
    ]
    if container_entries and not row["venue"].items:
        errors.append(
            make_error("container_without_venue", _L4, LocatedIn.FIELD,
                       container_entries + [(row.index, "venue", [])])
        )
    type_items = row["type"].items
    if venue_items and type_items and passed(row.index, "type", 0):
        if type_items[0].raw.lower() in config.containerless_types:
            entries = [(row.index, "venue", [i.item_index for i in venue_items]),
                       (row.index, "type", [0])]
            errors.append(make_error("venue_type_mismatch", _L4, LocatedIn.FIELD, entries))
    return errors


def _id_values(row: Row, field_name: str, passed: Passed) -> dict[tuple[str, str], list[int]]:
    values: dict[tuple[str, str], list[int]] = {}
    for item in row[field_name].items:
        if not passed(row.index, field_name, item.item_index):
            continue
        for component in item.identifiers():
            values.setdefault((component.scheme, component.value), []).append(item.item_index)
    return values


def check_self_citation(row: Row, passed: Passed = _all_pass) -> list[ValidationError]:
    """Warn when any identifier appears on both sides of a citation row."""
    citing = _id_values(row, "citing_id", passed)
    cited = _id_values(row, "cited_id", passed)
    shared = set(citing) & set(cited)
    if not shared:
        return []
    citing_items = sorted({i for key in shared for i in citing[key]})
    cited_items = sorted({i for key in shared for i in cited[key]})
    return [
        make_error("self_citation", _L4, LocatedIn.FIELD,
                   [(row.index, "citing_id", citing_items),
                    (row.index, "cited_id", cited_items)])
    ]


def dates_compatible(a: str, b: str) -> bool:
    """True when one date is a prefix of the other at hyphen boundaries."""
    parts_a = a.split("-")
    parts_b = b.split("-")
    return all(x == y for x, y in zip(parts_a, parts_b))


_SIDE_DATE_FIELD = {"citing_id": "citing_publication_date",
                    "cited_id": "cited_publication_date"}


def cross_validate(meta: TableDocument, cits: TableDocument,
                   meta_passed: Passed = _all_pass,
                   cits_passed: Passed = _all_pass) -> list[ValidationError]:
    """Pair rules: citation ids must occur in the metadata document, and
    matched resources must carry compatible publication dates.

    Matching is verbatim on the 'scheme:value' item text. A date warning
    fires only when no matched metadata row is date-compatible; it points
    at the first disagreeing row.
    """
    meta_rows_by_raw: dict[str, list[int]] = {}
    for row in meta.rows:
        for item in row["id"].items:
            meta_rows_by_raw.setdefault(item.raw, []).append(row.index)

    errors = []
    for row in cits.rows:
        for side in ("citing_id", "cited_id"):
            date_field = _SIDE_DATE_FIELD[side]
            matched_meta_rows: set[int] = set()
            for item in row[side].items:
                if not cits_passed(row.index, side, item.item_index):
                    continue
                rows = meta_rows_by_raw.get(item.raw)
                if rows is None:
                    errors.append(
                        make_error("unmatched_citation_id", _L4, LocatedIn.ITEM,
                                   [(row.index, side, [item.item_index])])
                    )
                else:
                    matched_meta_rows.update(rows)
            errors.extend(
                _date_mismatch(row, date_field, sorted(matched_meta_rows),
                               meta, meta_passed, cits_passed)
            )
    return errors


def _date_mismatch(cits_row: Row, date_field: str, meta_rows: list[int],
                   meta: TableDocument, meta_passed: Passed,
                   cits_passed: Passed) -> list[ValidationError]:
    if not meta_rows or not cits_row[date_field].items:
        return []
    if not cits_passed(cits_row.index, date_field, 0):
        return []
    cits_date = cits_row[date_field].items[0].raw
    first_mismatch = None
    for meta_index in meta_rows:
        meta_cell = meta.rows[meta_index]["pub_date"]
        if not meta_cell.items or not meta_passed(meta_index, "pub_date", 0):
            continue
        if dates_compatible(cits_date, meta_cell.items[0].raw):
            return []
        if first_mismatch is None:
            first_mismatch = meta_index
    if first_mismatch is None:
        return []
    return [
        make_error("date_mismatch", _L4, LocatedIn.FIELD,
                   [(cits_row.index, date_field, [0]),
                    (first_mismatch, "pub_date", [0])])
    ]


def check_meta_row(row: Row, config: RuleConfig,
                   passed: Passed = _all_pass) -> list[ValidationError]:
    """All level-4 checks for one metadata row."""
    errors = []
    errors.extend(check_type_id_compatibility(row, config, passed))
    errors.extend(check_page_interval(row, passed))
    errors.extend(check_container_consistency(row, config, passed))
    return errors
