"""Validation error objects, the report container, and JSON/TXT output.

Every finding is serialized with exactly six keys (validation_level,
error_type, error_label, valid, message, position) so that downstream
consumers of the published report format keep working. Reports are
canonically ordered, which makes all serializations deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .table import TableKind


class ValidationLevel(Enum):
    WELLFORMEDNESS = "csv_wellformedness"
    EXTERNAL_SYNTAX = "external_syntax"
    EXISTENCE = "existence"
    SEMANTICS = "semantics"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class LocatedIn(Enum):
    ITEM = "item"
    FIELD = "field"
    ROW = "row"


@dataclass(frozen=True)
class PositionDescriptor:
    """Where an error lives: row index -> field name -> implicated item indices.

    Row keys are stringified 0-based data-row indices (header excluded).
    An empty item list references a whole cell that has no items.
    """
    located_in: LocatedIn
    table: dict[str, dict[str, list[int]]]

    def triples(self):
        """All (row_index, field_name, item_index) triples referenced."""
        for row_key, fields in self.table.items():
            for field_name, item_indices in fields.items():
                for item_index in item_indices:
                    yield int(row_key), field_name, item_index

    def pairs(self):
        """All (row_index, field_name) cell references, in table order."""
        for row_key, fields in self.table.items():
            for field_name in fields:
                yield int(row_key), field_name


def make_position(
    located_in: LocatedIn,
    entries: list[tuple[int, str, list[int]]],
) -> PositionDescriptor:
    """Build a normalized descriptor from (row, field, items) entries."""
    table: dict[str, dict[str, list[int]]] = {}
    for row_index, field_name, item_indices in entries:
        row = table.setdefault(str(row_index), {})
        merged = set(row.get(field_name, [])) | set(item_indices)
        row[field_name] = sorted(merged)
    ordered = {
        key: table[key] for key in sorted(table, key=int)
    }
    return PositionDescriptor(located_in, ordered)


@dataclass(frozen=True)
class ValidationError:
    validation_level: ValidationLevel
    error_type: Severity
    error_label: str
    message: str
    position: PositionDescriptor
    valid: bool = False  # constant in emitted objects, kept for schema fidelity

    def to_dict(self) -> dict:
        return {
            "validation_level": self.validation_level.value,
            "error_type": self.error_type.value,
            "error_label": self.error_label,
            "valid": self.valid,
            "message": self.message,
            "position": {
                "located_in": self.position.located_in.value,
                "table": self.position.table,
            },
        }


def error_from_dict(obj: dict) -> ValidationError:
    table = {
        row_key: {fld: [int(i) for i in items] for fld, items in fields.items()}
        for row_key, fields in obj["position"]["table"].items()
    }
    return ValidationError(
        validation_level=ValidationLevel(obj["validation_level"]),
        error_type=Severity(obj["error_type"]),
        error_label=obj["error_label"],
        message=obj["message"],
        position=PositionDescriptor(LocatedIn(obj["position"]["located_in"]), table),
        valid=bool(obj["valid"]),
    )


@dataclass
class ValidationReport:
    errors: list[ValidationError]
    input_path: str
    table_kind: TableKind | None
    started_at: str = ""
    finished_at: str = ""
    levels_run: list[str] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(1 for e in self.errors if e.error_type is Severity.ERROR)

    @property
    def warning_count(self) -> int:
        return sum(1 for e in self.errors if e.error_type is Severity.WARNING)


def sort_key(error: ValidationError, field_order: list[str]):
    """Canonical report order: first row, field (header order), item, label."""
    first_row = min(int(k) for k in error.position.table)
    fields = error.position.table[str(first_row)]

    def field_rank(name: str) -> int:
        return field_order.index(name) if name in field_order else len(field_order)

    first_field = min(fields, key=field_rank)
    items = fields[first_field]
    first_item = min(items) if items else -1
    return (first_row, field_rank(first_field), first_item, error.error_label)


def canonical_sort(errors: list[ValidationError], field_order: list[str]) -> list[ValidationError]:
    return sorted(errors, key=lambda e: sort_key(e, field_order))


def emit_json(report: ValidationReport) -> bytes:
    """Serialize the error list (run metadata lives in a sibling file)."""
    payload = [e.to_dict() for e in report.errors]
    return (json.dumps(payload, indent=4, ensure_ascii=False) + "\n").encode("utf-8")


def errors_from_json(data: bytes) -> list[ValidationError]:
    return [error_from_dict(obj) for obj in json.loads(data.decode("utf-8"))]


def emit_metadata_json(report: ValidationReport) -> bytes:
    payload = {
        "input_path": report.input_path,
        "table_kind": report.table_kind.value if report.table_kind else None,
        "started_at": report.started_at,
        "finished_at": report.finished_at,
        "levels_run": report.levels_run,
        "error_count": report.error_count,
        "warning_count": report.warning_count,
    }
    return (json.dumps(payload, indent=4, ensure_ascii=False) + "\n").encode("utf-8")


def _position_summary(position: PositionDescriptor) -> str:
    chunks = []
    for row_key in sorted(position.table, key=int):
        fields = position.table[row_key]
        parts = []
        for field_name, item_indices in fields.items():
            if item_indices:
                parts.append(f"{field_name}{item_indices}")
            else:
                parts.append(f"{field_name}(empty)")
        chunks.append(f"row {row_key}: " + ", ".join(parts))
    return "; ".join(chunks)


def emit_txt_summary(report: ValidationReport) -> bytes:
    """Human-readable digest: per-label counts, then one line per finding.

    Labels are grouped errors-first then warnings, each block in descending
    count order; ties break alphabetically so output stays deterministic.
    """
    if not report.errors:
        return b"No errors detected.\n"

    groups: dict[tuple[str, str], list[ValidationError]] = {}
    for error in report.errors:
        groups.setdefault((error.error_label, error.error_type.value), []).append(error)

    def group_rank(entry):
        (label, severity), members = entry
        return (0 if severity == "error" else 1, -len(members), label)

    lines = ["Validation summary", "=================="]
    lines.append(f"{report.error_count} error(s), {report.warning_count} warning(s)")
    lines.append("")
    for (label, severity), members in sorted(groups.items(), key=group_rank):
        lines.append(f"{label}  {severity}  {len(members)}")
        lines.append(f"    {members[0].message}")
    lines.append("")
    lines.append("Details")
    lines.append("-------")
    for number, error in enumerate(report.errors, 1):
        lines.append(
            f"[{number}] {error.error_label} ({error.error_type.value}) "
            f"at {_position_summary(error.position)}"
        )
    return ("\n".join(lines) + "\n").encode("utf-8")
