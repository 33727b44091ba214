"""Run the four validation levels over a document with blocking semantics.

The whole table is always validated start to end; an item that received a
blocking (error-severity) finding at one level is excluded from the levels
that depend on it, but independent checks still run. Existence lookups are
batched and deduplicated across the document.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import semantics, wellformedness
from .catalog import make_error
from .config import RuleConfig
from .errors import (
    LocatedIn,
    Severity,
    ValidationError,
    ValidationLevel,
    ValidationReport,
    canonical_sort,
)
from .idrules import (
    LookupCache,
    HttpResolver,
    OfflineResolver,
    UnknownScheme,
    VerdictStatus,
    resolve_batch,
    validate_id_syntax,
)
from .table import (
    AGENT_FIELDS,
    ID_FIELDS,
    VENUE_FIELD,
    TableDocument,
    TableKind,
    parse_table_file,
)

_L1 = ValidationLevel.WELLFORMEDNESS
_L2 = ValidationLevel.EXTERNAL_SYNTAX

LEVEL_ORDER = [
    ValidationLevel.WELLFORMEDNESS,
    ValidationLevel.EXTERNAL_SYNTAX,
    ValidationLevel.EXISTENCE,
    ValidationLevel.SEMANTICS,
]


class ItemStatus:
    """Tracks which (row, field, item) triples failed which levels."""

    def __init__(self):
        self._failed: dict[tuple[int, str, int], set[ValidationLevel]] = {}

    def mark_failures(self, errors: list[ValidationError]) -> None:
        """Record every triple of every blocking (error-severity) finding."""
        for error in errors:
            if error.error_type is not Severity.ERROR:
                continue
            for triple in error.position.triples():
                self._failed.setdefault(triple, set()).add(error.validation_level)

    def failed_levels(self, row_index: int, field_name: str, item_index: int) -> set[ValidationLevel]:
        return self._failed.get((row_index, field_name, item_index), set())

    def should_skip(self, row_index: int, field_name: str, item_index: int,
                    prerequisites: set[ValidationLevel]) -> bool:
        """True iff the item failed one of the rule's prerequisite levels."""
        return bool(self.failed_levels(row_index, field_name, item_index) & prerequisites)

    def passes(self, prerequisites: set[ValidationLevel]):
        def predicate(row_index: int, field_name: str, item_index: int) -> bool:
            return not self.should_skip(row_index, field_name, item_index, prerequisites)
        return predicate


def _id_bearing_items(document: TableDocument):
    """Yield (cell, item, category) for every item that can carry identifiers."""
    for row in document.rows:
        for field_name in document.header:
            if field_name in ID_FIELDS:
                category = "br"
            elif field_name in AGENT_FIELDS:
                category = "ra"
            elif field_name == VENUE_FIELD:
                category = "br"
            else:
                continue
            cell = row[field_name]
            for item in cell.items:
                yield cell, item, category


def _run_syntax_level(document: TableDocument, status: ItemStatus) -> list[ValidationError]:
    errors = []
    for cell, item, category in _id_bearing_items(document):
        if status.should_skip(cell.row_index, cell.field_name, item.item_index, {_L1}):
            continue
        label = "br_id_format" if category == "br" else "ra_id_format"
        for component in item.identifiers():
            try:
                valid = validate_id_syntax(component.scheme, component.value)
            except UnknownScheme:
                continue  # configured extra scheme without a published syntax
            if not valid:
                errors.append(
                    make_error(label, _L2, LocatedIn.ITEM,
                               [(cell.row_index, cell.field_name, [item.item_index])])
                )
                break
    return errors


def _run_existence_level(document: TableDocument, status: ItemStatus,
                         config: RuleConfig, resolver, cache: LookupCache,
                         ) -> list[ValidationError]:
    references = []  # (cell, item, category, scheme, value) for items past levels 1-2
    for cell, item, category in _id_bearing_items(document):
        if status.should_skip(cell.row_index, cell.field_name, item.item_index, {_L1, _L2}):
            continue
        for component in item.identifiers():
            references.append((cell, item, category, component.scheme, component.value))

    verdicts = resolve_batch(
        {(scheme, value) for _, _, _, scheme, value in references},
        cache, resolver, offline=config.offline, max_in_flight=config.max_in_flight,
    )
    cache.save()

    errors = []
    for cell, item, category, scheme, value in references:
        if verdicts[(scheme, value)].status is VerdictStatus.NOT_FOUND:
            label = "br_id_existence" if category == "br" else "ra_id_existence"
            errors.append(
                make_error(label, ValidationLevel.EXISTENCE, LocatedIn.ITEM,
                           [(cell.row_index, cell.field_name, [item.item_index])])
            )
    return errors


def _run_semantics_level(document: TableDocument, status: ItemStatus,
                         config: RuleConfig) -> list[ValidationError]:
    passed = status.passes({_L1, _L2})
    errors = []
    for row in document.rows:
        if document.kind is TableKind.META:
            errors.extend(semantics.check_meta_row(row, config, passed))
        else:
            errors.extend(semantics.check_self_citation(row, passed))
    return errors


def validate_table(document: TableDocument, config: RuleConfig,
                   resolver=None, cache=None) -> tuple[list[ValidationError], ItemStatus]:
    """Validate a parsed document through all four levels."""
    if resolver is None:
        resolver = OfflineResolver() if config.offline else HttpResolver(config)
    if cache is None:
        cache = LookupCache(config.cache_dir, config.cache_ttl_days)

    status = ItemStatus()
    errors = wellformedness.check_document(document, config)
    status.mark_failures(errors)

    syntax_errors = _run_syntax_level(document, status)
    status.mark_failures(syntax_errors)
    errors.extend(syntax_errors)

    errors.extend(_run_existence_level(document, status, config, resolver, cache))
    errors.extend(_run_semantics_level(document, status, config))
    return canonical_sort(errors, document.header), status


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def validate_document(input_path: str, config: RuleConfig | None = None,
                      resolver=None, cache=None) -> ValidationReport:
    """Parse and fully validate one META-CSV or CITS-CSV file.

    Parsing problems (not UTF-8, ragged rows, unknown header) raise instead
    of producing a partial report.
    """
    config = config or RuleConfig()
    started = _now()
    document = parse_table_file(input_path)
    errors, _ = validate_table(document, config, resolver, cache)
    return ValidationReport(
        errors=errors,
        input_path=input_path,
        table_kind=document.kind,
        started_at=started,
        finished_at=_now(),
        levels_run=[level.value for level in LEVEL_ORDER],
    )


@dataclass
class PairResult:
    meta_report: ValidationReport
    cits_report: ValidationReport
    cross_errors: list[ValidationError] = field(default_factory=list)


def validate_pair(meta_path: str, cits_path: str, config: RuleConfig | None = None,
                  resolver=None, cache=None) -> PairResult:
    """Validate a META/CITS document pair, then cross-check them.

    The cross phase only runs when both documents parse; its findings
    reference citation cells and metadata cells in one position table
    (the two header vocabularies do not overlap).
    """
    config = config or RuleConfig()
    started = _now()
    meta_doc = parse_table_file(meta_path)
    cits_doc = parse_table_file(cits_path)
    if meta_doc.kind is not TableKind.META:
        raise ValueError(f"{meta_path!r} is not a META-CSV document")
    if cits_doc.kind is not TableKind.CITS:
        raise ValueError(f"{cits_path!r} is not a CITS-CSV document")

    meta_errors, meta_status = validate_table(meta_doc, config, resolver, cache)
    cits_errors, cits_status = validate_table(cits_doc, config, resolver, cache)
    cross = semantics.cross_validate(
        meta_doc, cits_doc,
        meta_passed=meta_status.passes({_L1, _L2}),
        cits_passed=cits_status.passes({_L1, _L2}),
    )
    finished = _now()
    levels = [level.value for level in LEVEL_ORDER]
    return PairResult(
        meta_report=ValidationReport(meta_errors, meta_path, meta_doc.kind,
                                     started, finished, levels),
        cits_report=ValidationReport(cits_errors, cits_path, cits_doc.kind,
                                     started, finished, levels),
        cross_errors=canonical_sort(cross, cits_doc.header + meta_doc.header),
    )
