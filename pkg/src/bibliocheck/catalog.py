"""Registered error labels with their severity, message and allowed levels.

The core labels carry the published OpenCitations validator vocabulary;
labels marked as extensions cover rules this tool adds (documented in the
README). A label may be legal at more than one level: br_id_format, for
instance, flags both table-syntax violations and registry-syntax violations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    LocatedIn,
    PositionDescriptor,
    Severity,
    ValidationError,
    ValidationLevel,
    make_position,
)


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    severity: Severity
    levels: frozenset[ValidationLevel]
    message: str
    extension: bool = False


def _entry(label, severity, levels, message, extension=False):
    return CatalogEntry(label, severity, frozenset(levels), message, extension)


_L1 = ValidationLevel.WELLFORMEDNESS
_L2 = ValidationLevel.EXTERNAL_SYNTAX
_L3 = ValidationLevel.EXISTENCE
_L4 = ValidationLevel.SEMANTICS

CATALOG: dict[str, CatalogEntry] = {
    entry.label: entry
    for entry in [
        _entry(
            "duplicate_br", Severity.ERROR, {_L1},
            "The same bibliographic resource is being represented in more than one row. "
            "Please check all the rows involved in the representation of this publication "
            "and unify them or remove the extra ones.",
        ),
        _entry(
            "duplicate_ra", Severity.ERROR, {_L1},
            "The same responsible agent (author/editor/publisher) is reported more than "
            "once within the same cell. Please remove the extra occurrence(s).",
        ),
        _entry(
            "people_item_format", Severity.ERROR, {_L1},
            "The value representing the responsible agent entity is not well-formed. The "
            "entity for a responsible agent is represented by the name of the "
            "person/organization, followed by a single whitespace and one or more "
            "associated identifiers, expressed between square brackets and separated by "
            "a single whitespace (e.g. 'Peroni, Silvio [orcid:0000-0003-0530-4305]').",
        ),
        _entry(
            "br_id_format", Severity.ERROR, {_L1, _L2},
            "The value in this field is not expressed in compliance with the syntax of "
            "OpenCitations CITS-CSV/META-CSV. Each identifier in 'citing_id'/'cited_id' "
            "and 'id' must be expressed as 'scheme:value', using one of the supported "
            "identifier schemes, and the value must follow the syntax rules of the "
            "scheme's issuing organization.",
        ),
        _entry(
            "ra_id_format", Severity.ERROR, {_L1, _L2},
            "The identifier associated with the responsible agent is not well-formed. "
            "Each identifier in the bracketed list must be expressed as 'scheme:value', "
            "using one of the supported identifier schemes for agents, and the value "
            "must follow the syntax rules of the scheme's issuing organization.",
        ),
        _entry(
            "page_format", Severity.ERROR, {_L1},
            "The value of 'page' is not well-formed. There must always be a starting "
            "page, followed by an hyphen, followed by the end page (e.g. '333-376').",
        ),
        _entry(
            "br_id_existence", Severity.WARNING, {_L3},
            "The ID is not registered anywhere as a persistent identifier for a "
            "bibliographic resource, i.e. it does not exist.",
        ),
        _entry(
            "ra_id_existence", Severity.WARNING, {_L3},
            "The ID is not registered anywhere as a persistent identifier for a "
            "responsible agent, i.e. it does not exist.",
        ),
        _entry(
            "page_interval", Severity.WARNING, {_L4},
            "The specified page interval seems to be impossible: the start page appears "
            "to be greater than the end page.",
        ),
        _entry(
            "uppercase_title", Severity.WARNING, {_L1},
            "The whole title of the publication is uppercase. Are you sure? Please "
            "double-check the actual title of the publication.",
        ),
        _entry(
            "self_citation", Severity.WARNING, {_L4},
            "It seems that a circular citation is being represented: the bibliographic "
            "resource appears to be citing itself.",
        ),
        # Extension labels for rules without a published counterpart.
        _entry(
            "date_format", Severity.ERROR, {_L1},
            "The date is not well-formed. Dates must be expressed as 'YYYY', 'YYYY-MM' "
            "or 'YYYY-MM-DD' with valid calendar values (e.g. '2023-03-13').",
            extension=True,
        ),
        _entry(
            "type_vocab", Severity.ERROR, {_L1},
            "The value of 'type' is not one of the supported publication types. Please "
            "use one of the values of the controlled vocabulary (e.g. 'journal article', "
            "'book', 'dataset').",
            extension=True,
        ),
        _entry(
            "required_field", Severity.ERROR, {_L1},
            "The row does not minimally identify a bibliographic resource: at least one "
            "identifier or a title must be provided.",
            extension=True,
        ),
        _entry(
            "type_id_mismatch", Severity.ERROR, {_L4},
            "The identifier scheme is not compatible with the publication type assigned "
            "to this bibliographic resource.",
            extension=True,
        ),
        _entry(
            "container_without_venue", Severity.ERROR, {_L4},
            "A volume or issue is specified, but no venue is provided: container "
            "information requires the containing venue.",
            extension=True,
        ),
        _entry(
            "venue_type_mismatch", Severity.WARNING, {_L4},
            "A venue is specified for a publication type that normally has no "
            "container. Please double-check the type and the venue.",
            extension=True,
        ),
        _entry(
            "unmatched_citation_id", Severity.WARNING, {_L4},
            "The identifier used in the citation does not match any bibliographic "
            "resource in the accompanying metadata document.",
            extension=True,
        ),
        _entry(
            "date_mismatch", Severity.WARNING, {_L4},
            "The publication date stated for this citation disagrees with the date of "
            "the matching bibliographic resource in the metadata document.",
            extension=True,
        ),
    ]
}


def make_error(
    label: str,
    level: ValidationLevel,
    located_in: LocatedIn,
    entries: list[tuple[int, str, list[int]]],
    message: str | None = None,
) -> ValidationError:
    """Instantiate a catalog error at one of its allowed levels."""
    entry = CATALOG[label]
    if level not in entry.levels:
        raise ValueError(f"label {label!r} is not registered for level {level.value}")
    return ValidationError(
        validation_level=level,
        error_type=entry.severity,
        error_label=label,
        message=message if message is not None else entry.message,
        position=make_position(located_in, entries),
    )
