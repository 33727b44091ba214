#!/usr/bin/env python3
"""Regenerate tests/fixtures/report.html: a report page with three findings,
one of which (duplicate_br) spans two rows. Run from frontend/:

    python3 scripts/make_fixture.py
"""

from pathlib import Path

from bibliocheck.config import RuleConfig
from bibliocheck.errors import ValidationReport
from bibliocheck.htmlreport import STUB_VIEWER, emit_html
from bibliocheck.orchestrator import validate_table
from bibliocheck.table import META_HEADER, parse_table

ROWS = [
    {"id": "doi:10.5555/one", "title": "First Title", "pub_date": "2021",
     "type": "journal article", "page": "15"},                      # page_format
    {"id": "doi:10.5555/two", "title": "SECOND TITLE", "pub_date": "2021",
     "type": "journal article", "page": "1-2"},                     # uppercase_title
    {"id": "doi:10.5555/dup pmid:7", "title": "Duplicated", "pub_date": "2021",
     "type": "journal article", "page": "1-2"},                     # duplicate_br ...
    {"id": "doi:10.5555/dup pmid:7", "title": "Duplicated", "pub_date": "2021",
     "type": "journal article", "page": "1-2"},                     # ... spanning 2 rows
]


def build() -> bytes:
    lines = [",".join(META_HEADER)]
    for row in ROWS:
        lines.append(",".join(row.get(name, "") for name in META_HEADER))
    document = parse_table("\n".join(lines).encode("utf-8"))
    errors, _ = validate_table(document, RuleConfig(offline=True))
    assert len(errors) == 3, [e.error_label for e in errors]
    report = ValidationReport(errors, "fixture.csv", document.kind)
    return emit_html(report, document, STUB_VIEWER)


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "report.html"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(build())
    print(f"wrote {out}")
