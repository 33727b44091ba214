"""Command-line interface: validate, validate-pair, monitor, render.

Exit codes are CI-oriented: 0 clean (warnings allowed unless
--strict-warnings), 1 findings (validation errors, or a failed monitor
test), 2 usage/IO/configuration failures.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import click

from .config import ConfigError, load_rule_config
from .errors import (
    ValidationReport,
    emit_json,
    emit_metadata_json,
    emit_txt_summary,
    errors_from_json,
)
from .htmlreport import STUB_VIEWER, PositionResolutionError, emit_html
from .idrules import HttpResolver, LookupCache, OfflineResolver
from .monitor import (
    emit_monitor_html,
    emit_monitor_json,
    load_config as load_monitor_config,
    run_tests,
)
from .orchestrator import validate_document, validate_pair
from .table import (
    DecodeError,
    MalformedCsv,
    TableKind,
    UnknownTableType,
    parse_table_file,
)

_PARSE_FAILURES = (DecodeError, MalformedCsv, UnknownTableType, OSError)


def _fail(message: str) -> "SystemExit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(2)


def _load_viewer_asset() -> bytes:
    try:
        return resources.files("bibliocheck").joinpath("assets/viewer.js").read_bytes()
    except (FileNotFoundError, OSError):
        return STUB_VIEWER


def _build_rule_config(config_path: str | None, offline: bool):
    try:
        config = load_rule_config(config_path)
    except ConfigError as exc:
        raise _fail(str(exc))
    if offline:
        config = replace(config, offline=True)
    return config


def _make_resolver_and_cache(config):
    resolver = OfflineResolver() if config.offline else HttpResolver(config)
    cache = LookupCache(config.cache_dir, config.cache_ttl_days)
    return resolver, cache


def _write_report_files(report: ValidationReport, out_dir: Path, prefix: str,
                        html: bool, viewer: bytes, source_path: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{prefix}report.json").write_bytes(emit_json(report))
    (out_dir / f"{prefix}summary.txt").write_bytes(emit_txt_summary(report))
    (out_dir / f"{prefix}metadata.json").write_bytes(emit_metadata_json(report))
    if html:
        source = parse_table_file(source_path)
        (out_dir / f"{prefix}report.html").write_bytes(
            emit_html(report, source, viewer))


def _report_exit(reports: list[ValidationReport], strict_warnings: bool) -> int:
    errors = sum(r.error_count for r in reports)
    warnings = sum(r.warning_count for r in reports)
    if errors:
        return 1
    if warnings and strict_warnings:
        return 1
    return 0


@click.group()
@click.version_option(package_name="bibliocheck")
def main():
    """Validate META-CSV/CITS-CSV tables and monitor published collections."""


_validate_options = [
    click.option("--out-dir", required=True, type=click.Path(file_okay=False),
                 help="Directory for the report files."),
    click.option("--offline", is_flag=True,
                 help="Skip registry existence lookups."),
    click.option("--no-html", is_flag=True, help="Do not write the HTML report."),
    click.option("--strict-warnings", is_flag=True,
                 help="Exit 1 when only warnings were found."),
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                 help="Rule configuration file (JSON)."),
]


def _with_options(options):
    def decorate(func):
        for option in reversed(options):
            func = option(func)
        return func
    return decorate


@main.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--type", "table_type", type=click.Choice(["auto", "meta", "cits"]),
              default="auto", help="Expected table type (checked against the header).")
@_with_options(_validate_options)
def validate(input_path, table_type, out_dir, offline, no_html, strict_warnings,
             config_path):
    """Validate one table and write JSON, TXT and HTML reports."""
    config = _build_rule_config(config_path, offline)
    resolver, cache = _make_resolver_and_cache(config)
    try:
        report = validate_document(input_path, config, resolver, cache)
    except _PARSE_FAILURES as exc:
        raise _fail(str(exc))
    if table_type != "auto" and report.table_kind is not TableKind(table_type):
        raise _fail(f"expected a {table_type.upper()}-CSV table, detected "
                    f"{report.table_kind.value.upper()}-CSV")

    _write_report_files(report, Path(out_dir), "validation_", not no_html,
                        _load_viewer_asset(), input_path)
    click.echo(f"{report.error_count} error(s), {report.warning_count} warning(s) "
               f"-> {out_dir}")
    sys.exit(_report_exit([report], strict_warnings))


@main.command("validate-pair")
@click.option("--meta", "meta_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--cits", "cits_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_with_options(_validate_options)
def validate_pair_cmd(meta_path, cits_path, out_dir, offline, no_html,
                      strict_warnings, config_path):
    """Cross-validate a META-CSV/CITS-CSV pair (three report sections)."""
    config = _build_rule_config(config_path, offline)
    resolver, cache = _make_resolver_and_cache(config)
    try:
        result = validate_pair(meta_path, cits_path, config, resolver, cache)
    except (_PARSE_FAILURES + (ValueError,)) as exc:
        raise _fail(str(exc))

    out = Path(out_dir)
    viewer = _load_viewer_asset()
    _write_report_files(result.meta_report, out, "meta_", not no_html, viewer, meta_path)
    _write_report_files(result.cits_report, out, "cits_", not no_html, viewer, cits_path)
    cross_report = ValidationReport(
        result.cross_errors, f"{meta_path} + {cits_path}", None,
        result.meta_report.started_at, result.cits_report.finished_at,
        ["semantics"],
    )
    (out / "cross_report.json").write_bytes(emit_json(cross_report))
    (out / "cross_summary.txt").write_bytes(emit_txt_summary(cross_report))

    reports = [result.meta_report, result.cits_report, cross_report]
    click.echo(
        f"meta: {result.meta_report.error_count}/{result.meta_report.warning_count}, "
        f"cits: {result.cits_report.error_count}/{result.cits_report.warning_count}, "
        f"cross: {cross_report.error_count}/{cross_report.warning_count} "
        f"(errors/warnings) -> {out_dir}"
    )
    sys.exit(_report_exit(reports, strict_warnings))


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--count", "include_count", is_flag=True,
              help="Also run count-mode tests.")
def monitor(config_path, out_dir, include_count):
    """Run the configured SPARQL quality tests and publish the results."""
    try:
        config = load_monitor_config(config_path)
    except ConfigError as exc:
        raise _fail(str(exc))

    report = run_tests(config, include_count=include_count)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "monitor_report.json").write_bytes(emit_monitor_json(report))
    (out / "monitor_report.html").write_bytes(emit_monitor_html(report))

    failed = report.failed
    indeterminate = report.indeterminate
    passed = len(report.results) - len(failed) - len(indeterminate)
    click.echo(f"{passed} passed, {len(failed)} failed, "
               f"{len(indeterminate)} indeterminate -> {out_dir}")
    if indeterminate and not failed:
        click.echo("note: some tests could not be executed; their outcome is unknown")
    sys.exit(1 if failed else 0)


@main.command()
@click.option("--report", "report_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--source", "source_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def render(report_path, source_path, out_path):
    """Regenerate the HTML report from a stored JSON report, bit-for-bit."""
    try:
        errors = errors_from_json(Path(report_path).read_bytes())
    except (ValueError, KeyError) as exc:
        raise _fail(f"cannot parse report {report_path!r}: {exc}")
    try:
        source = parse_table_file(source_path)
    except _PARSE_FAILURES as exc:
        raise _fail(str(exc))
    report = ValidationReport(errors, source_path, source.kind)
    try:
        html = emit_html(report, source, _load_viewer_asset())
    except PositionResolutionError as exc:
        raise _fail(f"report does not match source: {exc}")
    Path(out_path).write_bytes(html)
    click.echo(f"wrote {out_path}")
    sys.exit(0)


if __name__ == "__main__":
    main()
