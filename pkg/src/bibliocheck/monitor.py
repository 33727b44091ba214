"""Configuration-driven SPARQL quality monitor for published collections.

Each configured test is a SPARQL query encoding a known defect pattern:
ASK tests fail when the pattern matches anything, count tests additionally
quantify how many entities match. Tests run sequentially so the recorded
per-query timings are meaningful; a transport or HTTP failure is captured
in the test's own result and never stops the run.
"""

from __future__ import annotations

import html
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, ROUND_HALF_UP

import requests

from .config import ConfigError

ENV_SPARQL_ENDPOINT = "BIBLIOCHECK_SPARQL_ENDPOINT"

DEFAULT_TIMEOUT = 600.0  # seconds; single queries have been seen to run minutes


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # not a pytest class

    label: str
    description: str
    query: str
    enabled: bool = True
    mode: str = "ask"  # or "count"
    baseline_total: int | None = None


@dataclass(frozen=True)
class MonitorConfig:
    endpoint_url: str
    collection: str  # "meta" or "index"
    tests: tuple[TestSpec, ...]
    path: str = ""
    timeout: float = DEFAULT_TIMEOUT


@dataclass
class TestRun:
    __test__ = False  # not a pytest class

    got_result: bool | None = None
    running_time: float = 0.0
    error: str | None = None


@dataclass
class TestResult:
    __test__ = False  # not a pytest class

    label: str
    description: str
    query: str
    run: TestRun
    passed: bool | None
    count: int | None = None
    baseline_total: int | None = None

    @property
    def ratio(self) -> str | None:
        if self.count is None or not self.baseline_total:
            return None
        return format_ratio(self.count, self.baseline_total)


@dataclass
class MonitorReport:
    endpoint_url: str
    collection: str
    executed_at: str
    total_running_time: float
    config_path: str
    results: list[TestResult] = field(default_factory=list)

    @property
    def failed(self) -> list[TestResult]:
        return [r for r in self.results if r.passed is False]

    @property
    def indeterminate(self) -> list[TestResult]:
        return [r for r in self.results if r.passed is None]


def format_ratio(count: int, baseline: int) -> str:
    """Percentage with one decimal, round half up (1388761/121302680 -> '1.1%')."""
    ratio = Decimal(count) / Decimal(baseline) * 100
    return f"{ratio.quantize(Decimal('0.1'), rounding=ROUND_HALF_UP)}%"


def load_config(path: str) -> MonitorConfig:
    """Parse and validate a monitor configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read monitor configuration {path!r}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: monitor configuration must be a JSON object")

    endpoint = os.environ.get(ENV_SPARQL_ENDPOINT) or raw.get("endpoint_url")
    if not endpoint or not isinstance(endpoint, str):
        raise ConfigError(f"{path}: endpoint_url is required")
    collection = raw.get("collection", "meta")
    if collection not in ("meta", "index"):
        raise ConfigError(f"{path}: collection must be 'meta' or 'index'")
    timeout = raw.get("timeout", DEFAULT_TIMEOUT)
    if not isinstance(timeout, (int, float)) or timeout <= 0:
        raise ConfigError(f"{path}: timeout must be a positive number")

    tests_raw = raw.get("tests")
    if not isinstance(tests_raw, list):
        raise ConfigError(f"{path}: tests must be a list")
    tests = []
    seen_labels = set()
    for position, entry in enumerate(tests_raw):
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: test #{position} must be an object")
        label = entry.get("label")
        if not label or not isinstance(label, str):
            raise ConfigError(f"{path}: test #{position} is missing a label")
        if label in seen_labels:
            raise ConfigError(f"{path}: duplicate test label {label!r}")
        seen_labels.add(label)
        query = entry.get("query")
        if not query or not isinstance(query, str):
            raise ConfigError(f"{path}: test {label!r} is missing its query")
        mode = entry.get("mode", "ask")
        if mode not in ("ask", "count"):
            raise ConfigError(f"{path}: test {label!r} has unknown mode {mode!r}")
        baseline = entry.get("baseline_total")
        if baseline is not None and (not isinstance(baseline, int) or baseline <= 0):
            raise ConfigError(f"{path}: test {label!r} baseline_total must be a "
                              "positive integer")
        tests.append(TestSpec(
            label=label,
            description=str(entry.get("description", "")),
            query=query,
            enabled=bool(entry.get("enabled", True)),
            mode=mode,
            baseline_total=baseline,
        ))
    return MonitorConfig(endpoint, collection, tuple(tests), path, float(timeout))


class NonIntegerResult(Exception):
    """A count query returned something that is not a single integer."""


def execute_query(endpoint_url: str, query: str, timeout: float,
                  session: requests.Session | None = None) -> dict:
    """POST one query over the SPARQL protocol, JSON results requested."""
    session = session or requests
    response = session.post(
        endpoint_url,
        data={"query": query},
        headers={"Accept": "application/sparql-results+json"},
        timeout=timeout,
    )
    response.raise_for_status()
    return response.json()

def _extract_count(payload: dict) -> int:
    bindings = payload.get("results", {}).get("bindings", [])
    if len(bindings) != 1 or len(bindings[0]) != 1:
        raise NonIntegerResult("expected exactly one binding with one variable")
    value = next(iter(bindings[0].values())).get("value")
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise NonIntegerResult(f"not an integer: {value!r}") from exc


def _execute_test(spec: TestSpec, config: MonitorConfig,
                  session: requests.Session) -> TestResult:
    run = TestRun()
    count = None
    passed: bool | None = None
    start = time.perf_counter()
    try:
        payload = execute_query(config.endpoint_url, spec.query, config.timeout, session)
        if spec.mode == "ask":
            got = payload.get("boolean")
            if not isinstance(got, bool):
                raise NonIntegerResult("ASK response carries no boolean")
            run.got_result = got
            passed = not got
        else:
            count = _extract_count(payload)
            run.got_result = count > 0
            passed = count == 0
    except (requests.RequestException, ValueError, NonIntegerResult) as exc:
        run.error = str(exc)
        passed = None
    run.running_time = time.perf_counter() - start
    return TestResult(
        label=spec.label, description=spec.description, query=spec.query,
        run=run, passed=passed, count=count, baseline_total=spec.baseline_total,
    )


def _run(config: MonitorConfig, modes: set[str]) -> MonitorReport:
    executed_at = datetime.now(timezone.utc).isoformat()
    session = requests.Session()
    results = []
    start = time.perf_counter()
    for spec in config.tests:
        if spec.enabled and spec.mode in modes:
            results.append(_execute_test(spec, config, session))
    total = time.perf_counter() - start
    return MonitorReport(
        endpoint_url=config.endpoint_url,
        collection=config.collection,
        executed_at=executed_at,
        total_running_time=total,
        config_path=config.path,
        results=results,
    )


def run_tests(config: MonitorConfig, include_count: bool = False) -> MonitorReport:
    """Execute the enabled ask tests (plus count tests when requested),
    sequentially and in configuration order."""
    return _run(config, {"ask", "count"} if include_count else {"ask"})


def run_count_tests(config: MonitorConfig) -> MonitorReport:
    """Execute only the enabled count-mode tests."""
    return _run(config, {"count"})


def report_to_dict(report: MonitorReport) -> dict:
    results = []
    for result in report.results:
        entry = {
            "label": result.label,
            "description": result.description,
            "query": result.query,
            "run": {
                "got_result": result.run.got_result,
                "running_time": result.run.running_time,
                "error": result.run.error,
            },
            "passed": result.passed,
        }
        if result.count is not None:
            entry["count"] = result.count
            if result.baseline_total is not None:
                entry["baseline_total"] = result.baseline_total
                entry["ratio"] = result.ratio
        results.append(entry)
    return {
        "endpoint_url": report.endpoint_url,
        "collection": report.collection,
        "executed_at": report.executed_at,
        "total_running_time": report.total_running_time,
        "config_path": report.config_path,
        "results": results,
    }


def emit_monitor_json(report: MonitorReport) -> bytes:
    return (json.dumps(report_to_dict(report), indent=4, ensure_ascii=False)
            + "\n").encode("utf-8")


def report_from_json(data: bytes) -> MonitorReport:
    raw = json.loads(data.decode("utf-8"))
    results = []
    for entry in raw["results"]:
        run = TestRun(
            got_result=entry["run"]["got_result"],
            running_time=entry["run"]["running_time"],
            error=entry["run"]["error"],
        )
        results.append(TestResult(
            label=entry["label"], description=entry["description"],
            query=entry["query"], run=run, passed=entry["passed"],
            count=entry.get("count"), baseline_total=entry.get("baseline_total"),
        ))
    return MonitorReport(
        endpoint_url=raw["endpoint_url"], collection=raw["collection"],
        executed_at=raw["executed_at"],
        total_running_time=raw["total_running_time"],
        config_path=raw["config_path"], results=results,
    )


_MONITOR_CSS = """
body { font-family: system-ui, sans-serif; margin: 1.5rem; color: #1c1c1c; }
h1 { font-size: 1.3rem; }
dl#run-details { display: grid; grid-template-columns: max-content 1fr; gap: .2rem 1rem; }
dl#run-details dt { font-weight: 600; }
dl#run-details dd { margin: 0; }
.test { border: 1px solid #ccc; border-radius: 6px; padding: .75rem 1rem; margin: 1rem 0; }
.badge { display: inline-block; padding: .1rem .55rem; border-radius: 999px;
         color: #fff; font-size: .8rem; margin-right: .5rem; }
.badge.pass { background: #2e7d32; }
.badge.fail { background: #c62828; }
.badge.indeterminate { background: #757575; }
.test pre { background: #f6f6f6; padding: .5rem; overflow-x: auto; font-size: .78rem; }
.test .error { color: #c62828; }
.timing { color: #555; font-size: .85rem; }
""".strip()


def emit_monitor_html(report: MonitorReport) -> bytes:
    """Self-contained status page: one entry per executed test, in order."""
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        '<head><meta charset="utf-8"><title>Data quality monitor</title>',
        f"<style>\n{_MONITOR_CSS}\n</style></head>",
        "<body>",
        "<h1>Data quality monitor</h1>",
        '<dl id="run-details">',
        f"<dt>SPARQL endpoint</dt><dd>{html.escape(report.endpoint_url)}</dd>",
        f"<dt>Collection</dt><dd>{html.escape(report.collection)}</dd>",
        f"<dt>Executed at</dt><dd>{html.escape(report.executed_at)}</dd>",
        f"<dt>Total running time</dt><dd>{report.total_running_time:.3f} s</dd>",
        f"<dt>Configuration</dt><dd>{html.escape(report.config_path)}</dd>",
        "</dl>",
    ]
    for result in report.results:
        if result.passed is True:
            badge = '<span class="badge pass">passed</span>'
        elif result.passed is False:
            badge = '<span class="badge fail">failed</span>'
        else:
            badge = '<span class="badge indeterminate">indeterminate</span>'
        parts.append('<section class="test">')
        parts.append(f"<h2>{badge}{html.escape(result.label)}</h2>")
        if result.description:
            parts.append(f"<p>{html.escape(result.description)}</p>")
        if result.count is not None:
            count_text = f"Affected entities: {result.count:,}"
            if result.ratio is not None:
                count_text += (f" ({result.ratio} of {result.baseline_total:,})")
            parts.append(f'<p class="count">{html.escape(count_text)}</p>')
        if result.run.error:
            parts.append(f'<p class="error">Execution error: '
                         f"{html.escape(result.run.error)}</p>")
        parts.append(f'<p class="timing">Running time: {result.run.running_time:.3f} s</p>')
        parts.append(f"<details><summary>SPARQL query</summary>"
                     f"<pre>{html.escape(result.query)}</pre></details>")
        parts.append("</section>")
    parts.append("</body></html>")
    return ("\n".join(parts) + "\n").encode("utf-8")
