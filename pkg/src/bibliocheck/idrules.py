"""Levels 2 and 3: external identifier syntax and registry existence.

Syntax checks are pure functions of (scheme, value) following the rules
published by each issuing organization, including the ISO 7064 MOD 11-2
check digit for ORCID and the standard ISSN/ISBN checksums. Existence
checks resolve identifiers against registry endpoints with an on-disk
cache, bounded parallelism and a per-host rate limit; a transport failure
is recorded as an Unknown verdict, never as a data error.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Callable
from urllib.parse import quote, urlsplit

import requests

from .config import RuleConfig


class UnknownScheme(Exception):
    """No syntax specification is registered for the scheme."""


def orcid_check_digit(base_digits: str) -> str:
    """ISO 7064 MOD 11-2 check character for a 15-digit ORCID base."""
    total = 0
    for ch in base_digits:
        total = (total + int(ch)) * 2
    result = (12 - total % 11) % 11
    return "X" if result == 10 else str(result)


def _orcid_checksum(value: str) -> bool:
    digits = value.replace("-", "")
    return orcid_check_digit(digits[:15]) == digits[15]


def _issn_checksum(value: str) -> bool:
    digits = value.replace("-", "")
    total = sum(int(d) * w for d, w in zip(digits[:7], range(8, 1, -1)))
    remainder = total % 11
    check = 0 if remainder == 0 else 11 - remainder
    expected = "X" if check == 10 else str(check)
    return digits[7] == expected


def _isbn_checksum(value: str) -> bool:
    digits = value.replace("-", "").replace(" ", "").upper()
    if len(digits) == 10:
        if not re.fullmatch(r"\d{9}[\dX]", digits):
            return False
        total = sum((10 - i) * (10 if c == "X" else int(c)) for i, c in enumerate(digits))
        return total % 11 == 0
    if len(digits) == 13:
        if not digits.isdigit():
            return False
        total = sum(int(c) * w for c, w in zip(digits, (1, 3) * 7))
        return total % 10 == 0
    return False


@dataclass(frozen=True)
class SchemeSpec:
    scheme: str
    pattern: re.Pattern
    checksum: Callable[[str], bool] | None = None
    applies_to: frozenset[str] = frozenset({"br"})


def _spec(scheme, pattern, checksum=None, applies_to=("br",), flags=0):
    return SchemeSpec(scheme, re.compile(pattern, flags), checksum, frozenset(applies_to))


SCHEME_SPECS: dict[str, SchemeSpec] = {
    spec.scheme: spec
    for spec in [
        _spec("doi", r"10\.\d{4,9}(?:\.\d+)*/\S+", applies_to=("br", "venue"), flags=re.I),
        _spec("pmid", r"[1-9]\d*"),
        _spec("pmcid", r"PMC[1-9]\d*"),
        _spec("issn", r"\d{4}-\d{3}[\dX]", checksum=_issn_checksum, applies_to=("br", "venue")),
        _spec("isbn", r"[\d\- ]{9,17}[\dXx]", checksum=_isbn_checksum, applies_to=("br", "venue")),
        _spec("wikidata", r"Q[1-9]\d*", applies_to=("br", "ra", "venue")),
        _spec("openalex", r"[WASICPF][1-9]\d*", applies_to=("br", "ra", "venue")),
        _spec("url", r"https?://\S+", applies_to=("br", "ra", "venue"), flags=re.I),
        _spec("jid", r"\S+", applies_to=("br", "venue")),
        _spec("arxiv", r"(\d{4}\.\d{4,5}|[a-z\-]+(\.[A-Z]{2})?/\d{7})(v\d+)?"),
        _spec("orcid", r"\d{4}-\d{4}-\d{4}-\d{3}[\dX]", checksum=_orcid_checksum,
              applies_to=("ra",)),
        _spec("viaf", r"[1-9]\d*", applies_to=("ra",)),
        _spec("crossref", r"[1-9]\d*", applies_to=("ra",)),
        _spec("ror", r"0[a-z0-9]{8}", applies_to=("ra",)),
    ]
}


def validate_id_syntax(scheme: str, value: str) -> bool:
    """Pure syntax check of an identifier value against its scheme rules."""
    spec = SCHEME_SPECS.get(scheme)
    if spec is None:
        raise UnknownScheme(scheme)
    if not spec.pattern.fullmatch(value):
        return False
    if spec.checksum is not None and not spec.checksum(value):
        return False
    return True


class VerdictStatus(Enum):
    EXISTS = "exists"
    NOT_FOUND = "not_found"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RegistryVerdict:
    status: VerdictStatus
    checked_at: str
    source: str
    reason: str | None = None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class LookupCache:
    """Disk-backed (scheme, value) -> verdict cache with a freshness window."""

    FILENAME = "existence_cache.json"

    def __init__(self, directory: str | None = None, ttl_days: float = 30.0):
        self.directory = directory
        self.ttl_days = ttl_days
        self._entries: dict[str, RegistryVerdict] = {}
        if directory is not None:
            self._load()

    @staticmethod
    def _key(scheme: str, value: str) -> str:
        return f"{scheme}:{value}"

    def _path(self) -> str:
        return os.path.join(self.directory, self.FILENAME)

    def _load(self) -> None:
        try:
            with open(self._path(), "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return
        for key, entry in raw.items():
            try:
                verdict = RegistryVerdict(
                    VerdictStatus(entry["status"]), entry["checked_at"],
                    entry.get("source", ""), entry.get("reason"),
                )
            except (KeyError, ValueError):
                continue
            if self._fresh(verdict):
                self._entries[key] = verdict

    def _fresh(self, verdict: RegistryVerdict) -> bool:
        try:
            checked = datetime.fromisoformat(verdict.checked_at)
        except ValueError:
            return False
        age = datetime.now(timezone.utc) - checked
        return age.total_seconds() <= self.ttl_days * 86400

    def get(self, scheme: str, value: str) -> RegistryVerdict | None:
        return self._entries.get(self._key(scheme, value))

    def put(self, scheme: str, value: str, verdict: RegistryVerdict) -> None:
        self._entries[self._key(scheme, value)] = verdict

    def save(self) -> None:
        if self.directory is None:
            return
        os.makedirs(self.directory, exist_ok=True)
        payload = {
            key: {
                "status": verdict.status.value,
                "checked_at": verdict.checked_at,
                "source": verdict.source,
                "reason": verdict.reason,
            }
            for key, verdict in sorted(self._entries.items())
        }
        tmp_path = self._path() + ".tmp"
        with open(tmp_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        os.replace(tmp_path, self._path())


class _HostRateLimiter:
    """Serialize requests per host at a fixed maximum rate."""

    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_slot: dict[str, float] = {}

    def wait(self, host: str) -> None:
        if self.interval == 0.0:
            return
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self.interval
        delay = slot - time.monotonic()
        if delay > 0:
            time.sleep(delay)


class OfflineResolver:
    """Never touches the network; every lookup is Unknown."""

    def lookup(self, scheme: str, value: str) -> RegistryVerdict:
        return RegistryVerdict(VerdictStatus.UNKNOWN, _now(), "offline", "offline mode")


class HttpResolver:
    """Existence probes against registry endpoints over HTTP(S).

    A 2xx/3xx answer means the identifier is registered, 404/410 means it
    is not; anything else (including transport failures) yields Unknown.
    Safe for concurrent use.
    """

    def __init__(self, config: RuleConfig, session: requests.Session | None = None):
        self.endpoints = dict(config.resolver_endpoints)
        self.timeout = config.request_timeout
        self.session = session or requests.Session()
        self._limiter = _HostRateLimiter(config.per_host_rate)

    def lookup(self, scheme: str, value: str) -> RegistryVerdict:
        template = self.endpoints.get(scheme)
        if template is None:
            return RegistryVerdict(VerdictStatus.UNKNOWN, _now(), "",
                                   f"no resolver for scheme {scheme!r}")
        url = template.format(value=quote(value, safe="/:"))
        self._limiter.wait(urlsplit(url).netloc)
        method = "HEAD" if scheme == "doi" else "GET"
        try:
            response = self.session.request(
                method, url, timeout=self.timeout, allow_redirects=False,
                headers={"Accept": "application/json"},
            )
        except requests.RequestException as exc:
            return RegistryVerdict(VerdictStatus.UNKNOWN, _now(), url, str(exc))
        if response.status_code in (404, 410):
            return RegistryVerdict(VerdictStatus.NOT_FOUND, _now(), url)
        if 200 <= response.status_code < 400:
            return RegistryVerdict(VerdictStatus.EXISTS, _now(), url)
        return RegistryVerdict(VerdictStatus.UNKNOWN, _now(), url,
                               f"HTTP {response.status_code}")


def check_id_existence(scheme: str, value: str, cache: LookupCache,
                       resolver, offline: bool = False) -> RegistryVerdict:
    """Cache-first existence lookup for a single identifier."""
    cached = cache.get(scheme, value)
    if cached is not None:
        return cached
    if offline:
        verdict = RegistryVerdict(VerdictStatus.UNKNOWN, _now(), "offline", "offline mode")
    else:
        verdict = resolver.lookup(scheme, value)
    cache.put(scheme, value, verdict)
    return verdict


def resolve_batch(ids: set[tuple[str, str]], cache: LookupCache, resolver,
                  offline: bool = False, max_in_flight: int = 8,
                  ) -> dict[tuple[str, str], RegistryVerdict]:
    """Resolve a deduplicated identifier set with bounded parallelism.

    Each distinct (scheme, value) is looked up at most once; cache hits
    skip the network entirely. The result map does not depend on
    completion order.
    """
    results: dict[tuple[str, str], RegistryVerdict] = {}
    pending = []
    for key in sorted(ids):
        cached = cache.get(*key)
        if cached is not None:
            results[key] = cached
        else:
            pending.append(key)

    if pending:
        if offline:
            for key in pending:
                results[key] = check_id_existence(*key, cache, resolver, offline=True)
        else:
            workers = max(1, min(max_in_flight, len(pending)))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                verdicts = pool.map(lambda key: resolver.lookup(*key), pending)
            for key, verdict in zip(pending, verdicts):
                cache.put(*key, verdict)
                results[key] = verdict
    return results
