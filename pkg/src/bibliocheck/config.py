"""Unified rule configuration: scheme sets, vocabularies, endpoints, limits.

Everything here has sensible defaults so the validator runs with no config
file at all; a JSON file can override any subset of the fields (documented
in the README), and a few environment variables override the file in turn.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

BR_ID_SCHEMES = frozenset(
    {"doi", "pmid", "pmcid", "issn", "isbn", "wikidata", "openalex", "url", "jid", "arxiv"}
)
RA_ID_SCHEMES = frozenset({"orcid", "viaf", "crossref", "wikidata", "ror"})

TYPE_VOCABULARY = frozenset(
    {
        "book", "book chapter", "book part", "book section", "book series", "book set",
        "data file", "dataset", "dissertation", "edited book", "journal",
        "journal article", "journal issue", "journal volume", "monograph",
        "peer review", "proceedings", "proceedings article", "proceedings series",
        "reference book", "reference entry", "report", "report series", "series",
        "standard", "standard series", "web content", "other",
    }
)

# Publication type -> identifier schemes acceptable for a resource of that type.
# Types missing from the map fall back to the full bibliographic scheme set.
TYPE_ID_COMPATIBILITY: dict[str, frozenset[str]] = {
    "journal article": frozenset({"doi", "pmid", "pmcid", "wikidata", "openalex", "url", "arxiv"}),
    "book": frozenset({"doi", "pmid", "pmcid", "wikidata", "openalex", "url", "arxiv", "isbn"}),
    "dataset": frozenset({"doi", "wikidata", "openalex", "url"}),
    "journal": frozenset({"issn", "wikidata", "openalex"}),
}

# Types that normally have no containing venue; venue presence is a warning.
CONTAINERLESS_TYPES = frozenset(
    {"book", "edited book", "monograph", "reference book", "report", "standard",
     "journal", "series", "book series", "proceedings series", "report series",
     "standard series"}
)

# Registry endpoints used for existence checks. {value} is the identifier value.
RESOLVER_ENDPOINTS: dict[str, str] = {
    "doi": "https://doi.org/{value}",
    "orcid": "https://pub.orcid.org/v3.0/{value}",
    "pmid": "https://pubmed.ncbi.nlm.nih.gov/{value}/",
}

ENV_OFFLINE = "BIBLIOCHECK_OFFLINE"
ENV_CACHE_DIR = "BIBLIOCHECK_CACHE_DIR"
ENV_ENDPOINT_PREFIX = "BIBLIOCHECK_ENDPOINT_"  # e.g. BIBLIOCHECK_ENDPOINT_DOI


class ConfigError(Exception):
    """A configuration file is unreadable or structurally wrong."""


@dataclass(frozen=True)
class RuleConfig:
    br_id_schemes: frozenset[str] = BR_ID_SCHEMES
    ra_id_schemes: frozenset[str] = RA_ID_SCHEMES
    venue_id_schemes: frozenset[str] = BR_ID_SCHEMES
    type_vocabulary: frozenset[str] = TYPE_VOCABULARY
    type_id_compatibility: dict[str, frozenset[str]] = field(
        default_factory=lambda: dict(TYPE_ID_COMPATIBILITY)
    )
    containerless_types: frozenset[str] = CONTAINERLESS_TYPES
    resolver_endpoints: dict[str, str] = field(default_factory=lambda: dict(RESOLVER_ENDPOINTS))
    offline: bool = False
    cache_dir: str | None = None
    cache_ttl_days: float = 30.0
    max_in_flight: int = 8
    per_host_rate: float = 4.0  # requests per second per host
    request_timeout: float = 30.0


_SET_FIELDS = {
    "br_id_schemes", "ra_id_schemes", "venue_id_schemes",
    "type_vocabulary", "containerless_types",
}
_SCALAR_FIELDS = {
    "offline": bool,
    "cache_dir": str,
    "cache_ttl_days": (int, float),
    "max_in_flight": int,
    "per_host_rate": (int, float),
    "request_timeout": (int, float),
}


def load_rule_config(path: str | None = None) -> RuleConfig:
    """Build a RuleConfig from defaults, an optional JSON file, and env vars."""
    config = RuleConfig()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read rule configuration {path!r}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"rule configuration {path!r} must be a JSON object")
        config = _apply_overrides(config, raw, path)
    return _apply_env(config)


def _apply_overrides(config: RuleConfig, raw: dict, path: str) -> RuleConfig:
    updates: dict = {}
    for key, value in raw.items():
        if key in _SET_FIELDS:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{path}: {key} must be a list of strings")
            updates[key] = frozenset(v.lower() for v in value)
        elif key == "type_id_compatibility":
            if not isinstance(value, dict):
                raise ConfigError(f"{path}: type_id_compatibility must be an object")
            updates[key] = {t.lower(): frozenset(s.lower() for s in schemes)
                            for t, schemes in value.items()}
        elif key == "resolver_endpoints":
            if not isinstance(value, dict):
                raise ConfigError(f"{path}: resolver_endpoints must be an object")
            merged = dict(config.resolver_endpoints)
            merged.update({k.lower(): str(v) for k, v in value.items()})
            updates[key] = merged
        elif key in _SCALAR_FIELDS:
            expected = _SCALAR_FIELDS[key]
            if value is not None and not isinstance(value, expected):
                raise ConfigError(f"{path}: {key} has the wrong type")
            updates[key] = value
        else:
            raise ConfigError(f"{path}: unknown configuration key {key!r}")
    return replace(config, **updates)


def _apply_env(config: RuleConfig) -> RuleConfig:
    updates: dict = {}
    if os.environ.get(ENV_OFFLINE, "").strip().lower() in {"1", "true", "yes"}:
        updates["offline"] = True
    cache_dir = os.environ.get(ENV_CACHE_DIR)
    if cache_dir:
        updates["cache_dir"] = cache_dir
    endpoints = dict(config.resolver_endpoints)
    changed = False
    for key, value in os.environ.items():
        if key.startswith(ENV_ENDPOINT_PREFIX) and value:
            endpoints[key[len(ENV_ENDPOINT_PREFIX):].lower()] = value
            changed = True
    if changed:
        updates["resolver_endpoints"] = endpoints
    return replace(config, **updates) if updates else config
