"""Validation of META-CSV/CITS-CSV bibliographic tables and SPARQL-based
quality monitoring for published collections."""

from .config import RuleConfig, load_rule_config
from .errors import (
    LocatedIn,
    PositionDescriptor,
    Severity,
    ValidationError,
    ValidationLevel,
    ValidationReport,
)
from .orchestrator import PairResult, validate_document, validate_pair, validate_table
from .table import TableDocument, TableKind, parse_table, parse_table_file

__all__ = [
    "LocatedIn",
    "PairResult",
    "PositionDescriptor",
    "RuleConfig",
    "Severity",
    "TableDocument",
    "TableKind",
    "ValidationError",
    "ValidationLevel",
    "ValidationReport",
    "load_rule_config",
    "parse_table",
    "parse_table_file",
    "validate_document",
    "validate_pair",
    "validate_table",
]

__version__ = "0.1.0"
