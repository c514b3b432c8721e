"""Command-line interface: definition files, reports and subcommands."""

from .definition import SubstitutionFile, parse_definition, read_definition, serialize_definition
from .main import build_parser, main, run
from .report import Report

__all__ = [
    "Report",
    "SubstitutionFile",
    "build_parser",
    "main",
    "parse_definition",
    "read_definition",
    "run",
    "serialize_definition",
]
