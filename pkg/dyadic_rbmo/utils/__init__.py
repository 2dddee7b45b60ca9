"""Utility functions and helpers."""

from .config_parser import ConfigParser, RunConfig
from .io_utils import read_json, write_csv, write_json

__all__ = [
    "ConfigParser",
    "RunConfig",
    "read_json",
    "write_json",
    "write_csv",
]
