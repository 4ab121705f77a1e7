"""
Shared utility functions re-exported for convenient access.

Usage::

    from utils import read_stub, save_stub, write_report
"""

from .stub_utils import read_stub, save_stub, cached, config_digest, stub_file
from .report_utils import write_report, write_csv, write_json, summary_frame, to_plain

__all__ = [
    "read_stub",
    "save_stub",
    "cached",
    "config_digest",
    "stub_file",
    "write_report",
    "write_csv",
    "write_json",
    "summary_frame",
    "to_plain",
]
