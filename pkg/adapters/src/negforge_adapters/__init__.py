"""Scorer adapters for the negforge evaluation harness.

Each module is a standalone process speaking line-delimited JSON on
stdin/stdout; the harness never imports these, it launches them.
"""

__version__ = "0.1.0"
