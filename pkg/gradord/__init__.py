"""Exact arithmetic for graduated orders, group-algebra idempotents and central conductors."""

__version__ = "0.3.0"
