"""Exact census of elliptic curves over prime fields by group structure."""

__version__ = "0.1.0"
