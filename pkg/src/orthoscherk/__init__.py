"""Doubly periodic minimal surfaces with handles, via orthodisk period problems."""

__version__ = "0.1.0"
