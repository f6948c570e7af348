"""Certifying constructions of non-Azumaya maximal orders."""

__version__ = "0.1.0"
