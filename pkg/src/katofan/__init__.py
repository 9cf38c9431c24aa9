"""Kato fans, extended cone complexes and tropicalization over a trivially valued field."""

__version__ = "0.1.0"
