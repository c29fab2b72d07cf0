"""Mestre-Nagao sums, rank classification and murmurations of elliptic curves."""

__version__ = "0.1.0"
