"""Exact freeness certificates for rational hyperplane arrangements."""

__version__ = "0.1.0"
