"""Exact diagram calculus for KLR-type algebras with floating dots."""

__version__ = "0.1.0"
