"""Rank-dependent covering-number and Rademacher bound workbench."""

__version__ = "0.1.0"
