"""Approximate logic synthesis via Boolean matrix factorization."""

__version__ = "0.1.0"
