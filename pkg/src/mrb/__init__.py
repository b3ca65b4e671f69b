"""Exact-arithmetic toolkit for multiple Rota-Baxter algebras and modules."""

__version__ = "0.1.0"
