"""FORGE: fragment-oriented molecular editing, mining, and search toolkit."""

__version__ = "0.1.0"
