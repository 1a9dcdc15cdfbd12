"""Hierarchical beam-forming / beam-focusing localization simulator."""

__version__ = "0.1.0"
