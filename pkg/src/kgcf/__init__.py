"""Crowdsourced knowledge-graph construction and teaching engine."""

__version__ = "0.1.0"
