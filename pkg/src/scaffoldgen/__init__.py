"""Scaffolded-panel generation pipeline for professional creative software."""

__version__ = "0.1.0"
