"""Headless checks for generated scaffolded panels."""

__version__ = "0.1.0"
