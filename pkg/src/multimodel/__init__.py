"""Minimal multimodels of differential graded algebras over local rings."""

__version__ = "0.1.0"
