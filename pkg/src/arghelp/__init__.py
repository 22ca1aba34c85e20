"""Argument-based features for classifying helpful reviews."""

__version__ = "0.1.0"
