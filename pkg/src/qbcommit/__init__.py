"""Exact small-scale simulation of quantum bit commitment from one-way functions."""

__version__ = "0.1.0"
