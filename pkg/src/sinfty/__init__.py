"""Desk-scale harmonic analysis on the infinite symmetric group."""

__version__ = "0.1.0"
