"""Exact (C,F)-actions of Z^d, cylinder measures, certificates and Markov-shift diagnostics."""

__version__ = "0.1.0"
