"""Hybrid error detection and logical dynamical decoupling toolkit."""

__version__ = "0.1.0"
