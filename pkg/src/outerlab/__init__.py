"""Outer automorphism groups of automorphism-induced HNN-extensions over finite groups."""

__version__ = "0.1.0"
