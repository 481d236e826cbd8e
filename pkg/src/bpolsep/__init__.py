"""Separation of regular languages by BPol(G) and BPol(G+) for group classes G."""

__version__ = "0.1.0"
