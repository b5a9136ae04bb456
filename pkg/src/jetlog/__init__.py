"""Jet schemes, motivic measures and the jet-dimension criterion for KLT/LC pairs."""

__version__ = "0.1.0"
