"""Amplitude invariants of knotted-surface movies built on the Kauffman bracket."""

__version__ = "0.1.0"
