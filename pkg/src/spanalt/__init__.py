"""Span counting for alternating transducer machines."""
__version__ = "0.1.0"
