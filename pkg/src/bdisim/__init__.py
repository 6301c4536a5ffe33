"""Simulating BDI multi-agent systems at configurable granularity, and running
the very same agent programs live."""

__version__ = "0.1.0"
