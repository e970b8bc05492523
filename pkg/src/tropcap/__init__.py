"""Exact region counting and capacity bounds for sparsely gated
mixture-of-experts layers, through the lens of max-plus algebra."""

__version__ = "0.1.0"
