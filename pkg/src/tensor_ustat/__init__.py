"""Tensor U-Statistics - exact U- and V-statistics through Einstein summation."""

__version__ = "0.1.0"
