"""Desk-scale simulation of a confidential chain hosting NFP contracts."""

__version__ = "0.1.0"
