"""Quandle cocycle invariants from Alexander quandles over finite fields."""

__version__ = "0.1.0"
