"""Tolerance-aware numerical primitives."""
