"""Exact control refinement toolkit for discrete-time descriptor systems."""
