"""Exact control refinement pipeline."""
