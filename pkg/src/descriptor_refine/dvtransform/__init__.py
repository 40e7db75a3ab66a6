"""Driving-variable form of descriptor systems."""
