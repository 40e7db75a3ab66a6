"""Descriptor systems, controllers, initial sets and their files."""
