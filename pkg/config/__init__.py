"""Toolkit configuration package."""
