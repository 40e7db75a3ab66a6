"""Command-line tools (pipeline commands, worked-example verifier)."""
