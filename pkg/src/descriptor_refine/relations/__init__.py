"""Graph simulation relations, initial-set covers and interfaces."""
