"""Well-posedness tests, implicit stepping and trajectory comparison."""
