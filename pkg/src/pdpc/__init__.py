"""Parallel exact density peaks clustering."""
