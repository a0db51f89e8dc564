"""Situation coverage grids and POD-qualified robustness requirements."""
