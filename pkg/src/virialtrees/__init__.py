"""Penrose tree partitions, splittable-tree counts and exact virial coefficients."""

__version__ = "0.1.0"
