"""Exact tools for vexillar designs, flag moments and lattice extremality."""

__version__ = "0.1.0"
