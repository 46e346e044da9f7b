"""Traveling-wave laboratory for the 2D Allen-Cahn equation."""
