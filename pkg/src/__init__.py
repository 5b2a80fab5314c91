"""Anisotropic scaling of negatively dependent linear random fields."""

__version__ = "0.1.0"
