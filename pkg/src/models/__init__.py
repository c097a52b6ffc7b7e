# src/models/__init__.py

"""
Models Package

Value types for Gaussian mixture components and mixtures.
"""

from .mixture import Component, Gmm, check_compatible

__all__ = ["Component", "Gmm", "check_compatible"]
