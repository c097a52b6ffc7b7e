# src/utils/__init__.py

"""
Utilities Package

Provides shared logging and error kinds. File operations and serialization live
in src.utils.file_operations and src.utils.serialization; they depend on the
model packages and are imported from there directly.
"""

from .logging import Logger
from . import errors

__all__ = ["Logger", "errors"]
