"""Mod-p cohomology of lens spaces, classifying spaces of cyclic groups and
orbit spaces of free Z_p-actions, computed from explicit cell structures and
checked against a symbolic spectral sequence."""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
