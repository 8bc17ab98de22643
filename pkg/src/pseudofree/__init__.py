"""Obstruction engine for pseudofree, homologically trivial finite group actions on 4-manifolds."""

__version__ = "0.1.0"
