"""Finite p-groups and saturated fusion systems of finite groups, at desk scale."""

__version__ = "0.1.0"
