"""
Command-line interface for DiffGeo
"""

from .commands import DiffGeoCLI

__all__ = ['DiffGeoCLI']
