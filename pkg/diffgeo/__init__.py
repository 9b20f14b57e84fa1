"""
DiffGeo Core Package
Diffusion geometry of graph Laplacians: averaging operator, eigenpairs,
median hitting-time distances and eigenvector/diffusion bound checks
"""

__version__ = "0.1.0"
__author__ = "DiffGeo Development Team"
__description__ = "Spectral and diffusion geometry toolkit for directed weighted graphs"
