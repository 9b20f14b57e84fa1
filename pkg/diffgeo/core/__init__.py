"""Core algorithms: graph representation, spectra, diffusion and bound checks"""
