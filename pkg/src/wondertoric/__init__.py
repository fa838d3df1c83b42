"""Exact integer presentations of the cohomology of projective wonderful
models of toric arrangements, with an independent Betti-number oracle."""

__version__ = "0.1.0"
