"""Exact weight-graded Poisson cohomology and first-order Poisson deformations."""

__version__ = "0.1.0"
