"""Neckpinch Lab.

Numerical laboratory for rotationally symmetric Ricci flow on S^{n+1}:
warped-product profiles, the reduced flow PDE, neck/bump diagnostics,
singularity classification, the dumbbell family and shrinking-soliton
level-set checks.
"""

__version__ = "1.0.0"
__service_name__ = "Neckpinch Lab"
__author__ = "Odiseo Team"
