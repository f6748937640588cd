"""
cscoh - exact complex-symplectic cohomology engine

Dolbeault, dbar-Lambda, Bott-Chern and Aeppli cohomologies of invariant
complexes on nilmanifolds and solvmanifolds, with Hard Lefschetz, lemma and
Massey analyses in exact Gaussian-rational arithmetic.
"""

__version__ = "1.0.0"
__author__ = "cscoh Development Team"

from .cli import app
from .engine import CohomologyEngine

__all__ = ["app", "CohomologyEngine"]
