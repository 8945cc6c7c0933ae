"""
LevyCLT - verification laboratory for the L2 modulus CLT of Levy local times.

This package computes the spectral constants and exact Kac moments of the
L2 modulus of continuity of local times by quadrature, simulates symmetric
stable and stable-mixture Levy paths with their local-time fields, and
checks the central limit theorem, its centering and its scaling laws by
Monte Carlo.
"""

__version__ = "1.0.0"
__author__ = "LevyCLT Team"
