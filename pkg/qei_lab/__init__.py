"""
One-particle energy density laboratory for factorizing scattering models.
"""

__version__ = "1.0.0"
__description__ = "Smeared stress-energy kernels, lowest eigenvalues and QEI classification"
