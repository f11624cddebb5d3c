"""Semiclassical and relativistic structure of heavy Coulomb systems.

Subpackages cover the Thomas-Fermi atom and its Weizsacker and
Hellmann-Weizsacker refinements, exact hydrogenic densities, relativistic
one-particle spectra (Coulomb-Dirac and Chandrasekhar), spectral-shift
curves, and the assembly of large-Z energy expansions.  All quantities are
in atomic units (Hartree) unless stated otherwise.
"""

__version__ = "0.1.0"

from . import numerics, tf

__all__ = [
    "numerics",
    "tf",
    "__version__",
]
