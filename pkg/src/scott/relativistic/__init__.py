"""Relativistic one-particle spectra, densities, and spectral shifts."""

from .types import (
    GAMMA_BROWN_RAVENHALL,
    GAMMA_CHANDRASEKHAR,
    GAMMA_FURRY,
    Coupling,
    DiracChannel,
    ShiftCurve,
    SpectrumEntry,
    SpectrumTable,
)
from .dirac import (
    SpectralPollutionError,
    dirac_eigenvalue,
    dirac_radial_solve,
    rho_kappa_D,
)
from .chandra import (
    VariationalCollapseError,
    chandra_channel_matrix,
    chandra_spectrum,
    rho_channel_C,
    sigma_maps,
)
from .shifts import (
    ShiftTailError,
    chandra_shift_value,
    furry_shift_value,
    spectral_shift,
)

__all__ = [
    "GAMMA_BROWN_RAVENHALL",
    "GAMMA_CHANDRASEKHAR",
    "GAMMA_FURRY",
    "Coupling",
    "DiracChannel",
    "ShiftCurve",
    "SpectrumEntry",
    "SpectrumTable",
    "SpectralPollutionError",
    "VariationalCollapseError",
    "ShiftTailError",
    "dirac_eigenvalue",
    "dirac_radial_solve",
    "rho_kappa_D",
    "chandra_channel_matrix",
    "chandra_spectrum",
    "rho_channel_C",
    "sigma_maps",
    "chandra_shift_value",
    "furry_shift_value",
    "spectral_shift",
]
