"""Shared types for the relativistic one-particle machinery."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GAMMA_CHANDRASEKHAR",
    "GAMMA_BROWN_RAVENHALL",
    "GAMMA_FURRY",
    "Coupling",
    "DiracChannel",
    "SpectrumEntry",
    "SpectrumTable",
    "ShiftCurve",
]

# critical couplings of the three one-particle models
GAMMA_CHANDRASEKHAR = 2.0 / np.pi
GAMMA_BROWN_RAVENHALL = 2.0 / (np.pi / 2.0 + 2.0 / np.pi)
GAMMA_FURRY = 1.0

_RANGES = {
    "chandrasekhar": (GAMMA_CHANDRASEKHAR, True),
    "dirac_furry": (GAMMA_FURRY, False),
}


@dataclass(frozen=True)
class Coupling:
    """Dimensionless coupling gamma = Z/c with its model's validity range."""

    gamma: float
    model: str = "chandrasekhar"

    def __post_init__(self):
        if self.model not in _RANGES:
            raise ValueError(f"unknown model {self.model!r}")
        bound, inclusive = _RANGES[self.model]
        ok = 0.0 <= self.gamma <= bound if inclusive \
            else 0.0 <= self.gamma < bound
        if not ok:
            raise ValueError(
                f"gamma={self.gamma} outside the {self.model} range "
                f"[0, {bound}{']' if inclusive else ')'}")


@dataclass(frozen=True)
class DiracChannel:
    """Spin-orbit channel kappa with its angular bookkeeping."""

    kappa: int

    def __post_init__(self):
        if self.kappa == 0:
            raise ValueError("kappa must be a nonzero integer")

    @property
    def j(self) -> float:
        return abs(self.kappa) - 0.5

    @property
    def ell(self) -> int:
        return abs(self.kappa) - (1 if self.kappa > 0 else 0)

    @property
    def degeneracy(self) -> int:
        return 2 * abs(self.kappa)

    @property
    def n_start(self) -> int:
        """First radial index: n >= 1 for kappa < 0, n >= 0 otherwise."""
        return 0 if self.kappa > 0 else 1


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    channel: int                      # ell (scalar models) or kappa (Dirac)
    eigenvalue: float
    degeneracy: int
    source: str                       # closed_form | rayleigh_ritz | finite_difference


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues with quantum numbers, ascending within each channel."""

    entries: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        by_channel = {}
        for e in self.entries:
            by_channel.setdefault(e.channel, []).append(e)
        for chan, es in by_channel.items():
            es = sorted(es, key=lambda e: e.n)
            vals = [e.eigenvalue for e in es]
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"channel {chan}: eigenvalues not ascending")

    def channel(self, chan: int):
        return sorted((e for e in self.entries if e.channel == chan),
                      key=lambda e: e.n)

    def values(self, chan: int) -> np.ndarray:
        return np.array([e.eigenvalue for e in self.channel(chan)])

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class ShiftCurve:
    """Sampled spectral shift gamma -> s(gamma) with truncation diagnostics."""

    model: str
    gammas: np.ndarray
    values: np.ndarray
    tail_estimates: np.ndarray
    caps: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        v = np.asarray(self.values, dtype=float)
        t = np.asarray(self.tail_estimates, dtype=float)
        if not (g.shape == v.shape == t.shape):
            raise ValueError("curve arrays must share a shape")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("gamma samples must increase")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail_estimates", t)
