"""Cavity and lattice k-space discreteness arithmetic plus phonon-kinetics
evaluators.

Everything here is a pure function of its arguments; energies and rates are
expressed in normalized units with hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CavityGeometry",
    "ScatteringInput",
    "KLattice",
    "mode_wavenumber",
    "mode_spacing_delta",
    "finite_length_wavenumber",
    "scattering_rate",
    "quasimomentum_allowed",
    "commensurate",
    "pairing_kernel",
]

RECIPROCAL_TOL = 1e-9


@dataclass(frozen=True)
class CavityGeometry:
    """Cavity length and the reference length it started from, in cm."""

    length_L: float
    initial_length_L0: float

    def __post_init__(self):
        if self.length_L <= 0 or self.initial_length_L0 <= 0:
            raise ValueError("cavity lengths must be positive")


@dataclass
class ScatteringInput:
    """Inputs of the one-phonon electron scattering rate.

    Energies in eV; ``broadening_eta`` is the width of the Gaussian that
    stands in for the energy-conserving delta function (defaults to 1e-3 of
    the phonon energy).
    """

    energy_initial: float
    energy_final: float
    phonon_energy: float
    phonon_occupation: float
    matrix_element_sq: float
    broadening_eta: float | None = None

    def __post_init__(self):
        if self.phonon_occupation < 0:
            raise ValueError("phonon occupation must be >= 0")
        if self.broadening_eta is None:
            self.broadening_eta = 1e-3 * abs(self.phonon_energy)
        if self.broadening_eta <= 0:
            raise ValueError("broadening eta must be > 0")


@dataclass(frozen=True)
class KLattice:
    """Discrete set of wavenumbers with the period of its reciprocal lattice.

    ``regular(n)`` builds k_n = 2*pi*n/N' for n = 1..N', whose reciprocal
    period is 2*pi; ``from_spacing`` builds n*spacing with period N*spacing.
    """

    wavenumbers: np.ndarray
    period: float

    def __post_init__(self):
        k = np.asarray(self.wavenumbers, dtype=float)
        if k.size == 0:
            raise ValueError("lattice must contain at least one wavenumber")
        if np.any(np.diff(k) <= 0):
            raise ValueError("wavenumbers must be strictly increasing")
        if self.period <= 0:
            raise ValueError("reciprocal period must be positive")
        object.__setattr__(self, "wavenumbers", k)

    @property
    def site_count(self) -> int:
        return int(self.wavenumbers.size)

    @classmethod
    def regular(cls, n_sites: int) -> "KLattice":
        if n_sites < 1:
            raise ValueError("need at least one site")
        n = np.arange(1, n_sites + 1, dtype=float)
        return cls(2.0 * math.pi * n / n_sites, 2.0 * math.pi)

    @classmethod
    def from_spacing(cls, n_sites: int, spacing: float) -> "KLattice":
        if n_sites < 1 or spacing <= 0:
            raise ValueError("need n_sites >= 1 and spacing > 0")
        n = np.arange(1, n_sites + 1, dtype=float)
        return cls(n * spacing, n_sites * spacing)


def mode_wavenumber(alpha: int, length: float) -> float:
    """Wavenumber of cavity mode ``alpha`` for a cavity of the given length."""
    if length <= 0:
        raise ValueError("cavity length must be positive")
    if alpha < 1:
        raise ValueError("mode index must be >= 1")
    return alpha * math.pi / length


def mode_spacing_delta(alpha: int, length: float, delta_alpha: float,
                       delta_length: float) -> float:
    """First-order k-space discreteness step for increments (delta_alpha,
    delta_length).

    Implemented verbatim as (alpha*pi/L)*d_alpha - (alpha*pi/L^2)*d_L; the
    alpha-dependence of the first coefficient is kept as adopted, not
    "corrected".
    """
    if length <= 0:
        raise ValueError("cavity length must be positive")
    return (alpha * math.pi / length) * delta_alpha \
        - (alpha * math.pi / length ** 2) * delta_length


def finite_length_wavenumber(alpha: int, delta_alpha: float, length: float,
                             initial_length: float) -> float:
    """Mode wavenumber for a finite change of cavity length from
    ``initial_length`` to ``length`` with mode-index change ``delta_alpha``."""
    if length <= 0 or initial_length <= 0:
        raise ValueError("cavity lengths must be positive")
    c = -alpha * math.pi * math.log(initial_length) * delta_alpha
    return alpha * math.pi * (math.log(length) * delta_alpha + 1.0 / length) + c


def _gaussian_delta(x: float, eta: float) -> float:
    return math.exp(-0.5 * (x / eta) ** 2) / (eta * math.sqrt(2.0 * math.pi))


def scattering_rate(inp: ScatteringInput, emission: bool) -> float:
    """One-phonon electron scattering rate (hbar = 1).

    The energy-conserving delta function is replaced by a normalized
    Gaussian of width ``broadening_eta``; emission carries the stimulated
    factor N+1, absorption the factor N.
    """
    sign = 1.0 if emission else -1.0
    mismatch = inp.energy_initial - inp.energy_final - sign * inp.phonon_energy
    occupation = inp.phonon_occupation + 0.5 + sign * 0.5
    return (2.0 * math.pi) * inp.matrix_element_sq \
        * _gaussian_delta(mismatch, inp.broadening_eta) * occupation


def quasimomentum_allowed(k_l: float, k_m: float, q: float, lattice: KLattice,
                          emission: bool) -> str:
    """Classify a scattering transition by quasimomentum conservation.

    Returns ``"normal"`` when k_l - k_m -/+ q vanishes, ``"umklapp"`` when it
    equals a nonzero integer multiple of the reciprocal period (within a
    1e-9 relative tolerance) and ``"forbidden"`` otherwise.
    """
    sign = 1.0 if emission else -1.0
    residual = k_l - k_m - sign * q
    multiple = residual / lattice.period
    nearest = round(multiple)
    if abs(multiple - nearest) <= RECIPROCAL_TOL:
        return "normal" if nearest == 0 else "umklapp"
    return "forbidden"


def commensurate(cavity_lattice: KLattice, atomic_lattice: KLattice,
                 tol: float) -> tuple[bool, list[tuple[int, int]]]:
    """Check whether any cavity wavenumber coincides with an atomic one.

    Returns (found, pairs) where pairs lists (cavity index, atomic index) of
    every match within ``tol``.
    """
    kc = cavity_lattice.wavenumbers
    ka = atomic_lattice.wavenumbers
    close = np.abs(kc[:, None] - ka[None, :]) <= tol
    pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(close))]
    return bool(pairs), pairs


def pairing_kernel(eps_k: float, eps_kq: float, phonon_energy: float,
                   matrix_element_sq: float) -> float:
    """Phonon-mediated electron-electron interaction kernel (hbar = 1).

    Negative (attractive) exactly when the electron energy transfer lies
    inside the phonon energy shell.
    """
    if phonon_energy <= 0:
        raise ValueError("phonon energy must be positive")
    delta = eps_k - eps_kq
    denom = delta ** 2 - phonon_energy ** 2
    if denom == 0.0:
        raise ValueError("energy transfer sits exactly on the phonon shell "
                         "(kernel singularity)")
    return phonon_energy * matrix_element_sq / denom
