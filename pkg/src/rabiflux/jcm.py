"""Jaynes-Cummings collapse/revival engine.

A single two-level system coupled to one quantized mode prepared in a
coherent state. All sums run over a finite Fock window chosen to hold at
least 1 - 1e-10 of the Poisson mass; the window rule lives in
:func:`default_fock_window`. Time is in units of 1/g unless the caller
supplies dimensional quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

__all__ = [
    "CoherentFieldState",
    "QubitInit",
    "CouplingParams",
    "default_fock_window",
    "photon_distribution",
    "inversion_trace",
    "ground_state_probability",
    "collapse_envelope",
    "collapse_time",
    "revival_time",
    "relaxation_time_from_linewidth",
    "envelope_by_extrema",
]

_LOG_SPACE_THRESHOLD = 30


def default_fock_window(nbar: float) -> tuple[int, int]:
    """Fock window [n_min, n_max] covering >= 1 - 1e-10 of Poisson(nbar)."""
    if nbar < 0:
        raise ValueError("mean occupation must be >= 0")
    half = 8.0 * math.sqrt(nbar)
    n_min = max(0, int(math.floor(nbar - half)))
    n_max = int(math.ceil(nbar + half)) + 10
    return n_min, n_max


def photon_distribution(nbar: float, n) -> float | np.ndarray:
    """Poisson weight exp(-nbar) nbar^n / n!.

    Evaluated in log space (via lgamma) for n > 30 to stay finite at large
    occupation numbers; accepts scalar or array ``n``.
    """
    if nbar < 0:
        raise ValueError("mean occupation must be >= 0")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("photon number must be >= 0")
    if nbar == 0.0:
        out = np.where(n_arr == 0, 1.0, 0.0)
        return float(out) if np.isscalar(n) else out

    def direct(m):
        return math.exp(-nbar) * nbar ** m / math.factorial(m)

    if np.isscalar(n):
        if n <= _LOG_SPACE_THRESHOLD:
            return direct(int(n))
        return float(np.exp(-nbar + n * math.log(nbar) - gammaln(n + 1.0)))
    out = np.exp(-nbar + n_arr * math.log(nbar) - gammaln(n_arr + 1.0))
    small = n_arr <= _LOG_SPACE_THRESHOLD
    if np.any(small):
        out[small] = [direct(int(m)) for m in n_arr[small]]
    return out


@dataclass(frozen=True)
class CoherentFieldState:
    """Coherent field with mean occupation ``nbar`` and phase ``phase_phi``.

    ``truncation`` defaults to the window rule; a custom window must still
    cover >= 1 - 1e-10 of the Poisson mass.
    """

    mean_occupation_nbar: float
    phase_phi: float = 0.0
    truncation: tuple[int, int] | None = None

    def __post_init__(self):
        if self.mean_occupation_nbar < 0:
            raise ValueError("mean occupation must be >= 0")
        window = self.truncation or default_fock_window(self.mean_occupation_nbar)
        n_min, n_max = window
        if n_min < 0 or n_max < n_min:
            raise ValueError("invalid Fock window")
        mass = photon_distribution(self.mean_occupation_nbar,
                                   np.arange(n_min, n_max + 1)).sum()
        if mass < 1.0 - 1e-10:
            raise ValueError(
                f"Fock window [{n_min}, {n_max}] covers only {mass} of the "
                "Poisson mass (need >= 1 - 1e-10)")
        object.__setattr__(self, "truncation", (n_min, n_max))

    def fock_numbers(self) -> np.ndarray:
        n_min, n_max = self.truncation
        return np.arange(n_min, n_max + 1)

    def weights(self) -> np.ndarray:
        """Poisson probabilities over the truncation window."""
        return photon_distribution(self.mean_occupation_nbar, self.fock_numbers())

    def amplitudes(self) -> np.ndarray:
        """Coherent-state amplitudes alpha^n / sqrt(n!) * exp(-nbar/2).

        Uses the standard normalized weight (the 1/sqrt(n!) form); the
        alternative printed weight alpha^n/n! does not normalize.
        """
        n = self.fock_numbers().astype(float)
        nbar = self.mean_occupation_nbar
        if nbar == 0.0:
            mags = np.where(n == 0, 1.0, 0.0)
        else:
            mags = np.exp(-0.5 * nbar + 0.5 * n * math.log(nbar)
                          - 0.5 * gammaln(n + 1.0))
        return mags * np.exp(1j * n * self.phase_phi)


@dataclass(frozen=True)
class QubitInit:
    """Initial two-level amplitudes (c1 ground, c2 excited), normalized."""

    c1: complex = 1.0
    c2: complex = 0.0

    def __post_init__(self):
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"qubit amplitudes not normalized: |c|^2 = {norm}")


@dataclass(frozen=True)
class CouplingParams:
    """Coupling constant g (rad/s or normalized) and detuning Delta."""

    g: float
    detuning_Delta: float = 0.0

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("coupling constant must be positive")


def inversion_trace(fieldstate: CoherentFieldState, coupling: CouplingParams,
                    t_grid: np.ndarray, sum_from_one: bool = False,
                    weights: np.ndarray | None = None) -> np.ndarray:
    """Population inversion <sigma_z>(t) for a ground-state qubit in a
    coherent field at resonance: -sum_n P(n) cos(2 g sqrt(n) t).

    The sum starts at n = 0 (standard convention); ``sum_from_one`` drops the
    vacuum term to reproduce the alternative printed form. ``weights``
    overrides the Poisson distribution over the same window.
    """
    t = np.asarray(t_grid, dtype=float)
    n = fieldstate.fock_numbers().astype(float)
    p = fieldstate.weights() if weights is None else np.asarray(weights, float)
    if p.shape != n.shape:
        raise ValueError("weights must match the Fock window length")
    if sum_from_one:
        keep = n >= 1
        n, p = n[keep], p[keep]
    phases = 2.0 * coupling.g * np.sqrt(n)[:, None] * t[None, :]
    return -(p[:, None] * np.cos(phases)).sum(axis=0)


def ground_state_probability(fieldstate: CoherentFieldState, qubit: QubitInit,
                             coupling: CouplingParams,
                             t_grid: np.ndarray) -> np.ndarray:
    """Probability of finding the qubit in its ground state versus time.

    Product initial state of the qubit and the coherent field, evolved with
    the standard (detuning-capable) single-mode amplitudes: the pair
    {ground with n photons, excited with n-1} precesses at
    Omega_n = sqrt(Delta^2 + 4 g^2 n).
    """
    t = np.asarray(t_grid, dtype=float)
    n_min, n_max = fieldstate.truncation
    # Field amplitudes are needed one photon below the window to seed the
    # excited branch of each doublet.
    lo = max(0, n_min - 1)
    n_all = np.arange(lo, n_max + 1)
    b = CoherentFieldState(fieldstate.mean_occupation_nbar, fieldstate.phase_phi,
                           (lo, n_max)).amplitudes()
    g, delta = coupling.g, coupling.detuning_Delta

    prob = np.zeros_like(t)
    for idx, n in enumerate(n_all):
        if n == 0:
            # |ground, 0> is stationary.
            prob += abs(qubit.c1 * b[idx]) ** 2
            continue
        omega = math.sqrt(delta ** 2 + 4.0 * g * g * n)
        cg0 = qubit.c1 * b[idx]          # ground, n photons
        ce0 = qubit.c2 * b[idx - 1]      # excited, n-1 photons
        half = 0.5 * omega * t
        cos_h, sin_h = np.cos(half), np.sin(half)
        cg_t = (cg0 * (cos_h + 1j * (delta / omega) * sin_h)
                - 1j * (2.0 * g * math.sqrt(n) / omega) * ce0 * sin_h)
        prob += np.abs(cg_t) ** 2
    return prob


def collapse_envelope(g: float, t) -> float | np.ndarray:
    """Gaussian damping factor exp(-(g t)^2 / 2) of the initial oscillation
    packet; independent of the field intensity."""
    gt = g * np.asarray(t, dtype=float)
    out = np.exp(-0.5 * gt ** 2)
    return float(out) if np.isscalar(t) else out


def collapse_time(g: float) -> float:
    """Characteristic damping time sqrt(2)/g of the initial packet."""
    if g <= 0:
        raise ValueError("coupling constant must be positive")
    return math.sqrt(2.0) / g


def revival_time(g: float, nbar: float, delta: float = 0.0) -> float:
    """Revival period (pi/g^2) sqrt(Delta^2 + 4 g^2 nbar)."""
    if g <= 0:
        raise ValueError("coupling constant must be positive")
    return (math.pi / g ** 2) * math.sqrt(delta ** 2 + 4.0 * g * g * nbar)


def relaxation_time_from_linewidth(delta_nu: float) -> float:
    """Relaxation time ln(2)/(pi * delta_nu) from a linewidth in frequency
    units (Hz in, seconds out)."""
    if delta_nu <= 0:
        raise ValueError("linewidth must be positive")
    return math.log(2.0) / (math.pi * delta_nu)


def envelope_by_extrema(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Oscillation envelope |y| interpolated through its local maxima.

    Used to locate collapse/revival features without committing to any
    transform semantics; endpoints are carried through so the result spans
    the full grid.
    """
    t = np.asarray(t, dtype=float)
    mag = np.abs(np.asarray(y, dtype=float))
    interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:])
    idx = np.flatnonzero(interior) + 1
    knots_t = np.concatenate(([t[0]], t[idx], [t[-1]]))
    knots_v = np.concatenate(([mag[0]], mag[idx], [mag[-1]]))
    return np.interp(t, knots_t, knots_v)
