"""Extraction pipeline for swept spectra.

Peak picking, splitting statistics and their fits, envelope fitting, Rabi
frequency and g-value arithmetic, wing-asymmetry ratio, tanh step fits,
lifetime estimates and step detection. All functions are pure and operate
on :class:`~rabiflux.spectrum.Spectrum` objects or plain arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import signal as sps
from scipy.optimize import curve_fit

from .errors import FitError, ShapeError
from .jcm import relaxation_time_from_linewidth
from .spectrum import Spectrum

__all__ = [
    "ZEEMAN_MHZ_PER_GAUSS",
    "PeakList",
    "SplittingStats",
    "EnvelopeFit",
    "TanhStepFit",
    "StepReport",
    "detect_peaks",
    "splitting_stats",
    "fit_envelope",
    "envelope_width_from_splitting",
    "extract_rabi_frequency",
    "g_factor",
    "asymmetry_ratio",
    "tanh_inflection_fit",
    "lifetime_from_inflection",
    "detect_steps",
    "relaxation_time",
]

# Zeeman conversion slope: resonance frequency in MHz per gauss per unit
# g-value.
ZEEMAN_MHZ_PER_GAUSS = 1.39961

DEFAULT_PROMINENCE_FRACTION = 0.05
SUBGROUP_SIZE = 4


@dataclass
class PeakList:
    """Detected peaks: positions (gauss, ascending), amplitudes and
    peak-to-peak widths."""

    positions: np.ndarray
    amplitudes: np.ndarray
    widths_pp: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        self.widths_pp = np.asarray(self.widths_pp, dtype=float)
        if not (self.positions.shape == self.amplitudes.shape
                == self.widths_pp.shape):
            raise ValueError("peak arrays must have equal length")
        if self.positions.size > 1 and np.any(np.diff(self.positions) <= 0):
            raise ValueError("peak positions must be ascending")

    def __len__(self) -> int:
        return int(self.positions.size)


@dataclass
class SplittingStats:
    """Statistics of consecutive peak splittings."""

    splittings: np.ndarray
    mean: float
    mean_square_deviation: float
    linear_fit: tuple[float, float] | None          # (slope, intercept)
    polynomial_fit: np.ndarray | None               # highest power first
    subgroup_partition: list[tuple[int, int]]        # peak index ranges


@dataclass
class EnvelopeFit:
    """Gaussian fit of peak amplitudes versus field position.

    ``width_deltaH`` follows the lines-times-splitting convention: the full
    width at half maximum re-expressed as (oscillations under the envelope)
    x (mean splitting); ``gaussian_sigma`` is the fitted standard deviation.
    """

    center: float
    width_deltaH: float
    amplitude: float
    residual_rms: float
    gaussian_sigma: float
    n_oscillations: float


@dataclass
class TanhStepFit:
    """Least-squares tanh step: plateau levels, inflection point and width."""

    plateau_start: float
    plateau_end: float
    inflection: float
    width: float


@dataclass
class StepReport:
    """Detected steps with an equidistance verdict.

    ``equidistant_steps`` counts the steps in the leading run whose gaps all
    stay within the tolerance of the running mean gap; deviations of the
    remaining gaps from that mean are listed in order.
    """

    positions: np.ndarray
    gaps: np.ndarray
    equidistant_steps: int
    mean_gap: float
    trailing_deviations: np.ndarray


def _parabolic_refine(x: np.ndarray, y: np.ndarray, idx: int) -> tuple[float, float]:
    """3-point parabola through (idx-1, idx, idx+1); returns (x_peak, y_peak)."""
    if idx <= 0 or idx >= len(x) - 1:
        return float(x[idx]), float(y[idx])
    y0, y1, y2 = y[idx - 1], y[idx], y[idx + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(x[idx]), float(y[idx])
    shift = 0.5 * (y0 - y2) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    step = 0.5 * (x[idx + 1] - x[idx - 1])
    y_peak = y1 - 0.25 * (y0 - y2) * shift
    return float(x[idx] + shift * step), float(y_peak)


def detect_peaks(spectrum: Spectrum, min_prominence: float | None = None) -> PeakList:
    """All local maxima above a prominence threshold.

    The default threshold is 5% of the global peak-to-peak amplitude.
    Positions are refined with a 3-point parabola and widths taken at half
    prominence. An empty result is valid.
    """
    spec = spectrum.ascending()
    h, y = spec.field, spec.amplitude
    if h.size < 3:
        raise ValueError("need at least 3 samples")
    if min_prominence is None:
        ptp = float(y.max() - y.min())
        min_prominence = DEFAULT_PROMINENCE_FRACTION * ptp
    if min_prominence <= 0:
        # Flat trace: nothing can be prominent.
        empty = np.empty(0)
        return PeakList(empty, empty.copy(), empty.copy())
    idx, props = sps.find_peaks(y, prominence=min_prominence)
    if idx.size == 0:
        empty = np.empty(0)
        return PeakList(empty, empty.copy(), empty.copy())
    widths_samples = sps.peak_widths(y, idx, rel_height=0.5,
                                     prominence_data=(props["prominences"],
                                                      props["left_bases"],
                                                      props["right_bases"]))[0]
    step = float(np.median(np.diff(h)))
    positions, amplitudes = zip(*(_parabolic_refine(h, y, i) for i in idx))
    return PeakList(np.asarray(positions), np.asarray(amplitudes),
                    widths_samples * step)


def _subgroup_partition(n_peaks: int, splittings: np.ndarray) -> list[tuple[int, int]]:
    """Partition peaks into consecutive subgroups of four.

    The phase offset is chosen to minimize the summed within-quadruple
    splitting variance; with fewer than two full quadruples the whole list
    is one group.
    """
    if n_peaks < 2 * SUBGROUP_SIZE:
        return [(0, n_peaks)]
    best_offset, best_cost = 0, math.inf
    for offset in range(SUBGROUP_SIZE):
        cost, blocks = 0.0, 0
        start = offset
        while start + SUBGROUP_SIZE <= n_peaks:
            inner = splittings[start:start + SUBGROUP_SIZE - 1]
            cost += float(np.var(inner))
            blocks += 1
            start += SUBGROUP_SIZE
        if blocks and cost / blocks < best_cost:
            best_cost, best_offset = cost / blocks, offset
    ranges: list[tuple[int, int]] = []
    if best_offset:
        ranges.append((0, best_offset))
    start = best_offset
    while start + SUBGROUP_SIZE <= n_peaks:
        ranges.append((start, start + SUBGROUP_SIZE))
        start += SUBGROUP_SIZE
    if start < n_peaks:
        ranges.append((start, n_peaks))
    return ranges


def splitting_stats(peaks: PeakList) -> SplittingStats:
    """Consecutive splittings with mean, RMS deviation, index-trend fits and
    the four-line subgroup partition. Needs at least two peaks; the fits
    need at least three."""
    if len(peaks) < 2:
        raise ValueError("need at least 2 peaks for splitting statistics")
    splittings = np.diff(peaks.positions)
    mean = float(splittings.mean())
    deviation = float(np.sqrt(np.mean((splittings - mean) ** 2)))
    linear = polynomial = None
    if len(peaks) >= 3:
        index = np.arange(splittings.size, dtype=float)
        slope, intercept = np.polyfit(index, splittings, 1)
        linear = (float(slope), float(intercept))
        degree = min(4, splittings.size - 1)
        polynomial = np.polyfit(index, splittings, degree)
    return SplittingStats(
        splittings=splittings,
        mean=mean,
        mean_square_deviation=deviation,
        linear_fit=linear,
        polynomial_fit=polynomial,
        subgroup_partition=_subgroup_partition(len(peaks), splittings),
    )


def _gaussian(h, amplitude, center, sigma):
    return amplitude * np.exp(-0.5 * ((h - center) / sigma) ** 2)


FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


def fit_envelope(peaks: PeakList) -> EnvelopeFit:
    """Nonlinear least squares of peak amplitudes against a Gaussian
    envelope; needs at least five peaks.

    Raises :class:`FitError` when the optimizer fails or the fitted width
    degenerates (flat amplitude distribution).
    """
    if len(peaks) < 5:
        raise ValueError("need at least 5 peaks for an envelope fit")
    h, a = peaks.positions, peaks.amplitudes
    span = float(h[-1] - h[0])
    weights = np.clip(a, 0.0, None) + 1e-30
    center0 = float(np.average(h, weights=weights))
    sigma0 = float(np.sqrt(np.average((h - center0) ** 2, weights=weights)))
    sigma0 = max(sigma0, 1e-6 * max(span, 1.0))
    try:
        popt, _ = curve_fit(_gaussian, h, a,
                            p0=(float(a.max()), center0, sigma0),
                            maxfev=5000)
    except RuntimeError as exc:
        residual = a - a.mean()
        raise FitError(f"envelope fit did not converge "
                       f"(residual rms {np.sqrt(np.mean(residual**2)):.3g})") from exc
    amplitude, center, sigma = float(popt[0]), float(popt[1]), abs(float(popt[2]))
    if sigma > 10.0 * max(span, 1e-30):
        raise FitError(f"degenerate envelope: fitted width {sigma:.3g} G far "
                       f"exceeds the peak span {span:.3g} G")
    residual = a - _gaussian(h, *popt)
    fwhm = FWHM_PER_SIGMA * sigma
    mean_splitting = float(np.diff(peaks.positions).mean())
    return EnvelopeFit(
        center=center,
        width_deltaH=fwhm,
        amplitude=amplitude,
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
        gaussian_sigma=sigma,
        n_oscillations=fwhm / mean_splitting,
    )


def envelope_width_from_splitting(mean_splitting: float,
                                  n_oscillations: float) -> float:
    """Envelope width as (oscillations under the envelope) x (mean
    splitting), the convention the frequency extraction uses."""
    return mean_splitting * n_oscillations


def extract_rabi_frequency(envelope, g_value: float,
                           n_oscillations: float) -> float:
    """Oscillation frequency in MHz from the envelope width (gauss):
    1.39961 x deltaH x g x n."""
    width = envelope.width_deltaH if isinstance(envelope, EnvelopeFit) else float(envelope)
    if width <= 0 or g_value <= 0 or n_oscillations <= 0:
        raise ValueError("envelope width, g-value and oscillation count must be positive")
    return ZEEMAN_MHZ_PER_GAUSS * width * g_value * n_oscillations


def g_factor(microwave_freq_mhz: float, resonance_field_gauss: float) -> float:
    """Zeeman g-value from the microwave frequency (MHz) and resonance field
    (gauss)."""
    if microwave_freq_mhz <= 0 or resonance_field_gauss <= 0:
        raise ValueError("frequency and field must be positive")
    return microwave_freq_mhz / (ZEEMAN_MHZ_PER_GAUSS * resonance_field_gauss)


def asymmetry_ratio(spectrum: Spectrum) -> float:
    """Wing asymmetry A/B of a derivative-shaped line.

    A is the positive low-field extremum, B the magnitude of the negative
    wing on the high-field side of it; invariant under positive scaling of
    the trace.
    """
    spec = spectrum.ascending()
    y = spec.amplitude
    i_max = int(np.argmax(y))
    if y[i_max] <= 0:
        raise ShapeError("trace lacks a positive extremum")
    high_side = y[i_max + 1:]
    if high_side.size == 0 or high_side.min() >= 0:
        raise ShapeError("trace lacks a negative high-field wing")
    return float(y[i_max] / abs(high_side.min()))


def _tanh_step(x, y0, y1, x_i, w):
    return y1 + 0.5 * (y0 - y1) * (1.0 - np.tanh((x - x_i) / w))


def tanh_inflection_fit(x_values, y_values) -> TanhStepFit:
    """Fit a tanh step through (x, y) data spanning both plateaus.

    Returns plateau levels, the inflection position and the step width;
    raises :class:`FitError` on non-convergence or when the fitted width is
    wider than the data span (no resolvable step).
    """
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if x.size < 6:
        raise ValueError("need at least 6 points spanning both plateaus")
    order = np.argsort(x)
    x, y = x[order], y[order]
    span = float(x[-1] - x[0])
    y0_guess, y1_guess = float(np.mean(y[:2])), float(np.mean(y[-2:]))
    mid = 0.5 * (y0_guess + y1_guess)
    crossings = np.nonzero(np.diff(np.sign(y - mid)))[0]
    xi_guess = float(x[crossings[0]]) if crossings.size else float(np.median(x))
    try:
        popt, _ = curve_fit(_tanh_step, x, y,
                            p0=(y0_guess, y1_guess, xi_guess, span / 10.0),
                            maxfev=5000)
    except RuntimeError as exc:
        raise FitError("tanh step fit did not converge") from exc
    y0, y1, x_i, w = (float(v) for v in popt)
    w = abs(w)
    if w > span:
        raise FitError(f"no resolvable step: fitted width {w:.3g} exceeds the "
                       f"data span {span:.3g}")
    return TanhStepFit(plateau_start=y0, plateau_end=y1, inflection=x_i, width=w)


def lifetime_from_inflection(h_inflection: float, g_value: float) -> float:
    """Coherent-state lifetime (s) as the reciprocal of the inflection field
    read in linear frequency units: 1 / (1.39961e6 Hz/G x g x H_i)."""
    if h_inflection <= 0 or g_value <= 0:
        raise ValueError("inflection field and g-value must be positive")
    return 1.0 / (ZEEMAN_MHZ_PER_GAUSS * 1.0e6 * g_value * h_inflection)


def detect_steps(x_values, y_values, sensitivity: float = 0.2,
                 equidistance_tol: float = 0.15) -> StepReport:
    """Change-point detection on the local slope.

    Steps are slope-magnitude peaks with prominence at least ``sensitivity``
    times the largest slope. The equidistance verdict grows a leading run of
    gaps while each stays within ``equidistance_tol`` (fractional) of the
    running mean; deviations of the remaining gaps from that mean are
    reported. An empty result is valid.
    """
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if x.size < 10:
        raise ValueError("need at least 10 points for step detection")
    order = np.argsort(x)
    x, y = x[order], y[order]
    window = max(3, x.size // 200) | 1
    kernel = np.ones(window) / window
    smooth = np.convolve(y, kernel, mode="same")
    slope = np.abs(np.gradient(smooth, x))
    top = float(slope.max())
    if top <= 0:
        empty = np.empty(0)
        return StepReport(empty, empty.copy(), 0, math.nan, empty.copy())
    idx, _ = sps.find_peaks(slope, prominence=sensitivity * top)
    if idx.size == 0:
        empty = np.empty(0)
        return StepReport(empty, empty.copy(), 0, math.nan, empty.copy())
    positions = np.asarray([_parabolic_refine(x, slope, i)[0] for i in idx])
    gaps = np.diff(positions)
    if gaps.size == 0:
        return StepReport(positions, gaps, 1, math.nan, np.empty(0))
    run = [float(gaps[0])]
    for gap in gaps[1:]:
        mean = float(np.mean(run))
        if abs(gap - mean) <= equidistance_tol * mean:
            run.append(float(gap))
        else:
            break
    mean_gap = float(np.mean(run))
    trailing = np.abs(gaps[len(run):] - mean_gap)
    return StepReport(positions=positions, gaps=gaps,
                      equidistant_steps=len(run) + 1, mean_gap=mean_gap,
                      trailing_deviations=trailing)


def relaxation_time(delta_nu: float) -> float:
    """Relaxation time from a linewidth in frequency units (Hz in, s out)."""
    return relaxation_time_from_linewidth(delta_nu)
