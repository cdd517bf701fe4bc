"""Dip/peak extraction from transmission spectra.

Dips are local minima of T with topographic prominence above a
threshold and depth 1 - T above a floor; locations and values are
refined by a parabola through the three nearest grid points.  The
highest-energy qualifying dip defines omega_max; the EIT-like local
maximum nearest zero detuning defines t_peak.  The grid is assumed fine
enough to resolve the features of interest (steps of 0.1 in the search
window are used throughout the tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

__all__ = [
    "Dip",
    "LinearFit",
    "DipReport",
    "find_dips",
    "locate_omega_max",
    "eit_metrics",
    "mean_dip_spacing",
    "fit_omega_vs_n",
    "analyze_spectrum",
    "dominant_beat_frequency",
]

DEFAULT_PROMINENCE = 0.02
DEFAULT_MIN_DEPTH = 0.05


@dataclass(frozen=True)
class Dip:
    location: float      # refined detuning of the minimum
    t_value: float       # refined transmission at the minimum
    prominence: float    # topographic prominence (offset free)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class DipReport:
    """Everything extracted from one spectrum (fit only for sweeps)."""

    dips: tuple
    omega_max: float | None      # None means "no qualifying dip"
    t_dip: float | None
    t_peak: float | None
    spacing: float | None        # None when fewer than 2 dips in the window
    spacing_window: tuple | None
    fit: LinearFit | None = None


def _parabolic_refine(x: np.ndarray, y: np.ndarray, i: int):
    """Vertex of the parabola through points i-1, i, i+1 (minimum or maximum)."""
    if i == 0 or i == len(x) - 1:
        return float(x[i]), float(y[i])
    coeffs = np.polyfit(x[i - 1:i + 2] - x[i], y[i - 1:i + 2], 2)
    a, b, c = coeffs
    if a == 0:
        return float(x[i]), float(y[i])
    dx = -b / (2 * a)
    half_step = 0.5 * max(x[i + 1] - x[i], x[i] - x[i - 1])
    dx = float(np.clip(dx, -half_step, half_step))
    return float(x[i] + dx), float(a * dx**2 + b * dx + c)


def find_dips(delta: np.ndarray, t: np.ndarray,
              prominence: float = DEFAULT_PROMINENCE,
              min_depth: float = DEFAULT_MIN_DEPTH) -> list:
    """Qualifying transmission dips, sorted by detuning."""
    delta = np.asarray(delta, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if delta.size == 0 or t.size == 0:
        raise ValueError("empty spectrum")
    if delta.shape != t.shape:
        raise ValueError("delta and T must have the same shape")
    if delta.size < 3:
        return []
    idx, props = scipy.signal.find_peaks(-t, prominence=prominence)
    dips = []
    for i, prom in zip(idx, props["prominences"]):
        loc, val = _parabolic_refine(delta, t, int(i))
        if 1.0 - val >= min_depth:
            dips.append(Dip(location=loc, t_value=val, prominence=float(prom)))
    return dips


def locate_omega_max(dips, min_depth: float = DEFAULT_MIN_DEPTH):
    """Largest-detuning dip deeper than min_depth, or None ("no dip").

    Ties break toward larger detuning.  Accepts a DipReport or a dip list.
    """
    if isinstance(dips, DipReport):
        dips = dips.dips
    qualifying = [d for d in dips if 1.0 - d.t_value >= min_depth]
    if not qualifying:
        return None
    return max(d.location for d in qualifying)


def eit_metrics(delta: np.ndarray, t: np.ndarray,
                prominence: float = DEFAULT_PROMINENCE,
                min_depth: float = DEFAULT_MIN_DEPTH):
    """(t_peak, t_dip): transparency maximum nearest zero and depth at omega_max.

    The transparency peak must be a prominent local maximum (same
    prominence threshold as the dips) and must not sit beyond an
    absorption dip: a maximum separated from zero detuning by a
    qualifying dip is a recovery shoulder, not the peak.  When no local
    maximum survives both tests, the peak has been destroyed and the
    transmission at zero detuning is reported instead.  t_dip is None
    when no qualifying dip exists (the no-dip outcome propagates rather
    than raising).
    """
    delta = np.asarray(delta, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    dips = find_dips(delta, t, prominence=prominence, min_depth=min_depth)
    dip_locs = [d.location for d in dips]
    peaks, _ = scipy.signal.find_peaks(t, prominence=prominence)
    t_peak = None
    for i in peaks[np.argsort(np.abs(delta[peaks]))]:
        loc = delta[i]
        lo, hi = min(0.0, loc), max(0.0, loc)
        if any(lo < dl < hi for dl in dip_locs):
            continue
        _loc, t_peak = _parabolic_refine(delta, t, int(i))
        break
    if t_peak is None:
        # flat spectrum or destroyed peak: report the value at zero detuning
        t_peak = float(t[np.argmin(np.abs(delta))])
    omega = locate_omega_max(dips, min_depth=min_depth)
    if omega is None:
        return t_peak, None
    t_dip = next(d.t_value for d in dips if d.location == omega)
    return t_peak, float(t_dip)


def mean_dip_spacing(dips, window):
    """Mean spacing of adjacent dips inside [window[0], window[1]].

    Returns None (undefined spacing) with fewer than two dips inside.
    """
    if isinstance(dips, DipReport):
        dips = dips.dips
    lo, hi = window
    locs = sorted(d.location for d in dips if lo <= d.location <= hi)
    if len(locs) < 2:
        return None
    return float(np.mean(np.diff(locs)))


def fit_omega_vs_n(points) -> LinearFit:
    """Least-squares line through (n, omega_max) points, with r^2."""
    pts = [(float(n), float(w)) for n, w in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissa: all n values identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean())**2))
    if ss_tot == 0:
        r2 = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return LinearFit(slope=float(slope), intercept=float(intercept),
                     r_squared=r2)


def analyze_spectrum(delta: np.ndarray, t: np.ndarray,
                     prominence: float = DEFAULT_PROMINENCE,
                     min_depth: float = DEFAULT_MIN_DEPTH,
                     spacing_window=None) -> DipReport:
    """One-stop report: dips, omega_max, EIT metrics, cluster spacing."""
    dips = find_dips(delta, t, prominence=prominence, min_depth=min_depth)
    omega = locate_omega_max(dips, min_depth=min_depth)
    t_peak, t_dip = eit_metrics(delta, t, prominence=prominence,
                                min_depth=min_depth)
    spacing = None
    if spacing_window is not None:
        spacing = mean_dip_spacing(dips, spacing_window)
        spacing_window = (float(spacing_window[0]), float(spacing_window[1]))
    return DipReport(dips=tuple(dips), omega_max=omega, t_dip=t_dip,
                     t_peak=t_peak, spacing=spacing,
                     spacing_window=spacing_window)


def dominant_beat_frequency(tau: np.ndarray, g2: np.ndarray,
                            min_frequency: float = 0.0) -> float:
    """Angular frequency of the strongest oscillation in g2(tau).

    The relaxation of g2 toward 1 is an aperiodic envelope whose Fourier
    magnitude decays monotonically, so genuine beats are identified as
    local maxima of the magnitude spectrum; the strongest local peak at
    or above ``min_frequency`` (angular) wins, with a raw-argmax
    fallback when no interior peak exists.  The tau grid must be
    uniform; the peak is refined by a parabola on neighboring bins.
    """
    tau = np.asarray(tau, dtype=np.float64)
    g2 = np.asarray(g2, dtype=np.float64)
    if tau.size < 8:
        raise ValueError("need at least 8 samples to estimate a beat frequency")
    steps = np.diff(tau)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("tau grid must be uniform")
    spectrum = np.abs(np.fft.rfft(g2 - g2.mean()))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(tau.size, d=steps[0])
    k_min = max(1, int(np.searchsorted(freqs, min_frequency)))
    if k_min >= spectrum.size:
        raise ValueError("min_frequency is beyond the Nyquist limit")
    peaks, _ = scipy.signal.find_peaks(spectrum)
    peaks = peaks[peaks >= k_min]
    if peaks.size:
        k = int(peaks[np.argmax(spectrum[peaks])])
    else:
        k = k_min + int(np.argmax(spectrum[k_min:]))
    if 0 < k < spectrum.size - 1:
        y0, y1, y2 = spectrum[k - 1:k + 2]
        denom = y0 - 2 * y1 + y2
        shift = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    return float(freqs[k] + shift * (freqs[1] - freqs[0]))
