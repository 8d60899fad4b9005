"""Power spectra of entropy time series and the two-spin analytic oracle.

Angular-frequency convention throughout: omega_k = 2 pi k / (N dt) up to
the Nyquist frequency pi/dt.  The series mean is subtracted before the
transform so the DC bin vanishes and oscillatory peaks dominate; no window
function is applied (rectangular convention behind all bin tolerances).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, pi

import numpy as np
from scipy.special import xlogy

MIN_SAMPLES = 16


@dataclass(frozen=True)
class PowerSpectrum:
    """Magnitude |F(omega)| of the DFT of a mean-subtracted uniform series."""

    omega: np.ndarray
    power: np.ndarray
    n_samples: int
    dt: float

    @property
    def bin_width(self) -> float:
        return 2.0 * pi / (self.n_samples * self.dt)


@dataclass(frozen=True)
class Peak:
    omega: float
    height: float
    index: int


@dataclass(frozen=True)
class PeakList:
    """Detected spectral peaks, ascending in omega."""

    peaks: tuple[Peak, ...]
    rel_threshold: float
    bin_width: float

    def __len__(self):
        return len(self.peaks)

    def __getitem__(self, i):
        return self.peaks[i]

    def tallest(self, n: int) -> list[Peak]:
        """The n highest peaks, returned in ascending frequency order."""
        by_height = sorted(self.peaks, key=lambda p: p.height, reverse=True)[:n]
        return sorted(by_height, key=lambda p: p.omega)


def power_spectrum(values: np.ndarray, dt: float) -> PowerSpectrum:
    """DFT magnitude of a uniformly sampled series after mean subtraction."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < MIN_SAMPLES:
        raise ValueError(f"need a 1-d series of at least {MIN_SAMPLES} samples")
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = values.size
    coeff = np.fft.rfft(values - values.mean())
    omega = 2.0 * pi * np.arange(coeff.size) / (n * dt)
    return PowerSpectrum(omega=omega, power=np.abs(coeff), n_samples=n, dt=dt)


def spectrum_from_series(times: np.ndarray, values: np.ndarray) -> PowerSpectrum:
    """Like :func:`power_spectrum` but validates grid uniformity first."""
    times = np.asarray(times, dtype=np.float64)
    steps = np.diff(times)
    if steps.size == 0 or steps.min() <= 0:
        raise ValueError("time grid must be strictly increasing")
    dt = steps.mean()
    if np.max(np.abs(steps - dt)) > 1e-9 * max(dt, 1.0):
        raise ValueError("time grid is not uniform")
    return power_spectrum(values, dt)


def detect_peaks(spectrum: PowerSpectrum, rel_threshold: float) -> PeakList:
    """Strict local maxima above ``rel_threshold`` times the global maximum.

    The omega = 0 bin is excluded both from the maxima and from the global
    maximum; peak positions are refined by parabolic interpolation over
    three bins.
    """
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError("rel_threshold must be in (0, 1)")
    p = spectrum.power
    if p.size < 3:
        raise ValueError("spectrum too short for peak detection")
    top = p[1:].max()
    if top == 0.0:
        return PeakList(peaks=(), rel_threshold=rel_threshold, bin_width=spectrum.bin_width)
    floor = rel_threshold * top
    inner = p[1:-1]
    local = (inner > p[:-2]) & (inner > p[2:]) & (inner >= floor)
    peaks = []
    for k in np.nonzero(local)[0] + 1:
        if k == 1:
            continue  # omega = 0 is not a valid left neighbour
        a, b, c = p[k - 1], p[k], p[k + 1]
        denom = a - 2.0 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0.0 else 0.0
        peaks.append(
            Peak(
                omega=float(spectrum.omega[k] + shift * spectrum.bin_width),
                height=float(b - 0.25 * (a - c) * shift),
                index=int(k),
            )
        )
    return PeakList(peaks=tuple(peaks), rel_threshold=rel_threshold, bin_width=spectrum.bin_width)


def two_spin_entropy(v_int: float, t) -> np.ndarray | float:
    """Closed-form single-site entropy of the two-spin dephasing model.

    The reduced eigenvalues are (1 +- cos theta)/2 with theta = 2|E_C| t
    and E_C = -V.  The entropy is even in cos theta, so its smallest period
    is pi in theta, i.e. T = pi / (2|V|) in time, and its power spectrum
    sits on the even harmonics of the coherence frequency: omega_n =
    4 n |E_C|.
    """
    theta = 2.0 * abs(v_int) * np.asarray(t, dtype=np.float64)
    lam_p = (1.0 + np.cos(theta)) / 2.0
    lam_m = 1.0 - lam_p
    s = -(xlogy(lam_p, lam_p) + xlogy(lam_m, lam_m))
    return float(s) if np.isscalar(t) else s


def cos_power_comb(n: int) -> list[tuple[int, float]]:
    """Delta-comb weights of the Fourier transform of (cos theta)^n.

    Returns (frequency offset, weight) pairs with offsets n - 2k and weights
    binom(n, k)/2^n, ascending in offset.
    """
    if not 1 <= n <= 32:
        raise ValueError("power must be in [1, 32]")
    comb_pairs = [(n - 2 * k, comb(n, k) / 2.0**n) for k in range(n + 1)]
    return sorted(comb_pairs)
