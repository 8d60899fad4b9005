"""Envelope minima extraction and logarithmic-growth fitting.

The fit model is y = a + c ln t, applied to the local minima of the
disorder-averaged rescaled entropy L S(t).  Natural log throughout,
consistent with entropies in nats.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _moving_median(values: np.ndarray, window: int) -> np.ndarray:
    if window % 2 != 1:
        raise ValueError("smoothing window must be odd")
    if window == 1:
        return values
    half = window // 2
    padded = np.pad(values, half, mode="edge")
    out = np.empty_like(values)
    for i in range(values.size):
        out[i] = np.median(padded[i : i + window])
    return out


def local_minima(
    times: np.ndarray, values: np.ndarray, window: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Interior strict local minima of a series, endpoints excluded.

    ``window`` > 1 applies a moving-median smoothing before detection
    (the minima values returned are the smoothed ones).
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be matching 1-d arrays")
    if times.size < 5:
        raise ValueError("need at least 5 points for minima detection")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    smooth = _moving_median(values, window)
    inner = smooth[1:-1]
    mask = (inner < smooth[:-2]) & (inner < smooth[2:])
    idx = np.nonzero(mask)[0] + 1
    return times[idx], smooth[idx]


@dataclass(frozen=True)
class LogFit:
    """Ordinary least squares of y against ln t."""

    intercept: float
    slope: float
    residual_rms: float
    pearson_r: float
    n_points: int
    t: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "slope": self.slope,
            "residual_rms": self.residual_rms,
            "pearson_r": self.pearson_r,
            "n_points": self.n_points,
            "points": [[float(a), float(b)] for a, b in zip(self.t, self.y)],
        }


def fit_log_growth(
    times: np.ndarray,
    values: np.ndarray,
    t_min: float = 1.0,
    t_max: float = np.inf,
) -> LogFit | None:
    """Fit y = a + c ln t over points with t_min < t <= t_max.

    Returns None when fewer than 3 points survive the cutoff; a fabricated
    slope would be worse than no fit.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    keep = (times > t_min) & (times <= t_max)
    t = times[keep]
    y = values[keep]
    if t.size < 3:
        return None
    x = np.log(t)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(residuals**2)))
    sy = y.std()
    pearson = float(np.corrcoef(x, y)[0, 1]) if sy > 0 else 0.0
    return LogFit(
        intercept=float(intercept),
        slope=float(slope),
        residual_rms=rms,
        pearson_r=pearson,
        n_points=int(t.size),
        t=t,
        y=y,
    )
