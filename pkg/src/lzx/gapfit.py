"""Effective-gap extraction from short-time LZ decay curves.

The short-time excited-state probability decays as p_e = exp(-kappa*t_lz);
an adaptive window grows from 30 ns until the fit's mean-square residual in
probability space would exceed 0.01, and the decay constant converts to an
effective gap through the LZ exponent kappa = pi^2 delta^2 / eps_span (in
h-based units).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .units import persistent_current_energy

INITIAL_WINDOW_NS = 30.0
MSE_THRESHOLD = 0.01
P_FLOOR = 1e-3


@dataclass(frozen=True)
class DecaySeries:
    """(t_lz, p_e) samples sorted by sweep time."""

    t_lz: np.ndarray
    p_e: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_lz, dtype=float)
        p = np.asarray(self.p_e, dtype=float)
        if t.ndim != 1 or t.shape != p.shape:
            raise ValueError("t_lz and p_e must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("t_lz must be strictly increasing")
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("p_e must lie in [0, 1]")
        object.__setattr__(self, "t_lz", t)
        object.__setattr__(self, "p_e", p)


@dataclass(frozen=True)
class GapFitResult:
    """Decay constant (1/ns), effective gap (GHz), and fit diagnostics."""

    kappa: float
    delta_lz: float
    kappa_stderr: float
    window_max: float
    mse: float


def _fit_window(t, p):
    """Weighted single-parameter fit of log p = -kappa t.

    Weights p^2 undo the variance distortion of the log transform; points
    below P_FLOOR are excluded.  Returns (kappa, stderr, mse) with the MSE
    taken in linear probability space over the full window.
    """
    keep = p >= P_FLOOR
    tk = t[keep]
    pk = p[keep]
    if tk.size < 2:
        raise ValueError("too few points above the probability floor to fit")
    w = pk**2
    logp = np.log(pk)
    denom = float(np.sum(w * tk * tk))
    kappa = -float(np.sum(w * tk * logp)) / denom
    resid_log = logp + kappa * tk
    dof = max(tk.size - 1, 1)
    var_kappa = float(np.sum(w * resid_log**2)) / dof / denom
    stderr = math.sqrt(var_kappa)
    mse = float(np.mean((p - np.exp(-kappa * t)) ** 2))
    return kappa, stderr, mse


def fit_exponential_adaptive(series):
    """Grow the fit window from 30 ns until the MSE would exceed 0.01.

    Returns (kappa, stderr, window_max, mse) for the last window whose fit
    keeps MSE <= 0.01.  Raises ValueError if fewer than 3 points lie within
    the initial window or the initial fit already violates the threshold.
    """
    t = series.t_lz
    p = series.p_e
    n0 = int(np.searchsorted(t, INITIAL_WINDOW_NS, side="right"))
    if n0 < 3:
        raise ValueError(
            f"need at least 3 points with t_lz <= {INITIAL_WINDOW_NS} ns, got {n0}"
        )
    best = None
    for n in range(n0, t.size + 1):
        kappa, stderr, mse = _fit_window(t[:n], p[:n])
        if mse > MSE_THRESHOLD:
            break
        best = (kappa, stderr, float(t[n - 1]), mse)
    if best is None:
        raise ValueError(
            f"initial {INITIAL_WINDOW_NS} ns window already exceeds "
            f"MSE {MSE_THRESHOLD}"
        )
    return best


def decay_to_gap(kappa, i_p, flux_span):
    """Effective gap delta_lz in GHz from a decay constant in 1/ns.

    Inverts p_e = exp(-pi^2 delta^2 t / eps_span) with eps_span the full
    diabatic energy span of the sweep.
    """
    if kappa <= 0.0 or i_p <= 0.0 or flux_span <= 0.0:
        raise ValueError("kappa, i_p and flux_span must all be positive")
    eps_span = persistent_current_energy(i_p, flux_span)
    return math.sqrt(kappa * eps_span) / math.pi


def fit_gap(series, i_p, flux_span):
    """Full pipeline: adaptive exponential fit plus gap conversion."""
    kappa, stderr, window_max, mse = fit_exponential_adaptive(series)
    return GapFitResult(
        kappa=kappa,
        delta_lz=decay_to_gap(kappa, i_p, flux_span),
        kappa_stderr=stderr,
        window_max=window_max,
        mse=mse,
    )


def load_series(path):
    """Read a DecaySeries from delimited text with header t_lz_ns,p_e."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "t_lz_ns,p_e":
        raise ValueError("series file must start with header 't_lz_ns,p_e'")
    t = []
    p = []
    for ln in lines[1:]:
        a, b = ln.split(",")
        t.append(float(a))
        p.append(float(b))
    return DecaySeries(t_lz=np.array(t), p_e=np.array(p))
