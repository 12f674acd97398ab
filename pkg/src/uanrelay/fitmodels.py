"""Distance power-law models and surface fits.

The link budget's bandwidth and transmit power are, to high accuracy, power
laws of distance: B(l) = omega * l^-lam kHz and P_T(l) = psi * l^gamma W.
This module fits those laws in the log domain, validates the fitted constants
against their expected ranges, and fits bivariate polynomial surfaces of the
open distance over (receive power, target SNR).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .acoustics import Environment
from .errors import FitRankError, ValidationError
from .linkbudget import (
    ACOUSTIC_TO_ELECTRIC,
    DEFAULT_WINDOW,
    band_integrals,
    effective_band,
)

__all__ = [
    "PSI_TREND_SLOPE",
    "PSI_TREND_INTERCEPT",
    "PSI_TREND_TOL",
    "FitModel",
    "PolySurface",
    "GoFReport",
    "default_fit_distances",
    "fit_bandwidth_model",
    "fit_power_model",
    "fit_channel_models",
    "fit_channel_model",
    "fit_psi_trend",
    "validate_ranges",
    "fit_open_distance_surface",
    "eval_surface",
    "load_reference_surface",
]

PSI_TREND_SLOPE = 0.1
"""Reference slope of log10(psi) versus target SNR in dB."""

PSI_TREND_INTERCEPT = -4.9040
"""Reference intercept of the log10(psi) trend line."""

PSI_TREND_TOL = 0.05
"""Allowed |log10(psi) - trend| offset in validate_ranges."""


@dataclass(frozen=True)
class FitModel:
    """Fitted power-law channel model at one target SNR.

    Attributes:
        omega: kHz scale of the bandwidth law B(l) = omega * l^-lam.
        lam: bandwidth exponent.
        delta: acoustic scale of P_t(l) = delta * l^gamma.
        psi: electrical Watt scale of P_T(l) = psi * l^gamma.
        gamma: power exponent.
        snr0_db: target SNR in dB the model was fitted at.

    delta and psi are consistent for the fitting environment:
    psi = delta * ACOUSTIC_TO_ELECTRIC / eta. Exponent ranges are checked by
    validate_ranges, not here, so out-of-range models can be constructed and
    then reported.
    """

    omega: float
    lam: float
    delta: float
    psi: float
    gamma: float
    snr0_db: float

    def __post_init__(self):
        for name in ("omega", "delta", "psi"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValidationError(f"{name} must be positive and finite, got {value}")
        for name in ("lam", "gamma", "snr0_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    def bandwidth_khz(self, l):
        """Fitted bandwidth B(l) in kHz."""
        return self.omega * np.power(l, -self.lam)

    def transmit_power_w(self, l):
        """Fitted electrical transmit power P_T(l) in Watts."""
        return self.psi * np.power(l, self.gamma)

    def acoustic_power(self, l):
        """Fitted acoustic transmit power P_t(l)."""
        return self.delta * np.power(l, self.gamma)


@dataclass(frozen=True)
class PolySurface:
    """Bivariate polynomial z(x, y) = sum f_ij x^i y^j over i+j <= max(m, n).

    Domain convention: x = log10 of receive power in W, y = target SNR in dB,
    z = log10 of the open distance in km. coeffs is an (m+1) x (n+1) matrix
    with structural zeros where i + j > max(m, n).
    """

    m: int
    n: int
    coeffs: tuple

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValidationError("surface degrees must be at least 1")
        if len(self.coeffs) != self.m + 1:
            raise ValidationError("coefficient matrix must have m + 1 rows")
        top = max(self.m, self.n)
        for i, row in enumerate(self.coeffs):
            if len(row) != self.n + 1:
                raise ValidationError("coefficient matrix must have n + 1 columns")
            for j, f_ij in enumerate(row):
                if not math.isfinite(f_ij):
                    raise ValidationError(f"coefficient ({i}, {j}) is not finite")
                if i + j > top and f_ij != 0.0:
                    raise ValidationError(
                        f"coefficient ({i}, {j}) violates the triangular layout"
                    )


@dataclass(frozen=True)
class GoFReport:
    """Goodness-of-fit metrics, computed in the log domain of the fit."""

    sse: float
    rmse: float
    r2: float
    adj_r2: float

    def __post_init__(self):
        if self.sse < 0 or self.rmse < 0:
            raise ValidationError("sse and rmse must be non-negative")
        if self.r2 > 1.0 + 1e-12 or self.adj_r2 > self.r2 + 1e-12:
            raise ValidationError("inconsistent r2 / adj_r2")


def default_fit_distances():
    """Default distance grid for channel fits, in km.

    Two log-spaced bands, denser at short range where the log-log curvature
    of the channel is strongest. 60 strictly increasing points inside
    [1, 100] km, calibrated so the fitted constants track the exact model
    over the whole planning range.
    """
    return np.concatenate(
        [
            np.geomspace(2.25, 9.0, 22, endpoint=False),
            np.geomspace(9.0, 98.0, 38),
        ]
    )


def _as_samples(samples):
    arr = np.asarray(list(samples), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValidationError("need at least two (l, value) samples")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValidationError("samples must be positive and finite")
    if np.unique(arr[:, 0]).size < 2:
        raise FitRankError("samples collapse to a single distance")
    return arr


def fit_bandwidth_model(samples):
    """Fit B(l) = omega * l^-lam to (l, bandwidth_khz) samples.

    Returns:
        (omega, lam) from the least-squares line of log10 B vs log10 l.
    """
    arr = _as_samples(samples)
    slope, intercept = np.polyfit(np.log10(arr[:, 0]), np.log10(arr[:, 1]), 1)
    return float(10.0 ** intercept), float(-slope)


def fit_power_model(samples, snr0_db, env: Environment):
    """Fit P_T(l) = psi * l^gamma to (l, electrical power W) samples.

    Returns:
        (psi, gamma, delta) with delta back-computed for env's efficiency.
    """
    arr = _as_samples(samples)
    slope, intercept = np.polyfit(np.log10(arr[:, 0]), np.log10(arr[:, 1]), 1)
    psi = float(10.0 ** intercept)
    delta = psi * env.eta / ACOUSTIC_TO_ELECTRIC
    return psi, float(slope), delta


def fit_channel_models(snr0_db_values, env: Environment, distances=None, window=DEFAULT_WINDOW):
    """Fit one FitModel per target SNR from link-budget data.

    The band and its integrals are computed once per distance and shared by
    every SNR, since the target SNR only scales the transmit power.

    Returns:
        list of FitModel in the order of snr0_db_values.
    """
    snrs = [float(s) for s in snr0_db_values]
    if not snrs:
        raise ValidationError("need at least one target SNR")
    ls = default_fit_distances() if distances is None else np.asarray(distances, dtype=float)
    if ls.ndim != 1 or ls.size < 2:
        raise ValidationError("need at least two fit distances")

    widths = np.empty(ls.size)
    base_power = np.empty(ls.size)
    for idx, l in enumerate(ls):
        band = effective_band(float(l), env, window)
        n_int, a_int = band_integrals(float(l), band, env)
        widths[idx] = band.width_khz
        base_power[idx] = (
            1e3 * band.width_khz * (n_int / a_int) * ACOUSTIC_TO_ELECTRIC / env.eta
        )

    omega, lam = fit_bandwidth_model(np.column_stack([ls, widths]))
    models = []
    for snr in snrs:
        powers = base_power * 10.0 ** (snr / 10.0)
        psi, gamma, delta = fit_power_model(np.column_stack([ls, powers]), snr, env)
        models.append(
            FitModel(omega=omega, lam=lam, delta=delta, psi=psi, gamma=gamma, snr0_db=snr)
        )
    return models


def fit_channel_model(snr0_db, env: Environment, distances=None, window=DEFAULT_WINDOW):
    """Fit a single FitModel at one target SNR."""
    return fit_channel_models([snr0_db], env, distances, window)[0]


def fit_psi_trend(models):
    """Least-squares line of log10(psi) versus target SNR in dB.

    Returns:
        (slope_per_db, intercept).
    """
    models = list(models)
    if len(models) < 2:
        raise ValidationError("need at least two models for the trend")
    snrs = np.asarray([m.snr0_db for m in models], dtype=float)
    if np.unique(snrs).size < 2:
        raise FitRankError("models collapse to a single target SNR")
    log_psi = np.log10([m.psi for m in models])
    slope, intercept = np.polyfit(snrs, log_psi, 1)
    return float(slope), float(intercept)


def validate_ranges(model: FitModel):
    """Check the fitted constants against their expected regions.

    Returns:
        list of violation strings, empty when the model is in range.
    """
    violations = []
    if not model.omega > 0.0:
        violations.append(f"Ω: ω > 0 (got ω = {model.omega})")
    trend = PSI_TREND_SLOPE * model.snr0_db + PSI_TREND_INTERCEPT
    offset = math.log10(model.psi) - trend
    if abs(offset) > PSI_TREND_TOL:
        violations.append(
            f"Ψ: log10(ψ) within {PSI_TREND_TOL} of "
            f"{PSI_TREND_SLOPE}·SNR0 + ({PSI_TREND_INTERCEPT}) "
            f"(got offset {offset:+.4f})"
        )
    if not 0.5 < model.lam < 0.6:
        violations.append(f"Λ: 0.5 < λ < 0.6 (got λ = {model.lam})")
    if not 2.1 < model.gamma < 2.3:
        violations.append(f"Γ: 2.1 < γ < 2.3 (got γ = {model.gamma})")
    return violations


def _triangular_terms(m, n):
    top = max(m, n)
    return [(i, j) for i in range(m + 1) for j in range(n + 1) if i + j <= top]


def fit_open_distance_surface(points, m, n):
    """Least-squares triangular polynomial fit of open-distance samples.

    Args:
        points: iterable of (x, y, z) with x = log10 receive power,
            y = target SNR in dB, z = log10 open distance in km.
        m, n: maximum degrees in x and y; monomials satisfy i+j <= max(m, n).

    Returns:
        (PolySurface, GoFReport) with goodness of fit on the z residuals.
    """
    if m < 1 or n < 1:
        raise ValidationError("surface degrees must be at least 1")
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError("points must be (x, y, z) triples")
    terms = _triangular_terms(m, n)
    if pts.shape[0] < len(terms):
        raise ValidationError(
            f"need at least {len(terms)} points for a ({m}, {n}) surface, got {pts.shape[0]}"
        )
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    design = np.column_stack([x**i * y**j for i, j in terms])
    coef, _, rank, _ = np.linalg.lstsq(design, z, rcond=None)
    if rank < len(terms):
        raise FitRankError(
            f"design matrix rank {rank} below the {len(terms)} triangular terms"
        )

    residuals = z - design @ coef
    sse = float(residuals @ residuals)
    n_pts = pts.shape[0]
    rmse = math.sqrt(sse / n_pts)
    sstot = float(np.sum((z - z.mean()) ** 2))
    if sstot > 0.0:
        r2 = 1.0 - sse / sstot
    else:
        r2 = 1.0 if sse <= 1e-30 else 0.0
    if n_pts > len(terms):
        adj_r2 = 1.0 - (1.0 - r2) * (n_pts - 1) / (n_pts - len(terms))
    else:
        adj_r2 = r2

    matrix = np.zeros((m + 1, n + 1))
    for (i, j), f_ij in zip(terms, coef):
        matrix[i, j] = f_ij
    surface = PolySurface(m=m, n=n, coeffs=tuple(tuple(row) for row in matrix))
    report = GoFReport(sse=sse, rmse=rmse, r2=r2, adj_r2=adj_r2)
    return surface, report


def eval_surface(surface: PolySurface, x, y):
    """Evaluate the surface at (x, y) by nested Horner recurrences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.zeros(np.broadcast(x, y).shape)
    for row in reversed(surface.coeffs):
        row_val = np.zeros_like(z)
        for f_ij in reversed(row):
            row_val = row_val * y + f_ij
        z = z * x + row_val
    return z if z.ndim else float(z)


def load_reference_surface():
    """Load the open-distance surface coefficients shipped with the package."""
    raw = resources.files("uanrelay").joinpath("data/surface_coeffs.json").read_text()
    doc = json.loads(raw)
    coeffs = tuple(
        tuple(0.0 if f_ij is None else float(f_ij) for f_ij in row)
        for row in doc["coeffs"]
    )
    return PolySurface(m=int(doc["m"]), n=int(doc["n"]), coeffs=coeffs)
