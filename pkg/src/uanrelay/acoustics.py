"""Underwater acoustic channel primitives.

Absorption, spreading loss, and ambient noise for a shallow-to-deep water
acoustic link, following the standard empirical formulas (Thorp absorption,
four-component ambient noise). Frequencies are in kHz, distances in km,
levels in dB. All functions are pure and accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "Environment",
    "absorption_db_per_km",
    "path_loss_db",
    "noise_components_db",
    "noise_psd_db",
    "attenuation_noise_product_db",
]


@dataclass(frozen=True)
class Environment:
    """Channel environment parameters.

    Attributes:
        k: spreading factor (1 cylindrical, 2 spherical, 1.5 practical).
        s: shipping activity factor in [0, 1].
        w: wind speed in m/s, non-negative.
        c: sound speed in m/s.
        eta: electrical-to-acoustic conversion efficiency in (0, 1].
    """

    k: float = 1.5
    s: float = 0.5
    w: float = 0.0
    c: float = 1500.0
    eta: float = 0.25

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValidationError(f"spreading factor k must be positive, got {self.k}")
        if not (math.isfinite(self.s) and 0.0 <= self.s <= 1.0):
            raise ValidationError(f"shipping factor s must lie in [0, 1], got {self.s}")
        if not (math.isfinite(self.w) and self.w >= 0.0):
            raise ValidationError(f"wind speed w must be non-negative, got {self.w}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"sound speed c must be positive, got {self.c}")
        if not (math.isfinite(self.eta) and 0.0 < self.eta <= 1.0):
            raise ValidationError(f"efficiency eta must lie in (0, 1], got {self.eta}")


def _check_positive(value, name):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValidationError(f"{name} must be positive and finite")


def absorption_db_per_km(f):
    """Thorp absorption coefficient in dB/km for frequency f in kHz."""
    _check_positive(f, "frequency")
    f = np.asarray(f, dtype=float)
    f2 = f * f
    a = 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
    return a if a.ndim else float(a)


def path_loss_db(l, f, env: Environment):
    """Acoustic path loss A(l, f) in dB.

    Spreading referenced to 1 m plus absorption over the full path:
    k * 10 log10(l * 1e3) + l * absorption(f), with l in km and f in kHz.
    """
    _check_positive(l, "distance")
    _check_positive(f, "frequency")
    l = np.asarray(l, dtype=float)
    loss = env.k * 10.0 * np.log10(l * 1e3) + l * np.asarray(absorption_db_per_km(f))
    return loss if loss.ndim else float(loss)


def noise_components_db(f, env: Environment):
    """Ambient noise components at f kHz, each in dB re uPa^2/Hz.

    Returns:
        dict with keys "turbulence", "shipping", "waves", "thermal".
    """
    _check_positive(f, "frequency")
    f = np.asarray(f, dtype=float)
    logf = np.log10(f)
    n_t = 17.0 - 30.0 * logf
    n_s = 40.0 + 20.0 * (env.s - 0.5) + 26.0 * logf - 60.0 * np.log10(f + 0.03)
    n_w = 50.0 + 7.5 * math.sqrt(env.w) + 20.0 * logf - 40.0 * np.log10(f + 0.4)
    n_th = -15.0 + 20.0 * logf
    if f.ndim == 0:
        return {
            "turbulence": float(n_t),
            "shipping": float(n_s),
            "waves": float(n_w),
            "thermal": float(n_th),
        }
    return {"turbulence": n_t, "shipping": n_s, "waves": n_w, "thermal": n_th}


def noise_psd_db(f, env: Environment):
    """Total ambient noise PSD N(f) in dB re uPa^2/Hz.

    The four components are summed in linear power and converted back to dB.
    """
    parts = noise_components_db(f, env)
    total = np.zeros_like(np.asarray(f, dtype=float))
    for level in parts.values():
        total = total + np.power(10.0, np.asarray(level) / 10.0)
    out = 10.0 * np.log10(total)
    return out if out.ndim else float(out)


def attenuation_noise_product_db(l, f, env: Environment):
    """A(l, f) * N(f) in dB, the quantity minimized by the optimal frequency."""
    prod = np.asarray(path_loss_db(l, f, env)) + np.asarray(noise_psd_db(f, env))
    return prod if prod.ndim else float(prod)
