"""Link budget: optimal frequency, 3 dB band, and transmit power.

For a given distance the attenuation-noise product A(l, f) * N(f) has a single
interior minimum in frequency. The usable band is where the product stays
within 3 dB of that minimum, and the transmit power needed for a target SNR
follows from the noise and inverse-attenuation integrals over that band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .acoustics import (
    Environment,
    attenuation_noise_product_db,
    noise_psd_db,
    path_loss_db,
)
from .errors import (
    BandTruncationError,
    BoundaryMinimumError,
    QuadratureError,
    ValidationError,
)

__all__ = [
    "DEFAULT_WINDOW",
    "ACOUSTIC_TO_ELECTRIC",
    "FrequencyBand",
    "adaptive_simpson",
    "optimal_frequency",
    "effective_band",
    "band_integrals",
    "required_transmit_power_acoustic",
    "electrical_power",
]

DEFAULT_WINDOW = (0.1, 200.0)
"""Default frequency search window in kHz."""

ACOUSTIC_TO_ELECTRIC = 10.0 ** (-17.2)
"""Conversion factor from acoustic power scale to electrical Watts (before
dividing by the transducer efficiency)."""

_COARSE_STEP_KHZ = 0.01
_GOLDEN_TOL_KHZ = 1e-4
_EDGE_TOL_KHZ = 1e-9
_HALF_POWER_DB = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class FrequencyBand:
    """Operating band around the optimal frequency, all fields in kHz."""

    f0: float
    f_lo: float
    f_hi: float
    width_khz: float

    def __post_init__(self):
        if not (self.f_lo < self.f0 < self.f_hi):
            raise ValidationError(
                f"band edges must bracket the center: {self.f_lo}, {self.f0}, {self.f_hi}"
            )
        if not math.isclose(self.width_khz, self.f_hi - self.f_lo, rel_tol=1e-9, abs_tol=1e-12):
            raise ValidationError("width_khz must equal f_hi - f_lo")


def adaptive_simpson(fn, a, b, rtol=1e-8):
    """Composite Simpson integral of fn over [a, b], doubling the panel count
    until successive estimates agree to the relative tolerance."""
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValidationError(f"invalid integration interval [{a}, {b}]")
    n = 64
    prev = _simpson(fn, a, b, n)
    for _ in range(18):
        n *= 2
        cur = _simpson(fn, a, b, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise QuadratureError(f"Simpson rule did not converge to rtol={rtol} on [{a}, {b}]")


def _simpson(fn, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = np.asarray(fn(x), dtype=float)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def _check_window(window):
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo < hi):
        raise ValidationError(f"invalid frequency window {window}")
    return lo, hi


def optimal_frequency(l, env: Environment, window=DEFAULT_WINDOW) -> float:
    """Frequency f0(l) in kHz minimizing the attenuation-noise product.

    Coarse 10 Hz scan over the window followed by golden-section refinement
    to 0.1 Hz. Raises BoundaryMinimumError if the coarse minimum sits on the
    window boundary, since the true minimizer then lies outside the window.
    """
    lo, hi = _check_window(window)
    if not (np.isscalar(l) or np.asarray(l).ndim == 0):
        raise ValidationError("distance must be a scalar")
    fs = np.arange(lo, hi + _COARSE_STEP_KHZ / 2.0, _COARSE_STEP_KHZ)
    prod = attenuation_noise_product_db(l, fs, env)
    i = int(np.argmin(prod))
    if i == 0 or i == len(fs) - 1:
        raise BoundaryMinimumError(
            f"product minimum at window edge {fs[i]:.4f} kHz for l={l} km"
        )

    def p(f):
        return attenuation_noise_product_db(l, f, env)

    return _golden_min(p, fs[i - 1], fs[i + 1], _GOLDEN_TOL_KHZ)


def _golden_min(fn, a, b, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while (b - a) > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def effective_band(l, env: Environment, window=DEFAULT_WINDOW) -> FrequencyBand:
    """3 dB band of the attenuation-noise product around f0(l).

    Edges are located by bisection on the monotone flanks of the product.
    Raises BandTruncationError when an edge falls outside the window.
    """
    lo, hi = _check_window(window)
    f0 = optimal_frequency(l, env, window)

    def p(f):
        return attenuation_noise_product_db(l, f, env)

    target = p(f0) + _HALF_POWER_DB
    if p(lo) < target:
        raise BandTruncationError(
            f"lower 3 dB edge below window floor {lo} kHz for l={l} km"
        )
    if p(hi) < target:
        raise BandTruncationError(
            f"upper 3 dB edge above window ceiling {hi} kHz for l={l} km"
        )
    f_lo = _bisect_level(p, lo, f0, target, descending=True)
    f_hi = _bisect_level(p, f0, hi, target, descending=False)
    return FrequencyBand(f0=f0, f_lo=f_lo, f_hi=f_hi, width_khz=f_hi - f_lo)


def _bisect_level(fn, a, b, target, descending):
    """Find f in [a, b] with fn(f) == target on a monotone flank."""
    while (b - a) > _EDGE_TOL_KHZ:
        mid = 0.5 * (a + b)
        high_side = fn(mid) > target
        if high_side == descending:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def band_integrals(l, band: FrequencyBand, env: Environment, rtol=1e-8):
    """Noise and inverse-attenuation integrals over the band.

    Returns:
        (noise_integral, inverse_attenuation_integral), both over f in kHz.
        Their ratio is invariant to the frequency unit.
    """

    def noise_lin(f):
        return np.power(10.0, np.asarray(noise_psd_db(f, env)) / 10.0)

    def inv_att_lin(f):
        return np.power(10.0, -np.asarray(path_loss_db(l, f, env)) / 10.0)

    n_int = adaptive_simpson(noise_lin, band.f_lo, band.f_hi, rtol=rtol)
    a_int = adaptive_simpson(inv_att_lin, band.f_lo, band.f_hi, rtol=rtol)
    return n_int, a_int


def required_transmit_power_acoustic(l, snr0_db, env: Environment, window=DEFAULT_WINDOW) -> float:
    """Acoustic transmit power P_t(l) delivering the target band-average SNR.

    P_t = 1e3 * B_kHz * SNR_lin * (noise integral) / (inverse attenuation
    integral); the 1e3 factor converts the bandwidth to Hz.
    """
    if not (math.isfinite(snr0_db)):
        raise ValidationError(f"snr0_db must be finite, got {snr0_db}")
    band = effective_band(l, env, window)
    n_int, a_int = band_integrals(l, band, env)
    snr_lin = 10.0 ** (snr0_db / 10.0)
    return 1e3 * band.width_khz * snr_lin * n_int / a_int


def electrical_power(p_acoustic, env: Environment) -> float:
    """Electrical transmit power in Watts for an acoustic power level."""
    if not (math.isfinite(p_acoustic) and p_acoustic >= 0.0):
        raise ValidationError(f"acoustic power must be non-negative, got {p_acoustic}")
    return p_acoustic * ACOUSTIC_TO_ELECTRIC / env.eta
