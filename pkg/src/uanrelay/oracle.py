"""Brute-force ground truth for the relay decision.

Everything here evaluates the exact integral-based link budget, not the
fitted power laws: per-hop transmit power comes from the 3 dB band and its
noise / inverse-attenuation integrals at each distance. The oracle answers
two questions: where an exhaustive relay-position search puts the minimum,
and at which distance that minimum first moves off the boundary (the
realistic open distance).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .acoustics import Environment
from .errors import BracketError, ValidationError
from .linkbudget import (
    ACOUSTIC_TO_ELECTRIC,
    DEFAULT_WINDOW,
    band_integrals,
    effective_band,
)
from .planner import LinkSpec

__all__ = [
    "ChannelCache",
    "OracleResult",
    "numeric_energy",
    "grid_argmin_relay",
    "realistic_open_distance",
]


class ChannelCache:
    """Per-distance memo of band and integral results.

    The inner integrals dominate oracle runtime and many relay positions
    share hop distances, so results are keyed by distance. Reads and inserts
    are guarded by a lock; a racing recompute is idempotent.
    """

    def __init__(self, env: Environment, window=DEFAULT_WINDOW):
        self.env = env
        self.window = window
        self._lock = threading.Lock()
        self._store = {}

    def profile(self, l):
        """(band, noise_integral, inverse_attenuation_integral) at l km."""
        key = float(l)
        with self._lock:
            entry = self._store.get(key)
        if entry is None:
            band = effective_band(key, self.env, self.window)
            n_int, a_int = band_integrals(key, band, self.env)
            entry = (band, n_int, a_int)
            with self._lock:
                self._store[key] = entry
        return entry

    def transmit_power_w(self, l, snr0_db):
        """Exact electrical transmit power at distance l and target SNR."""
        band, n_int, a_int = self.profile(l)
        snr_lin = 10.0 ** (snr0_db / 10.0)
        acoustic = 1e3 * band.width_khz * snr_lin * n_int / a_int
        return acoustic * ACOUSTIC_TO_ELECTRIC / self.env.eta

    def hop_energy_joule(self, h, spec: LinkSpec):
        """Exact one-hop energy over h km for spec's packet and receive power."""
        band, _, _ = self.profile(h)
        tx_time = spec.packet_bits / (spec.alpha * band.width_khz * 1e3)
        return (self.transmit_power_w(h, spec.snr0_db) + spec.p_r) * tx_time


@dataclass(frozen=True)
class OracleResult:
    """Exhaustive relay-position search result."""

    best_x: float
    best_energy_joule: float
    grid_step: float
    energy_curve: tuple

    def __post_init__(self):
        if any(e < self.best_energy_joule for _, e in self.energy_curve):
            raise ValidationError("best_energy_joule above a sampled energy")


def numeric_energy(x, spec: LinkSpec, env: Environment, cache: ChannelCache = None) -> float:
    """Exact relay energy at position x km; x = 0 or l means direct.

    Uses the integral link budget at each hop distance instead of the fitted
    power laws.
    """
    if not (math.isfinite(x) and 0.0 <= x <= spec.l):
        raise ValidationError(f"relay position must lie in [0, {spec.l}], got {x}")
    if cache is None:
        cache = ChannelCache(env)
    if x == 0.0 or x == spec.l:
        return cache.hop_energy_joule(spec.l, spec)
    return cache.hop_energy_joule(x, spec) + cache.hop_energy_joule(spec.l - x, spec)


def _position_grid(l, step):
    n_cells = int(round(l / step))
    if n_cells >= 4 and abs(n_cells * step - l) <= 1e-9 * l:
        return np.linspace(0.0, l, n_cells + 1)
    xs = np.arange(0.0, l, step)
    return np.append(xs, l)


def grid_argmin_relay(spec: LinkSpec, env: Environment, step, cache: ChannelCache = None) -> OracleResult:
    """Exhaustive search of the exact energy over {0, step, 2 step, ..., l}.

    Ties break toward the smallest x, so a boundary tie reports direct
    transmission.
    """
    if not (math.isfinite(step) and 0.0 < step <= spec.l / 4.0):
        raise ValidationError(f"step must lie in (0, l/4], got {step}")
    if cache is None:
        cache = ChannelCache(env)
    xs = _position_grid(spec.l, step)
    energies = [numeric_energy(float(x), spec, env, cache) for x in xs]
    best = int(np.argmin(energies))
    curve = tuple((float(x), float(e)) for x, e in zip(xs, energies))
    return OracleResult(
        best_x=float(xs[best]),
        best_energy_joule=float(energies[best]),
        grid_step=float(step),
        energy_curve=curve,
    )


def realistic_open_distance(
    snr0_db,
    p_r,
    env: Environment,
    l_grid,
    packet_bits=2048,
    alpha=1.0,
    position_divisor=400,
    cache: ChannelCache = None,
) -> float:
    """Distance where the exact argmin first moves off the boundary.

    Sweeps l over l_grid with a position grid of l / position_divisor per
    distance. The returned value linearly interpolates between the last
    boundary-argmin l and the first interior-argmin l, using the smooth
    difference between the direct energy and the best interior energy as the
    crossing function.

    Raises BracketError when l_grid does not bracket the transition.
    """
    ls = np.asarray(l_grid, dtype=float)
    if ls.ndim != 1 or ls.size < 2:
        raise ValidationError("l_grid must contain at least two distances")
    if not np.all(np.isfinite(ls)) or np.any(ls <= 0.0):
        raise ValidationError("l_grid entries must be positive and finite")
    if np.any(np.diff(ls) <= 0.0):
        raise ValidationError("l_grid must be strictly increasing")
    if position_divisor < 4:
        raise ValidationError("position_divisor must be at least 4")
    if cache is None:
        cache = ChannelCache(env)

    prev_l = None
    prev_gap = None
    for l in ls:
        spec = LinkSpec(
            l=float(l), snr0_db=snr0_db, p_r=p_r, packet_bits=packet_bits, alpha=alpha
        )
        step = float(l) / position_divisor
        result = grid_argmin_relay(spec, env, step, cache)
        direct = result.energy_curve[0][1]
        interior_best = min(e for x, e in result.energy_curve if 0.0 < x < float(l))
        gap = direct - interior_best
        interior_won = step / 2.0 < result.best_x < float(l) - step / 2.0
        if interior_won:
            if prev_l is None:
                raise BracketError(
                    f"argmin already interior at the grid start l={l} km"
                )
            return prev_l + (-prev_gap) * (float(l) - prev_l) / (gap - prev_gap)
        prev_l, prev_gap = float(l), gap
    raise BracketError("no interior-argmin transition within the l_grid")
