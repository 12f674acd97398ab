"""Relay deployment decisions from fitted channel models.

A packet of L bits crosses l km either directly or through equally spaced
relays. With the fitted power laws the direct energy is
E0(l) = (L / (alpha omega 1e3)) (psi l^(lam+gamma) + P_R l^lam) and a single
relay at x gives E1(x) = E0(x) + E0(l - x). There is an open distance l_OP,
closed-form in the fitted constants, above which relaying always saves
energy; the planner bisects hops until each is no longer than l_OP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .acoustics import Environment
from .errors import ModelMismatchError, ValidationError
from .fitmodels import FitModel, validate_ranges

__all__ = [
    "DIRECT_CONCAVE",
    "DIRECT_MIXED",
    "RELAY_OPTIMAL",
    "LinkSpec",
    "EnergyDelayReport",
    "DeploymentPlan",
    "CaseLabel",
    "direct_delay",
    "direct_energy",
    "relay_delay",
    "relay_energy",
    "open_distance",
    "classify_case",
    "plan_link",
    "compare",
]

DIRECT_CONCAVE = "DirectConcave"
DIRECT_MIXED = "DirectMixed"
RELAY_OPTIMAL = "RelayOptimal"

_CASES = (DIRECT_CONCAVE, DIRECT_MIXED, RELAY_OPTIMAL)


@dataclass(frozen=True)
class LinkSpec:
    """One link to plan: distance, target SNR, and energy bookkeeping.

    Attributes:
        l: total source-to-destination distance in km.
        snr0_db: target SNR in dB.
        p_r: receive (processing) power in W, distance independent.
        packet_bits: packet size L in bits.
        alpha: bandwidth efficiency in bps/Hz.
    """

    l: float
    snr0_db: float
    p_r: float
    packet_bits: int = 2048
    alpha: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.l) and self.l > 0.0):
            raise ValidationError(f"distance must be positive, got {self.l}")
        if not math.isfinite(self.snr0_db):
            raise ValidationError("snr0_db must be finite")
        if not (math.isfinite(self.p_r) and self.p_r > 0.0):
            raise ValidationError(f"receive power must be positive, got {self.p_r}")
        if int(self.packet_bits) != self.packet_bits or self.packet_bits < 1:
            raise ValidationError(f"packet_bits must be a positive integer, got {self.packet_bits}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValidationError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class EnergyDelayReport:
    """Direct vs midpoint-relay comparison for one link.

    Reduction ratios are (direct - relayed) / direct, positive when the relay
    improves on direct transmission.
    """

    e0_joule: float
    e1_mid_joule: float
    t0_sec: float
    t1_mid_sec: float
    energy_reduction_ratio: float
    delay_reduction_ratio: float

    def __post_init__(self):
        for name in ("e0_joule", "e1_mid_joule", "t0_sec", "t1_mid_sec"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class DeploymentPlan:
    """Relay layout chosen for a link."""

    relay_positions: tuple
    hop_length: float
    hop_count: int
    total_energy_joule: float
    total_delay_sec: float
    open_distance_km: float

    def __post_init__(self):
        if self.hop_count < 1 or self.hop_count & (self.hop_count - 1):
            raise ValidationError(f"hop_count must be a power of two, got {self.hop_count}")
        if len(self.relay_positions) != self.hop_count - 1:
            raise ValidationError("relay count must be hop_count - 1")
        if any(b <= a for a, b in zip(self.relay_positions, self.relay_positions[1:])):
            raise ValidationError("relay positions must be strictly increasing")
        if not self.hop_length > 0.0:
            raise ValidationError("hop_length must be positive")
        if self.hop_count > 1 and self.hop_length > self.open_distance_km * (1 + 1e-12):
            raise ValidationError("multi-hop plans require hop_length <= open distance")


@dataclass(frozen=True)
class CaseLabel:
    """Energy-landscape regime of a link, with both distance thresholds.

    DirectConcave: E1 is concave, direct is optimal (l <= t1_km).
    DirectMixed: mixed curvature but direct still optimal (t1 < l <= l_OP).
    RelayOptimal: midpoint relay is the global optimum (l > l_OP).
    """

    case: str
    t1_km: float
    t2_km: float

    def __post_init__(self):
        if self.case not in _CASES:
            raise ValidationError(f"unknown case label {self.case!r}")


def _require_match(spec: LinkSpec, model: FitModel):
    if model.snr0_db != spec.snr0_db:
        raise ModelMismatchError(
            f"model fitted at SNR {model.snr0_db} dB used with spec at {spec.snr0_db} dB"
        )


def _require_valid(model: FitModel):
    violations = validate_ranges(model)
    if violations:
        raise ValidationError("model out of range: " + "; ".join(violations))


def _hop_energy(h, spec: LinkSpec, model: FitModel):
    scale = spec.packet_bits / (spec.alpha * model.omega * 1e3)
    return scale * (
        model.psi * h ** (model.lam + model.gamma) + spec.p_r * h**model.lam
    )


def _hop_tx_time(h, spec: LinkSpec, model: FitModel):
    return spec.packet_bits / (spec.alpha * model.bandwidth_khz(h) * 1e3)


def direct_delay(spec: LinkSpec, model: FitModel, env: Environment) -> float:
    """End-to-end delay in seconds for direct transmission."""
    _require_match(spec, model)
    return _hop_tx_time(spec.l, spec, model) + spec.l * 1e3 / env.c


def direct_energy(spec: LinkSpec, model: FitModel) -> float:
    """Energy in joules for direct transmission."""
    _require_match(spec, model)
    return _hop_energy(spec.l, spec, model)


def relay_delay(x, spec: LinkSpec, model: FitModel, env: Environment) -> float:
    """Delay in seconds with one relay at x km from the source."""
    _require_match(spec, model)
    _check_interior(x, spec.l)
    return (
        _hop_tx_time(x, spec, model)
        + _hop_tx_time(spec.l - x, spec, model)
        + spec.l * 1e3 / env.c
    )


def relay_energy(x, spec: LinkSpec, model: FitModel) -> float:
    """Energy in joules with one relay at x km from the source."""
    _require_match(spec, model)
    _check_interior(x, spec.l)
    return _hop_energy(x, spec, model) + _hop_energy(spec.l - x, spec, model)


def _check_interior(x, l):
    if not (math.isfinite(x) and 0.0 < x < l):
        raise ValidationError(f"relay position must lie strictly inside (0, {l}), got {x}")


def _thresholds(model: FitModel, p_r):
    lam, gam, psi = model.lam, model.gamma, model.psi
    t1 = 2.0 * (
        p_r * lam * (1.0 - lam) / (psi * (lam + gam) * (lam + gam - 1.0))
    ) ** (1.0 / gam)
    t2 = (
        p_r * (2.0 - 2.0**lam) / (psi * (2.0**lam - 2.0 ** (1.0 - gam)))
    ) ** (1.0 / gam)
    return t1, t2


def open_distance(model: FitModel, p_r) -> float:
    """Distance threshold l_OP above which a midpoint relay saves energy."""
    if not (math.isfinite(p_r) and p_r > 0.0):
        raise ValidationError(f"receive power must be positive, got {p_r}")
    _require_valid(model)
    t1, t2 = _thresholds(model, p_r)
    return max(t1, t2)


def classify_case(l, model: FitModel, p_r) -> CaseLabel:
    """Label the energy landscape regime of a link of length l km."""
    if not (math.isfinite(l) and l > 0.0):
        raise ValidationError(f"distance must be positive, got {l}")
    if not (math.isfinite(p_r) and p_r > 0.0):
        raise ValidationError(f"receive power must be positive, got {p_r}")
    _require_valid(model)
    t1, t2 = _thresholds(model, p_r)
    if l <= t1:
        case = DIRECT_CONCAVE
    elif l <= max(t1, t2):
        case = DIRECT_MIXED
    else:
        case = RELAY_OPTIMAL
    return CaseLabel(case=case, t1_km=t1, t2_km=t2)


def plan_link(spec: LinkSpec, model: FitModel, env: Environment) -> DeploymentPlan:
    """Choose a power-of-two hop layout whose hops are within the open distance.

    Direct transmission when l <= l_OP (ties go direct). Otherwise the link is
    bisected (2, 4, 8, ... hops) until the hop length is at most l_OP. Totals
    add per-hop transmit energy and time across hops plus one end-to-end
    propagation term.
    """
    _require_match(spec, model)
    lop = open_distance(model, spec.p_r)
    hop_count = 1
    while spec.l / hop_count > lop:
        hop_count *= 2
    hop = spec.l / hop_count
    positions = tuple(i * hop for i in range(1, hop_count))
    total_energy = hop_count * _hop_energy(hop, spec, model)
    total_delay = hop_count * _hop_tx_time(hop, spec, model) + spec.l * 1e3 / env.c
    return DeploymentPlan(
        relay_positions=positions,
        hop_length=hop,
        hop_count=hop_count,
        total_energy_joule=total_energy,
        total_delay_sec=total_delay,
        open_distance_km=lop,
    )


def compare(spec: LinkSpec, model: FitModel, env: Environment) -> EnergyDelayReport:
    """Direct vs midpoint-relay energies, delays, and reduction ratios."""
    _require_match(spec, model)
    _require_valid(model)
    e0 = direct_energy(spec, model)
    e1 = relay_energy(spec.l / 2.0, spec, model)
    t0 = direct_delay(spec, model, env)
    t1 = relay_delay(spec.l / 2.0, spec, model, env)
    return EnergyDelayReport(
        e0_joule=e0,
        e1_mid_joule=e1,
        t0_sec=t0,
        t1_mid_sec=t1,
        energy_reduction_ratio=(e0 - e1) / e0,
        delay_reduction_ratio=(t0 - t1) / t0,
    )
