"""Honest source / fiber / detector model producing the observed statistics.

The model assembles, per protocol variant, the probabilities that a signal
emitted with Poissonian photon number ends up as a kept detection event,
the total and single-photon error rates, and the single-photon loss
fraction that feeds the relaxed reduced-state constraint.

Conventions (one defensible reading of an under-specified simulation; see
the package README):

* threshold detectors with independent-photon loss statistics,
  detecting n photons with probability 1 - (1 - eta_sys)^n;
* dark counts add 2*y0 on otherwise empty slots, and contribute errors with
  weight 1/2; true detections err with the misalignment probability e_d;
* double clicks and cross clicks do not occur in the honest model;
* outside clicks count as arrived (not lost) for the loss fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .protocol import ProtocolConfig, Variant

__all__ = [
    "ApparatusModel",
    "ChannelParams",
    "ObservedStats",
    "apparatus_transmittance",
    "default_params",
    "honest_statistics",
    "load_params",
    "parse_params",
    "photon_number_split",
    "transmittance",
]

PRESET_FIELDS = ("alpha_db_per_km", "distance_km", "eta_det", "y0", "e_d", "f_ec", "mu")


@dataclass(frozen=True)
class ChannelParams:
    """Fiber, detector, and source parameters of the honest setup."""

    alpha_db_per_km: float
    distance_km: float
    eta_det: float
    y0: float
    e_d: float
    f_ec: float
    mu: float

    def __post_init__(self):
        if self.alpha_db_per_km < 0 or self.distance_km < 0 or self.y0 < 0:
            raise ValueError("attenuation, distance and dark-count rate must be nonnegative")
        if not 0.0 < self.eta_det <= 1.0:
            raise ValueError(f"eta_det must be in (0, 1], got {self.eta_det!r}")
        if not 0.0 <= self.e_d < 0.5:
            raise ValueError(f"e_d must be in [0, 0.5), got {self.e_d!r}")
        if self.f_ec < 1.0:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec!r}")
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu!r}")

    def with_(self, **kwargs) -> "ChannelParams":
        return replace(self, **kwargs)


def default_params(distance_km: float = 0.0, mu: float = 0.1) -> ChannelParams:
    """Named preset with typical fiber-experiment values.

    alpha = 0.21 dB/km, eta_det = 0.045, y0 = 1.7e-6, e_d = 0.033,
    f_ec = 1.22.  These are overridable inputs, not asserted constants.
    """
    return ChannelParams(
        alpha_db_per_km=0.21,
        distance_km=distance_km,
        eta_det=0.045,
        y0=1.7e-6,
        e_d=0.033,
        f_ec=1.22,
        mu=mu,
    )


def parse_params(text: str) -> ChannelParams:
    """Parse the flat key=value preset format.

    Recognized keys are the seven ChannelParams fields; unknown keys are
    rejected and missing keys fall back to the default preset.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"preset line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in PRESET_FIELDS:
            raise ValueError(f"preset line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"preset line {lineno}: duplicate key {key!r}")
        values[key] = float(value.strip())
    return default_params().with_(**values)


def load_params(path) -> ChannelParams:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_params(fh.read())


@dataclass(frozen=True)
class ObservedStats:
    """Per-signal click and error statistics split by emitted photon number."""

    p_click_v: float
    p_click_s: float
    p_click_m: float
    p_click_total: float
    q_tot: float
    q_single: float
    p_lost: float


@dataclass(frozen=True)
class ApparatusModel:
    """Receiver-side transmission bookkeeping.

    ``survival`` is the probability that a photon reaches a detector at all
    (outside slots included); ``kept`` the probability that it lands in a
    kept slot.  ``middle_fraction`` = kept / survival.
    """

    survival: float
    kept: float

    @property
    def middle_fraction(self) -> float:
        return self.kept / self.survival


def transmittance(params: ChannelParams) -> float:
    """Fiber transmission 10^(-alpha L / 10)."""
    return 10.0 ** (-params.alpha_db_per_km * params.distance_km / 10.0)


def photon_number_split(mu: float):
    """Poisson split (vacuum, single, multi) of the source emission."""
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    p_v = math.exp(-mu)
    p_s = mu * math.exp(-mu)
    return p_v, p_s, 1.0 - p_v - p_s


def apparatus_transmittance(cfg: ProtocolConfig) -> ApparatusModel:
    """Survival and kept fractions of the receiver apparatus per variant.

    unbalanced: survival 1/(2 xi), kept (1-xi) = kappa/(1+kappa) (middle
    fraction 2 xi (1-xi));  pbs: survival = kept = xi + (1-xi) kappa, all
    clicks kept;  fix-loss: survival kappa, kept kappa/2;  fix-uneven-bs:
    survival 2 kappa/(1+kappa), kept kappa/(1+kappa).
    """
    k = cfg.kappa
    xi = cfg.xi
    if cfg.variant is Variant.UNBALANCED:
        return ApparatusModel(survival=1.0 / (2.0 * xi), kept=1.0 - xi)
    if cfg.variant is Variant.PBS:
        t = xi + (1.0 - xi) * k
        return ApparatusModel(survival=t, kept=t)
    if cfg.variant is Variant.FIX_LOSS:
        return ApparatusModel(survival=k, kept=k / 2.0)
    return ApparatusModel(survival=2.0 * k / (1.0 + k), kept=k / (1.0 + k))


def honest_statistics(cfg: ProtocolConfig, params: ChannelParams) -> ObservedStats:
    """Observed statistics of the honest (eavesdropper-free) setup.

    With eta_sys = eta_ch * eta_det * kept fraction, a kept n-photon signal
    fires with D_n = A_n + 2 y0 (1 - A_n), A_n = 1 - (1 - eta_sys)^n, and
    errs with weight e_d A_n + y0 (1 - A_n).  Aggregation over the Poisson
    split has the closed forms used below.  The single-photon error rate is
    q = (e_d eta_sys + y0) / (eta_sys + 2 y0), and the loss fraction uses
    the survival factor only (outside clicks count as arrived).
    """
    eta_ch = transmittance(params)
    apparatus = apparatus_transmittance(cfg)
    eta_sys = eta_ch * params.eta_det * apparatus.kept
    y0 = params.y0
    e_d = params.e_d
    mu = params.mu

    p_v, p_s, p_m = photon_number_split(mu)
    no_photon = math.exp(-mu * eta_sys)  # sum_n poisson(n) (1-eta)^n
    p_click_total = (1.0 - no_photon) + 2.0 * y0 * no_photon
    d_1 = eta_sys + 2.0 * y0 * (1.0 - eta_sys)
    p_click_v = p_v * 2.0 * y0
    p_click_s = p_s * d_1
    p_click_m = p_click_total - p_click_v - p_click_s

    err_total = e_d * (1.0 - no_photon) + y0 * no_photon
    q_tot = err_total / p_click_total if p_click_total > 0.0 else 0.5
    q_single = (e_d * eta_sys + y0) / (eta_sys + 2.0 * y0) if eta_sys + y0 > 0.0 else 0.5

    p_lost = 1.0 - eta_ch * params.eta_det * apparatus.survival
    return ObservedStats(
        p_click_v=p_click_v,
        p_click_s=p_click_s,
        p_click_m=p_click_m,
        p_click_total=p_click_total,
        q_tot=q_tot,
        q_single=q_single,
        p_lost=p_lost,
    )
