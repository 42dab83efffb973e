"""THz link budget: free-space loss, six-line molecular absorption, capacity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..exceptions import DegenerateLinkError, InvalidQueryError

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0

# Line centres in cm^-1 (119, 183, 325, 380, 439 and 448 GHz).
LINE_CENTERS_CM = (3.96, 6.11, 10.84, 12.68, 14.65, 14.94)

VALID_BAND_HZ = (100e9, 450e9)


@dataclass(frozen=True)
class Atmosphere:
    temperature_c: float = 25.0
    pressure_hpa: float = 1013.25
    relative_humidity_pct: float = 20.0

    def __post_init__(self) -> None:
        if self.pressure_hpa <= 0:
            raise InvalidQueryError("pressure_hpa must be positive")
        if not 0.0 <= self.relative_humidity_pct <= 100.0:
            raise InvalidQueryError("relative_humidity_pct must lie in [0, 100]")


@dataclass(frozen=True)
class LinkParams:
    frequency_hz: float = 188e9
    tx_power_w: float = 5e-3
    noise_power_w: float = 10 ** (-85 / 10) * 1e-3
    gain_tx: float = 1000.0
    gain_rx: float = 1000.0

    def __post_init__(self) -> None:
        for name in ("frequency_hz", "tx_power_w", "noise_power_w", "gain_tx", "gain_rx"):
            if not getattr(self, name) > 0:
                raise InvalidQueryError(f"{name} must be positive")
        check_band(self.frequency_hz)

    @property
    def snr_scale(self) -> float:
        """P_t / N_0."""
        return self.tx_power_w / self.noise_power_w


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def check_band(frequency_hz: float) -> bool:
    """Warn when the six-line fit is used outside its 100-450 GHz validity band."""
    lo, hi = VALID_BAND_HZ
    if lo <= frequency_hz <= hi:
        return True
    logger.warning(
        f"Frequency {frequency_hz / 1e9:.1f} GHz outside the {lo / 1e9:.0f}-{hi / 1e9:.0f} GHz absorption fit"
    )
    return False


def saturation_vapor_pressure(temperature_c: float) -> float:
    """Saturated water vapour pressure in hPa (improved Magnus form, no enhancement factor)."""
    return 6.1094 * math.exp(17.625 * temperature_c / (243.04 + temperature_c))


def mixing_ratio(atm: Atmosphere) -> float:
    """Volume mixing ratio of water vapour."""
    return (atm.relative_humidity_pct / 100.0) * saturation_vapor_pressure(atm.temperature_c) / atm.pressure_hpa


def _line_strengths(mu: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    a = (
        5.159e-5 * (1.0 - mu) * (-6.65e-5 * (1.0 - mu) + 0.0159),
        0.1925 * mu * (0.1350 * mu + 0.0318),
        0.2251 * mu * (0.1314 * mu + 0.0297),
        2.053 * mu * (0.1717 * mu + 0.0306),
        0.177 * mu * (0.0832 * mu + 0.0213),
        2.146 * mu * (0.1206 * mu + 0.0277),
    )
    b = (
        (-2.09e-4 * (1.0 - mu) + 0.05) ** 2,
        (0.4241 * mu + 0.0998) ** 2,
        (0.4127 * mu + 0.0932) ** 2,
        (0.5394 * mu + 0.0961) ** 2,
        (0.2615 * mu + 0.0668) ** 2,
        (0.3789 * mu + 0.0871) ** 2,
    )
    return a, b


def line_terms(f_t: float, mu: float) -> list[float]:
    """The six y_i(f_t, mu) absorption-line terms."""
    wavenumber = f_t / (100.0 * SPEED_OF_LIGHT)
    a, b = _line_strengths(mu)
    return [a_i / (b_i + (wavenumber - p_i) ** 2) for a_i, b_i, p_i in zip(a, b, LINE_CENTERS_CM, strict=True)]


def continuum_term(f_t: float, mu: float) -> float:
    """g(f_t, mu), the polynomial fit to the continuum response (f_t in Hz)."""
    return mu / 0.0157 * (2e-4 + 0.915e-112 * f_t**9.42)


def absorption_coefficient(f_t: float, mu: float) -> float:
    """Molecular absorption coefficient in 1/m."""
    return math.fsum(line_terms(f_t, mu)) + continuum_term(f_t, mu)


def molecular_loss(f_t: float, mu: float, length_m: float) -> float:
    """Beer-Lambert amplitude factor exp(-kappa L / 2)."""
    if length_m < 0:
        raise DegenerateLinkError("link length must be non-negative")
    return math.exp(-absorption_coefficient(f_t, mu) * length_m / 2.0)


def free_space_factor(f_t: float, length_m: float) -> float:
    return SPEED_OF_LIGHT / (4.0 * math.pi * f_t * length_m)


def channel_gain(link: LinkParams, atm: Atmosphere, length_m: float) -> float:
    """Amplitude gain h of a LoS link of length L."""
    if length_m <= 0:
        raise DegenerateLinkError("degenerate link: zero length")
    mu = mixing_ratio(atm)
    return (
        free_space_factor(link.frequency_hz, length_m)
        * molecular_loss(link.frequency_hz, mu, length_m)
        * math.sqrt(link.gain_tx * link.gain_rx)
    )


def link_capacity(link: LinkParams, h: float) -> float:
    """Spectral efficiency log2(1 + P_t h^2 / N_0) in bits/s/Hz."""
    if h < 0:
        raise InvalidQueryError("channel gain must be non-negative")
    return math.log2(1.0 + link.snr_scale * h * h)

