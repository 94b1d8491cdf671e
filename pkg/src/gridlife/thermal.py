"""Transformer insulation aging per IEEE Std C57.91-2011.

Implements the hottest-spot temperature chain for a mineral-oil distribution
transformer and the resulting percent loss of insulation life: steady-state
top-oil and hotspot rises for a given per-unit loading, first-order transient
response over an interval, the aging acceleration factor, and the analytic
gradient of per-interval loss of life with respect to the initial and
ultimate loading ratios. Everything here is a pure function; the gradient is
what the decomposition layer turns into cut coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "TransformerThermalParams",
    "IntervalLoading",
    "IntervalThermalResult",
    "LossGradient",
    "DegenerateLoadingError",
    "GRADIENT_FLOOR",
    "aging_acceleration",
    "steady_rises",
    "transient_rise",
    "interval_loss_of_life",
    "loss_gradient",
    "horizon_loss_of_life",
]

# Aging activation constant and the 110 C reference hotspot, in kelvin.
_AGING_B = 15000.0
_REF_HOTSPOT_K = 383.0
_KELVIN = 273.0

# Loading ratios below this are thermally indistinguishable from no load but
# sit where k**(2m - 1) blows up for m < 1; gradient queries must stay above.
GRADIENT_FLOOR = 1e-6


class DegenerateLoadingError(ValueError):
    """Gradient requested at a loading ratio below the supported floor."""


@dataclass(frozen=True)
class TransformerThermalParams:
    """Thermal ratings of the transformer at the point of common coupling.

    Defaults are typical ONAN values for a mid-size distribution unit; every
    field is meant to be overridden from scenario configuration when real
    nameplate data is available.
    """

    rated_top_oil_rise: float = 55.0      # C over ambient at rated load
    rated_hotspot_rise: float = 25.0      # C over top oil at rated load
    tau_top_oil: float = 3.5              # h
    tau_winding: float = 0.0833           # h
    loss_ratio: float = 3.2               # full-load to no-load losses
    exponent_m: float = 0.8               # winding cooling exponent
    exponent_n: float = 0.8               # oil cooling exponent
    rated_power: float = 10.0             # MW
    normal_insulation_life: float = 180000.0  # h
    investment_cost: float = 150000.0     # currency per full insulation life
    interval_length: float = 1.0          # h

    def __post_init__(self) -> None:
        if not 0.8 <= self.exponent_m <= 1.0:
            raise ValueError(f"exponent_m must lie in [0.8, 1.0], got {self.exponent_m}")
        if not 0.8 <= self.exponent_n <= 1.0:
            raise ValueError(f"exponent_n must lie in [0.8, 1.0], got {self.exponent_n}")
        for name in ("rated_top_oil_rise", "rated_hotspot_rise"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("tau_top_oil", "tau_winding", "loss_ratio", "rated_power",
                     "normal_insulation_life", "interval_length"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.investment_cost < 0.0:
            raise ValueError("investment_cost must be nonnegative")


@dataclass(frozen=True)
class IntervalLoading:
    """Loading state of one interval: ratios at its start and end, ambient."""

    k_initial: float   # per-unit loading carried into the interval
    k_ultimate: float  # per-unit loading held through the interval
    ambient: float     # C

    def __post_init__(self) -> None:
        if self.k_initial < 0.0 or self.k_ultimate < 0.0:
            raise ValueError("loading ratios must be nonnegative")
        if self.ambient <= -_KELVIN:
            raise ValueError("ambient below absolute zero")


@dataclass(frozen=True)
class IntervalThermalResult:
    """Resolved thermal state and aging for one interval."""

    top_oil_rise: float   # C
    hotspot_rise: float   # C
    hotspot_temp: float   # C
    aging_factor: float   # relative to 110 C
    lol_percent: float    # percent of insulation life consumed


@dataclass(frozen=True)
class LossGradient:
    """Partials of lol_percent with respect to the two loading ratios."""

    d_lol_d_k_initial: float
    d_lol_d_k_ultimate: float


def aging_acceleration(hotspot_temp: float) -> float:
    """Aging acceleration factor at a hotspot temperature in C.

    Equals 1 at 110 C; roughly doubles every 7 C above it.
    """
    if hotspot_temp <= -_KELVIN:
        raise ValueError("hotspot temperature below absolute zero")
    return math.exp(_AGING_B / _REF_HOTSPOT_K - _AGING_B / (hotspot_temp + _KELVIN))


def steady_rises(k: float, params: TransformerThermalParams) -> tuple[float, float]:
    """Steady-state top-oil and hotspot rises at loading ratio ``k``.

    Returns (top_oil_rise, hotspot_rise) in C. The top-oil rise scales with
    total losses through the loss ratio; the hotspot rise with winding
    current alone.
    """
    if k < 0.0:
        raise ValueError("loading ratio must be nonnegative")
    r = params.loss_ratio
    bracket = (k * k * r + 1.0) / (r + 1.0)
    top_oil = params.rated_top_oil_rise * bracket ** params.exponent_n
    hotspot = params.rated_hotspot_rise * k ** (2.0 * params.exponent_m)
    return top_oil, hotspot


def transient_rise(initial_rise: float, ultimate_rise: float,
                   tau: float, dt: float) -> float:
    """First-order response after ``dt`` hours toward ``ultimate_rise``."""
    if tau <= 0.0 or dt <= 0.0:
        raise ValueError("tau and dt must be positive")
    return initial_rise + (ultimate_rise - initial_rise) * (1.0 - math.exp(-dt / tau))


def interval_loss_of_life(loading: IntervalLoading,
                          params: TransformerThermalParams) -> IntervalThermalResult:
    """Thermal state and percent loss of life over a single interval.

    The initial ratio fixes the steady rises the interval starts from, the
    ultimate ratio those it relaxes toward; the hotspot temperature at the
    end of the interval drives the aging factor.
    """
    dt = params.interval_length
    oil_start, wind_start = steady_rises(loading.k_initial, params)
    oil_end, wind_end = steady_rises(loading.k_ultimate, params)
    top_oil = transient_rise(oil_start, oil_end, params.tau_top_oil, dt)
    hotspot = transient_rise(wind_start, wind_end, params.tau_winding, dt)
    temp = loading.ambient + top_oil + hotspot
    factor = aging_acceleration(temp)
    lol = factor * dt * 100.0 / params.normal_insulation_life
    return IntervalThermalResult(
        top_oil_rise=top_oil,
        hotspot_rise=hotspot,
        hotspot_temp=temp,
        aging_factor=factor,
        lol_percent=lol,
    )


def _steady_rise_slopes(k: float, params: TransformerThermalParams) -> tuple[float, float]:
    """d(top_oil_rise)/dk and d(hotspot_rise)/dk at loading ``k``."""
    r = params.loss_ratio
    n = params.exponent_n
    m = params.exponent_m
    bracket = (k * k * r + 1.0) / (r + 1.0)
    d_top = params.rated_top_oil_rise * n * bracket ** (n - 1.0) * (2.0 * k * r / (r + 1.0))
    d_hot = params.rated_hotspot_rise * 2.0 * m * k ** (2.0 * m - 1.0)
    return d_top, d_hot


def loss_gradient(loading: IntervalLoading,
                  params: TransformerThermalParams) -> LossGradient:
    """Analytic partials of the interval's lol_percent in both ratios.

    Raises DegenerateLoadingError below GRADIENT_FLOOR, where the hotspot
    term's slope is unbounded for cooling exponents under 1.
    """
    if loading.k_initial < GRADIENT_FLOOR or loading.k_ultimate < GRADIENT_FLOOR:
        raise DegenerateLoadingError(
            f"gradient undefined below k = {GRADIENT_FLOOR:g}: "
            f"got ({loading.k_initial:g}, {loading.k_ultimate:g})")

    dt = params.interval_length
    result = interval_loss_of_life(loading, params)
    # Weights the transient response puts on each endpoint's steady rises.
    a_oil = 1.0 - math.exp(-dt / params.tau_top_oil)
    a_wind = 1.0 - math.exp(-dt / params.tau_winding)

    d_top_i, d_hot_i = _steady_rise_slopes(loading.k_initial, params)
    d_top_u, d_hot_u = _steady_rise_slopes(loading.k_ultimate, params)
    d_temp_d_ki = (1.0 - a_oil) * d_top_i + (1.0 - a_wind) * d_hot_i
    d_temp_d_ku = a_oil * d_top_u + a_wind * d_hot_u

    kelvin = result.hotspot_temp + _KELVIN
    d_lol_d_temp = result.lol_percent * _AGING_B / (kelvin * kelvin)
    return LossGradient(
        d_lol_d_k_initial=d_lol_d_temp * d_temp_d_ki,
        d_lol_d_k_ultimate=d_lol_d_temp * d_temp_d_ku,
    )


def horizon_loss_of_life(loading_series, ambient_series,
                         params: TransformerThermalParams,
                         initial_loading: float | None = None) -> tuple[float, float]:
    """Total percent loss of life and expected lifetime over a horizon.

    ``loading_series`` holds nonnegative apparent loadings in MW (the
    magnitude of the grid exchange at the transformer), ``ambient_series``
    the matching temperatures. Each interval's ultimate ratio is its own
    loading; its initial ratio is the previous interval's, with the first
    taken from ``initial_loading`` when a block boundary carries one, and
    equal to its own loading otherwise.

    Returns (total_lol_percent, expected_lifetime_years), the lifetime being
    the years until 100 percent at this horizon's average aging rate.
    """
    if len(loading_series) != len(ambient_series):
        raise ValueError(
            f"series length mismatch: {len(loading_series)} loadings, "
            f"{len(ambient_series)} ambients")
    if len(loading_series) == 0:
        raise ValueError("empty horizon")

    rated = params.rated_power
    total = 0.0
    prev_mw = float(loading_series[0]) if initial_loading is None else float(initial_loading)
    if prev_mw < 0.0:
        raise ValueError("initial loading must be nonnegative")
    for t, (mw, amb) in enumerate(zip(loading_series, ambient_series)):
        mw = float(mw)
        if mw < 0.0:
            raise ValueError(f"negative loading at interval {t}")
        res = interval_loss_of_life(
            IntervalLoading(k_initial=prev_mw / rated, k_ultimate=mw / rated,
                            ambient=float(amb)),
            params)
        total += res.lol_percent
        prev_mw = mw

    hours = len(loading_series) * params.interval_length
    per_year = total * 8760.0 / hours
    return total, 100.0 / per_year
