"""Averaged power spectra: discrete, chopped-prefix and continuous-period scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .growth import GrowthPanel, to_growth
from .numerics import dft_at_frequency, dft_forward
from .panel import GoodDescriptor, Panel, chop

__all__ = [
    "SpectrumSet",
    "ContinuousSpectrum",
    "SpectralPeak",
    "averaged_power_spectrum",
    "chopped_spectra",
    "default_chops",
    "continuous_spectrum",
    "half_wavenumbers",
]

MIN_CHOP_MONTHS = 24
DEFAULT_ONE_TIME_CYCLES = 3.0


def half_wavenumbers(n_prime: int) -> np.ndarray:
    """Display wavenumbers 1..(N'-1)//2, plus the Nyquist term for even N'."""
    ks = np.arange(1, (n_prime - 1) // 2 + 1)
    if n_prime % 2 == 0:
        ks = np.append(ks, n_prime // 2)
    return ks


@dataclass(frozen=True)
class SpectrumSet:
    """Per-series Fourier coefficients and the series-averaged power spectrum.

    ``coefficients[:, s]`` holds w~_s(omega_k) for k = 0..N'-1, ``power`` is
    the squared magnitude averaged over all series, and ``periods[k] = N'/k``
    months (infinite at k = 0).  ``half_range`` lists the wavenumbers kept for
    display; its shortest period is 2N'/(N'-1).
    """

    n_prime: int
    coefficients: np.ndarray
    power: np.ndarray
    periods: np.ndarray
    half_range: np.ndarray
    variables: tuple[str, ...]
    goods: tuple[GoodDescriptor, ...]
    chop: int | None = None


def averaged_power_spectrum(gp: GrowthPanel, chop_months: int | None = None) -> SpectrumSet:
    """Mean squared DFT magnitude over all series at each Fourier frequency."""
    coeffs = dft_forward(gp.rates_norm)
    power = (np.abs(coeffs) ** 2).mean(axis=1)
    n_prime = gp.n_prime
    periods = np.empty(n_prime)
    periods[0] = np.inf
    periods[1:] = n_prime / np.arange(1, n_prime)
    return SpectrumSet(
        n_prime=n_prime,
        coefficients=coeffs,
        power=power,
        periods=periods,
        half_range=half_wavenumbers(n_prime),
        variables=gp.variables,
        goods=gp.goods,
        chop=chop_months,
    )


def default_chops(n_months: int) -> tuple[int, ...]:
    """Prefix lengths n-6, n-11, ... down to max(24, n-76) in steps of 5."""
    start, stop = n_months - 6, max(MIN_CHOP_MONTHS, n_months - 76)
    if start < MIN_CHOP_MONTHS:
        raise ValueError(f"panel too short for default chops (n_months={n_months})")
    return tuple(range(start, stop - 1, -5))


def chopped_spectra(panel: Panel, chops=None) -> list[SpectrumSet]:
    """Spectra of prefix panels, re-running growth normalization per prefix."""
    if chops is None:
        chops = default_chops(panel.n_months)
    out = []
    for s in chops:
        s = int(s)
        if s < MIN_CHOP_MONTHS:
            raise ValueError(
                f"chop {s} below the {MIN_CHOP_MONTHS}-month floor for spectra"
            )
        if s > panel.n_months:
            raise ValueError(f"chop {s} exceeds panel length {panel.n_months}")
        out.append(averaged_power_spectrum(to_growth(chop(panel, s)), chop_months=s))
    return out


@dataclass(frozen=True)
class SpectralPeak:
    period: float
    power: float
    prominence: float
    cycles_spanned: float
    one_time_event: bool


@dataclass(frozen=True)
class ContinuousSpectrum:
    """Averaged power evaluated on a continuous period grid."""

    periods: np.ndarray
    power: np.ndarray
    peaks: tuple[SpectralPeak, ...]
    n_prime: int


def _local_maxima(values: np.ndarray) -> np.ndarray:
    v = values
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    return idx


def _prominence(values: np.ndarray, peak: int) -> float:
    h = values[peak]
    bases = []
    for step in (-1, 1):
        low = h
        i = peak + step
        while 0 <= i < len(values) and values[i] <= h:
            low = min(low, values[i])
            i += step
        bases.append(low)
    return float(h - max(bases))


def continuous_spectrum(gp: GrowthPanel, t_min: float = 24.0, t_max: float = 120.0,
                        step: float = 0.01, *, prominence: float = 0.0,
                        min_cycles: float = DEFAULT_ONE_TIME_CYCLES) -> ContinuousSpectrum:
    """Evaluate the averaged power spectrum on a dense period grid.

    Local maxima with at least the requested prominence are reported; a peak
    whose period spans fewer than ``min_cycles`` full cycles of the sample is
    flagged as a one-time event.
    """
    n_prime = gp.n_prime
    if not 2.0 <= t_min < t_max <= n_prime:
        raise ValueError(
            f"period grid must satisfy 2 <= t_min < t_max <= N' = {n_prime}, "
            f"got [{t_min}, {t_max}]"
        )
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    periods = np.arange(t_min, t_max + 0.5 * step, step)
    coeffs = dft_at_frequency(gp.rates_norm, 2.0 * np.pi / periods)
    power = (np.abs(coeffs) ** 2).mean(axis=1)
    peaks = []
    for i in _local_maxima(power):
        prom = _prominence(power, i)
        if prom < prominence:
            continue
        period = float(periods[i])
        cycles = n_prime / period
        peaks.append(SpectralPeak(
            period=period,
            power=float(power[i]),
            prominence=prom,
            cycles_spanned=cycles,
            one_time_event=cycles < min_cycles,
        ))
    peaks.sort(key=lambda p: -p.power)
    return ContinuousSpectrum(periods=periods, power=power,
                              peaks=tuple(peaks), n_prime=n_prime)
