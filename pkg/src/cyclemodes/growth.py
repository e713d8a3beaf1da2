"""Log growth rates, per-series normalization, autocorrelation, moving average.

The growth rate of a level series S is r(t_j) = log10(S(t_{j+1}) / S(t_j))
for j = 1..N-1, and the normalized rate is w = (r - mean(r)) / std(r) with the
population (divide-by-N') standard deviation, so that each w series has mean 0
and standard deviation 1 and sum_k |w~(omega_k)|^2 = N' holds exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .errors import DegenerateSeriesError
from .panel import (
    GoodDescriptor,
    Panel,
    add_months,
    format_month,
    variable_block,
)

__all__ = [
    "GrowthPanel",
    "to_growth",
    "autocorrelation",
    "AutocorrProfile",
    "moving_average",
    "save_growth",
]

DEFAULT_AUTOCORR_LAGS = 36


@dataclass(frozen=True)
class GrowthPanel:
    """Raw and normalized growth rates with the per-series statistics.

    Arrays have shape (n_prime, n_series) where n_prime = n_months - 1;
    columns follow the source panel's variable-major order.
    """

    rates_raw: np.ndarray
    rates_norm: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    start_month: tuple[int, int]
    goods: tuple[GoodDescriptor, ...]
    variables: tuple[str, ...]
    seasonally_adjusted: bool = True

    def __post_init__(self) -> None:
        for name in ("rates_raw", "rates_norm", "means", "stds"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_prime(self) -> int:
        return self.rates_norm.shape[0]

    @property
    def n_series(self) -> int:
        return self.rates_norm.shape[1]

    @property
    def n_goods(self) -> int:
        return len(self.goods)

    @property
    def months(self) -> list[str]:
        # growth point j spans t_j -> t_{j+1}; it is stamped with t_j
        return [format_month(add_months(self.start_month, j)) for j in range(self.n_prime)]

    def block(self, variable: str) -> slice:
        return variable_block(self.variables, self.n_goods, variable)

    def column_labels(self) -> list[tuple[str, int]]:
        return [(v, g.id) for v in self.variables for g in self.goods]

    @classmethod
    def from_rates(cls, rates, variables, goods, start_month=(2000, 1),
                   seasonally_adjusted: bool = True) -> "GrowthPanel":
        """Build a growth panel directly from raw rates (normalizing them)."""
        raw = np.asarray(rates, dtype=float)
        means = raw.mean(axis=0)
        stds = raw.std(axis=0)
        if np.any(stds == 0):
            bad = int(np.flatnonzero(stds == 0)[0])
            raise DegenerateSeriesError(f"constant series at column {bad}")
        return cls(
            rates_raw=raw,
            rates_norm=(raw - means) / stds,
            means=means,
            stds=stds,
            start_month=start_month,
            goods=tuple(goods),
            variables=tuple(variables),
            seasonally_adjusted=seasonally_adjusted,
        )


def to_growth(panel: Panel) -> GrowthPanel:
    """Convert a level panel to normalized log10 growth rates.

    Raises
    ------
    DegenerateSeriesError
        If any series is constant (zero variance), naming the series.
    """
    if panel.n_months < 3:
        raise ValueError(f"panel needs at least 3 months, got {panel.n_months}")
    raw = np.log10(panel.levels[1:] / panel.levels[:-1])
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)  # population (divide by N')
    if np.any(stds == 0):
        labels = panel.column_labels()
        bad = [f"(variable={labels[i][0]}, good={labels[i][1]})"
               for i in np.flatnonzero(stds == 0)]
        raise DegenerateSeriesError("constant series: " + ", ".join(bad))
    return GrowthPanel(
        rates_raw=raw,
        rates_norm=(raw - means) / stds,
        means=means,
        stds=stds,
        start_month=panel.start_month,
        goods=panel.goods,
        variables=panel.variables,
        seasonally_adjusted=panel.seasonally_adjusted,
    )


@dataclass(frozen=True)
class AutocorrProfile:
    """Per-series and goods-averaged autocorrelation up to a maximum lag."""

    lags: np.ndarray
    per_series: np.ndarray       # (n_series, m_max + 1)
    averaged: np.ndarray         # (n_variables, m_max + 1)
    variables: tuple[str, ...]


def autocorrelation(gp: GrowthPanel, m_max: int = DEFAULT_AUTOCORR_LAGS) -> AutocorrProfile:
    """Autocorrelation R(m) = (1/(N'-m)) sum_j w(t_j) w(t_{j+m}).

    R(0) = 1 for every normalized series by construction.  The averaged
    profile is the mean over goods within each variable.
    """
    m_max = check_positive_int(m_max, "m_max")
    n_prime = gp.n_prime
    if m_max >= n_prime:
        raise ValueError(f"m_max must be < N' = {n_prime}, got {m_max}")
    w = gp.rates_norm
    per = np.empty((gp.n_series, m_max + 1))
    for m in range(m_max + 1):
        per[:, m] = (w[: n_prime - m] * w[m:]).sum(axis=0) / (n_prime - m)
    averaged = np.stack([per[gp.block(v)].mean(axis=0) for v in gp.variables])
    return AutocorrProfile(
        lags=np.arange(m_max + 1),
        per_series=per,
        averaged=averaged,
        variables=gp.variables,
    )


def moving_average(x, window: int = 12) -> np.ndarray:
    """Centered simple moving average; output length is len(x) - window + 1.

    Element i averages x[i:i+window] and is centered at offset
    i + (window - 1)/2 (a half-integer for even windows).
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"x must be 1-d, got ndim={arr.ndim}")
    window = check_positive_int(window, "window")
    if window > arr.shape[0]:
        raise ValueError(f"window {window} exceeds series length {arr.shape[0]}")
    return np.convolve(arr, np.full(window, 1.0 / window), mode="valid")


def save_growth(gp: GrowthPanel, path_or_file) -> None:
    """Export raw and normalized rates as long-format CSV with a ``kind`` column."""
    if hasattr(path_or_file, "write"):
        _write_growth(gp, path_or_file)
        return
    with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
        _write_growth(gp, fh)


def _write_growth(gp: GrowthPanel, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["date", "variable", "good", "value", "kind"])
    months = gp.months
    for kind, arr in (("raw", gp.rates_raw), ("normalized", gp.rates_norm)):
        for vi, variable in enumerate(gp.variables):
            for gi, good in enumerate(gp.goods):
                col = vi * gp.n_goods + gi
                for row_i, date in enumerate(months):
                    writer.writerow([date, variable, good.id,
                                     f"{arr[row_i, col]:.12g}", kind])
