"""Out-of-sample volatility decomposition on frozen in-sample eigenvectors.

Extended data are converted to growth rates and normalized with the FROZEN
in-sample means and standard deviations (re-normalizing over the extended
window would leak post-boundary variance into the test; a flag switches).
The monthly volatility P(t) = sum |w(t)|^2 decomposes exactly across any
orthonormal basis as sum_n |a_n(t)|^2, and the relative mode contributions
pi_n(t) = |a_n(t)|^2 / P(t) sum to one wherever P(t) > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .growth import GrowthPanel
from .panel import AuxSeries, GoodDescriptor, Panel, add_months, format_month, month_index
from .rmt import CorrelationModel

__all__ = ["VolatilityReport", "project_out_of_sample", "auxiliary_overlay"]

ZERO_VOLATILITY = 1e-12


@dataclass(frozen=True)
class VolatilityReport:
    """Total volatility per month with partial and relative mode contributions.

    ``relative[n]`` is NaN (absent) for months with P(t) below the zero
    threshold.  ``in_sample_boundary`` is the number of in-sample growth
    months; indices at or beyond it are out-of-sample.
    """

    start_month: tuple[int, int]
    p: np.ndarray
    partial: dict[int, np.ndarray]
    relative: dict[int, np.ndarray]
    coefficients: np.ndarray
    in_sample_boundary: int
    normalization: str
    variables: tuple[str, ...]
    goods: tuple[GoodDescriptor, ...]

    @property
    def months(self) -> list[str]:
        return [format_month(add_months(self.start_month, j)) for j in range(len(self.p))]


def project_out_of_sample(extended: Panel, in_sample_model: CorrelationModel,
                          in_sample_norms: GrowthPanel, *,
                          modes: tuple[int, ...] = (1, 2),
                          renormalize: bool = False) -> VolatilityReport:
    """Decompose extended-panel volatility on the in-sample eigenvectors.

    ``in_sample_norms`` supplies the frozen per-series means and standard
    deviations; ``renormalize=True`` re-standardizes over the extended window
    instead (recorded in the report).
    """
    if not in_sample_model.labels_match(extended.variables, extended.goods):
        raise ValueError("extended panel labeling does not match the in-sample model")
    if not in_sample_model.labels_match(in_sample_norms.variables, in_sample_norms.goods):
        raise ValueError("in-sample norms labeling does not match the in-sample model")
    if extended.start_month != in_sample_norms.start_month:
        raise ValueError("extended panel must start at the in-sample start month")
    if extended.n_months - 1 < in_sample_norms.n_prime:
        raise ValueError("extended panel is shorter than the in-sample window")
    raw = np.log10(extended.levels[1:] / extended.levels[:-1])
    if renormalize:
        stds = raw.std(axis=0)
        stds[stds == 0] = 1.0
        w = (raw - raw.mean(axis=0)) / stds
        normalization = "extended"
    else:
        w = (raw - in_sample_norms.means) / in_sample_norms.stds
        normalization = "frozen"
    a = w @ in_sample_model.eigenvectors
    p = (a**2).sum(axis=1)
    partial = {n: a[:, n - 1] ** 2 for n in modes}
    with np.errstate(invalid="ignore", divide="ignore"):
        relative = {n: np.where(p > ZERO_VOLATILITY, part / p, np.nan)
                    for n, part in partial.items()}
    return VolatilityReport(
        start_month=extended.start_month,
        p=p,
        partial=partial,
        relative=relative,
        coefficients=a,
        in_sample_boundary=in_sample_norms.n_prime,
        normalization=normalization,
        variables=extended.variables,
        goods=extended.goods,
    )


def auxiliary_overlay(report: VolatilityReport, aux: AuxSeries) -> list[dict]:
    """Join an auxiliary monthly series with the volatility report.

    Rows cover the intersection of the two month ranges only; no statistics
    are computed.
    """
    offset = month_index(report.start_month, aux.start_month)
    lo = max(0, offset)
    hi = min(len(report.p), offset + len(aux.values))
    if lo >= hi:
        raise ValueError("auxiliary series does not overlap the report months")
    months = report.months
    rows = []
    for j in range(lo, hi):
        row = {"date": months[j], aux.label: float(aux.values[j - offset]),
               "P": float(report.p[j])}
        for n, rel in sorted(report.relative.items()):
            row[f"pi_mode{n}"] = float(rel[j])
        rows.append(row)
    return rows
