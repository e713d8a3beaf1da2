"""Synthetic panel generators for validation and benchmarks."""

from __future__ import annotations

import numpy as np

from .growth import GrowthPanel
from .panel import GoodDescriptor, Panel, VARIABLES

__all__ = [
    "panel_from_rates",
    "white_noise_panel",
    "white_noise_growth",
    "planted_factor_panel",
    "planted_lag_panel",
]


def _goods(n_goods: int) -> tuple[GoodDescriptor, ...]:
    return tuple(GoodDescriptor(id=g) for g in range(1, n_goods + 1))


def panel_from_rates(rates, start_month=(1988, 1), base_level: float = 100.0,
                     scale: float = 0.01, seasonally_adjusted: bool = True) -> Panel:
    """Wrap raw rate innovations into a positive level panel.

    Levels are built multiplicatively, S(t_{j+1}) = S(t_j) * 10^(scale * z_j),
    so ``to_growth`` recovers ``scale * z`` exactly (up to rounding) and the
    normalized rates equal the standardized ``z``.
    """
    z = np.asarray(rates, dtype=float)
    if z.ndim != 2 or z.shape[1] % len(VARIABLES):
        raise ValueError("rates must be (n_prime, 3 * n_goods)")
    n_goods = z.shape[1] // len(VARIABLES)
    log_levels = np.vstack([np.zeros(z.shape[1]), np.cumsum(scale * z, axis=0)])
    levels = base_level * 10.0 ** log_levels
    return Panel(
        start_month=start_month,
        goods=_goods(n_goods),
        levels=levels,
        seasonally_adjusted=seasonally_adjusted,
    )


def white_noise_panel(rng: np.random.Generator, n_months: int = 240,
                      n_goods: int = 21) -> Panel:
    """Panel whose growth rates are iid standard normal draws."""
    z = rng.standard_normal((n_months - 1, len(VARIABLES) * n_goods))
    return panel_from_rates(z)


def _solve_factor_amplitudes(u1: np.ndarray, u2: np.ndarray,
                             targets: tuple[float, float]) -> tuple[float, float]:
    # fixed point of (1 + A) = t1 * mean(diag), (1 + B) = t2 * mean(diag)
    t1, t2 = targets
    a, b = t1 - 1.0, t2 - 1.0
    for _ in range(200):
        diag = 1.0 + a * u1**2 + b * u2**2
        d = diag.mean()
        a, b = t1 * d - 1.0, t2 * d - 1.0
    return a, b


def planted_factor_panel(rng: np.random.Generator, n_months: int = 240,
                         n_goods: int = 21, targets: tuple[float, float] = (10.0, 4.0),
                         ) -> tuple[Panel, np.ndarray, np.ndarray]:
    """Panel with two planted orthogonal factors on an iid noise floor.

    Factor strengths are solved so the population correlation matrix has its
    two leading eigenvalues near ``targets``.  Returns the panel and the two
    planted unit directions.
    """
    m = len(VARIABLES) * n_goods
    n_prime = n_months - 1
    u1 = np.ones(m) / np.sqrt(m)
    pattern = np.zeros(m)
    half = (m - 1) // 2
    pattern[:half] = 1.0
    pattern[half:2 * half] = -1.0
    u2 = pattern / np.linalg.norm(pattern)
    a, b = _solve_factor_amplitudes(u1, u2, targets)
    z = (
        np.sqrt(a) * np.outer(rng.standard_normal(n_prime), u1)
        + np.sqrt(b) * np.outer(rng.standard_normal(n_prime), u2)
        + rng.standard_normal((n_prime, m))
    )
    return panel_from_rates(z), u1, u2


def planted_lag_panel(rng: np.random.Generator, n_months: int = 241,
                      n_goods: int = 21, delay: float = 4.0, period: float = 60.0,
                      noise: float = 0.35) -> Panel:
    """Two-factor panel with a known shipment-to-production delay.

    Factor one loads production and shipments together (inventory slightly
    negative); factor two, a quarter period behind, loads production and
    inventory but not shipments.  The factor-two production amplitude is set
    so production lags shipments by exactly ``delay`` months at ``period``
    before noise.  ``period`` must divide n_months - 1.
    """
    n_prime = n_months - 1
    if abs(n_prime / period - round(n_prime / period)) > 1e-9:
        raise ValueError(f"period {period} must align with the grid (N' = {n_prime})")
    omega = 2.0 * np.pi / period
    t = np.arange(n_prime)
    load1 = np.array([1.0, 1.0, -0.3])
    load2 = np.array([0.3, 0.0, 1.0])  # orthogonal to load1
    ratio = np.tan(omega * delay) * load1[0] / load2[0]
    c1 = np.cos(omega * t)
    c2 = ratio * np.cos(omega * (t - period / 4.0))
    jitter = 0.8 + 0.4 * rng.random(n_goods)
    z = np.empty((n_prime, len(VARIABLES) * n_goods))
    for vi in range(len(VARIABLES)):
        for g in range(n_goods):
            z[:, vi * n_goods + g] = jitter[g] * (load1[vi] * c1 + load2[vi] * c2)
    z += noise * rng.standard_normal(z.shape)
    return panel_from_rates(z)


def white_noise_growth(rng: np.random.Generator, n_prime: int = 239,
                       n_goods: int = 21) -> GrowthPanel:
    """Growth panel of iid noise, bypassing level construction."""
    z = rng.standard_normal((n_prime, len(VARIABLES) * n_goods))
    return GrowthPanel.from_rates(z, VARIABLES, _goods(n_goods))
