"""Batch command-line front end.

Subcommands ``ingest``, ``spectrum``, ``factors``, ``modes``, ``leadlag``,
``xspec``, ``oos`` and ``all`` each run standalone from the input panel plus
the run configuration; upstream quantities are re-derived in memory, so no
hidden state passes between stages.  Every output file carries a metadata
header (tool version, config hash, seed, input digests) and is written
atomically (temp file + rename).  Runs are deterministic given inputs,
configuration and seed.

Exit codes: 0 success, 2 input error, 3 numerical error, 4 degenerate
simulation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    CycleModesError,
    NumericalError,
    PanelFormatError,
    SimulationDegenerateError,
)
from .growth import autocorrelation, moving_average, save_growth, to_growth
from .leadlag import phase_delay, reshuffle_significance
from .modes import binned_relative_contribution, project_modes, reconstruct_cycles
from .numerics import RngStream
from .oos import auxiliary_overlay, project_out_of_sample
from .panel import (
    load_aux_series,
    load_panel,
    parse_month,
    save_panel,
    split_in_sample,
)
from .rmt import classify_significance, correlation_matrix, rotation_null
from .spectrum import (
    averaged_power_spectrum,
    chopped_spectra,
    continuous_spectrum,
    default_chops,
    half_wavenumbers,
)
from .xspectrum import (
    PHASE_CI_FORMULA,
    SIGNIFICANCE_FORMULA,
    coherency_phase,
    delay_in_months,
)

OUTDIR_ENV = "CYCLEMODES_OUTDIR"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_DEGENERATE = 4

SUMMARY_SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """One run's full configuration; embedded in every output's metadata."""

    panel: str = ""
    goods: str | None = None
    aux: str | None = None
    outdir: str = "."
    seed: int = 12345
    trials: int = 1000
    null_trials: int = 1000
    chops: tuple[int, ...] | None = None
    t_min: float = 24.0
    t_max: float = 120.0
    t_step: float = 0.01
    modes: tuple[int, ...] = (1, 2)
    wavenumbers: tuple[int, ...] = (4, 6)
    span: int = 11
    alignment_shift: int = 8
    fill_gaps: bool = False
    accept: str = "mp"
    overlap_threshold: float = 0.8
    truncate_smoothing: bool = False
    renormalize_extended: bool = False
    boundary: str | None = None
    bin_width: float = 0.02
    prominence: float = 0.0
    min_cycles: float = 3.0
    power_scale: float = 1.0
    dump_null_samples: bool = False
    seasonally_adjusted: bool = True

    def canonical_json(self) -> str:
        # outdir changes where results land, not what they are; keep it out of
        # the identity so runs into different directories compare byte-equal
        payload = asdict(self)
        payload.pop("outdir")
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def _round_sig(x: float, digits: int = 4) -> float:
    if x == 0 or not math.isfinite(x):
        return x
    return round(x, digits - 1 - math.floor(math.log10(abs(x))))


def _jsonify(obj):
    """Round floats to 4 significant digits and strip NaN for the summary."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else _round_sig(x)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    return obj


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.12g}"


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()[:16]


class Reporter:
    """Writes metadata-stamped CSV/JSON files atomically into the run directory."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.outdir = Path(config.outdir)
        self.meta = {
            "tool": f"cyclemodes {__version__}",
            "config_hash": config.config_hash(),
            "config": config.canonical_json(),
            "seed": str(config.seed),
        }
        for name in ("panel", "goods", "aux"):
            path = getattr(config, name)
            if path:
                self.meta[f"input_digest_{name}"] = _sha256(path)
        self.written: list[str] = []

    def _atomic(self, relpath: str, writer) -> Path:
        target = self.outdir / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-", suffix=".part")
        try:
            with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
                writer(fh)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(relpath)
        return target

    def _header_lines(self, extra: dict | None) -> list[str]:
        meta = dict(self.meta)
        if extra:
            meta.update({k: str(v) for k, v in extra.items()})
        return [f"# {k}: {v}" for k, v in meta.items()]

    def csv(self, relpath: str, columns: list[str], rows, extra_meta: dict | None = None):
        def write(fh):
            for line in self._header_lines(extra_meta):
                fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow(row)
        return self._atomic(relpath, write)

    def json(self, relpath: str, payload: dict, extra_meta: dict | None = None):
        meta = dict(self.meta)
        if extra_meta:
            meta.update({k: str(v) for k, v in extra_meta.items()})
        body = {"metadata": meta}
        body.update(_jsonify(payload))
        def write(fh):
            json.dump(body, fh, sort_keys=True, indent=1)
            fh.write("\n")
        return self._atomic(relpath, write)

    def file(self, relpath: str, render, extra_meta: dict | None = None):
        """Render through a library saver, prefixing the metadata header."""
        def write(fh):
            for line in self._header_lines(extra_meta):
                fh.write(line + "\n")
            render(fh)
        return self._atomic(relpath, write)


class Pipeline:
    """Lazily derives shared quantities; stages pull what they need."""

    def __init__(self, config: RunConfig, reporter: Reporter):
        self.cfg = config
        self.out = reporter
        self._cache: dict[str, object] = {}

    def _get(self, key: str, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def panel(self):
        return self._get("panel", lambda: load_panel(
            self.cfg.panel,
            self.cfg.goods,
            fill_interior_gaps=self.cfg.fill_gaps,
            seasonally_adjusted=self.cfg.seasonally_adjusted,
        ))

    @property
    def growth(self):
        return self._get("growth", lambda: to_growth(self.panel))

    @property
    def model(self):
        return self._get("model", lambda: correlation_matrix(self.growth))

    @property
    def decomposition(self):
        return self._get("md", lambda: project_modes(self.growth, self.model))

    @property
    def reconstruction(self):
        return self._get("cr", lambda: reconstruct_cycles(
            self.decomposition, self.cfg.modes, self.cfg.wavenumbers))

    @property
    def rng(self) -> RngStream:
        return RngStream(self.cfg.seed)

    # ------------------------------------------------------------- stages

    def stage_ingest(self) -> dict:
        panel = self.panel
        gp = self.growth
        self.out.file("ingest/panel_echo.csv", lambda fh: save_panel(panel, fh),
                      extra_meta={"seasonally_adjusted": panel.seasonally_adjusted,
                                  "filled_cells": len(panel.filled_cells)})
        self.out.file("ingest/growth.csv", lambda fh: save_growth(gp, fh))
        prof = autocorrelation(gp, m_max=min(36, gp.n_prime - 1))
        rows = [
            (variable, int(lag), _fmt(prof.averaged[vi, lag]))
            for vi, variable in enumerate(prof.variables)
            for lag in prof.lags
        ]
        self.out.csv("ingest/autocorrelation.csv", ["variable", "lag", "value"], rows)
        return {
            "n_months": panel.n_months,
            "n_goods": panel.n_goods,
            "n_series": panel.n_series,
            "start": panel.months[0],
            "end": panel.months[-1],
            "filled_cells": list(panel.filled_cells),
            "autocorrelation_lag1": {
                v: float(prof.averaged[i, 1]) for i, v in enumerate(prof.variables)
            },
        }

    def stage_spectrum(self) -> dict:
        gp = self.growth
        spec = averaged_power_spectrum(gp)
        scale = self.cfg.power_scale
        rows = [(int(k), _fmt(spec.periods[k]), _fmt(scale * spec.power[k]))
                for k in spec.half_range]
        self.out.csv("spectrum/spectrum.csv", ["k", "period_months", "power"], rows,
                     extra_meta={"power_scale": scale})
        chops = self.cfg.chops
        if chops is None:
            try:
                chops = default_chops(self.panel.n_months)
            except ValueError:
                chops = ()
        for cs in chopped_spectra(self.panel, chops) if chops else []:
            rows = [(int(k), _fmt(cs.periods[k]), _fmt(scale * cs.power[k]))
                    for k in cs.half_range]
            self.out.csv(f"spectrum/spectrum_chop_{cs.chop:04d}.csv",
                         ["k", "period_months", "power"], rows,
                         extra_meta={"chop_months": cs.chop, "power_scale": scale})
        t_max = min(self.cfg.t_max, float(gp.n_prime))
        cont = continuous_spectrum(gp, self.cfg.t_min, t_max, self.cfg.t_step,
                                   prominence=self.cfg.prominence,
                                   min_cycles=self.cfg.min_cycles)
        self.out.csv("spectrum/continuous.csv", ["period_months", "power"],
                     ((_fmt(t), _fmt(scale * p)) for t, p in zip(cont.periods, cont.power)),
                     extra_meta={"power_scale": scale})
        self.out.csv(
            "spectrum/peaks.csv",
            ["period_months", "power", "prominence", "cycles_spanned", "one_time_event"],
            [(_fmt(p.period), _fmt(p.power), _fmt(p.prominence),
              _fmt(p.cycles_spanned), int(p.one_time_event)) for p in cont.peaks],
            extra_meta={"min_cycles": self.cfg.min_cycles},
        )
        recurrent = [p for p in cont.peaks if not p.one_time_event]
        return {
            "n_prime": gp.n_prime,
            "power_sum": float(spec.power.sum()),
            "chops": list(chops),
            "peaks": [
                {"period": p.period, "power": p.power, "one_time_event": p.one_time_event}
                for p in cont.peaks[:8]
            ],
            "top_recurrent_periods": [p.period for p in recurrent[:2]],
        }

    def stage_factors(self) -> dict:
        model = self.model
        report = classify_significance(model)
        rows = [
            (n + 1, _fmt(model.eigenvalues[n]), int(report.significant[n]),
             _fmt(report.margins[n]))
            for n in range(model.m)
        ]
        self.out.csv("factors/eigen_report.csv",
                     ["mode", "eigenvalue", "significant", "margin"], rows,
                     extra_meta={"lambda_plus": report.params.lambda_plus,
                                 "lambda_minus": report.params.lambda_minus,
                                 "q": report.params.q})
        labels = self.growth.column_labels()
        vec_rows = [
            (n + 1, labels[i][0], labels[i][1], _fmt(model.eigenvectors[i, n]))
            for n in range(model.m) for i in range(model.m)
        ]
        self.out.csv("factors/eigenvectors.csv",
                     ["mode", "variable", "good", "component"], vec_rows)
        self.out.csv("factors/mp_density.csv", ["lambda", "density"],
                     ((_fmt(l), _fmt(d)) for l, d in
                      zip(report.density_grid, report.density_values)))
        summary = {
            "eigenvalues_top": [float(v) for v in model.eigenvalues[:5]],
            "lambda_plus": report.params.lambda_plus,
            "lambda_minus": report.params.lambda_minus,
            "q": report.params.q,
            "significant_modes": list(report.significant_modes),
        }
        if self.cfg.null_trials > 0:
            null_report = rotation_null(self.growth, self.cfg.null_trials,
                                        RngStream(self.cfg.seed, stream_id=1),
                                        bin_width=self.cfg.bin_width)
            null = null_report.null_distribution
            centers = 0.5 * (null.bin_edges[:-1] + null.bin_edges[1:])
            self.out.csv("factors/null_pdf.csv", ["lambda_bin", "density"],
                         ((_fmt(c), _fmt(d)) for c, d in zip(centers, null.density)),
                         extra_meta={"trials": null.trials,
                                     "bin_width": self.cfg.bin_width})
            null_summary = {
                "trials": null.trials,
                "largest_mean": null.largest.mean,
                "largest_std": null.largest.std,
                "second_mean": null.second.mean,
                "second_std": null.second.std,
                "largest_q999": null.largest_q999,
            }
            self.out.json("factors/null_stats.json", null_summary)
            summary["rotation_null"] = null_summary
        return summary

    def stage_modes(self) -> dict:
        md = self.decomposition
        months = range(1, md.n_prime + 1)
        coef_rows = [
            (n + 1, t, _fmt(md.coefficients[j, n]))
            for n in range(md.n_modes) for j, t in enumerate(months)
        ]
        self.out.csv("modes/mode_coefficients.csv", ["mode", "t", "value"], coef_rows)
        periods = np.concatenate([[np.inf], md.n_prime / np.arange(1, md.n_prime)])
        half = half_wavenumbers(md.n_prime)
        spec_rows = [
            (n + 1, int(k), _fmt(periods[k]), _fmt(md.mode_power[k, n]))
            for n in range(md.n_modes)
            for k in half
        ]
        self.out.csv("modes/mode_spectrum.csv",
                     ["mode", "k", "period_months", "power"], spec_rows)
        binned = binned_relative_contribution(md, modes=self.cfg.modes)
        share_cols = [f"share_mode{n}" for n in binned.modes]
        rows = [
            [_fmt(cb.t_low), _fmt(cb.t_high), len(cb.wavenumbers)]
            + [_fmt(cb.shares[n]) for n in binned.modes] + [_fmt(cb.share_sum)]
            for cb in binned.bins
        ]
        self.out.csv("modes/binned_contributions.csv",
                     ["t_low", "t_high", "n_wavenumbers", *share_cols, "share_sum"],
                     rows, extra_meta={"bin_rule": binned.rule})
        cr = self.reconstruction
        cyc_rows = []
        for vi, variable in enumerate(cr.variables):
            for n in cr.modes:
                for j in range(cr.n_prime):
                    cyc_rows.append((variable, j + 1,
                                     _fmt(cr.averaged_by_mode[n][j, vi]), f"mode{n}"))
            for j in range(cr.n_prime):
                cyc_rows.append((variable, j + 1, _fmt(cr.averaged_sum[j, vi]), "sum"))
        self.out.csv("modes/cycles.csv", ["variable", "t", "value", "component"],
                     cyc_rows, extra_meta={"modes": list(cr.modes),
                                           "wavenumbers": list(cr.wavenumbers)})
        window = 12
        comp_rows = []
        gp = self.growth
        for vi, variable in enumerate(cr.variables):
            for j in range(cr.n_prime):
                comp_rows.append((variable, j + 1, _fmt(cr.averaged_sum[j, vi]),
                                  "cycle_sum"))
            original = gp.rates_norm[:, gp.block(variable)].mean(axis=1)
            if gp.n_prime >= window:
                smoothed = moving_average(original, window)
                for i, value in enumerate(smoothed):
                    center = i + (window - 1) / 2.0 + 1
                    comp_rows.append((variable, _fmt(center), _fmt(value),
                                      f"original_ma{window}"))
        self.out.csv("modes/cycle_comparison.csv",
                     ["variable", "t", "value", "component"], comp_rows)
        total_power = md.mode_power.sum()
        share = {
            f"mode{n}": float(md.mode_power[:, n - 1].sum() / total_power)
            for n in self.cfg.modes
        }
        return {
            "relative_contribution": share,
            "relative_contribution_sum": float(sum(share.values())),
            "bin_rule": binned.rule,
        }

    def stage_leadlag(self) -> dict:
        cr = self.reconstruction
        observed = {}
        for pair in (("shipment", "production"), ("production", "inventory")):
            label = "SP" if pair[0] == "shipment" else "PI"
            for k in self.cfg.wavenumbers:
                est = phase_delay(cr, pair, k)
                observed[f"{label}_k{k}"] = {
                    "delta_months": est.delta_months,
                    "period": est.period,
                }
        mc = reshuffle_significance(
            self.growth, self.model, self.cfg.trials,
            RngStream(self.cfg.seed, stream_id=2),
            wavenumbers=self.cfg.wavenumbers,
            accept=self.cfg.accept,
            overlap_threshold=self.cfg.overlap_threshold,
        )
        null = {}
        for res in mc.results:
            null[f"{res.label}_k{res.k}"] = {
                "observed": res.observed,
                "period": res.period,
                "reestimated": {
                    "mean": res.reestimated.mean, "std": res.reestimated.std,
                    "ci": [res.reestimated.ci_low, res.reestimated.ci_high],
                },
                "frozen": {
                    "mean": res.frozen.mean, "std": res.frozen.std,
                    "ci": [res.frozen.ci_low, res.frozen.ci_high],
                },
            }
        payload = {
            "observed": observed,
            "null": null,
            "trials_requested": mc.trials_requested,
            "trials_used": mc.trials_used,
            "trials_rejected": mc.trials_rejected,
            "acceptance_rate": mc.acceptance_rate,
            "acceptance_criterion": mc.acceptance_criterion,
            "seed": mc.seed,
            "stream_id": mc.stream_id,
        }
        self.out.json("leadlag/leadlag.json", payload)
        if self.cfg.dump_null_samples:
            rows = [
                (variant, label, k, _fmt(value))
                for (variant, label, k), arr in sorted(mc.samples.items())
                for value in arr
            ]
            self.out.csv("leadlag/null_samples.csv",
                         ["variant", "pair", "k", "value"], rows)
        return payload

    def _xspec_pair(self, x, y, shift: int):
        return coherency_phase(x, y, span=self.cfg.span, alignment_shift=shift,
                               wrap=not self.cfg.truncate_smoothing)

    def stage_xspec(self) -> dict:
        cr = self.reconstruction
        gp = self.growth
        idx = {v: i for i, v in enumerate(gp.variables)}
        two_mode = {v: cr.averaged_sum[:, idx[v]] for v in gp.variables}
        original = {v: gp.rates_norm[:, gp.block(v)].mean(axis=1) for v in gp.variables}
        pairs = {
            "sp": ("shipment", "production", 0),
            "pi": ("production", "inventory", self.cfg.alignment_shift),
        }
        summary = {}
        ks = half_wavenumbers(gp.n_prime)
        for variant, series in (("two_mode", two_mode), ("all_mode", original)):
            for short, (xv, yv, shift) in pairs.items():
                est = self._xspec_pair(series[xv], series[yv], shift)
                rows = [
                    (int(k), _fmt(gp.n_prime / k), _fmt(est.kappa2[k]),
                     _fmt(est.phase[k]), _fmt(est.phase_ci_low[k]),
                     _fmt(est.phase_ci_high[k]), int(est.significant_90[k]),
                     int(est.significant_99[k]))
                    for k in ks
                ]
                self.out.csv(
                    f"xspec/xspec_{variant}_{short}.csv",
                    ["k", "period_months", "kappa2", "phase_cycles",
                     "phase_ci_low", "phase_ci_high", "significant_90",
                     "significant_99"],
                    rows,
                    extra_meta={
                        "pair": f"{xv}->{yv}",
                        "alignment_shift": est.alignment_shift,
                        "span": self.cfg.span,
                        "kernel_weights": " ".join(f"{w:.6g}" for w in est.kernel_weights),
                        "bandwidth_cycles_per_month": f"{est.bandwidth:.6g}",
                        "eq_dof": f"{est.eq_dof:.6g}",
                        "significance_formula": SIGNIFICANCE_FORMULA,
                        "phase_ci_formula": PHASE_CI_FORMULA,
                        "level_90": f"{est.level_90:.6g}",
                        "level_99": f"{est.level_99:.6g}",
                    },
                )
                for k in self.cfg.wavenumbers:
                    d = delay_in_months(est, k)
                    summary[f"{variant}_{short.upper()}_k{k}"] = {
                        "significant": d.significant,
                        "delta_months": d.delta,
                        "ci": list(d.ci) if d.ci else None,
                        "period": d.period,
                    }
        self.out.json("xspec/delays.json", summary)
        return summary

    def stage_oos(self) -> dict:
        if not self.cfg.boundary:
            return {"skipped": "no boundary month configured"}
        boundary = parse_month(self.cfg.boundary)
        in_sample, extended = split_in_sample(self.panel, boundary)
        gp_in = to_growth(in_sample)
        model_in = correlation_matrix(gp_in)
        report = project_out_of_sample(
            extended, model_in, gp_in,
            modes=self.cfg.modes,
            renormalize=self.cfg.renormalize_extended,
        )
        months = report.months
        mode_list = sorted(report.partial)
        rows = []
        for j, date in enumerate(months):
            row = [j + 1, date, _fmt(report.p[j])]
            row += [_fmt(report.partial[n][j]) for n in mode_list]
            row += [_fmt(report.relative[n][j]) for n in mode_list]
            rows.append(row)
        cols = (["t", "date", "P"]
                + [f"partial_mode{n}" for n in mode_list]
                + [f"pi_mode{n}" for n in mode_list])
        self.out.csv("oos/volatility.csv", cols, rows,
                     extra_meta={"normalization": report.normalization,
                                 "in_sample_boundary": report.in_sample_boundary})
        summary = {
            "boundary": self.cfg.boundary,
            "normalization": report.normalization,
            "in_sample_boundary": report.in_sample_boundary,
            "p_max": float(np.nanmax(report.p)),
            "p_max_month": months[int(np.nanargmax(report.p))],
        }
        out_slice = slice(report.in_sample_boundary, None)
        if report.p[out_slice].size:
            for n in mode_list:
                rel = report.relative[n][out_slice]
                rel = rel[~np.isnan(rel)]
                if rel.size:
                    summary[f"pi_mode{n}_out_of_sample_mean"] = float(rel.mean())
        if self.cfg.aux:
            aux = load_aux_series(self.cfg.aux)
            table = auxiliary_overlay(report, aux)
            cols = list(table[0].keys())
            self.out.csv("oos/overlay.csv", cols,
                         ([_fmt(r[c]) if isinstance(r[c], float) else r[c] for c in cols]
                          for r in table))
            summary["overlay_months"] = len(table)
        return summary


STAGES = {
    "ingest": Pipeline.stage_ingest,
    "spectrum": Pipeline.stage_spectrum,
    "factors": Pipeline.stage_factors,
    "modes": Pipeline.stage_modes,
    "leadlag": Pipeline.stage_leadlag,
    "xspec": Pipeline.stage_xspec,
    "oos": Pipeline.stage_oos,
}


def run_pipeline(config: RunConfig, stages=None) -> dict:
    """Run the requested stages (all of them by default) and return the summary."""
    reporter = Reporter(config)
    pipeline = Pipeline(config, reporter)
    names = list(STAGES) if stages is None else list(stages)
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "tool_version": __version__,
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "stages": {},
    }
    for name in names:
        try:
            summary["stages"][name] = STAGES[name](pipeline)
        except Exception as exc:
            exc.args = (f"[stage:{name}] {exc}",)
            raise
    if stages is None:
        reporter.json("summary.json", summary)
        reporter.json("config.json", {"config": asdict(config)})
    return summary


# ----------------------------------------------------------------- argparse

def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclemodes",
        description="Business-cycle spectral and eigenmode factor analysis.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ingest", "validate the panel; emit growth rates and autocorrelation"),
        ("spectrum", "discrete, chopped and continuous averaged power spectra"),
        ("factors", "correlation eigendecomposition, MP bounds, rotation null"),
        ("modes", "mode coefficients, mode spectra, contributions, cycles"),
        ("leadlag", "phase delays and reshuffle Monte-Carlo significance"),
        ("xspec", "cross-spectrum coherency and phase for SP and PI pairs"),
        ("oos", "out-of-sample volatility decomposition"),
        ("all", "run every stage and write summary.json"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_options(p)
    return parser


def _add_options(p: argparse.ArgumentParser) -> None:
    # defaults are None so that config-file values can be overridden per flag
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--panel", help="long-format level panel CSV")
    p.add_argument("--goods", help="goods classification CSV (id,label,category)")
    p.add_argument("--aux", help="auxiliary date,value series for overlay output")
    p.add_argument("--out", dest="outdir",
                   help=f"output directory (default ${OUTDIR_ENV} or '.')")
    p.add_argument("--seed", type=int, help="master seed for all simulations")
    p.add_argument("--trials", type=int, help="reshuffle Monte-Carlo trials")
    p.add_argument("--null-trials", dest="null_trials", type=int,
                   help="rotation-null trials (0 disables)")
    p.add_argument("--chops", type=_int_list, help="comma-separated chop lengths")
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--t-step", dest="t_step", type=float)
    p.add_argument("--modes", type=_int_list, help="retained modes, e.g. 1,2")
    p.add_argument("--wavenumbers", type=_int_list, help="retained wavenumbers, e.g. 4,6")
    p.add_argument("--span", type=int, help="Daniell kernel span (odd)")
    p.add_argument("--alignment-shift", dest="alignment_shift", type=int,
                   help="months to pre-shift inventory for the PI cross-spectrum")
    p.add_argument("--fill-gaps", dest="fill_gaps", action=argparse.BooleanOptionalAction,
                   help="linearly interpolate interior gaps of <= 2 months")
    p.add_argument("--accept", choices=["mp", "mp_overlap"],
                   help="reshuffle trial acceptance criterion")
    p.add_argument("--overlap-threshold", dest="overlap_threshold", type=float)
    p.add_argument("--truncate-smoothing", dest="truncate_smoothing",
                   action=argparse.BooleanOptionalAction,
                   help="truncate kernel smoothing at spectrum edges instead of wrapping")
    p.add_argument("--renormalize-extended", dest="renormalize_extended",
                   action=argparse.BooleanOptionalAction,
                   help="re-standardize out-of-sample growth over the extended window")
    p.add_argument("--boundary", help="in-sample boundary month YYYY-MM for oos")
    p.add_argument("--bin-width", dest="bin_width", type=float,
                   help="eigenvalue null-PDF bin width")
    p.add_argument("--prominence", type=float, help="continuous-spectrum peak prominence")
    p.add_argument("--min-cycles", dest="min_cycles", type=float,
                   help="cycles required before a peak is not a one-time event")
    p.add_argument("--power-scale", dest="power_scale", type=float,
                   help="presentation-only multiplier for emitted power columns")
    p.add_argument("--dump-null-samples", dest="dump_null_samples",
                   action=argparse.BooleanOptionalAction,
                   help="write reshuffle null samples CSV")
    p.add_argument("--not-seasonally-adjusted", dest="seasonally_adjusted",
                   action="store_false", default=None,
                   help="mark the input as not seasonally adjusted")


def _merge_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise PanelFormatError(f"cannot load config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise PanelFormatError(f"config {args.config} must be a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise PanelFormatError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    for key in ("chops", "modes", "wavenumbers"):
        if key in values and values[key] is not None:
            values[key] = tuple(int(v) for v in values[key])
    if "outdir" not in values:
        values["outdir"] = os.environ.get(OUTDIR_ENV, ".")
    config = RunConfig(**values)
    if not config.panel:
        raise PanelFormatError("an input panel is required (--panel or config file)")
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _merge_config(args)
        stages = None if args.command == "all" else [args.command]
        run_pipeline(config, stages)
    except SimulationDegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (PanelFormatError, CycleModesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
