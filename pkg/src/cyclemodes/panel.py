"""Monthly level-panel ingestion, validation, slicing and persistence.

The canonical input is a long-format CSV with header exactly
``date,variable,good,value`` where ``date`` is ``YYYY-MM``, ``variable`` is
one of ``production``, ``shipment``, ``inventory``, ``good`` is an integer id
(contiguous from 1) and ``value`` is a strictly positive decimal.  UTF-8,
LF or CRLF.

Columns of the in-memory level matrix are ordered variable-major:
``[production g=1..G, shipment g=1..G, inventory g=1..G]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import PanelFormatError

__all__ = [
    "VARIABLES",
    "GoodDescriptor",
    "Panel",
    "AuxSeries",
    "load_panel",
    "save_panel",
    "load_goods_table",
    "load_aux_series",
    "chop",
    "split_in_sample",
    "parse_month",
    "format_month",
    "add_months",
    "month_index",
]

VARIABLES = ("production", "shipment", "inventory")

PANEL_HEADER = ["date", "variable", "good", "value"]
GOODS_HEADER = ["id", "label", "category"]
AUX_HEADER = ["date", "value"]

# interior gaps longer than this are never interpolated
MAX_FILL_GAP = 2


def parse_month(text: str) -> tuple[int, int]:
    parts = text.strip().split("-")
    if len(parts) != 2:
        raise PanelFormatError(f"bad date {text!r}, expected YYYY-MM")
    try:
        year, month = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise PanelFormatError(f"bad date {text!r}, expected YYYY-MM") from exc
    if not 1 <= month <= 12:
        raise PanelFormatError(f"bad month in date {text!r}")
    return year, month


def format_month(ym: tuple[int, int]) -> str:
    return f"{ym[0]:04d}-{ym[1]:02d}"


def add_months(ym: tuple[int, int], delta: int) -> tuple[int, int]:
    total = ym[0] * 12 + (ym[1] - 1) + delta
    return total // 12, total % 12 + 1


def month_index(start: tuple[int, int], ym: tuple[int, int]) -> int:
    """Offset of ``ym`` from ``start`` in months (may be negative)."""
    return (ym[0] - start[0]) * 12 + (ym[1] - start[1])


def variable_block(variables: tuple[str, ...], n_goods: int, variable: str) -> slice:
    """Column slice of one variable's goods block in a variable-major layout."""
    try:
        i = variables.index(variable)
    except ValueError as exc:
        raise ValueError(f"unknown variable {variable!r}; have {variables}") from exc
    return slice(i * n_goods, (i + 1) * n_goods)


@dataclass(frozen=True)
class GoodDescriptor:
    """One row of the goods classification table."""

    id: int
    label: str = ""
    category: str = ""


@dataclass(frozen=True)
class AuxSeries:
    """A single labeled monthly series (for side-by-side output only)."""

    label: str
    start_month: tuple[int, int]
    values: np.ndarray


@dataclass(frozen=True)
class Panel:
    """Validated monthly level panel S[variable, good](t).

    ``levels`` has shape (n_months, 3 * n_goods) with strictly positive
    entries and variable-major column order.  Instances are immutable; the
    level array is marked read-only.
    """

    start_month: tuple[int, int]
    goods: tuple[GoodDescriptor, ...]
    levels: np.ndarray
    variables: tuple[str, ...] = VARIABLES
    seasonally_adjusted: bool = True
    notes: tuple[str, ...] = ()
    filled_cells: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = np.array(self.levels, dtype=float)
        if arr.ndim != 2:
            raise PanelFormatError(f"levels must be 2-d, got ndim={arr.ndim}")
        if arr.shape[0] < 2:
            raise PanelFormatError("panel needs at least 2 months")
        if arr.shape[1] != len(self.variables) * len(self.goods):
            raise PanelFormatError(
                f"levels width {arr.shape[1]} != n_variables*n_goods = "
                f"{len(self.variables) * len(self.goods)}"
            )
        if not np.all(np.isfinite(arr)):
            raise PanelFormatError("levels contain non-finite values")
        if np.any(arr <= 0):
            bad = np.argwhere(arr <= 0)[0]
            raise PanelFormatError(
                f"non-positive level at {self.cell_name(int(bad[0]), int(bad[1]))}"
            )
        ids = [g.id for g in self.goods]
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise PanelFormatError(f"good ids must be contiguous from 1, got {sorted(ids)}")
        arr.setflags(write=False)
        object.__setattr__(self, "levels", arr)
        object.__setattr__(self, "goods", tuple(self.goods))

    @property
    def n_months(self) -> int:
        return self.levels.shape[0]

    @property
    def n_goods(self) -> int:
        return len(self.goods)

    @property
    def n_series(self) -> int:
        return self.levels.shape[1]

    @property
    def months(self) -> list[str]:
        return [format_month(add_months(self.start_month, j)) for j in range(self.n_months)]

    def column_labels(self) -> list[tuple[str, int]]:
        return [(v, g.id) for v in self.variables for g in self.goods]

    def column_index(self, variable: str, good_id: int) -> int:
        ids = [g.id for g in self.goods]
        return self.variables.index(variable) * self.n_goods + ids.index(good_id)

    def block(self, variable: str) -> slice:
        return variable_block(self.variables, self.n_goods, variable)

    def cell_name(self, month_row: int, column: int) -> str:
        variable, good = self.column_labels()[column]
        date = format_month(add_months(self.start_month, month_row))
        return f"(variable={variable}, good={good}, date={date})"


def _read_rows(path, expected_header: list[str]) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise PanelFormatError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if not row[0].lstrip().startswith("#")]
    if not rows:
        raise PanelFormatError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0]]
    if header != expected_header:
        raise PanelFormatError(
            f"{path}: header must be exactly {','.join(expected_header)!r}, "
            f"got {','.join(header)!r}"
        )
    return rows[1:]


def load_goods_table(path) -> tuple[GoodDescriptor, ...]:
    """Load the goods classification CSV (``id,label,category``)."""
    rows = _read_rows(path, GOODS_HEADER)
    goods = []
    seen = set()
    for row in rows:
        if len(row) != 3:
            raise PanelFormatError(f"{path}: bad goods row {row!r}")
        try:
            gid = int(row[0])
        except ValueError as exc:
            raise PanelFormatError(f"{path}: bad good id {row[0]!r}") from exc
        if gid in seen:
            raise PanelFormatError(f"{path}: duplicate good id {gid}")
        seen.add(gid)
        goods.append(GoodDescriptor(id=gid, label=row[1].strip(), category=row[2].strip()))
    goods.sort(key=lambda g: g.id)
    if [g.id for g in goods] != list(range(1, len(goods) + 1)):
        raise PanelFormatError(f"{path}: good ids must be contiguous from 1")
    return tuple(goods)


def _fill_gaps(cells: np.ndarray, fill: bool,
               months: list[str], labels) -> list[str]:
    """Interpolate interior NaN runs of length <= MAX_FILL_GAP (in place)."""
    filled: list[str] = []
    n, m = cells.shape
    for col in range(m):
        isnan = np.isnan(cells[:, col])
        if not isnan.any():
            continue
        variable, good = labels[col]
        j = 0
        while j < n:
            if not isnan[j]:
                j += 1
                continue
            j0 = j
            while j < n and isnan[j]:
                j += 1
            run = j - j0
            interior = j0 > 0 and j < n
            if not fill or not interior or run > MAX_FILL_GAP:
                raise PanelFormatError(
                    f"missing cell (variable={variable}, good={good}, date={months[j0]})"
                    + ("" if not fill else f": gap of {run} months not fillable")
                )
            lo, hi = cells[j0 - 1, col], cells[j, col]
            for step in range(run):
                frac = (step + 1) / (run + 1)
                cells[j0 + step, col] = lo + frac * (hi - lo)
                filled.append(f"variable={variable},good={good},date={months[j0 + step]}")
    return filled


def load_panel(path, goods_path=None, *, fill_interior_gaps: bool = False,
               seasonally_adjusted: bool = True) -> Panel:
    """Load and validate a long-format level panel.

    Every (variable, good, month) cell must be present exactly once on a
    consecutive month grid; duplicates, missing cells (unless
    ``fill_interior_gaps`` covers them) and non-positive values are rejected
    with the offending cell named.
    """
    rows = _read_rows(path, PANEL_HEADER)
    parsed = []
    good_ids = set()
    months_seen = set()
    for row in rows:
        if len(row) != 4:
            raise PanelFormatError(f"{path}: bad row {row!r}")
        ym = parse_month(row[0])
        variable = row[1].strip()
        if variable not in VARIABLES:
            raise PanelFormatError(
                f"{path}: unknown variable {variable!r} (expected one of {VARIABLES})"
            )
        try:
            gid = int(row[2])
        except ValueError as exc:
            raise PanelFormatError(f"{path}: bad good id {row[2]!r}") from exc
        try:
            value = float(row[3])
        except ValueError as exc:
            raise PanelFormatError(f"{path}: bad value {row[3]!r}") from exc
        parsed.append((ym, variable, gid, value))
        good_ids.add(gid)
        months_seen.add(ym)

    if goods_path is not None:
        goods = load_goods_table(goods_path)
        if {g.id for g in goods} != good_ids:
            raise PanelFormatError(
                f"goods table ids {sorted(g.id for g in goods)} do not match "
                f"panel ids {sorted(good_ids)}"
            )
    else:
        if sorted(good_ids) != list(range(1, len(good_ids) + 1)):
            raise PanelFormatError(
                f"{path}: good ids must be contiguous from 1, got {sorted(good_ids)}"
            )
        goods = tuple(GoodDescriptor(id=g) for g in sorted(good_ids))

    start = min(months_seen)
    n_months = month_index(start, max(months_seen)) + 1
    n_goods = len(goods)
    m = len(VARIABLES) * n_goods
    cells = np.full((n_months, m), np.nan)
    ids = [g.id for g in goods]
    months = [format_month(add_months(start, j)) for j in range(n_months)]
    labels = [(v, g.id) for v in VARIABLES for g in goods]
    for ym, variable, gid, value in parsed:
        row_i = month_index(start, ym)
        col = VARIABLES.index(variable) * n_goods + ids.index(gid)
        if not np.isnan(cells[row_i, col]):
            raise PanelFormatError(
                f"{path}: duplicate cell (variable={variable}, good={gid}, "
                f"date={format_month(ym)})"
            )
        if value <= 0:
            raise PanelFormatError(
                f"{path}: non-positive value at (variable={variable}, good={gid}, "
                f"date={format_month(ym)})"
            )
        cells[row_i, col] = value

    filled = _fill_gaps(cells, fill_interior_gaps, months, labels)
    return Panel(
        start_month=start,
        goods=goods,
        levels=cells,
        seasonally_adjusted=seasonally_adjusted,
        filled_cells=tuple(filled),
    )


def save_panel(panel: Panel, path_or_file) -> None:
    """Write a panel back in the canonical long format (12 significant digits)."""
    if hasattr(path_or_file, "write"):
        _write_panel(panel, path_or_file)
        return
    with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
        _write_panel(panel, fh)


def _write_panel(panel: Panel, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(PANEL_HEADER)
    months = panel.months
    for vi, variable in enumerate(panel.variables):
        for gi, good in enumerate(panel.goods):
            col = vi * panel.n_goods + gi
            for row_i, date in enumerate(months):
                writer.writerow([date, variable, good.id,
                                 f"{panel.levels[row_i, col]:.12g}"])


def load_aux_series(path, label: str = "aux") -> AuxSeries:
    """Load a single monthly ``date,value`` series for overlay output."""
    rows = _read_rows(path, AUX_HEADER)
    pairs = []
    for row in rows:
        if len(row) != 2:
            raise PanelFormatError(f"{path}: bad row {row!r}")
        ym = parse_month(row[0])
        try:
            pairs.append((ym, float(row[1])))
        except ValueError as exc:
            raise PanelFormatError(f"{path}: bad value {row[1]!r}") from exc
    pairs.sort(key=lambda p: p[0])
    start = pairs[0][0]
    values = np.full(month_index(start, pairs[-1][0]) + 1, np.nan)
    for ym, value in pairs:
        idx = month_index(start, ym)
        if not np.isnan(values[idx]):
            raise PanelFormatError(f"{path}: duplicate month {format_month(ym)}")
        values[idx] = value
    if np.isnan(values).any():
        missing = int(np.flatnonzero(np.isnan(values))[0])
        raise PanelFormatError(
            f"{path}: missing month {format_month(add_months(start, missing))}"
        )
    return AuxSeries(label=label, start_month=start, values=values)


def chop(panel: Panel, s: int) -> Panel:
    """Prefix panel of the first ``s`` months; the chop is recorded in notes."""
    s = int(s)
    if not 2 <= s <= panel.n_months:
        raise ValueError(f"chop length must be in [2, {panel.n_months}], got {s}")
    if s == panel.n_months:
        return panel
    return replace(panel, levels=panel.levels[:s].copy(),
                   notes=panel.notes + (f"chop:{s}",))


def split_in_sample(panel: Panel, boundary_month: tuple[int, int]) -> tuple[Panel, Panel]:
    """Split into (in-sample prefix ending at ``boundary_month``, full panel)."""
    idx = month_index(panel.start_month, boundary_month)
    if idx < 1 or idx >= panel.n_months:
        raise ValueError(
            f"boundary {format_month(boundary_month)} outside panel range "
            f"{panel.months[0]}..{panel.months[-1]}"
        )
    prefix = chop(panel, idx + 1)
    if prefix is not panel:
        prefix = replace(prefix, notes=panel.notes +
                         (f"in-sample:{format_month(boundary_month)}",))
    return prefix, panel
