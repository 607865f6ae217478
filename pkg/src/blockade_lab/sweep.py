"""Parameter sweeps over both solver branches, extremum location, and CSV I/O.

A sweep walks one or two linear parameter axes, evaluates the requested
outputs at every grid point, and never aborts on a single bad point; failures
are recorded in a per-row status column. Grid points are evaluated in a fixed
row-major order (first axis outer), so identical specs produce byte-identical
CSV files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

import numpy as np

from .analytic import atom_coherence_analytic, g2_zero_analytic
from .correlations import atom_coherence_numeric, g2_zero_numeric, mean_photon
from .errors import ConfigError, NoInteriorExtremumError, SolverError
from .lindblad import LiouvillianBasis, steady_state
from .quantum_core import HilbertConfig, SystemParams

# Axis names: the six physical parameters plus the linked detuning "Delta"
# which sets delta_a and delta together.
RATE_PARAMS = ("g", "kappa", "gamma", "eta")
AXIS_NAMES = RATE_PARAMS + ("delta_a", "delta", "Delta")

# Canonical output column order for results and CSV.
OUTPUT_COLUMNS = ("g2_analytic", "g2_numeric", "coh_analytic", "coh_numeric", "mean_photon")
_NUMERIC_COLUMNS = {"g2_numeric", "coh_numeric", "mean_photon"}
_ANALYTIC_COLUMNS = {"g2_analytic", "coh_analytic"}
STATUS_OK = "ok"


@dataclass(frozen=True)
class Axis:
    """A linear grid over one parameter."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown axis parameter {self.name!r}")
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be >= 2")
        if not self.start < self.stop:
            raise ConfigError(f"axis {self.name}: start must be < stop")
        if self.name in RATE_PARAMS and self.start < 0:
            raise ConfigError(f"axis {self.name}: rates cannot go negative")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.count - 1)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters, one or two axes, truncation, and requested outputs."""

    base: SystemParams
    axis1: Axis
    axis2: Axis | None = None
    hilbert: HilbertConfig = HilbertConfig(4)
    outputs: tuple[str, ...] = ("g2_analytic", "g2_numeric", "coh_analytic", "coh_numeric")

    def __post_init__(self):
        bad = [name for name in self.outputs if name not in OUTPUT_COLUMNS]
        if bad:
            raise ConfigError(f"unknown outputs {bad}; choose from {OUTPUT_COLUMNS}")
        if not self.outputs:
            raise ConfigError("at least one output column is required")
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ConfigError("the two axes must sweep different parameters")

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)


@dataclass
class SweepResult:
    """Row-major grid results. Row count is the product of the axis counts."""

    axes: tuple[Axis, ...]
    coords: dict[str, np.ndarray]
    columns: dict[str, np.ndarray]
    status: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return int(np.prod([ax.count for ax in self.axes]))

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise ConfigError(f"result has no column {name!r}")
        return self.columns[name]


def set_param(base: SystemParams, name: str, value: float) -> SystemParams:
    """Return params with one axis parameter replaced; Delta sets both detunings."""
    if name == "Delta":
        return replace(base, delta_a=value, delta=value)
    return replace(base, **{name: value})


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every grid point through the requested branches.

    The numeric branch assembles each point's Liouvillian from a per-sweep
    basis of unit-parameter superoperators rather than rebuilding Kronecker
    products. A failed point gets NaN in the affected columns and the error
    class name in the status column; the sweep continues.
    """
    axes = spec.axes
    values = [ax.values() for ax in axes]
    if len(axes) == 1:
        mesh = [values[0]]
    else:
        mesh = [np.repeat(values[0], axes[1].count), np.tile(values[1], axes[0].count)]
    n_rows = mesh[0].size

    want_numeric = any(name in _NUMERIC_COLUMNS for name in spec.outputs)
    want_analytic = any(name in _ANALYTIC_COLUMNS for name in spec.outputs)
    basis = LiouvillianBasis(spec.hilbert) if want_numeric else None

    columns = {name: np.full(n_rows, np.nan) for name in spec.outputs}
    status: list[str] = []
    for row in range(n_rows):
        params = spec.base
        for ax, grid in zip(axes, mesh):
            params = set_param(params, ax.name, float(grid[row]))
        flag = STATUS_OK
        if want_analytic:
            try:
                if "g2_analytic" in columns:
                    columns["g2_analytic"][row] = g2_zero_analytic(params)
                if "coh_analytic" in columns:
                    columns["coh_analytic"][row] = atom_coherence_analytic(params)
            except (SolverError, ValueError) as exc:
                flag = type(exc).__name__
        if want_numeric:
            try:
                rho = steady_state(basis.assemble(params))
                if "g2_numeric" in columns:
                    columns["g2_numeric"][row] = g2_zero_numeric(rho, spec.hilbert)
                if "coh_numeric" in columns:
                    columns["coh_numeric"][row] = atom_coherence_numeric(rho, spec.hilbert)
                if "mean_photon" in columns:
                    columns["mean_photon"][row] = mean_photon(rho, spec.hilbert)
            except (SolverError, ValueError) as exc:
                if flag == STATUS_OK:
                    flag = type(exc).__name__
        status.append(flag)

    coords = {ax.name: np.asarray(grid, dtype=float) for ax, grid in zip(axes, mesh)}
    ordered = {name: columns[name] for name in OUTPUT_COLUMNS if name in columns}
    return SweepResult(axes=axes, coords=coords, columns=ordered, status=status)


@dataclass(frozen=True)
class Extremum:
    """An interior local extremum after parabolic refinement."""

    coordinate: float
    value: float
    kind: str  # "min" or "max"


def _refine(x: np.ndarray, y: np.ndarray, idx: int) -> tuple[float, float]:
    """Three-point parabolic refinement around an interior grid extremum."""
    h = x[idx + 1] - x[idx]
    denom = y[idx - 1] - 2.0 * y[idx] + y[idx + 1]
    if denom == 0.0:
        return float(x[idx]), float(y[idx])
    shift = 0.5 * (y[idx - 1] - y[idx + 1]) / denom
    coord = x[idx] + shift * h
    value = y[idx] - 0.25 * (y[idx - 1] - y[idx + 1]) * shift
    return float(coord), float(value)


def _curve_for(result: SweepResult, column: str, row: int | None) -> tuple[np.ndarray, np.ndarray]:
    vals = result.column(column)
    if len(result.axes) == 1:
        if row is not None:
            raise ConfigError("row selection only applies to 2d sweeps")
        return result.coords[result.axes[0].name], vals
    if row is None:
        raise ConfigError("2d sweep: pass row to select a slice along the first axis")
    n2 = result.axes[1].count
    if not 0 <= row < result.axes[0].count:
        raise ConfigError(f"row {row} outside axis1 range")
    sl = slice(row * n2, (row + 1) * n2)
    return result.coords[result.axes[1].name][sl], vals[sl]


def locate_extrema(result: SweepResult, column: str, row: int | None = None) -> list[Extremum]:
    """Interior local extrema of one output column, endpoints excluded.

    For a 2d sweep, `row` picks an index along the first axis and the scan
    runs along the second. Raises NoInteriorExtremumError when the curve is
    monotone (or too short to have an interior point).
    """
    x, y = _curve_for(result, column, row)
    found: list[Extremum] = []
    for i in range(1, len(y) - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            coord, value = _refine(x, y, i)
            found.append(Extremum(coord, value, "max"))
        elif y[i] < y[i - 1] and y[i] < y[i + 1]:
            coord, value = _refine(x, y, i)
            found.append(Extremum(coord, value, "min"))
    if not found:
        raise NoInteriorExtremumError(f"column {column!r} has no interior extremum")
    return found


@dataclass(frozen=True)
class BranchReport:
    """Correspondence data for one solver branch."""

    branch: str
    pairs: tuple[tuple[Extremum, Extremum, float], ...]  # (g2 min, coh max, gap in steps)
    max_gap_steps: float
    dark_ratio: float
    passed: bool


@dataclass(frozen=True)
class CorrespondenceReport:
    """Pairing of photon-statistics minima with coherence maxima."""

    branches: tuple[BranchReport, ...]
    gap_threshold: float

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.branches)

    def format_lines(self) -> list[str]:
        lines = []
        for rep in self.branches:
            for g2_min, coh_max, gap in rep.pairs:
                lines.append(
                    f"{rep.branch}: g2 min at {g2_min.coordinate:+.6g} "
                    f"(value {g2_min.value:.6g}) vs coherence max at "
                    f"{coh_max.coordinate:+.6g} (value {coh_max.value:.6g}); "
                    f"gap {gap:.3g} steps"
                )
            lines.append(
                f"{rep.branch}: dark-point coherence ratio {rep.dark_ratio:.6g}; "
                f"max gap {rep.max_gap_steps:.3g} steps; "
                f"{'PASS' if rep.passed else 'FAIL'} at threshold {self.gap_threshold:g}"
            )
        lines.append(f"correspondence: {'PASS' if self.passed else 'FAIL'}")
        return lines


def check_correspondence(result: SweepResult, gap_threshold: float = 1.0) -> CorrespondenceReport:
    """Pair each blockade minimum with the nearest coherence maximum.

    Needs a 1d sweep over Delta. Evaluated separately for every branch whose
    two columns are both present. Only sub-Poissonian minima (g2 < 1) are
    paired when any exist: the detuning curve also has shallow local minima
    between its bunching peaks, and those say nothing about blockade. If no
    minimum dips below 1 every minimum is paired, so degraded parameter sets
    still produce a report. A branch passes when every pairing gap is at most
    gap_threshold grid steps. The dark-point ratio (coherence at Delta = 0
    over the coherence grid maximum) is reported, not gated.
    """
    if len(result.axes) != 1 or result.axes[0].name != "Delta":
        raise ConfigError("correspondence check needs a 1d sweep over Delta")
    step = result.axes[0].step
    x = result.coords["Delta"]

    reports = []
    for branch in ("analytic", "numeric"):
        g2_name, coh_name = f"g2_{branch}", f"coh_{branch}"
        if g2_name not in result.columns or coh_name not in result.columns:
            continue
        g2_minima = [e for e in locate_extrema(result, g2_name) if e.kind == "min"]
        coh_maxima = [e for e in locate_extrema(result, coh_name) if e.kind == "max"]
        blockade = [e for e in g2_minima if e.value < 1.0]
        if blockade:
            g2_minima = blockade
        if not g2_minima or not coh_maxima:
            raise NoInteriorExtremumError(f"{branch}: missing minima or maxima to pair")
        pairs = []
        for minimum in g2_minima:
            nearest = min(coh_maxima, key=lambda e: abs(e.coordinate - minimum.coordinate))
            gap = abs(nearest.coordinate - minimum.coordinate) / step
            pairs.append((minimum, nearest, gap))
        max_gap = max(gap for _, _, gap in pairs)
        coh_vals = result.column(coh_name)
        dark = float(coh_vals[np.argmin(np.abs(x))])
        ratio = dark / float(np.max(coh_vals))
        reports.append(BranchReport(
            branch=branch,
            pairs=tuple(pairs),
            max_gap_steps=max_gap,
            dark_ratio=ratio,
            passed=bool(max_gap <= gap_threshold),
        ))
    if not reports:
        raise ConfigError("result has no complete (g2, coherence) column pair")
    return CorrespondenceReport(branches=tuple(reports), gap_threshold=gap_threshold)


# ---------------------------------------------------------------------------
# CSV

def _format_value(v: float) -> str:
    return repr(float(v))


def csv_columns(result: SweepResult) -> list[str]:
    """Column layout: coordinates, outputs, log10 of g2 columns (2d only), status."""
    names = [ax.name for ax in result.axes]
    names += list(result.columns.keys())
    if len(result.axes) == 2:
        names += [f"log10_{c}" for c in result.columns if c.startswith("g2_")]
    names.append("status")
    return names


def write_sweep_csv(result: SweepResult, stream: TextIO) -> None:
    """Emit the result as CSV: LF endings, shortest round-trip floats."""
    header = csv_columns(result)
    log_cols = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for name in header:
            if name.startswith("log10_"):
                log_cols[name] = np.log10(result.column(name[len("log10_"):]))
    stream.write(",".join(header) + "\n")
    for row in range(result.n_rows):
        cells = [_format_value(result.coords[ax.name][row]) for ax in result.axes]
        cells += [_format_value(col[row]) for col in result.columns.values()]
        cells += [_format_value(log_cols[name][row]) for name in header if name in log_cols]
        cells.append(result.status[row])
        stream.write(",".join(cells) + "\n")


def read_sweep_csv(stream: Iterable[str]) -> SweepResult:
    """Parse a file produced by write_sweep_csv back into a SweepResult.

    Axes are reconstructed from the coordinate columns; values round-trip
    exactly since they were written in shortest round-trip form.
    """
    lines = [line.rstrip("\n") for line in stream if line.strip()]
    if not lines:
        raise ConfigError("empty CSV input")
    header = lines[0].split(",")
    if header[-1] != "status":
        raise ConfigError("expected a trailing status column")
    coord_names = [name for name in header if name in AXIS_NAMES]
    data_names = [name for name in header[:-1] if name not in coord_names]

    rows = [line.split(",") for line in lines[1:]]
    if any(len(r) != len(header) for r in rows):
        raise ConfigError("ragged CSV row")
    table = {name: [] for name in header[:-1]}
    status = []
    for r in rows:
        for name, cell in zip(header[:-1], r[:-1]):
            try:
                table[name].append(float(cell))
            except ValueError as exc:
                raise ConfigError(f"bad float {cell!r} in column {name}") from exc
        status.append(r[-1])

    axes = []
    for name in coord_names:
        vals = np.array(table[name])
        uniq = np.unique(vals)
        axes.append(Axis(name, float(uniq[0]), float(uniq[-1]), len(uniq)))
    if not axes:
        raise ConfigError("no coordinate column found")
    coords = {name: np.array(table[name]) for name in coord_names}
    columns = {
        name: np.array(table[name])
        for name in data_names
        if not name.startswith("log10_")
    }
    return SweepResult(axes=tuple(axes), coords=coords, columns=columns, status=status)


# ---------------------------------------------------------------------------
# Config files

_SCALAR_KEYS = ("g", "kappa", "gamma", "eta", "delta_a", "delta")


def parse_sweep_config(text: str) -> SweepSpec:
    """Build a SweepSpec from flat `key = value` text.

    Recognized keys: the six base parameters, nmax, outputs (comma separated
    column names), and axis1 / axis2 with value "name start stop count".
    `#` starts a comment; blank lines are ignored.
    """
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value

    base_kwargs = {name: 0.0 for name in _SCALAR_KEYS}
    axes: dict[str, Axis] = {}
    nmax = 4
    outputs = None
    for key, value in entries.items():
        if key in _SCALAR_KEYS:
            try:
                base_kwargs[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: bad number {value!r}") from exc
        elif key == "nmax":
            try:
                nmax = int(value)
            except ValueError as exc:
                raise ConfigError(f"nmax: bad integer {value!r}") from exc
        elif key in ("axis1", "axis2"):
            parts = value.replace(",", " ").split()
            if len(parts) != 4:
                raise ConfigError(f"{key}: expected 'name start stop count', got {value!r}")
            try:
                axes[key] = Axis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
        elif key == "outputs":
            outputs = tuple(p for p in value.replace(",", " ").split())
        else:
            raise ConfigError(f"unknown key {key!r}")

    if "axis1" not in axes:
        raise ConfigError("config needs an axis1 line")
    try:
        base = SystemParams(**base_kwargs)
        hilbert = HilbertConfig(nmax)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kwargs = {"base": base, "axis1": axes["axis1"], "axis2": axes.get("axis2"), "hilbert": hilbert}
    if outputs is not None:
        kwargs["outputs"] = outputs
    return SweepSpec(**kwargs)
