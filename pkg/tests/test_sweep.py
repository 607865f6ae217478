"""Sweep execution, extremum location, correspondence check, CSV and config I/O."""

import io

import numpy as np
import pytest

from blockade_lab import (
    Axis,
    SweepSpec,
    SystemParams,
    check_correspondence,
    g2_zero_analytic,
    locate_extrema,
    parse_sweep_config,
    read_sweep_csv,
    run_sweep,
    write_sweep_csv,
)
from blockade_lab.errors import ConfigError, NoInteriorExtremumError
from blockade_lab.sweep import csv_columns, set_param

BASE = SystemParams(g=1.0, kappa=0.05, gamma=0.05, eta=0.01, delta_a=0.0, delta=0.0)


def small_detuning_sweep(count=81):
    return run_sweep(SweepSpec(base=BASE, axis1=Axis("Delta", -2.0, 2.0, count)))


def synthetic_result(rows):
    """Build a SweepResult by round-tripping handwritten CSV rows."""
    header = "Delta,g2_analytic,g2_numeric,coh_analytic,coh_numeric,status"
    return read_sweep_csv(io.StringIO("\n".join([header] + rows) + "\n"))


def rows_from_curves(deltas, g2, coh):
    return [f"{float(d)!r},{float(a)!r},{float(a)!r},{float(c)!r},{float(c)!r},ok"
            for d, a, c in zip(deltas, g2, coh)]


# --- axes and parameter plumbing


def test_axis_values_and_step():
    ax = Axis("Delta", -2.0, 2.0, 41)
    vals = ax.values()
    assert vals[0] == -2.0 and vals[-1] == 2.0 and len(vals) == 41
    assert ax.step == pytest.approx(0.1)


def test_axis_validation():
    with pytest.raises(ConfigError):
        Axis("phi", 0.0, 1.0, 11)  # unknown parameter
    with pytest.raises(ConfigError):
        Axis("Delta", 0.0, 1.0, 1)  # too few points
    with pytest.raises(ConfigError):
        Axis("Delta", 1.0, 0.0, 11)  # reversed
    with pytest.raises(ConfigError):
        Axis("kappa", -0.5, 1.0, 11)  # negative rate


def test_set_param_links_detunings():
    p = set_param(BASE, "Delta", 1.3)
    assert p.delta_a == 1.3 and p.delta == 1.3
    q = set_param(BASE, "kappa", 0.2)
    assert q.kappa == 0.2 and q.delta_a == BASE.delta_a


def test_spec_validation():
    ax = Axis("Delta", -1.0, 1.0, 11)
    with pytest.raises(ConfigError):
        SweepSpec(base=BASE, axis1=ax, outputs=("g2_numeric", "bogus"))
    with pytest.raises(ConfigError):
        SweepSpec(base=BASE, axis1=ax, axis2=Axis("Delta", 0.0, 1.0, 5))


# --- sweep execution


def test_sweep_matches_point_evaluations():
    res = run_sweep(SweepSpec(base=BASE, axis1=Axis("Delta", 0.5, 1.5, 5),
                              outputs=("g2_analytic",)))
    assert res.status == ["ok"] * 5
    for d, got in zip(res.coords["Delta"], res.column("g2_analytic")):
        p = set_param(BASE, "Delta", float(d))
        assert got == g2_zero_analytic(p)


def test_sweep_is_deterministic():
    spec = SweepSpec(base=BASE, axis1=Axis("Delta", -1.0, 1.0, 9))
    a, b = run_sweep(spec), run_sweep(spec)
    for name in a.columns:
        assert np.array_equal(a.column(name), b.column(name))


def test_sweep_records_failures_and_continues():
    # with no dissipation the numeric branch fails at every point while the
    # analytic branch is singular only on resonance (D1 = g^2 - Delta^2 = 0);
    # each row carries whichever failure was hit first, and the sweep finishes
    base = SystemParams(g=1.0, kappa=0.0, gamma=0.0, eta=0.001, delta_a=0.0, delta=0.0)
    res = run_sweep(SweepSpec(base=base, axis1=Axis("Delta", 0.5, 1.5, 3)))
    assert res.status == ["NoDissipationError", "SingularDenominatorError",
                          "NoDissipationError"]
    assert np.all(np.isnan(res.column("g2_numeric")))
    assert np.isnan(res.column("g2_analytic")[1])
    assert np.all(np.isfinite(res.column("g2_analytic")[[0, 2]]))
    assert np.all(np.isfinite(res.column("coh_analytic")[[0, 2]]))


def test_two_axis_sweep_layout():
    res = run_sweep(SweepSpec(base=BASE,
                              axis1=Axis("kappa", 0.05, 0.1, 2),
                              axis2=Axis("Delta", -1.0, 1.0, 3),
                              outputs=("g2_analytic",)))
    assert res.n_rows == 6
    # first axis is the outer loop
    assert np.array_equal(res.coords["kappa"], [0.05, 0.05, 0.05, 0.1, 0.1, 0.1])
    assert np.array_equal(res.coords["Delta"], [-1.0, 0.0, 1.0, -1.0, 0.0, 1.0])
    assert csv_columns(res) == ["kappa", "Delta", "g2_analytic", "log10_g2_analytic", "status"]


# --- extremum location


def test_locate_extrema_exact_on_parabola():
    # the three-point refinement reproduces a parabola's vertex exactly
    deltas = np.linspace(-2.0, 2.0, 21)
    g2 = 2.0 + (deltas - 0.83) ** 2
    coh = np.ones_like(deltas)
    res = synthetic_result(rows_from_curves(deltas, g2, coh))
    found = locate_extrema(res, "g2_analytic")
    assert len(found) == 1
    assert found[0].kind == "min"
    assert found[0].coordinate == pytest.approx(0.83, abs=1e-12)
    assert found[0].value == pytest.approx(2.0, abs=1e-12)


def test_locate_extrema_excludes_endpoints():
    deltas = np.linspace(-2.0, 2.0, 21)
    res = synthetic_result(rows_from_curves(deltas, deltas + 3.0, np.ones_like(deltas)))
    with pytest.raises(NoInteriorExtremumError):
        locate_extrema(res, "g2_analytic")


def test_locate_extrema_row_selection():
    res = run_sweep(SweepSpec(base=BASE,
                              axis1=Axis("kappa", 0.05, 0.1, 2),
                              axis2=Axis("Delta", -2.0, 2.0, 41),
                              outputs=("coh_analytic",)))
    found = locate_extrema(res, "coh_analytic", row=0)
    peaks = sorted(e.coordinate for e in found if e.kind == "max")
    assert len(peaks) == 2
    assert peaks[0] == pytest.approx(-1.0, abs=0.1)
    assert peaks[1] == pytest.approx(+1.0, abs=0.1)
    with pytest.raises(ConfigError):
        locate_extrema(res, "coh_analytic")  # 2d needs a row
    with pytest.raises(ConfigError):
        locate_extrema(res, "coh_analytic", row=7)


# --- the correspondence check


def test_correspondence_passes_on_blockade_sweep():
    report = check_correspondence(small_detuning_sweep())
    assert report.passed
    for branch in report.branches:
        assert branch.max_gap_steps <= 1.0
        assert len(branch.pairs) == 2  # one pair per sign of the detuning
        signs = sorted(np.sign(pair[0].coordinate) for pair in branch.pairs)
        assert signs == [-1.0, 1.0]
    ratios = {b.branch: b.dark_ratio for b in report.branches}
    assert ratios["analytic"] < 0.05


def test_correspondence_fails_on_displaced_extrema():
    deltas = np.linspace(-2.0, 2.0, 21)
    g2 = 0.01 + (deltas - 0.5) ** 2  # sub-unity minimum at +0.5
    coh = 1.0 / (1.0 + (deltas - 1.0) ** 2)  # peak at +1.0
    res = synthetic_result(rows_from_curves(deltas, g2, coh))
    report = check_correspondence(res)
    assert not report.passed
    assert any("FAIL" in line for line in report.format_lines())


def test_correspondence_requires_extrema():
    deltas = np.linspace(-2.0, 2.0, 21)
    res = synthetic_result(rows_from_curves(deltas, deltas + 3.0, -deltas))
    with pytest.raises(NoInteriorExtremumError):
        check_correspondence(res)


def test_correspondence_falls_back_to_shallow_minima():
    # with no sub-unity minimum anywhere, the nearest minima still get paired
    # so that degraded systems produce a report instead of an error
    deltas = np.linspace(-2.0, 2.0, 41)
    g2 = 5.0 + (deltas**2 - 1.0) ** 2  # minima at +-1, all values > 1
    coh = 1.0 / (1.0 + 20 * (deltas**2 - 1.0) ** 2)  # peaks at +-1
    res = synthetic_result(rows_from_curves(deltas, g2, coh))
    report = check_correspondence(res)
    assert report.passed
    assert all(len(b.pairs) == 2 for b in report.branches)


# --- CSV round trip


def test_csv_round_trip_is_byte_identical():
    res = small_detuning_sweep(count=21)
    first = io.StringIO()
    write_sweep_csv(res, first)
    back = read_sweep_csv(io.StringIO(first.getvalue()))
    second = io.StringIO()
    write_sweep_csv(back, second)
    assert first.getvalue() == second.getvalue()
    assert "\r" not in first.getvalue()


def test_csv_floats_round_trip_exactly():
    res = small_detuning_sweep(count=21)
    back = read_sweep_csv(io.StringIO(_dump(res)))
    for name in res.columns:
        assert np.array_equal(back.column(name), res.column(name))
    assert back.status == res.status


def _dump(res):
    buf = io.StringIO()
    write_sweep_csv(res, buf)
    return buf.getvalue()


def test_csv_reader_rejects_malformed_input():
    with pytest.raises(ConfigError):
        read_sweep_csv(io.StringIO(""))
    with pytest.raises(ConfigError):
        read_sweep_csv(io.StringIO("Delta,g2_numeric\n0.0,1.0\n"))  # no status
    header = "Delta,g2_numeric,status"
    with pytest.raises(ConfigError):
        read_sweep_csv(io.StringIO(header + "\n0.0,abc,ok\n"))
    with pytest.raises(ConfigError):
        read_sweep_csv(io.StringIO(header + "\n0.0,1.0\n"))  # ragged row


def test_two_axis_csv_round_trip():
    res = run_sweep(SweepSpec(base=BASE,
                              axis1=Axis("kappa", 0.05, 0.1, 2),
                              axis2=Axis("Delta", -1.0, 1.0, 5),
                              outputs=("g2_analytic", "g2_numeric")))
    text = _dump(res)
    assert text.splitlines()[0] == ("kappa,Delta,g2_analytic,g2_numeric,"
                                    "log10_g2_analytic,log10_g2_numeric,status")
    back = read_sweep_csv(io.StringIO(text))
    assert [ax.name for ax in back.axes] == ["kappa", "Delta"]
    assert back.axes[0].count == 2 and back.axes[1].count == 5
    assert np.array_equal(back.column("g2_numeric"), res.column("g2_numeric"))
    # log10 columns are derived on write and not stored as data
    assert "log10_g2_numeric" not in back.columns


# --- config files


CONFIG = """
# blockade scan around the coupling resonance
g       = 1.0
kappa   = 0.05
gamma   = 0.05   # same loss for the atom
eta     = 0.01
axis1   = Delta -2 2 81
nmax    = 4
outputs = g2_analytic g2_numeric
"""


def test_parse_config_happy_path():
    spec = parse_sweep_config(CONFIG)
    assert spec.base.g == 1.0 and spec.base.kappa == 0.05
    assert spec.base.delta_a == 0.0  # unset scalars default to zero
    assert spec.axis1.name == "Delta" and spec.axis1.count == 81
    assert spec.axis2 is None
    assert spec.hilbert.n_max == 4
    assert spec.outputs == ("g2_analytic", "g2_numeric")


def test_parse_config_two_axes():
    text = "eta = 0.001\ngamma = 0.01\naxis1 = g 5 30 6\naxis2 = Delta -40 40 101\n"
    spec = parse_sweep_config(text)
    assert spec.axis2 is not None and spec.axis2.count == 101


@pytest.mark.parametrize("text", [
    "g = 1.0\n",                                   # missing axis1
    "axis1 = Delta -2 2 81\nbogus = 1\n",          # unknown key
    "axis1 = Delta -2 2 81\naxis1 = Delta 0 1 5\n",  # duplicate
    "axis1 = Delta -2 2\n",                        # malformed axis
    "axis1 = Delta -2 2 81\nnmax = four\n",        # bad integer
    "axis1 = Delta -2 2 81\ng = soup\n",           # bad float
    "axis1 = Delta -2 2 81\nkappa = -1\n",         # negative rate
    "axis1 = Delta -2 2 81\noutputs = g2_numeric wat\n",  # unknown output
    "just some words\n",                           # no key = value shape
])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_sweep_config(text)
