import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import integrate

from gaussmem.core import AnnealSchedule, EstimatorConfig, build_selection
from gaussmem.errors import InvalidCount, IoFailure, OutOfSupport, StencilOutOfSupport
from gaussmem.experiments import cli
from gaussmem.experiments.figures import FIG1_NAME, emit_figures, read_metadata
from gaussmem.experiments.runner import (
    RunSpec,
    SigmaRule,
    compute_sigmas,
    detect_maxima,
    local_curvature,
    rule_sigma,
    run,
    run_one,
    run_user_data,
    spec_from_metadata,
)
from gaussmem.experiments.testpdf import ROOTS, get_test_pdf
from gaussmem.sigma_solver import figure1_data

SMALL = EstimatorConfig(n_points=100, n_conditions=11, smoothing_window=5,
                        sa_params=AnnealSchedule(steps_per_temp=500, t_min=1e-7))
SMALL_FLAGS = ["--n-points", "100", "--n-conditions", "11", "--smoothing-window", "5",
               "--steps-per-temp", "500", "--t-min", "1e-7"]


def test_pdf_normalised():
    tp = get_test_pdf()
    mass = integrate.quad(tp.pdf, 0, 1, points=ROOTS, limit=500, epsabs=1e-13)[0]
    assert abs(mass - 1.0) < 1e-8
    assert np.all(np.diff(tp.table_cdf) > 0)
    with pytest.raises(OutOfSupport):
        tp.pdf(1.1)


def test_pdf_shape():
    tp = get_test_pdf()
    x = np.linspace(0, 1, 1001)
    poly = np.prod([x - r for r in ROOTS], axis=0)
    assert_allclose(tp.pdf(x), np.exp(-1e4 * poly) / tp.z, rtol=1e-12)
    # above 1/Z exactly where the polynomial is negative
    assert_array_equal(tp.pdf(x) > 1 / tp.z, poly < 0)
    assert_allclose(tp.z, 1.380516376880958, rtol=1e-10)
    assert_allclose(tp.local_maxima(), [0.13647, 0.41538, 0.85896], atol=1e-5)
    x = np.linspace(0, 1, 200001)
    y = tp.pdf(x)
    assert detect_maxima(x, y).size == 3
    assert_allclose(detect_maxima(x, y), tp.local_maxima(), atol=1e-5)


def test_sampler():
    tp = get_test_pdf()
    a, b = tp.sample(5000, 7), tp.sample(5000, 7)
    assert_array_equal(a, b)
    assert not np.array_equal(a, tp.sample(5000, 8))
    assert a.min() >= 0 and a.max() <= 1
    # mass in [0.3, 0.5] against quadrature, within 4 standard errors
    p = integrate.quad(tp.pdf, 0.3, 0.5, points=[0.41538])[0]
    frac = np.mean((a >= 0.3) & (a <= 0.5))
    assert abs(frac - p) < 4 * math.sqrt(p * (1 - p) / a.size)
    with pytest.raises(InvalidCount):
        tp.sample(1, 0)


def test_local_curvature():
    q = lambda x: 2.0 + 3.0 * x - 1.5 * x * x  # noqa: E731
    rho, rho2 = local_curvature(q, 0.4, 0.01)
    assert_allclose([rho, rho2], [q(0.4), -3.0], rtol=1e-9)
    # second-order accurate on a smooth density
    f = lambda x: math.exp(math.sin(3 * x))  # noqa: E731

    def exact(x):
        return f(x) * (9 * math.cos(3 * x) ** 2 - 9 * math.sin(3 * x))

    e1 = abs(local_curvature(f, 0.3, 0.02)[1] - exact(0.3))
    e2 = abs(local_curvature(f, 0.3, 0.01)[1] - exact(0.3))
    assert 3.5 < e1 / e2 < 4.5
    xs = np.linspace(0, 1, 1001)
    assert_allclose(local_curvature((xs, q(xs)), 0.5, 0.01)[1], -3.0, rtol=1e-6)
    with pytest.raises(StencilOutOfSupport):
        local_curvature(get_test_pdf().pdf, 0.001, 0.01)
    with pytest.raises(StencilOutOfSupport):
        local_curvature((xs, q(xs)), 0.999, 0.01)


def test_sigma_rules():
    assert SigmaRule.parse("frac:30") == SigmaRule("frac", 30.0)
    assert str(SigmaRule.parse("fixed:0.05")) == "fixed:0.05"
    assert SigmaRule.parse("frac:30").label == "frac30"
    assert SigmaRule.parse("sigma4") == SigmaRule("sigma4")
    for bad in ("frac:0", "frac", "kde", "fixed:-1"):
        with pytest.raises(ValueError):
            SigmaRule.parse(bad)
    assert rule_sigma("sigma4", 1.0, 30.0, 1.0) == math.inf
    assert_allclose(rule_sigma("sigma0", 1.0, 5.0, 1.0), 1 / math.sqrt(2 * math.pi))
    # past the critical curvature sigma1 falls back to the width maximising F
    assert_allclose(rule_sigma("sigma1", 1.0, -10.0, 1.0), math.sqrt(2 / 30))


def test_compute_sigmas_clipped():
    sel = build_selection(get_test_pdf().sample(1000, 0))
    spec = RunSpec(sigma_rule=SigmaRule("sigma4"), config=SMALL)
    sig = compute_sigmas(sel, spec, get_test_pdf().pdf)
    assert sig.shape == (11,)
    assert np.all(sig >= 0.5 * sel.delta_x / 10 - 1e-15) and np.all(sig <= sel.delta_x / 10)
    with pytest.raises(ValueError):
        compute_sigmas(sel, spec, None)
    assert compute_sigmas(sel, RunSpec(sigma_rule=SigmaRule("frac", 30.0)), None) == sel.delta_x / 30


def test_run_deterministic_and_reproducible():
    spec = RunSpec(n_samples=300, config=SMALL, seed=4, replicates=2)
    a, b = run(spec), run(spec, workers=2)
    for ra, rb in zip(a.reports, b.reports):
        assert_array_equal(ra.density, rb.density)
        assert ra.l1_error == rb.l1_error
    assert [r.metadata["seed"] for r in a.reports] == [4, 5]
    assert a.l1_sd == pytest.approx(np.std([r.l1_error for r in a.reports], ddof=1))
    # metadata alone rebuilds the run
    again = run_one(spec_from_metadata(a.reports[1].metadata), 0)
    assert_array_equal(again.density, a.reports[1].density)


def test_report_errors_consistent():
    r = run_one(RunSpec(n_samples=300, config=SMALL, seed=1))
    assert r.l1_error >= 0 and r.linf_error == np.max(np.abs(r.density - r.true_density))
    assert_allclose(integrate.trapezoid(np.abs(r.density - r.true_density), r.x), r.l1_error)
    assert r.epsilon.shape == r.centers.shape == (11,)


def test_user_data_pilot_rule():
    vals = get_test_pdf().sample(400, 3)
    r = run_user_data(vals, RunSpec(n_samples=400, sigma_rule=SigmaRule("sigma1"), config=SMALL))
    assert r.l1_error is None and r.true_density is None
    assert r.metadata["curvature_source"] == "pilot"
    assert_allclose(integrate.trapezoid(r.density, r.x), 1.0, atol=0.02)


def test_emit_figures(tmp_path):
    spec = RunSpec(n_samples=200, config=SMALL, replicates=2)
    reports = run(spec).reports
    paths = emit_figures(reports, figure1_data(), tmp_path)
    names = sorted(p.name for p in paths)
    assert FIG1_NAME in names
    assert "fig2_density_N200_sigma_frac30_seed1.csv" in names
    meta = read_metadata(tmp_path / "fig2_density_N200_sigma_frac30_seed0.csv")
    assert meta["sigma_rule"] == "frac:30" and float(meta["l1_error"]) == reports[0].l1_error
    first = {p.name: p.read_bytes() for p in paths}
    emit_figures(run(spec).reports, figure1_data(), tmp_path)
    assert first == {p.name: p.read_bytes() for p in paths}
    with pytest.raises(IoFailure, match="NoData"):
        emit_figures([], None, tmp_path)


def _cli_outputs(tmp_path, argv):
    out = tmp_path / "out"
    assert cli.main(argv + ["--out-dir", str(out)]) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_cli_estimate(tmp_path):
    data = tmp_path / "s.csv"
    data.write_text("x\n" + "\n".join(repr(float(v)) for v in get_test_pdf().sample(300, 2)) + "\n")
    files = _cli_outputs(tmp_path, ["estimate", "--input", str(data), "--column", "x"] + SMALL_FLAGS)
    assert set(files) == {"density.csv", "epsilon.csv"}
    header = [ln for ln in files["density.csv"].decode().splitlines() if not ln.startswith("#")][0]
    assert header == "x,density"


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\noops\n")
    assert cli.main(["estimate", "--input", str(bad), "--out-dir", str(tmp_path)]) == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "SampleParseError" and ":2:" in err["message"]
    assert cli.main(["estimate", "--input", str(tmp_path / "none.txt")]) == 1
    assert cli.main(["paper-fig1", "--rho-c", "-1", "--out-dir", str(tmp_path)]) == 1


def test_cli_fig1(tmp_path):
    files = _cli_outputs(tmp_path, ["paper-fig1", "--rows", "41"])
    lines = files[FIG1_NAME].decode().splitlines()
    assert len(lines) == 43
