import json
import math

import numpy as np
import pytest

from multipath_aoi import experiments as ex
from multipath_aoi.cli import main
from multipath_aoi.latency import latency_curve
from multipath_aoi.model import Scheme, SystemConfig

SMALL = 1 << 15


def rows_where(rows, **kw):
    return [r for r in rows if all(getattr(r, k) == v for k, v in kw.items())]


def one(rows, **kw):
    found = rows_where(rows, **kw)
    assert len(found) == 1, (kw, found)
    return found[0].value


def test_scenario_validation():
    cfg = SystemConfig.make(Scheme.split(), 1.0)
    with pytest.raises(ValueError):
        ex.Scenario("x", cfg, metrics=("p50",))
    with pytest.raises(ValueError):
        ex.Scenario("x", cfg, qualities=("hq",))
    assert ex.Scenario("x", SystemConfig.make(Scheme.coded(0.8), 1.0)).qualities == Scheme.coded(0.8).qualities


def test_sweep_validation():
    base = ex.Scenario("x", SystemConfig.make(Scheme.coded(0.8), 2.0))
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "tau", ())
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "mu", (1.0,))
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "eta", (0.4,))
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "epsilon", (1.0,))
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "tau", (1.0,), optimize="minimize_p99_paoi")
    with pytest.raises(ValueError):
        ex.SweepSpec(base, "eta", (0.6,), optimize="maximize_fun")


def test_replicated_latency_agrees():
    scn = ex.Scenario("rep", SystemConfig.make(Scheme.replicated(), 1.5), 1 << 20, 1, ("latency_cdf",))
    rows = ex.run_scenario(scn, grid_points=50)
    assert one(rows, metric="ks_latency") < 0.01
    an = rows_where(rows, metric="latency_cdf", source="analytic")
    sim = rows_where(rows, metric="latency_cdf", source="simulated")
    assert len(an) == len(sim) == 50
    assert [r.axis_value for r in an] == [r.axis_value for r in sim]
    assert an[0].axis == "t" and an[0].value == 0.0


def test_queue_based_is_simulation_only_and_competitive():
    cfg = SystemConfig.make(Scheme.queue_based(), 2.0)
    rows = ex.run_scenario(ex.Scenario("qb", cfg, 1 << 18, 1, ("p99_latency", "delivery_prob")))
    assert not rows_where(rows, source="analytic")
    assert all(r.flag == "simulation_only" for r in rows)
    qb = one(rows, metric="p99_latency")
    alt = latency_curve(SystemConfig.make(Scheme.alternating(), 2.0)).percentile(0.99)
    assert qb <= alt * 1.03


def test_coded_lq_below_hq():
    scn = ex.Scenario("c", SystemConfig.make(Scheme.coded(0.75), 1.5), SMALL, 1, ("p99_latency",))
    rows = ex.run_scenario(scn)
    for src in ("analytic", "simulated"):
        assert one(rows, quality="lq", source=src, metric="p99_latency") < \
            one(rows, quality="hq", source=src, metric="p99_latency")


def test_unstable_point_is_flagged():
    scn = ex.Scenario("u", SystemConfig.make(Scheme.replicated(), 0.75), SMALL, 1, ("p99_latency", "latency_cdf"))
    rows = ex.run_scenario(scn)
    assert rows and all(r.flag == "unstable" and math.isinf(r.value) for r in rows)


def test_bound_rows_are_one_sided():
    cfg = SystemConfig.make(Scheme.alternating(), 2.0, eps=(0.2, 0.2))
    rows = ex.run_scenario(ex.Scenario("b", cfg, SMALL, 1, ("paoi_cdf", "p99_paoi")), grid_points=20)
    assert all(r.flag == "lower_bound" for r in rows_where(rows, source="analytic"))
    assert rows_where(rows, metric="bound_gap_paoi")
    assert not rows_where(rows, metric="ks_paoi")


def test_err_prob_sweep():
    grid = tuple(round(0.05 * k, 2) for k in range(9))
    for scheme, law in ((Scheme.replicated(), lambda e: 1 - e * e), (Scheme.alternating(), lambda e: 1 - e),
                        (Scheme.split(), lambda e: (1 - e) ** 2)):
        base = ex.Scenario("e", SystemConfig.make(scheme, 2.0), SMALL, 1, ("delivery_prob",))
        rows = ex.sweep(ex.SweepSpec(base, "epsilon", grid))
        for e in grid:
            assert one(rows, axis_value=e, source="analytic") == pytest.approx(law(e), abs=1e-12)
            p = law(e)
            n = SMALL - 1000
            assert abs(one(rows, axis_value=e, source="simulated") - p) <= 4 * math.sqrt(p * (1 - p) / n) + 1e-12


def test_eta_sweep_stability_boundary():
    grid = (0.55, 0.6, 0.65, 2 / 3, 0.68, 0.75, 1.0)
    base = ex.Scenario("s", SystemConfig.make(Scheme.coded(0.8), 0.75), SMALL, 1, ("p99_latency",), ("hq",),
                       simulate=False)
    rows = ex.sweep(ex.SweepSpec(base, "eta", grid))
    for eta in grid:
        v = one(rows, axis_value=eta, metric="p99_latency")
        if eta <= 2 / 3:
            assert math.isinf(v) and rows_where(rows, axis_value=eta)[0].flag == "unstable"
        else:
            assert math.isfinite(v)
    vals = [one(rows, axis_value=e, metric="p99_latency") for e in (0.68, 0.75)]
    assert vals[0] > vals[1]


def test_flat_schemes_repeat_along_eta():
    base = ex.Scenario("f", SystemConfig.make(Scheme.split(), 1.5), SMALL, 1, ("p99_latency",))
    rows = ex.sweep(ex.SweepSpec(base, "eta", (0.5, 0.75, 1.0)))
    vals = {r.value for r in rows_where(rows, metric="p99_latency", source="simulated")}
    assert len(vals) == 1


def test_tau_sweep_u_shape():
    grid = tuple(np.geomspace(0.6, 8.0, 12))
    base = ex.Scenario("t", SystemConfig.make(Scheme.split(), 1.0), SMALL, 1, ("p99_paoi",), simulate=False)
    vals = [r.value for r in ex.sweep(ex.SweepSpec(base, "tau", grid)) if r.metric == "p99_paoi"]
    k = int(np.argmin(vals))
    assert 0 < k < len(vals) - 1


def test_golden_section():
    x, fx = ex.golden_section(lambda t: (t - 1.7) ** 2 + 3.0, 0.1, 10.0)
    assert x == pytest.approx(1.7, rel=2e-3)
    assert fx == pytest.approx(3.0, abs=1e-5)


def test_optimized_tau_is_grid_minimum():
    base = ex.Scenario("o", SystemConfig.make(Scheme.coded(0.8), 2.0), SMALL, 1, ("p99_paoi",), ("hq",),
                       simulate=False)
    rows = ex.sweep(ex.SweepSpec(base, "eta", (0.8,), optimize="minimize_p99_paoi"))
    tau = one(rows, metric="tau_opt")
    best = one(rows, metric="p99_paoi")
    from multipath_aoi.age import paoi_curve
    taus = np.linspace(tau * 0.7, tau * 1.3, 25)
    grid_best = min(paoi_curve(SystemConfig.make(Scheme.coded(0.8), t), "hq").percentile(0.99) for t in taus)
    assert best <= grid_best + 1e-6


def test_csv_format_and_determinism(tmp_path):
    scn = ex.Scenario("d", SystemConfig.make(Scheme.split(), 1.5), SMALL, 3, ("p99_latency", "delivery_prob"))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ex.emit_csv(ex.run_scenario(scn), a)
    ex.emit_csv(list(reversed(ex.run_scenario(scn))), b)
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "scenario,scheme,quality,metric,axis,axis_value,source,value,flag"
    assert lines[1].endswith(",")  # stable rows carry an empty flag
    value = lines[1].split(",")[7]
    assert len(value.replace(".", "").lstrip("0")) <= 9


def test_csv_infinity_and_errors(tmp_path):
    row = ex.Row("s", "split", "whole", "p99_latency", "tau", 0.2, "analytic", math.inf, "unstable")
    p = tmp_path / "inf.csv"
    ex.emit_csv([row], p)
    assert p.read_text().splitlines()[1] == "s,split,whole,p99_latency,tau,0.2,analytic,inf,unstable"
    with pytest.raises(ValueError):
        ex.emit_csv([], p)
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        ex.emit_csv([row], bad)


def test_gnuplot_blocks(tmp_path):
    scn = ex.Scenario("g", SystemConfig.make(Scheme.split(), 1.5), SMALL, 3, ("latency_cdf",))
    p = tmp_path / "g.dat"
    ex.emit_gnuplot(ex.run_scenario(scn, grid_points=10), p)
    text = p.read_text()
    assert text.count("# index") == 3  # analytic, simulated, ks
    assert "\n\n\n# index 1" in text


def test_json_round_trip(tmp_path):
    doc = {"name": "j", "cfg": {"scheme": {"variant": "coded", "eta": 0.75}, "tau": 1.5,
                                "paths": [{"mu": 1, "epsilon": 0.2}, {"mu": 1.5, "epsilon": 0.1}]},
           "n_frames": 4000, "seed": 9, "metrics": ["p99_latency"], "qualities": ["hq"]}
    scn = ex.scenario_from_dict(doc)
    assert scn.cfg == SystemConfig.make(Scheme.coded(0.75), 1.5, (1, 1.5), (0.2, 0.1))
    assert scn.qualities[0].value == "hq" and scn.seed == 9
    spec = ex.sweep_from_dict({"base": doc, "axis": "tau", "grid": [1.5, 2]})
    assert spec.grid == (1.5, 2.0)
    with pytest.raises(ValueError):
        ex.scenario_from_dict(dict(doc, colour="red"))
    with pytest.raises(ValueError):
        ex.config_from_dict({"scheme": "split", "tau": 1, "paths": [{}]})


def test_presets_listed_and_build():
    assert list(ex.PRESETS) == ["lat-cdf-balanced", "lat-eta", "lat-cdf-unbalanced", "err-prob", "lat-cdf-errors",
                                "lat99-vs-tau", "paoi-cdf-balanced", "paoi-cdf-errors", "paoi99-vs-tau",
                                "paoi99-vs-eta-optimized"]
    for name in ex.PRESETS:
        assert ex.preset_jobs(name, SMALL, 1, 5)
    with pytest.raises(ValueError):
        ex.preset_jobs("nope")


def test_parallel_preset_matches_serial():
    a = ex.run_preset("err-prob", 4000, 2, workers=1)
    b = ex.run_preset("err-prob", 4000, 2, workers=3)
    assert a == b


# ---------------------------------------------------------------- CLI


def test_cli_list(capsys):
    assert main(["list-presets"]) == 0
    assert "paoi99-vs-eta-optimized" in capsys.readouterr().out


def test_cli_compare_stdout(capsys):
    assert main(["--frames", "5000", "compare", "--scheme", "split", "--tau", "1.5", "--metrics", "p99_latency"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("scenario,scheme")
    assert len(out) == 4


def test_cli_config_and_override(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"name": "fromfile", "cfg": {"scheme": "replicated", "tau": 2.0},
                               "n_frames": 5000, "seed": 4, "metrics": ["delivery_prob"]}))
    out = tmp_path / "o.csv"
    assert main(["--out", str(out), "analytic", "--config", str(cfg), "--tau", "3", "--eps", "0.2", "0.2"]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "fromfile,replicated,whole,delivery_prob,tau,3,analytic,0.96,"
    assert len(lines) == 2


def test_cli_global_flags_after_subcommand(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--seed", "5", "--frames", "5000", "--out", str(a), "simulate", "--scheme", "split"]) == 0
    assert main(["simulate", "--scheme", "split", "--seed", "5", "--frames", "5000", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_trace_dump(tmp_path):
    t = tmp_path / "t.csv"
    assert main(["--frames", "3000", "--out", str(tmp_path / "o.csv"), "simulate", "--scheme", "alternating",
                 "--trace-out", str(t), "--metrics", "delivery_prob"]) == 0
    assert len(t.read_text().splitlines()) == 3001


def test_cli_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["--out", str(out), "--grid-points", "4", "sweep", "--scheme", "split", "--axis", "tau",
                 "--grid-range", "1", "4", "--log", "--metrics", "p99_paoi", "--analytic-only"]) == 0
    assert len(out.read_text().splitlines()) == 5


def test_cli_errors(tmp_path, capsys):
    assert main(["analytic", "--scheme", "queue_based"]) == 1
    assert main(["analytic", "--scheme", "coded", "--eta", "0.3"]) == 1
    assert main(["analytic", "--config", str(tmp_path / "none.json")]) == 2
    assert main(["--out", str(tmp_path / "no" / "x.csv"), "analytic", "--metrics", "p99_latency"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["analytic", "--config", str(bad)]) == 1
    assert main(["sweep", "--scheme", "split"]) == 1
    err = capsys.readouterr().err
    assert "no" in err and "error:" in err
    with pytest.raises(SystemExit):
        main(["preset", "nope"])


def test_cli_preset_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["--frames", "4000", "--out", str(p), "preset", "err-prob"]) == 0
    assert a.read_bytes() == b.read_bytes()
