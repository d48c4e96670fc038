"""Smoke tests for the python module: every exposed family of operations is
touched once with small inputs and a frozen expectation."""

import math

import pytest

import frostlab as fl


def test_grid_generator_and_covering():
    ps = fl.grid_set(3)
    assert len(ps) == 64
    assert ps.scale_exp == 3
    assert fl.covering_number(ps, 3) == 64
    assert fl.covering_number(ps, 0) == 1


def test_point_set_separation_contract():
    fl.PointSet([(0.0, 0.0), (0.5, 0.5)], 1)
    with pytest.raises(ValueError):
        fl.PointSet([(0.0, 0.0), (0.1, 0.0)], 1)
    raw = fl.PointSet([(0.0, 0.0), (0.1, 0.0)], 1, checked=False)
    assert not raw.separation_checked


def test_regularity_on_full_grid():
    rep = fl.verify_delta_set(fl.grid_set(3), 2.0)
    assert rep["kind"] == "ball"
    assert 1.0 <= rep["best_C"] <= 9.0
    kt = fl.verify_katz_tao(fl.grid_set(3), 2.0)
    assert 1.0 <= kt["best_C"] <= 9.0


def test_decomposition_partitions_input():
    ps = fl.random_delta_set(1.0, 6, 7)
    rep = fl.katz_tao_decompose(ps, 1.0, 8.0, 0.1)
    flat = sorted(i for part in rep["parts"] for i in part)
    assert flat == list(range(len(ps)))
    assert all(c <= 1.0 + 1e-9 for c in rep["part_best_C"])


def test_duality_round_trip():
    assert fl.dualize_line(*fl.dualize_point((0.3, 0.4))) == (-0.3, 0.4)
    chk = fl.check_duality_incidence((0.5, 0.5 * 2.0 + 0.25), 2.0, 0.25)
    assert chk["lhs"] and chk["rhs"]


def test_incidence_methods_agree():
    ps = fl.random_delta_set(1.5, 6, 11)
    tubes = [fl.Tube(fl.Line(0.1 * k, 0.05 * k - 0.2), 2.0 ** -6) for k in range(12)]
    grid = fl.count_incidences(ps, tubes, method="grid")
    brute = fl.count_incidences(ps, tubes, method="brute")
    assert grid["count"] == brute["count"]


def test_dimension_estimate_exact_power_law():
    fit = fl.estimate_dimension({m: 4 ** m for m in range(3, 9)})
    assert fit["slope"] == pytest.approx(2.0, abs=1e-9)
    assert fit["residual"] == pytest.approx(0.0, abs=1e-9)


def test_radial_projection_and_content():
    K = fl.cantor_product(3, [0, 2], 3)
    arcs = fl.radial_project((-0.75, 0.5), K, 6)
    assert len(arcs) >= 1
    assert arcs.covering(3) <= len(arcs)
    assert 0.0 < fl.arc_content(arcs, 0.5) <= 1.0
    assert 0.0 < fl.content_estimate(K, 0.5) <= 1.0


def test_uniformize_pipeline():
    mu = fl.seeded_measure(1, 9, 2, 5)
    res = fl.uniformize(mu, 0.5)
    assert fl.check_uniform(res["measure"], res["profile"])["ok"]
    stable = fl.stable_scale_search(res["profile"], 0.5)
    assert stable["steps"] >= 0
    assert stable["delta_exp"] == stable["k_index"] * res["profile"].block_size


def test_exceptional_scan_smoke():
    K = fl.grid_set(6)
    vps = fl.PointSet(
        [(-0.4 - 0.01 * i, -0.3 + 0.05 * j) for i in range(4) for j in range(4)],
        6,
        checked=False,
    )
    # Ladder capped at the grid's native depth 6 so the covering never
    # saturates inside the fit window (and the fit needs >= 4 rungs).
    rep = fl.exceptional_scan(K, vps, 0.5, [3, 4, 5, 6], 0.05)
    assert rep["n_viewpoints"] == 16
    assert rep["t_emp"] == pytest.approx(2.0, abs=0.2)
    assert rep["summary_csv"].startswith("scale_exp,")


def test_seeded_generators_are_deterministic():
    a = fl.random_delta_set(1.5, 7, 42).points()
    b = fl.random_delta_set(1.5, 7, 42).points()
    assert a == b
    fc = fl.furstenberg_config(0.5, 0.5, 8, 3)
    assert fc["gamma"] == pytest.approx(1.0)
    assert len(fc["union_set"]) >= 1


def test_run_experiment_writes_reports(tmp_path):
    cfg = "\n".join(
        [
            "[experiment]",
            "suite = fu-ren-sweep",
            "[params]",
            "delta_lo = 6",
            "delta_hi = 6",
            "seeds = 1",
        ]
    )
    out = tmp_path / "run"
    paths = fl.run_experiment(cfg, str(out), seed=2)
    names = sorted(p.split("/")[-1] for p in paths)
    assert names == ["report.txt", "sweep.csv"]
    report = (out / "report.txt").read_text()
    assert "runs=3" in report
    assert "config_hash=" in report


def test_buckets_smoke():
    F = fl.grid_set(5)
    anchor = (-1.2, 0.5)
    tubes = []
    for x, y in [(0.25, 0.25), (0.5, 0.75), (0.75, 0.25)]:
        th = math.atan2(y - anchor[1], x - anchor[0])
        off = -anchor[0] * math.sin(th) + anchor[1] * math.cos(th)
        tubes.append(fl.Tube(fl.Line(th, off), 2.0 ** -5))
    rep = fl.multiplicity_buckets([(anchor, tubes)], F, 0.5, 0.25)
    assert rep["L"] == 15
    total = sum(len(b["tubes"]) for b in rep["buckets"])
    assert total <= 3
    covered = set()
    for b in rep["buckets"]:
        if b["kept"]:
            covered.update(b["covered"])
    assert sorted(set(range(len(F))) - covered) == rep["f_bad"]
