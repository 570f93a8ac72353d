import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenlink.config import load_config
from greenlink.csvio import parse_csv, read_csv, render_csv, write_csv
from greenlink.experiments import (
    ENERGY_FIELDS,
    NONUNIFORM_FIELDS,
    SURFACE_FIELDS,
    Check,
    SweepSpec,
    approx_outages,
    grid_coverage,
    lambert_residuals,
    metadata,
    point_seed,
    random_distance_power_check,
    random_distance_scenario,
    roundtrip_errors,
    run_nonuniform_table,
    surface_exact_vs_approx,
    sweep_distance_to_bs,
    sweep_inter_user_distance,
    sweep_random_distance,
)
from greenlink.scenario import ALL_SCHEMES, Scheme


@pytest.fixture(scope="module")
def interuser_cfg():
    return load_config("interuser", env={})


@pytest.fixture(scope="module")
def surface_cfg():
    return load_config("approx_surface", env={})


def by_scheme(rows):
    out = {}
    for r in rows:
        out.setdefault(r["scheme"], []).append(r)
    return out


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(variable="nope", start=1, stop=2, steps=5),
        dict(variable="d_to_bs", start=1, stop=2, steps=1),
        dict(variable="d_to_bs", start=3, stop=2, steps=5),
        dict(variable="d_to_bs", start=0, stop=2, steps=5),
    ],
)
def test_sweep_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(**kwargs)


def test_sweep_spec_values():
    assert SweepSpec("d_to_bs", 10, 1000, 3).values() == pytest.approx([10, 100, 1000])
    assert SweepSpec("d_to_bs", 10, 30, 3, log=False).values() == pytest.approx([10, 20, 30])
    assert SweepSpec("d_to_bs", 1, 2, 2, schemes=("inter",)).schemes == (Scheme.INTER,)


def test_distance_sweep_rows(base_cfg):
    rows = sweep_distance_to_bs(base_cfg, SweepSpec("d_to_bs", 100, 5000, 5))
    assert len(rows) == 5 * len(ALL_SCHEMES)
    for r in rows:
        assert r["feasible"] and r["total_j"] > 0
        assert r["p1_cellular_w"] == r["p2_cellular_w"]  # symmetric geometry
    totals = [r["total_j"] for r in by_scheme(rows)["no_coop"]]
    assert totals == sorted(totals)


def test_step_count_does_not_change_shared_points(base_cfg):
    coarse = sweep_distance_to_bs(base_cfg, SweepSpec("d_to_bs", 100, 1600, 5))
    fine = sweep_distance_to_bs(base_cfg, SweepSpec("d_to_bs", 100, 1600, 9))
    fine_by_value = {(r["scheme"], round(r["value"], 6)): r["total_j"] for r in fine}
    for r in coarse:
        assert fine_by_value[(r["scheme"], round(r["value"], 6))] == pytest.approx(r["total_j"], rel=1e-12)


def test_workers_do_not_change_sweeps(interuser_cfg):
    spec = SweepSpec("d_inter_user", 1, 2000, 12)
    assert sweep_inter_user_distance(interuser_cfg, spec, workers=1) == sweep_inter_user_distance(interuser_cfg, spec, workers=4)


def test_infeasible_points_are_flagged(base_cfg):
    from greenlink.config import apply_overrides, build_config

    cfg = build_config(apply_overrides(base_cfg.values, ["pout2=1e-3"]), env={})
    rows = sweep_distance_to_bs(cfg, SweepSpec("d_to_bs", 100, 200, 2))
    coop = [r for r in rows if r["scheme"] != "no_coop"]
    assert coop and all(not r["feasible"] and r["total_j"] is None for r in coop)
    assert all(r["feasible"] for r in rows if r["scheme"] == "no_coop")


def test_random_distance_substitution(base_cfg):
    sc = random_distance_scenario(base_cfg.scenario, 300.0, 3000.0, 6000.0)
    assert sc.topology.d_12 ** 2 == pytest.approx(300.0**2 / 3)
    assert sc.topology.d_2b ** 2 == pytest.approx(6000.0**2 / 3)


def test_random_distance_powers_match_sampling():
    cfg = load_config("random_distance", env={})
    check = random_distance_power_check(cfg, 500.0, draws=400_000, seed=1)
    for closed, sampled in check.values():
        assert sampled == pytest.approx(closed, rel=0.01)
    rows = sweep_random_distance(cfg, SweepSpec("D_random_bound", 10, 5000, 4))
    assert len(rows) == 12


def test_surface_shape_and_fields(surface_cfg):
    rows = surface_exact_vs_approx(surface_cfg, 0.0, 30.0, 4)
    assert len(rows) == 16
    assert set(rows[0]) == set(SURFACE_FIELDS)
    diag = surface_exact_vs_approx(surface_cfg, 0.0, 30.0, 4, diagonal_only=True)
    assert [r["p1_dbm"] for r in diag] == pytest.approx([0, 10, 20, 30])
    low = surface_exact_vs_approx(surface_cfg, -10.0, -9.0, 2, diagonal_only=True)[0]
    assert low["clamped1"] and low["approx1"] == 1.0
    with pytest.raises(ValueError):
        surface_exact_vs_approx(surface_cfg, 10.0, 0.0, 4)


def test_approx_outage_formula(surface_cfg):
    from greenlink.nonuniform import build_problem

    p = build_problem(surface_cfg.scenario, surface_cfg.delta)
    a1, a2 = approx_outages(p, 100.0, 200.0)
    assert a1 == pytest.approx(p.alpha / 40000 + (1 - p.alpha) / 100)
    assert a2 == pytest.approx(p.alpha / (40000 * p.beta**2) + (1 - p.alpha) / 200)


def test_nonuniform_table_rows():
    cfg = load_config("nonuniform", env={})
    rows = run_nonuniform_table(cfg, ((1e-3, 1e-3),), grid_resolution=150)
    assert len(rows) == 1
    assert set(rows[0]) == set(NONUNIFORM_FIELDS)
    assert rows[0]["e_nc_j"] < rows[0]["e_t_j"]


def test_point_seed_independent():
    seeds = {point_seed(42, s, i) for s in range(3) for i in range(100)}
    assert len(seeds) == 300
    assert point_seed(42, 1, 3) == point_seed(42, 1, 3)


def test_grid_coverage_counts_points():
    rows = [
        {"d_1b": 1, "target": 1, "rate": 1, "z": 0.5},
        {"d_1b": 1, "target": 1, "rate": 1, "z": 3.5},
        {"d_1b": 2, "target": 1, "rate": 1, "z": 1.0},
        {"d_1b": 2, "target": 1, "rate": 1, "z": 2.9},
    ]
    assert grid_coverage(rows) == 0.5


def test_self_check_helpers(base_cfg):
    worst = roundtrip_errors(base_cfg.scenario, 10, 1)
    assert set(worst) == {"no_coop", "intra", "inter"}
    assert max(worst.values()) < 1e-9
    assert max(lambert_residuals(200, 1).values()) < 1e-12
    assert Check("x", True, "d").line().split()[:2] == ["x", "PASS"]


def test_metadata_contents(base_cfg):
    meta = metadata(base_cfg, seed=5, sweep="d_to_bs")
    assert meta["seed"] == 5 and meta["config_hash"] == base_cfg.config_hash
    assert "placeholder" in meta["battery_profile"]


# -- CSV ---------------------------------------------------------------------


def test_csv_round_trip(base_cfg, tmp_path):
    rows = sweep_distance_to_bs(base_cfg, SweepSpec("d_to_bs", 100, 300, 3))
    meta = metadata(base_cfg)
    path = tmp_path / "out.csv"
    text = write_csv(str(path), ENERGY_FIELDS, rows, meta)
    got_meta, got_rows = read_csv(path)
    assert got_meta == {k: str(v) for k, v in meta.items()}
    assert len(got_rows) == len(rows)
    for a, b in zip(rows, got_rows):
        for f in ENERGY_FIELDS:
            assert b[f] == a.get(f)
    assert render_csv(ENERGY_FIELDS, got_rows, got_meta) == text


def test_csv_writes_numpy_scalars_as_plain_numbers():
    text = render_csv(("a", "b", "c"), [{"a": np.float64(0.1), "b": np.int64(3), "c": np.bool_(True)}])
    assert text.splitlines()[1] == "0.1,3,true"


def test_surface_csv_parses_back(surface_cfg):
    rows = surface_exact_vs_approx(surface_cfg, 10.0, 20.0, 2, diagonal_only=True)
    _, back = parse_csv(render_csv(SURFACE_FIELDS, rows))
    assert all(isinstance(r["z1"], float) for r in back)
    assert back[1]["gap1"] == rows[1]["gap1"]


cells = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(10**12), max_value=10**12),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(alphabet="abcxyz_,\" ", min_size=1, max_size=8).filter(lambda s: s.strip() == s and not s.lstrip("-").isdigit()),
)


@settings(max_examples=200)
@given(values=st.lists(cells, min_size=3, max_size=3))
def test_csv_cells_round_trip(values):
    fields = ("a", "b", "c")
    row = dict(zip(fields, values))
    _, rows = parse_csv(render_csv(fields, [row]))
    for f in fields:
        v = row[f]
        if isinstance(v, str) and v in ("true", "false"):
            continue
        if isinstance(v, str):
            try:
                float(v)
                continue  # numeric-looking text comes back as a number
            except ValueError:
                pass
        assert rows[0][f] == v
