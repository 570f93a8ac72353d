import subprocess
import sys

import pytest

from greenlink import __version__
from greenlink.cli import main
from greenlink.csvio import parse_csv, read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_bs_distance_to_stdout(capsys):
    code, out, err = run(capsys, "sweep-bs-distance", "--steps", "4")
    assert code == 0
    assert "battery profile: placeholder" in err
    meta, rows = parse_csv(out)
    assert meta["config"] == "shipped:default.cfg"
    assert meta["sweep"] == "d_to_bs"
    assert len(rows) == 12
    assert {r["scheme"] for r in rows} == {"no_coop", "intra", "inter"}


def test_scheme_filter_and_out_file(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep-interuser", "--scheme", "inter", "--steps", "3", "--out", str(path))
    assert code == 0 and out == ""
    _, rows = read_csv(path)
    assert [r["scheme"] for r in rows] == ["inter"] * 3


def test_set_and_n_ebits_overrides(capsys):
    _, out_a, _ = run(capsys, "sweep-bs-distance", "--steps", "2", "--n-ebits", "1000")
    _, out_b, _ = run(capsys, "sweep-bs-distance", "--steps", "2", "--set", "n_ebits=1000")
    assert out_a == out_b
    _, out_c, _ = run(capsys, "sweep-bs-distance", "--steps", "2")
    assert out_a != out_c


def test_battery_env_reported(capsys, monkeypatch):
    monkeypatch.setenv("GREENLINK_BATTERY_PROFILE", "linear")
    code, out, err = run(capsys, "sweep-random", "--steps", "2")
    assert code == 0
    assert "battery profile: linear" in err
    assert "linear" in parse_csv(out)[0]["battery_profile"]


def test_approx_surface_diagonal(capsys):
    code, out, _ = run(capsys, "approx-surface", "--diagonal", "--start", "10", "--stop", "40", "--steps", "4")
    assert code == 0
    _, rows = parse_csv(out)
    assert [r["p1_dbm"] for r in rows] == pytest.approx([10, 20, 30, 40])


def test_nonuniform_targets(capsys):
    code, out, _ = run(capsys, "nonuniform", "--targets", "1e-3:1e-4", "--grid-resolution", "120")
    assert code == 0
    _, rows = parse_csv(out)
    assert (rows[0]["pout1"], rows[0]["pout2"]) == (1e-3, 1e-4)


@pytest.mark.parametrize(
    "argv",
    [
        ("sweep-bs-distance", "--set", "cell_gap=0.5"),
        ("sweep-bs-distance", "--set", "bogus=1"),
        ("sweep-bs-distance", "--start", "10", "--stop", "5"),
        ("nonuniform", "--targets", "oops"),
        ("sweep-bs-distance", "--config", "/no/such/file.cfg"),
    ],
)
def test_bad_input_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("greenlink:") or "greenlink:" in err


def test_bad_gap_message_names_field(capsys):
    _, _, err = run(capsys, "sweep-bs-distance", "--set", "cell_gap=0.5")
    assert "cell_gap" in err


def test_unknown_scheme_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["sweep-bs-distance", "--scheme", "relay"])
    assert info.value.code == 2


def test_validate_is_deterministic(capsys):
    args = ("validate", "--trials", "20000", "--seed", "7")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    _, threaded, _ = run(capsys, *args, "--workers", "3")
    assert first == second == threaded
    assert "seed: 7" in first and "RESULT:" in first


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "greenlink", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == f"greenlink {__version__}"
