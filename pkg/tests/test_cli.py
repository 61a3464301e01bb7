import argparse
import io as _io
import json

import numpy as np
import pytest

from juliamanhattan.cli import (main, parse_complex, parse_grid, parse_path, parse_threads)
from juliamanhattan.io import save_database


def run(*argv):
    buf = _io.StringIO()
    code = main([str(a) for a in argv], stdout=buf)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def pair_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "pair.jsonl"
    code, _ = run("orbits", "--d", 2, "--c1", "0.05", "--c2", "-0.05+0i",
                  "--max-period", 10, "--out", path)
    assert code == 0
    return path


# ------------------------------------------------------------ literal parsing

@pytest.mark.parametrize("text, value", [
    ("0.05", 0.05), ("-0.05+0i", -0.05), ("0.1-0.2i", 0.1 - 0.2j), ("-1e-3+2.5e-1i", -1e-3 + 0.25j),
    ("0+1i", 1j), ("-0.75", -0.75), ("0.1 + 0.2i", 0.1 + 0.2j)])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["0.1+0.2j", "abc", "1+i", "", "0.1+0.2i+0.3i"])
def test_parse_complex_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex(text)


def test_parse_helpers():
    assert parse_path("0,0.1+0.1i,0.2") == [0, 0.1 + 0.1j, 0.2]
    g = parse_grid("2:64:6:geometric")
    assert np.allclose(g.values(), [2, 4, 8, 16, 32, 64])
    assert np.allclose(parse_grid("1:2:3:linear").values(), [1, 1.5, 2])
    assert parse_threads("3") == 3 and parse_threads("auto") >= 1
    for bad in ("1:2", "1:2:3:cubic", "2:1:3:linear", "1:2:0:linear"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid(bad)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_threads("0")


# ------------------------------------------------------------ subcommands

def test_orbits_power_map(tmp_path):
    code, out = run("orbits", "--d", 2, "--c1", "0", "--c2", "0", "--max-period", 6,
                    "--out", tmp_path / "z.jsonl")
    assert code == 0
    assert "total primitive orbits: 22" in out
    assert "1 1 2 3 6 9" in out


def test_orbits_pair(pair_file):
    from juliamanhattan.io import load_database
    db = load_database(pair_file)
    assert db.c2 == -0.05
    assert db.evidence1.verdict == db.evidence2.verdict == "hyperbolic-evidence"


def test_orbits_outside_central_component(tmp_path):
    code, _ = run("orbits", "--d", 2, "--c1", "0.5+0.6i", "--c2", "0.5+0.6i",
                  "--max-period", 6, "--out", tmp_path / "x.jsonl")
    assert code != 0


def test_orbits_bad_input(tmp_path):
    assert run("orbits", "--d", 2, "--c1", "0.1+0.2j", "--c2", "0", "--max-period", 3,
               "--out", tmp_path / "x.jsonl")[0] == 2
    assert run("orbits", "--d", 1, "--c1", "0", "--c2", "0", "--max-period", 3,
               "--out", tmp_path / "x.jsonl")[0] == 2
    assert run("nonsense")[0] == 2


def test_dim_power_map(tmp_path, db_power2):
    from juliamanhattan.orbits import build_database
    save_database(build_database(2, 0, 0, 14), tmp_path / "p.jsonl")
    code, out = run("dim", tmp_path / "p.jsonl")
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("2VD (map 1) = ")
    assert abs(float(first.split("=")[1]) - 1.0) < 1e-6
    assert "n=14" in out


def test_dim_missing_file(tmp_path):
    assert run("dim", tmp_path / "missing.jsonl")[0] == 2
    assert run("dim", tmp_path)[0] == 2


def test_curve(tmp_path, pair_file):
    out_csv = tmp_path / "curve.csv"
    code, out = run("curve", pair_file, "--samples", 11, "--out", out_csv, "--threads", 2)
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "a,b,slope,pressure_residual" and len(lines) == 12
    footer = json.loads((tmp_path / "curve.csv.json").read_text())
    assert footer["alpha"] <= min(footer["bowen_root_1"], footer["bowen_root_2"]) + 1e-6
    assert footer["slope_check_passed"]
    # stdout mode: CSV followed by the JSON footer
    code, out = run("curve", pair_file, "--samples", 5)
    assert out.splitlines()[0] == "a,b,slope,pressure_residual"
    assert json.loads(out.splitlines()[-1])["alpha"] == footer["alpha"]


def test_curve_deterministic_across_threads(tmp_path, pair_file):
    texts = []
    for threads in (1, 4):
        p = tmp_path / f"c{threads}.csv"
        assert run("curve", pair_file, "--samples", 9, "--out", p, "--threads", threads)[0] == 0
        texts.append(p.read_bytes())
    assert texts[0] == texts[1]


def test_count(tmp_path, pair_file):
    code, out = run("count", pair_file)
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert rows[0] == "T,N_T,li,ratio,certified"
    assert all(r.endswith(",true") for r in rows[1:])
    assert "HYPOTHESIS VIOLATED" not in out
    assert run("count", pair_file, "--grid", "2:1e6:5:geometric")[0] == 2
    code, out = run("count", pair_file, "--grid", "2:1e6:5:geometric", "--allow-uncertified")
    assert code == 0 and out.count(",false") >= 1


def test_count_power_map_flag(tmp_path, db_power2):
    save_database(db_power2, tmp_path / "p.jsonl")
    code, out = run("count", tmp_path / "p.jsonl", "--map", 2)
    assert code == 0
    assert "HYPOTHESIS VIOLATED" in out


def test_correlate(tmp_path, pair_file):
    code, out = run("correlate", pair_file, "--out", tmp_path / "bins.csv")
    assert code == 0
    summary = json.loads((tmp_path / "bins.csv.json").read_text())
    assert summary["witness"] is not None
    assert summary["alpha_hat"] is not None and summary["relative_gap"] >= 0
    assert (tmp_path / "bins.csv").read_text().startswith("T,epsilon,count\n")
    assert run("correlate", pair_file, "--grid", "0.7:20:5:linear")[0] == 2


def test_check_pass_and_warn(tmp_path, pair_file, db_power2):
    code, out = run("check", pair_file)
    assert code == 0, out
    assert "FAIL" not in out
    from juliamanhattan.orbits import build_database
    save_database(build_database(2, 0.05, -0.05, 4), tmp_path / "low.jsonl")
    code, out = run("check", tmp_path / "low.jsonl")
    assert code == 0 and "low max_period" in out


def test_check_tampered(tmp_path, pair_file):
    lines = pair_file.read_text().splitlines()
    rec = json.loads(lines[3])
    rec["lambda1"] += 1e-3
    lines[3] = json.dumps(rec)
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    code, out = run("check", bad)
    assert code == 4
    assert "FAIL  lambda_recompute" in out


def test_negative_value_rewrite(tmp_path):
    code, out = run("orbits", "--d", 2, "--c1", "-0.1", "--c2", "-0.05-0.05i",
                    "--max-period", 3, "--out", tmp_path / "n.jsonl")
    assert code == 0
