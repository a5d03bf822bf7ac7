import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hodgekit.cli import run
from hodgekit.corpus import ladder
from hodgekit.io import Structure, scenario_to_json, structure_to_json
from hodgekit.orbits import OrbitScenario
from hodgekit.scalars import QI


@pytest.fixture
def record_file(tmp_path):
    inst = ladder(2, QI(0, Fraction(1, 3)))
    st = Structure(inst.dim, inst.w, inst.f, inst.pol, inst.n_op)
    path = tmp_path / "rec.json"
    path.write_text(json.dumps(structure_to_json(st)))
    return str(path)


@pytest.fixture
def scan_file(tmp_path):
    inst = ladder(2)
    sc = OrbitScenario(
        name="flat",
        f=inst.f,
        w=inst.w,
        pol=inst.pol,
        n_op=inst.n_op,
        gamma=[inst.n_op],
        samples=[Fraction(1, 2**m) for m in (2, 4, 6, 8)],
        sample_kind="s_abs",
    )
    path = tmp_path / "scan.json"
    path.write_text(json.dumps(scenario_to_json(sc)))
    return str(path)


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# exit codes


def test_mhs_check_passes(capsys, record_file):
    code, out, err = invoke(capsys, "mhs", "check", record_file)
    assert code == 0
    assert json.loads(out) == {"membership": "InM"}


def test_mhs_check_rejects_bad_pair(capsys, tmp_path):
    # F jumps entirely at 1, so the top weight-2 graded piece has no Hodge
    # decomposition matching the declared numbers
    record = structure_to_json(
        Structure(2, ladder(2).w, ladder(2).f, ladder(2).pol, None)
    )
    record["hodge_filtration"] = {"1": [["1", "0"], ["0", "1"]], "2": []}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(record))
    code, out, err = invoke(capsys, "mhs", "check", str(path))
    assert code == 1
    if err:
        assert json.loads(err)["kind"] == "math"
    else:
        assert json.loads(out)["membership"] != "InM"


def test_parse_error_exit_2(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{]")
    code, out, err = invoke(capsys, "mhs", "check", str(path))
    assert code == 2
    assert json.loads(err)["kind"] == "parse"


def test_missing_file_exit_2(capsys):
    code, out, err = invoke(capsys, "weights", "sl2", "/no/such/file.json")
    assert code == 2
    assert json.loads(err)["kind"] == "parse"


def test_bad_arguments_exit_2(capsys):
    assert run(["mhs", "frobnicate", "x.json"]) == 2
    assert run(["nonsense"]) == 2


def test_unknown_scenario_exit_2(capsys):
    code, out, err = invoke(capsys, "scenario", "run", "bogus")
    assert code == 2
    assert json.loads(err)["kind"] == "unknown-scenario"


# ---------------------------------------------------------------------------
# verbs


def test_bigrading_output(capsys, record_file):
    code, out, _ = invoke(capsys, "mhs", "bigrading", record_file)
    payload = json.loads(out)
    assert code == 0
    assert set(payload) == {"pieces", "grading", "split_real"}
    assert payload["split_real"] is False
    assert sorted(payload["pieces"]) == ["0,0", "1,1"]


def test_metric_output(capsys, record_file):
    code, out, _ = invoke(capsys, "mhs", "metric", record_file)
    assert code == 0
    gram = json.loads(out)["gram"]
    assert gram[0][0] == "1" and gram[1][0] == "-1/3i"


def test_delta_split_output(capsys, record_file):
    code, out, _ = invoke(capsys, "mhs", "delta-split", record_file)
    payload = json.loads(out)
    assert code == 0
    assert payload["delta"][0][1] == "1/3"
    assert "1" in payload["split_filtration"]


def test_weights_admissible_emits_all_blocks(capsys, record_file):
    code, out, _ = invoke(capsys, "weights", "admissible", record_file)
    payload = json.loads(out)
    assert code == 0
    for key in ("relative_weight_filtration", "deligne_grading", "sl2_triple"):
        assert key in payload
    assert set(payload["sl2_triple"]) == {"n_minus", "y", "n_plus"}


def test_weights_requires_nilpotent(capsys, record_file, tmp_path):
    record = json.loads(open(record_file).read())
    record.pop("nilpotent")
    path = tmp_path / "no-n.json"
    path.write_text(json.dumps(record))
    code, out, err = invoke(capsys, "weights", "monodromy", str(path))
    assert code == 2
    assert "nilpotent" in json.loads(err)["error"]


def test_orbit_eval_moves_flag(capsys, record_file):
    code, out, _ = invoke(capsys, "orbit", "eval", record_file, "--z", "2i")
    payload = json.loads(out)
    assert code == 0
    # e^{2i N} sends the line spanned by lam*e0 + e1 to (lam + 2i)*e0 + e1;
    # with lam = i/3 the normalized second entry is 1/(7i/3) = -3i/7
    assert payload["hodge_filtration"]["1"] == [["1", "-3/7i"]]


def test_orbit_scan_csv(capsys, scan_file):
    code, out, err = invoke(capsys, "--format", "csv", "orbit", "scan", scan_file)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "y,s_abs,dist,log_dist,dist_sq_exact"
    assert len(lines) == 5
    assert lines[1].endswith(",1/16")
    fit = json.loads(err)
    assert abs(fit["slope"] + 6.283185307179586) < 1e-9


def test_orbit_scan_json(capsys, scan_file):
    code, out, _ = invoke(capsys, "orbit", "scan", scan_file)
    payload = json.loads(out)
    assert code == 0
    assert len(payload["rows"]) == 4
    assert payload["rows"][0]["dist_sq_exact"] == "1/16"


def test_orbit_scan_exact_flag(capsys, scan_file):
    code, out, _ = invoke(capsys, "--exact", "orbit", "scan", scan_file)
    assert code == 0
    assert json.loads(out)["rows"][0]["dist_sq_exact"] == "1/16"


def test_orbit_horizontality(capsys, scan_file):
    code, out, _ = invoke(capsys, "orbit", "horizontality", scan_file)
    assert code == 0
    assert json.loads(out) == {"horizontal": True, "witness": None}


def test_orbit_scan_plot(capsys, scan_file, tmp_path):
    figure = tmp_path / "scan.png"
    code, out, err = invoke(
        capsys, "orbit", "scan", scan_file, "--plot", str(figure)
    )
    assert code == 0
    assert figure.exists() and figure.stat().st_size > 0
    assert json.loads(err.splitlines()[-1]) == {"figure": str(figure)}


def test_scenario_list(capsys):
    code, out, _ = invoke(capsys, "scenario", "list")
    names = json.loads(out)
    assert code == 0
    assert "flat-ht" in names and names[-1] == "all"


def test_scenario_run(capsys):
    code, out, _ = invoke(capsys, "scenario", "run", "weight-coincidence")
    payload = json.loads(out)
    assert code == 0 and payload["passed"] is True


# ---------------------------------------------------------------------------
# determinism


def test_scan_output_byte_identical(scan_file):
    def grab():
        return subprocess.run(
            [sys.executable, "-m", "hodgekit.cli", "--format", "csv", "orbit", "scan", scan_file],
            capture_output=True,
        ).stdout

    assert grab() == grab()


def test_console_script_installed():
    proc = subprocess.run(
        ["hodgekit", "scenario", "list"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "weight-coincidence" in proc.stdout
