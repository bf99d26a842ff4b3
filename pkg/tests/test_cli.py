import json
import subprocess
import sys

import pytest

from diracalg import fixtures
from diracalg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def _no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(_no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(_no_floats(v) for v in obj)
    return True


def test_validate_pass(capsys):
    code, rep = run_json(capsys, "validate", "fixture:sl2_cartan")
    assert code == 0 and rep["status"] == "pass"
    assert rep["records"][0]["witness"]["p_basis"] == "e, f"


def test_validate_from_path(capsys, tmp_path):
    f = tmp_path / "sl2.json"
    f.write_text(json.dumps(fixtures.document("sl2_cartan")), encoding="utf-8")
    code, rep = run_json(capsys, "validate", str(f))
    assert code == 0


def test_validate_broken_jacobi(capsys):
    code, rep = run_json(capsys, "validate", "fixture:broken_jacobi")
    assert code == 1
    w = rep["records"][0]["witness"]
    assert w["error"] == "JacobiViolation" and "('h', 'e', 'f')" in w["message"]


def test_validate_isotropic(capsys):
    code, rep = run_json(capsys, "validate", "fixture:isotropic_r")
    assert code == 1
    assert rep["records"][0]["witness"]["error"] == "DegenerateRestriction"


@pytest.mark.parametrize("content", ["{", "[]", '{"basis": "h"}'])
def test_input_errors(capsys, tmp_path, content):
    f = tmp_path / "bad.json"
    f.write_text(content, encoding="utf-8")
    code, rep = run_json(capsys, "verify", str(f))
    assert code == 2 and rep["status"] == "error"


def test_missing_file_and_fixture(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "nope.json"))[0] == 2
    assert run(capsys, "validate", "fixture:nope")[0] == 2


def test_dirac_command(capsys):
    code, rep = run_json(capsys, "dirac", "fixture:sl2_cartan")
    assert code == 0
    res = rep["results"]
    assert res["D_p"] == "u_e⊗c_f + u_f⊗c_e"
    assert res["alpha"] == {"h": "2*e^f"}
    assert res["xi"] == {"h": "u_h + 2*c_e^c_f"}


def test_dirac_command_p_zero(capsys):
    code, rep = run_json(capsys, "dirac", "fixture:sl2_full")
    assert rep["results"]["D_p"] == "0"


def test_dirac_command_cubic(capsys):
    code, rep = run_json(capsys, "dirac", "fixture:sl2x2_cartanline")
    assert rep["results"]["gamma_p"] != "0"


def test_cohomology_command(capsys):
    code, rep = run_json(capsys, "cohomology", "fixture:sl2_cartan", "--module", "V2", "--module", "V0")
    assert code == 0
    mods = rep["results"]["modules"]
    assert sorted(mods) == ["V0", "V2"]
    assert mods["V2"]["dim_H"] == "2" and mods["V2"]["chi"] == "4"
    assert mods["V2"]["weights"] == ["(-3)", "(3)"]


def test_cohomology_invertible(capsys):
    code, rep = run_json(capsys, "cohomology", "fixture:abelian_invertible", "--module", "chi1")
    assert rep["results"]["modules"]["chi1"]["dim_H"] == "0"


def test_cohomology_field_errors(capsys):
    code, rep = run_json(capsys, "cohomology", "fixture:so4_so3", "--field", "Q")
    assert code == 2 and "Qi" in rep["error"]
    code, rep = run_json(capsys, "cohomology", "fixture:so4_so3", "--field", "Qi")
    assert code == 0


def test_cohomology_unknown_module(capsys):
    assert run(capsys, "cohomology", "fixture:sl2_cartan", "--module", "V9")[0] == 2


def test_verify_sl2_all(capsys):
    code, rep = run_json(capsys, "verify", "fixture:sl2_cartan", "--cap", "3")
    assert code == 0
    names = [r["name"] for r in rep["records"]]
    assert names == sorted(names)
    assert {r["status"] for r in rep["records"]} <= {"pass", "skipped"}
    assert _no_floats(rep)


def test_verify_theorem34_diagonal_prints_witness(capsys):
    code, rep = run_json(capsys, "verify", "fixture:sl2x2_diagonal", "--suite", "theorem34")
    assert code == 0
    rec = {r["name"]: r for r in rep["records"]}["theorem34.homotopy_agrees"]
    assert rec["witness"]["a_z"] == "1/4*u_H-⊗c_H- + 1/2*u_E-⊗c_F- + 1/2*u_F-⊗c_E-"


def test_verify_corrupted_input_fails(capsys, tmp_path):
    doc = fixtures.document("noninvariant_form")
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(doc), encoding="utf-8")
    code, rep = run_json(capsys, "verify", str(f), "--suite", "dirac")
    assert code == 1 and rep["status"] == "fail"
    assert rep["records"][0]["witness"]["error"] == "NotInvariant"


def test_deterministic_output(capsys, tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        main(["verify", "fixture:sl2_cartan", "--suite", "theorem34", "--format", "json", "--output", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert capsys.readouterr().out == ""


def test_timing_flag(capsys):
    code, rep = run_json(capsys, "validate", "fixture:sl2_cartan", "--timing")
    assert "timing" in rep and isinstance(rep["timing"], str)


def test_text_format(capsys):
    code, out = run(capsys, "validate", "fixture:sl2_cartan")
    assert out.startswith("validate fixture:sl2_cartan: PASS")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "diracalg", "validate", "fixture:sl2_cartan"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "PASS" in r.stdout
