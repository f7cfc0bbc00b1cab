import json
from pathlib import Path

import pytest

from ncdiffop import calcfile, cli
from ncdiffop import library as L
from ncdiffop.calculus import SpecError
from ncdiffop.diffops import da_relations

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- calculus files -------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(L.BUILTINS))
def test_round_trip(name):
    spec = L.builtin(name)
    back = calcfile.loads(calcfile.dumps(spec))
    assert calcfile.spec_to_dict(back) == calcfile.spec_to_dict(spec)
    assert back.wedge == spec.wedge and back.christoffel == spec.christoffel


def test_shipped_file_matches_builtin(su2q):
    spec = calcfile.load(DATA / "su2q.json")
    assert calcfile.spec_to_dict(spec) == calcfile.spec_to_dict(su2q)
    assert da_relations(spec) == da_relations(su2q)


def test_save_load(tmp_path, podles):
    p = tmp_path / "podles.json"
    calcfile.save(podles, p)
    assert calcfile.spec_to_dict(calcfile.load(p)) == calcfile.spec_to_dict(podles)


def _minimal():
    return {
        "omega1": {"basis": ["a", "b"]},
        "omega2": {"basis": ["w"]},
        "wedge": [[0, 1, 0, "1"], [1, 0, 0, "-1"]],
    }


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.pop("omega1"), "missing"),
        (lambda d: d["wedge"].append([0, 1, 0, "2"]), "duplicate"),
        (lambda d: d["wedge"].append([0, 5, 0, "2"]), "out of range"),
        (lambda d: d["wedge"].append([1, 1, 0, 2]), "expression strings"),
        (lambda d: d["wedge"].append([1, 1, 0, "q +"]), "wedge"),
        (lambda d: d["wedge"].append([1, 1, 0, "t"]), "wedge"),
        (lambda d: d.update(d1=[[0, 0]]), "d1"),
    ],
)
def test_file_errors(mutate, message):
    doc = _minimal()
    mutate(doc)
    with pytest.raises(SpecError, match=message):
        calcfile.spec_from_dict(doc)


def test_not_json():
    with pytest.raises(SpecError, match="JSON"):
        calcfile.loads("{")


def test_minimal_file_has_no_connection():
    spec = calcfile.spec_from_dict(_minimal())
    assert spec.christoffel is None and spec.n1 == 2


# --- command line ---------------------------------------------------------------


def test_relations_su2q(capsys):
    code, out, _ = run(capsys, "relations", "--builtin", "su2q")
    assert code == 0
    assert "R(w0) = (q^2)*u+•u- - u-•u+ + (q^3)*u0 = 0" in out
    assert "(q^3 - q^2*mu_m + mu_p)*u0" in out
    assert out.count("R(") == 3


def test_relations_json(capsys):
    code, out, _ = run(capsys, "relations", "--builtin", "classical-plane", "--json")
    doc = json.loads(out)
    assert code == 0 and len(doc["relations"]) == 1
    words = {tuple(w): c for w, c in doc["relations"][0]["words"]}
    assert words == {(0, 1): "1", (1, 0): "-1"}


def test_relations_from_file(capsys):
    code, out, _ = run(capsys, "relations", "--file", str(DATA / "su2q.json"))
    assert code == 0 and out.count("R(") == 3


def test_relations_without_gamma(capsys, tmp_path):
    p = tmp_path / "bare.json"
    p.write_text(json.dumps(_minimal()))
    code, _, err = run(capsys, "relations", "--file", str(p))
    assert code == 2 and "invalid calculus" in err


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "relations", "--builtin", "nope")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "relations", "--builtin", "su2q", "--file", "x.json")[0] == 1
    assert run(capsys, "relations", "--file", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "curvature", "--builtin", "su2q", "--params", "zeta=1")[0] == 1
    assert run(capsys, "curvature", "--builtin", "su2q", "--params", "r")[0] == 1
    assert run(capsys, "verify", "--builtin", "su2q", "--suite", "nope")[0] == 1
    assert run(capsys, "--help")[0] == 0


def test_curvature_generic(capsys):
    code, out, _ = run(capsys, "curvature", "--builtin", "su2q")
    assert code == 0 and "not flat: 7" in out


def test_curvature_case_b_is_flat(capsys):
    params = "r=0,n_m=-q^2-1,n_p=q^-2*(1+q^-2),m_m=(q^3+q)/mu_p,m_p=(q^2+1)/(q*mu_m)"
    code, out, _ = run(capsys, "curvature", "--builtin", "su2q", "--params", params, "--json")
    doc = json.loads(out)
    assert code == 0 and doc["flat"] and doc["coefficients"] == []


def test_curvature_perturbed_shows_coefficient(capsys):
    params = "r=1/7,n_m=-q^2-1,n_p=q^-2*(1+q^-2),m_m=(q^3+q)/mu_p,m_p=(q^2+1)/(q*mu_m)"
    code, out, _ = run(capsys, "curvature", "--builtin", "su2q", "--params", params)
    assert code == 0 and "not flat" in out and "w0⊗e0" in out


def test_curvature_modules(capsys):
    for mod in ("algebra", "basis"):
        code, out, _ = run(capsys, "curvature", "--builtin", "su2q", "--module", mod)
        assert code == 0 and out.rstrip().endswith("flat")


def test_check_flat(capsys):
    code, out, _ = run(capsys, "curvature", "--builtin", "su2q", "--check-flat", "--json")
    doc = json.loads(out)
    verdicts = {c["case"]: c["flat"] for c in doc["cases"]}
    assert code == 0 and verdicts == {"a": True, "b": True, "c": True, "d": False}
    assert doc["corrected_d"]["mu_m"] == "0"
    assert run(capsys, "curvature", "--builtin", "classical-plane", "--check-flat")[0] == 1


def test_verify(capsys):
    assert run(capsys, "verify", "--builtin", "classical-plane", "--suite", "action")[0] == 0
    assert run(capsys, "verify", "--builtin", "su2q", "--suite", "su2q-consistency")[0] == 0
    code, _, err = run(capsys, "verify", "--builtin", "su2q", "--suite", "associativity")
    assert code == 3 and "σ⁻¹" in err


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "complex-plane", "--suite", "complex", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]


def test_verify_failure_exit(capsys, tmp_path):
    doc = calcfile.spec_to_dict(L.su2q_3d())
    doc["connection"]["gamma"] = [[0, 0, 0, "1"]]
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--file", str(p), "--suite", "su2q-consistency")
    assert code == 4 and "FAIL" in out
