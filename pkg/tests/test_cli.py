import json
from pathlib import Path

import pytest

from crsing.cli import main
from crsing.fixtures import FIXTURES, run_fixtures, select

MANIFESTS = Path(__file__).resolve().parent.parent / "manifests"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", MANIFESTS / "leviflat-bishop3.ini")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema_version"] == "1.0"
    assert rep["singular_locus"]["classification"]["value"] == "Levi-flat"
    assert rep["leviflat"]["dimension_obstruction"]["verdict"] == "CONSISTENT"


def _bare_numbers(obj, path=""):
    """Numbers must sit inside a {value, method} pair or be plain counters/flags."""
    if isinstance(obj, dict):
        if set(obj) == {"value", "method"}:
            return []
        return [p for k, v in obj.items() for p in _bare_numbers(v, f"{path}.{k}")]
    if isinstance(obj, list):
        return [p for i, v in enumerate(obj) for p in _bare_numbers(v, f"{path}[{i}]")]
    if isinstance(obj, float):
        return [path]
    return []


def test_reports_have_no_bare_floats(capsys):
    for name in ["double-cover.ini", "moser-5.ini", "m0.ini"]:
        code, out, _ = run(capsys, "analyze", MANIFESTS / name, "--trials", "5")
        assert code == 0
        assert _bare_numbers(json.loads(out)) == []


def test_analyze_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for dst in (a, b):
        assert run(capsys, "analyze", MANIFESTS / "moser-5.ini", "--seed", "3", "-o", dst)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_m0_report(capsys):
    code, out, _ = run(capsys, "analyze", MANIFESTS / "m0.ini")
    rep = json.loads(out)
    assert rep["finiteness"]["finite"] is False
    assert rep["invariants"]["m0_obstruction"] == "NOT_OBSTRUCTED_UP_TO_CAP"


def test_not_an_image_report(capsys):
    code, out, _ = run(capsys, "leviflat", MANIFESTS / "non-image-3.ini")
    assert code == 0
    assert json.loads(out)["dimension_obstruction"]["verdict"] == "NOT_A_CR_SINGULAR_IMAGE"


def test_text_report(capsys):
    code, out, _ = run(capsys, "analyze", MANIFESTS / "bishop-1_2.ini", "--report", "text", "--method", "local-ring")
    assert code == 0 and "gamma: 1/2" in out


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", MANIFESTS / "bad.ini")
    assert code == 1 and "line 4" in err
    code, _, err = run(capsys, "analyze", tmp_path / "missing.ini")
    assert code == 1


def test_subcommands(capsys):
    code, out, _ = run(capsys, "bishop", MANIFESTS / "bishop-1_2.ini")
    assert json.loads(out)["gamma"]["value"] == "1/2"
    code, out, _ = run(capsys, "moser", MANIFESTS / "moser-5.ini")
    assert json.loads(out)["moser"]["value"] == 5
    code, out, _ = run(capsys, "probe", MANIFESTS / "moser-5.ini", "--trials", "2")
    assert json.loads(out)["stable"] is True
    code, out, _ = run(capsys, "leaves", MANIFESTS / "leviflat-bishop3.ini", "--t", "0,1", "--t", "1,0")
    assert [r["verdict"] for r in json.loads(out)["leaves"]] == ["DIM(1)", "EMPTY"]
    code, out, _ = run(capsys, "hypervarieties", MANIFESTS / "double-cover.ini")
    assert all(r["contains_M"] for r in json.loads(out)["hypervarieties"])
    code, out, _ = run(capsys, "hypervarieties", MANIFESTS / "double-cover.ini", "--directions", "w1=1,w2=0")
    rows = json.loads(out)["hypervarieties"]
    assert len(rows) == 3 and rows[-1]["polynomial"]


def test_theorem_violation_exit_code(capsys, monkeypatch):
    from crsing import analysis, leviflat

    def boom(*a, **k):
        raise leviflat.TheoremViolation("forced")
    monkeypatch.setattr(analysis, "dimension_obstruction", boom)
    code, out, _ = run(capsys, "analyze", MANIFESTS / "leviflat-bishop3.ini")
    assert code == 2
    assert json.loads(out)["leviflat"]["verdict"] == "THEOREM_VIOLATION"


def test_fixture_filter():
    assert {f.name for f in select("bishop")} == {"bishop-1/2", "bishop-1", "bishop-2",
                                                  "moser-3", "moser-4", "moser-5"}
    assert [f.name for f in select("double-cover")] == ["double-cover"]
    assert all("leviflat" in f.tags for f in select("leviflat"))


def test_fixtures_all_pass(capsys):
    rows = run_fixtures()
    assert rows and all(r.ok for r in rows), [r for r in rows if not r.ok]
    assert {r.fixture for r in rows} == {f.name for f in FIXTURES}
    code, out, _ = run(capsys, "fixtures", "--filter", "moser")
    assert code == 0 and "FAIL" not in out


@pytest.mark.parametrize("argv", [["nonsense"], ["analyze"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit):
        main(argv)
