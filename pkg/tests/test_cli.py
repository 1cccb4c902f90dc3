import json

import pytest

from totref import runner
from totref.cli import main
from totref.dsl import parse_script
from totref.runner import resolve_config, run_tasks

QCI = """field F101
ring S = poly(w,x,y,z)
ideal J = (w^2, x^2, y^2, z^2, z*w)
quotient R = S / J
"""
SHORT = """ring S = poly(w,x,y,z)
quotient R = S / (w^2, w*x-y^2, w*y-x*z, w*z, x^2+y*z, x*y, z^2)
"""
CURVE = """ring S = poly(x,y)
quotient R = S / (x*y)
"""


def run(tmp_path, capsys, text, *flags):
    path = tmp_path / "script.tr"
    path.write_text(text)
    code = main([str(path), *flags])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(tmp_path, capsys, text, *flags):
    code, out, _ = run(tmp_path, capsys, text, *flags)
    return code, json.loads(out)


def test_t22_passes_with_both_series(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, QCI + "task verify-t22 I=(x,y) bound=8\n")
    assert code == 0
    t = rep["tasks"][0]
    assert t["status"] == "pass" and rep["schema_version"] == runner.SCHEMA_VERSION
    cert = t["data"]["certificate"]["data"]
    assert cert["betti_k"][:9] == [1, 4, 11, 26, 57, 120, 247, 502, 1013]
    assert cert["expansion"][:9] == cert["betti_k"][:9]


def test_largeness_failure_in_short_ring(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, SHORT + "task verify-large I=(x-z)\n")
    assert code == 1
    t = rep["tasks"][0]
    assert t["status"] == "fail" and t["data"]["witness"]["index"] == 2


def test_expected_outcomes_turn_refutations_into_passes(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, SHORT + "task verify-large I=(x-z) expect=refuted\n"
                                                 'task exactpair x=x y=y expect="full-proof"\n'
                                                 "task socle expect=2\n")
    assert [t["status"] for t in rep["tasks"]] == ["pass", "pass", "fail"]
    assert code == 1


def test_misuse_on_positive_dimensional_ring(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, CURVE + "task socle\ntask dim expect=1\n")
    assert code == 1
    bad, good = rep["tasks"]
    assert bad["status"] == "error" and "socle_and_type" in bad["data"]["message"]
    assert good["status"] == "pass"


def test_hypothesis_failure_is_a_fail(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, QCI + "task verify-l22 I=(x)\n")
    t = rep["tasks"][0]
    assert t["status"] == "fail" and t["data"]["status"] == "hypothesis-failed"


def test_empty_script(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, "")
    assert code == 0 and rep["tasks"] == [] and rep["summary"]["pass"] == 0


def test_parse_and_usage_errors(tmp_path, capsys):
    code, out, err = run(tmp_path, capsys, "ring S = poly(x)\nideal J = (x^2,\n")
    assert code == 2 and "line 2" in err
    assert main([str(tmp_path / "missing.tr")]) == 2
    assert main(["--bound"]) == 2
    code, _, _ = run(tmp_path, capsys, QCI, "--field", "F6")
    assert code == 2


def test_internal_errors_exit_3(tmp_path, capsys, monkeypatch):
    def boom(ctx):
        raise RuntimeError("bug")

    monkeypatch.setitem(runner.HANDLERS, "hilbert", boom)
    code, rep = report(tmp_path, capsys, QCI + "task hilbert\n")
    assert code == 3 and rep["tasks"][0]["status"] == "error"


def test_failed_declaration_is_reported(tmp_path, capsys):
    code, rep = report(tmp_path, capsys, "ring S = poly(x)\nquotient R = S / (x, x+1)\ntask hilbert over=R\n")
    assert code == 1
    assert rep["declarations"][1]["status"] == "error"
    assert "could not be built" in rep["tasks"][0]["data"]["message"]


def test_reports_are_deterministic(tmp_path, capsys):
    text = QCI + "task betti target=k bound=4\ntask qgor I=(x,y)\ntask colon I=(x,y)\n"
    _, a, _ = run(tmp_path, capsys, text, "--no-timings")
    _, b, _ = run(tmp_path, capsys, text, "--no-timings")
    assert a == b
    _, c, _ = run(tmp_path, capsys, text)
    strip = lambda r: [{k: v for k, v in t.items() if k != "wall_time"} for t in json.loads(r)["tasks"]]
    assert strip(a) == strip(c)


def test_config_precedence(tmp_path, capsys):
    text = "set bound=3\n" + QCI + "task betti target=k\n"
    _, rep = report(tmp_path, capsys, text)
    assert rep["config"]["bound"] == 3 and rep["config"]["sources"]["bound"] == "script"
    assert len(rep["tasks"][0]["data"]["betti"]) == 4
    _, rep = report(tmp_path, capsys, text, "--bound", "5")
    assert rep["config"]["bound"] == 5 and rep["config"]["sources"]["bound"] == "flag"
    _, rep = report(tmp_path, capsys, QCI)
    assert rep["config"]["bound"] == 6 and rep["config"]["sources"]["bound"] == "default"
    # an explicit task argument beats both
    _, rep = report(tmp_path, capsys, text + "task betti target=k bound=2\n", "--bound", "5")
    assert len(rep["tasks"][1]["data"]["betti"]) == 3


def test_field_flag_overrides_script(tmp_path, capsys):
    _, rep = report(tmp_path, capsys, QCI + "task hilbert\n", "--field", "F5")
    assert rep["config"]["field"] == "F5"


def test_concurrent_tasks_match_sequential():
    text = QCI + "task betti target=k bound=5\ntask bass bound=3\ntask qgor I=(x,y)\ntask tref target=(x,y)\n"
    ast = parse_script(text)
    seq = run_tasks(ast, resolve_config(ast, {"jobs": 1})).to_dict(timings=False)
    par = run_tasks(ast, resolve_config(ast, {"jobs": 3})).to_dict(timings=False)
    assert seq["tasks"] == par["tasks"]


def test_text_format(tmp_path, capsys):
    code, out, _ = run(tmp_path, capsys, QCI + "task socle expect=2\n", "--format", "text")
    assert code == 0 and "PASS" in out and "socle" in out


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(tmp_path, capsys, QCI + "task socle\n", "--out", str(dest))
    assert out == "" and json.loads(dest.read_text())["tasks"][0]["data"]["type"] == 2


def test_family_task(tmp_path, capsys):
    text = ("field F5\nring S = poly(w,x,y,z)\nquotient R = S / (w^2, x^2, y^2, z^2, z*w)\n"
            "family F I=(x,y) y=x*y a=(z) b=w u=0..2 n=1\ntask family-verify\n")
    code, rep = report(tmp_path, capsys, text)
    t = rep["tasks"][0]
    assert code == 0 and t["data"]["certificate"]["data"]["distinct_pairs"] == 3
    mm = t["data"]["certificate"]["data"]["minimal_multiplicity"]
    assert mm["R/I"] is True and not any(v for k, v in mm.items() if k != "R/I")


@pytest.mark.parametrize("name", ["short_ring.tr", "qci_ring.tr"])
def test_example_corpus_files_parse(name):
    from pathlib import Path
    text = (Path(__file__).resolve().parent.parent / "paper-examples" / name).read_text()
    assert parse_script(text).tasks
