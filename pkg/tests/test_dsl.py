from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from totref.dsl import (
    FamilyDecl,
    IdealLit,
    IdealOp,
    IdealRef,
    Minors,
    ModuleDecl,
    RingDecl,
    Script,
    parse_script,
    print_script,
)
from totref.errors import Redefinition, ScriptSyntaxError, UndefinedName

EXAMPLES = Path(__file__).resolve().parent.parent / "paper-examples"

QCI_SCRIPT = """field F101
ring S = poly(w,x,y,z)
ideal J = (w^2, x^2, y^2, z^2, z*w)
quotient R = S / J
task betti target=k bound=8
"""


def test_qci_script_shape():
    ast = parse_script(QCI_SCRIPT)
    assert len(ast.declarations) == 4 and len(ast.tasks) == 1
    assert ast.statements[1] == RingDecl("S", ("w", "x", "y", "z"))
    t = ast.tasks[0]
    assert t.task == "betti" and t.arg("bound").text == "8" and t.arg("target").kind == "name"
    assert t.line == 5


def test_empty_file():
    assert parse_script("") == Script(())
    assert parse_script("# only a comment\n\n") == Script(())


def test_dangling_comma():
    with pytest.raises(ScriptSyntaxError) as e:
        parse_script("ring S = poly(x)\nideal J = (x^2,")
    assert e.value.line == 2 and e.value.col >= 15


def test_name_errors():
    with pytest.raises(UndefinedName):
        parse_script("ring S = poly(x)\nquotient R = T / (x)")
    with pytest.raises(UndefinedName):
        parse_script("ideal J = (x)")
    with pytest.raises(Redefinition):
        parse_script("ring S = poly(x)\nring S = poly(y)")
    with pytest.raises(Redefinition):
        parse_script("field F5\nfield F7")
    with pytest.raises(UndefinedName):
        parse_script(QCI_SCRIPT + "task tref target=M\n")


def test_unknown_task_and_keyword():
    with pytest.raises(ScriptSyntaxError) as e:
        parse_script(QCI_SCRIPT + "task frobnicate\n")
    assert "betti" in e.value.expected
    with pytest.raises(ScriptSyntaxError):
        parse_script("rng S = poly(x)")


def test_ideal_expressions():
    ast = parse_script(
        "ring S = poly(x0,x1,x2,x3,x4)\n"
        "ideal P = minors(2, [[x0,x1,x2,x3],[x1,x2,x3,x4]])\n"
        "ideal C = (x1^2-x0*x2, x2^2-x1*x3)\n"
        "ideal J = C : P + P & (x0)\n"
    )
    P, C, J = ast.statements[1:]
    assert isinstance(P.expr, Minors) and P.expr.size == 2
    assert isinstance(C.expr, IdealLit) and len(C.expr.gens) == 2
    assert J.expr == IdealOp("&", IdealOp("+", IdealOp(":", IdealRef("C"), IdealRef("P")), IdealRef("P")),
                             IdealLit(("x0",)))


def test_modules_and_families():
    ast = parse_script(QCI_SCRIPT + "module M over R = coker [[x, y, z+w], [0, 0, x*y]]\n"
                                    "module D = dual M\n"
                                    "family F I=(x,y) y=x*y a=(z) b=w u=0..4 n=1\n"
                                    "task family-verify family=F\n")
    M, D, F = ast.statements[5:8]
    assert isinstance(M, ModuleDecl) and M.kind == "coker" and M.ring == "R"
    assert D.kind == "dual" and D.arg == "M"
    assert isinstance(F, FamilyDecl) and dict(F.args)["u"].kind == "range"


@pytest.mark.parametrize("path", sorted(EXAMPLES.glob("*.tr")), ids=lambda p: p.name)
def test_round_trip_on_example_corpus(path):
    ast = parse_script(path.read_text())
    assert parse_script(print_script(ast)) == ast


names = st.sampled_from(["A", "B", "C"])
polys = st.sampled_from(["x", "y", "x^2 - y", "3*x*y + 1", "x*y^2", "-x"])
lits = st.lists(polys, min_size=1, max_size=3).map(lambda gs: "(" + ", ".join(gs) + ")")


@st.composite
def scripts(draw):
    lines = ["field F101", "ring S = poly(x,y)"]
    defined = []
    for i in range(draw(st.integers(1, 4))):
        name = f"I{i}"
        expr = draw(lits)
        if defined and draw(st.booleans()):
            op = draw(st.sampled_from(["+", "*", ":", "&"]))
            expr = f"{draw(st.sampled_from(defined))} {op} {expr}"
        lines.append(f"ideal {name} = {expr}")
        defined.append(name)
    lines.append(f"quotient R = S / {draw(st.sampled_from(defined))}")
    for _ in range(draw(st.integers(0, 4))):
        task = draw(st.sampled_from(["betti", "hilbert", "qgor", "nu", "colon"]))
        args = []
        if draw(st.booleans()):
            args.append(f"bound={draw(st.integers(0, 9))}")
        if task in ("qgor", "nu", "colon"):
            args.append(f"I={draw(lits)}")
        if draw(st.booleans()):
            args.append(f'expect="{draw(st.sampled_from(["pass", "refuted", "full-proof"]))}"')
        lines.append(" ".join(["task", task] + args))
    return "\n".join(lines) + "\n"


@settings(max_examples=60)
@given(scripts())
def test_round_trip_on_generated_scripts(text):
    ast = parse_script(text)
    printed = print_script(ast)
    assert parse_script(printed) == ast
    assert print_script(parse_script(printed)) == printed
