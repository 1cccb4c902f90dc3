"""Evaluate a parsed script: build the declared objects, run the tasks, collect a report."""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from . import construct, gtheory
from .dsl import (
    FamilyDecl,
    FieldDecl,
    IdealDecl,
    IdealLit,
    IdealOp,
    IdealRef,
    Minors,
    ModuleDecl,
    QuotientDecl,
    RingDecl,
    Script,
    SetDecl,
    TaskDecl,
    Value,
)
from .errors import HypothesisFailed, TotrefError
from .fpmodule import FPModule, bass_dims, dual, has_minimal_multiplicity, is_koszul
from .gtheory import Certificate
from .groebner import Ideal, PolyMatrix, colon, ideal_combine, krull_dim, minors_ideal
from .kernel import Field, PolyRing
from .quotient import QuotientRing, artinian_reduction
from .series import compare, expand

SCHEMA_VERSION = "1.0"
DEFAULTS = {"field": "F101", "bound": 6, "degree-bound": 12, "seed": None}
STATUSES = ("pass", "fail", "indeterminate", "error")


@dataclass
class Config:
    field: str = "F101"
    bound: int = 6
    degree_bound: int = 12
    seed: int | None = None
    jobs: int = 1
    sources: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return {"field": self.field, "bound": self.bound, "degree_bound": self.degree_bound,
                "seed": self.seed, "sources": dict(sorted(self.sources.items()))}


def resolve_config(script: Script, flags: dict | None = None) -> Config:
    """Flags beat script directives, which beat the defaults."""
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    values = dict(DEFAULTS)
    sources = {k: "default" for k in DEFAULTS}
    for s in script.statements:
        if isinstance(s, FieldDecl):
            values["field"], sources["field"] = s.name, "script"
        elif isinstance(s, SetDecl):
            values[s.key] = int(s.value.text)
            sources[s.key] = "script"
    for key in DEFAULTS:
        if key in flags:
            values[key], sources[key] = flags[key], "flag"
    return Config(values["field"], int(values["bound"]), int(values["degree-bound"]),
                  None if values["seed"] is None else int(values["seed"]), int(flags.get("jobs", 1)), sources)


# -- report --------------------------------------------------------------------

@dataclass
class TaskRecord:
    id: str
    task: str
    line: int
    inputs: dict
    status: str
    data: dict
    wall_time: float
    internal: bool = False

    def to_dict(self):
        return {"id": self.id, "task": self.task, "line": self.line, "inputs": self.inputs,
                "status": self.status, "data": self.data, "wall_time": round(self.wall_time, 4)}


@dataclass
class Report:
    config: dict
    declarations: list
    tasks: list

    @property
    def summary(self):
        out = {s: 0 for s in STATUSES}
        for t in self.tasks:
            out[t.status] += 1
        out["declaration_errors"] = sum(1 for d in self.declarations if d["status"] == "error")
        return out

    @property
    def exit_code(self) -> int:
        if any(t.internal for t in self.tasks):
            return 3
        bad = any(t.status in ("fail", "error") for t in self.tasks)
        return 1 if bad or self.summary["declaration_errors"] else 0

    def to_dict(self, timings=True):
        tasks = [t.to_dict() for t in self.tasks]
        if not timings:
            for t in tasks:
                t.pop("wall_time")
        return {"schema_version": SCHEMA_VERSION, "config": self.config, "declarations": self.declarations,
                "tasks": tasks, "summary": self.summary, "exit_code": self.exit_code}

    def to_json(self, timings=True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        c = self.config
        lines = [f"totref report (schema {SCHEMA_VERSION})",
                 f"field {c['field']}  bound {c['bound']}  degree-bound {c['degree_bound']}  seed {c['seed']}", ""]
        for d in self.declarations:
            if d["status"] == "error":
                lines.append(f"[DECL ERROR] line {d['line']} {d['name']}: {d['message']}")
        for t in self.tasks:
            args = " ".join(f"{k}={v}" for k, v in t.inputs.items())
            lines.append(f"[{t.status.upper():>13}] {t.id} {t.task} {args}  ({t.wall_time:.2f}s)")
            for key in ("observed", "colon", "expected", "status", "witness", "message", "hypothesis"):
                if key in t.data:
                    lines.append(f"{'':16}{key}: {_short(t.data[key])}")
        s = self.summary
        lines.append("")
        lines.append(f"pass {s['pass']}  fail {s['fail']}  indeterminate {s['indeterminate']}  error {s['error']}")
        return "\n".join(lines) + "\n"


def _short(x, limit=160):
    text = json.dumps(x, ensure_ascii=False) if not isinstance(x, str) else x
    return text if len(text) <= limit else text[: limit - 3] + "..."


# -- environment ---------------------------------------------------------------

class DeclarationFailed(TotrefError):
    pass


class Env:
    def __init__(self, config: Config):
        self.config = config
        self.field = Field.parse(config.field)
        self.objects: dict = {}
        self.kinds: dict = {}
        self.failed: dict = {}
        self.last = {"ring": None, "quotient": None, "family": None}

    def get(self, name, kinds):
        if name in self.failed:
            raise DeclarationFailed(f"{name} could not be built: {self.failed[name]}")
        if self.kinds.get(name) not in kinds:
            raise TotrefError(f"{name!r} is not a declared {'/'.join(kinds)}")
        return self.objects[name]

    def put(self, name, kind, obj):
        self.objects[name] = obj
        self.kinds[name] = kind
        if kind in self.last:
            self.last[kind] = name


def _parse_poly(S, text):
    return S.parse(text.replace("−", "-"))


def _ideal(env: Env, S: PolyRing, expr) -> Ideal:
    if isinstance(expr, IdealLit):
        return Ideal(S, [_parse_poly(S, g) for g in expr.gens])
    if isinstance(expr, IdealRef):
        I = env.get(expr.name, ("ideal",))
        if I.ring.variables != S.variables:
            raise TotrefError(f"ideal {expr.name} lives in another ring")
        return I
    if isinstance(expr, Minors):
        return minors_ideal(PolyMatrix(S, [[_parse_poly(S, e) for e in row] for row in expr.rows]), expr.size)
    if isinstance(expr, IdealOp):
        a, b = _ideal(env, S, expr.left), _ideal(env, S, expr.right)
        if expr.op == ":":
            return colon(a, b)
        return ideal_combine(a, b, {"+": "sum", "*": "product", "&": "intersect"}[expr.op])
    raise TypeError(expr)


def _declare(env: Env, s):
    if isinstance(s, RingDecl):
        env.put(s.name, "ring", PolyRing(list(s.variables), env.field))
    elif isinstance(s, IdealDecl):
        S = env.get(s.ring or env.last["ring"], ("ring",))
        env.put(s.name, "ideal", _ideal(env, S, s.expr))
    elif isinstance(s, QuotientDecl):
        if env.kinds.get(s.base) == "quotient":
            base = env.get(s.base, ("quotient",))
            J = base.ideal_of(_ideal(env, base.S, s.expr).gens)
        else:
            S = env.get(s.base, ("ring",))
            J = _ideal(env, S, s.expr)
        env.put(s.name, "quotient", QuotientRing(J, name=s.name))
    elif isinstance(s, ModuleDecl):
        R = env.get(s.ring or env.last["quotient"], ("quotient",))
        S = R.S
        if s.kind == "coker":
            M = FPModule(R, PolyMatrix(S, [[_parse_poly(S, e) for e in row] for row in s.arg]), name=s.name)
        elif s.kind == "cyclic":
            M = FPModule.cyclic(R, _ideal(env, S, s.arg).gens, name=s.name)
        elif s.kind == "residue":
            M = FPModule.cyclic(R, S.gens(), name=s.name)
        elif s.kind == "free":
            M = FPModule.free(R, s.arg, name=s.name)
        else:
            M = dual(env.get(s.arg, ("module",)), name=s.name)
        env.put(s.name, "module", M)
    elif isinstance(s, FamilyDecl):
        R = env.get(s.ring or env.last["quotient"], ("quotient",))
        args = dict(s.args)
        S = R.S
        I = _value_ideal(env, S, args["I"]).gens
        a = _value_ideal(env, S, args["a"]).gens
        us = _value_ints(args["u"])
        if "n" in args and int(args["n"].text) != len(a):
            raise TotrefError(f"n={args['n'].text} but {len(a)} elements a were given")
        spec = construct.FamilySpec(R, list(I), _parse_poly(S, args["y"].text), list(a),
                                    _parse_poly(S, args["b"].text), us, name=(args["name"].text if "name" in args else "M"))
        env.put(s.name, "family", spec)


def _value_ideal(env, S, v: Value) -> Ideal:
    if v.kind == "ideal":
        return Ideal.parse(S, v.text)
    if v.kind == "name" and env.kinds.get(v.text) == "ideal":
        return env.get(v.text, ("ideal",))
    return Ideal(S, [_parse_poly(S, v.text)])


def _value_ints(v: Value) -> list:
    if v.kind == "range":
        lo, hi = (int(x) for x in v.text.split(".."))
        return list(range(lo, hi + 1))
    if v.kind == "ideal":
        return [int(x) for x in v.text.strip("()").split(",") if x.strip()]
    return [int(v.text)]


# -- tasks -----------------------------------------------------------------------

@dataclass
class Ctx:
    env: Env
    task: TaskDecl
    last: dict

    def arg(self, key, default=None):
        return self.task.arg(key, default)

    def ring(self) -> QuotientRing:
        v = self.arg("over")
        name = v.text if v else self.last["quotient"]
        if name is None:
            raise TotrefError(f"task {self.task.task} needs a quotient ring (over=...)")
        return self.env.get(name, ("quotient",))

    def bound(self, default=None):
        v = self.arg("bound")
        return int(v.text) if v else (default if default is not None else self.env.config.bound)

    def ideal(self, key="I", required=True):
        v = self.arg(key)
        if v is None:
            if required:
                raise TotrefError(f"task {self.task.task} needs {key}=...")
            return None
        return _value_ideal(self.env, self.ring().S, v)

    def poly(self, key):
        v = self.arg(key)
        if v is None:
            raise TotrefError(f"task {self.task.task} needs {key}=...")
        return _parse_poly(self.ring().S, v.text)

    def module(self, key="target", default="k") -> FPModule:
        v = self.arg(key)
        text = v.text if v else default
        R = self.ring() if (v is None or v.kind != "name" or text == "k") else None
        if v is not None and v.kind == "ideal":
            return FPModule.cyclic(self.ring(), Ideal.parse(self.ring().S, text).gens, name=f"R/{text}")
        if text == "k":
            return FPModule.residue_field(R)
        return self.env.get(text, ("module",))


def _cert(c: Certificate):
    return c.status, c.to_dict()


def t_betti(ctx):
    M = ctx.module()
    N = ctx.bound()
    dbound = None if M.ring.artinian else ctx.env.config.degree_bound
    res = M.resolution(N, degree_bound=dbound)
    betti = res.betti_numbers[: N + 1]  # a cached resolution may go deeper
    graded = {i: row for i, row in res.betti.to_dict().items() if int(i) <= N}
    data = {"betti": betti, "graded": graded, "checks": res.checks}
    if N > 0 and betti[N] > 0:
        # finite-degree growth rate; reported only, never compared
        data["growth_diagnostic"] = round(betti[N] ** (1.0 / N), 6)
    if dbound is not None:
        data["degree_bound"] = dbound
        data["note"] = "computed on the truncation at the degree bound"
    return betti, data, "pass" if all(res.checks.values()) else "fail"


def t_bass(ctx):
    R = ctx.ring()
    N = ctx.bound()
    mu = bass_dims(R, range(0, N + 1))
    return mu, {"bass": mu}, "pass"


def t_hilbert(ctx):
    R = ctx.ring()
    if R.artinian:
        h, length = R.hilbert_and_length()
        return h, {"hilbert": h, "length": length}, "pass"
    h = R.hilbert(ctx.env.config.degree_bound)
    return h, {"hilbert": h, "degree_bound": ctx.env.config.degree_bound}, "pass"


def t_socle(ctx):
    R = ctx.ring()
    basis, r = R.socle_and_type()
    return r, {"type": r, "socle": [str(f) for f in basis]}, "pass"


def t_qgor(ctx):
    return _cert(gtheory.is_quasi_gorenstein(ctx.ideal(), ctx.ring(), ctx.bound()))


def t_tref(ctx):
    M = ctx.module()
    return _cert(gtheory.tref_certificate(M, M.ring, ctx.bound()))


def t_exactpair(ctx):
    return _cert(gtheory.exact_pair_check(ctx.poly("x"), ctx.poly("y"), ctx.ring()))


def t_main1(ctx):
    M = ctx.module()
    return _cert(gtheory.verify_main1(ctx.ring(), M, ctx.bound(8), seed=ctx.env.config.seed))


def t_l22(ctx):
    return _cert(gtheory.verify_l22(ctx.ring(), ctx.ideal(), ctx.bound()))


def t_large(ctx):
    return _cert(gtheory.verify_large(ctx.ring(), ctx.ideal(), ctx.bound()))


def t_t22(ctx):
    return _cert(gtheory.verify_t22(ctx.ring(), ctx.ideal(), ctx.bound(8), seed=ctx.env.config.seed))


def t_type_lemma(ctx):
    return _cert(gtheory.verify_type_lemma(ctx.ring(), ctx.module(), ctx.bound(5)))


def t_betti_bound(ctx):
    return _cert(gtheory.verify_betti_bound(ctx.ring(), ctx.module(), ctx.module("other"), ctx.bound(8)))


def t_family(ctx):
    v = ctx.arg("family")
    name = v.text if v else ctx.last["family"]
    if name is None:
        raise TotrefError("family-verify needs a declared family")
    spec = ctx.env.get(name, ("family",))
    mods = construct.build_family(spec)
    idem = ctx.arg("idempotent")
    cert = construct.verify_family(spec, mods, ctx.bound(), jobs=ctx.env.config.jobs,
                                   idempotent_check=bool(idem and idem.text in ("yes", "true", "1")))
    R_I = FPModule.cyclic(spec.R, spec.I)
    cert.data["minimal_multiplicity"] = {"R/I": has_minimal_multiplicity(R_I),
                                         **{M.name: has_minimal_multiplicity(M) for M in mods}}
    cert.data["modules_summary"] = {M.name: {"nu": M.nu, "length": M.length} for M in mods}
    return _cert(cert)


def t_dim(ctx):
    v = ctx.arg("of")
    if v is not None and v.kind == "name" and ctx.env.kinds.get(v.text) == "quotient":
        R = ctx.env.get(v.text, ("quotient",))
        d = R.krull_dim()
        return d, {"dimension": d, "of": v.text}, "pass"
    if v is not None and v.kind == "name" and ctx.env.kinds.get(v.text) == "ideal":
        I = ctx.env.get(v.text, ("ideal",))
    elif v is not None and v.kind == "ideal":
        S = ctx.env.get(ctx.last["ring"], ("ring",))
        I = Ideal.parse(S, v.text)
    else:
        R = ctx.ring()
        d = R.krull_dim()
        return d, {"dimension": d}, "pass"
    d = krull_dim(I)
    return d, {"dimension": d, "of": str(I)}, "pass"


def t_colon(ctx):
    R = ctx.ring()
    I = ctx.ideal("I")
    J = ctx.ideal("J", required=False)
    top = R.ideal_of(J.gens if J is not None else [])
    Q = colon(top, R.ideal_of(I.gens))
    gens = [g for g in (R.normal_form(f) for f in Q.groebner()) if not g.is_zero()]
    if R.artinian:
        gens = gtheory.IdealSpace.generated(R, gens).generators()
    return Q, {"colon": [str(g) for g in gens], "gb": [str(g) for g in Q.groebner()]}, "pass"


def t_series(ctx):
    v = ctx.arg("series")
    if v is None:
        raise TotrefError("series-check needs series=...")
    N = ctx.bound(8)
    mode = ctx.arg("mode").text if ctx.arg("mode") else "eq"
    exp = expand(v.text, N)
    against = ctx.arg("against")
    if against is not None:
        observed = [int(x) for x in against.text.strip("()").split(",")]
        source = "literal"
    else:
        M = ctx.module()
        dbound = None if M.ring.artinian else ctx.env.config.degree_bound
        observed = M.resolution(N, degree_bound=dbound).betti_numbers[: N + 1]
        source = f"betti numbers of {M.name or 'target'}"
    cmp = compare(observed, exp, mode)
    data = {"series": v.text, "expansion": list(exp.coeffs), "observed": observed, "source": source,
            "comparison": cmp.to_dict()}
    return cmp.passed, data, "pass" if cmp else "fail"


def t_koszul(ctx):
    r = is_koszul(ctx.ring(), ctx.bound())
    return r.linear, {"linear": r.linear, "bound": r.bound, "violation": r.violation}, "pass" if r.linear else "fail"


def t_minmult(ctx):
    M = ctx.module()
    val = has_minimal_multiplicity(M)
    return val, {"minimal_multiplicity": val}, "pass"


def t_nu(ctx):
    if ctx.arg("I") is not None:
        n = gtheory.ideal_nu(ctx.ring(), ctx.ideal())
    else:
        n = ctx.module().nu
    return n, {"nu": n}, "pass"


def t_grade(ctx):
    g = gtheory.grade_of(ctx.ideal(), ctx.ring(), ctx.bound())
    return (g if isinstance(g, int) else str(g)), {"grade": str(g)}, "pass"


def t_reduce(ctx):
    R = ctx.ring()
    Rb, d, forms = artinian_reduction(R, seed=ctx.env.config.seed)
    data = {"forms": [str(f) for f in forms], "dimension": d, "hilbert": Rb.hilbert(), "type": Rb.type}
    return d, data, "pass"


HANDLERS = {
    "betti": t_betti, "bass": t_bass, "hilbert": t_hilbert, "socle": t_socle, "qgor": t_qgor,
    "tref": t_tref, "exactpair": t_exactpair, "verify-main1": t_main1, "verify-l22": t_l22,
    "verify-large": t_large, "verify-t22": t_t22, "verify-type-lemma": t_type_lemma,
    "verify-betti-bound": t_betti_bound, "family-verify": t_family, "dim": t_dim, "colon": t_colon,
    "series-check": t_series, "koszul": t_koszul, "minmult": t_minmult, "nu": t_nu, "grade": t_grade,
    "reduce": t_reduce,
}
_CERT_STATUS = {"verified": "pass", "full-proof": "pass", "refuted": "fail", "indeterminate": "indeterminate"}


def _matches(ctx, observed, expect: Value):
    text = expect.text
    if isinstance(observed, str):
        return observed == text
    if isinstance(observed, bool):
        return text.lower() in (("true", "yes") if observed else ("false", "no"))
    if isinstance(observed, Ideal):
        R = ctx.ring()
        return R.ideal_of(Ideal.parse(R.S, text).gens) == observed
    if isinstance(observed, list):
        want = [int(x) for x in text.strip("()").split(",") if x.strip()]
        return observed[: len(want)] == want and len(observed) >= len(want)
    return str(observed) == text


def _run_task(env: Env, idx: int, task: TaskDecl, last: dict) -> TaskRecord:
    ctx = Ctx(env, task, last)
    inputs = {k: v.text for k, v in task.args}
    t0 = time.perf_counter()
    internal = False
    try:
        out = HANDLERS[task.task](ctx)
        if len(out) == 2:  # certificate
            cstatus, data = out
            observed = cstatus
            status = _CERT_STATUS[cstatus]
            data = {"status": cstatus, **({"witness": data["witness"]} if "witness" in data else {}),
                    "certificate": data}
        else:
            observed, data, status = out
            if not isinstance(observed, (Ideal,)):
                data = {"observed": observed, **data}
    except HypothesisFailed as e:
        observed = "hypothesis-failed"
        status = "fail"
        data = {"status": observed, "hypothesis": e.hypothesis, "witness": gtheory._jsonable(e.witness)}
    except TotrefError as e:
        observed = "error"
        status = "error"
        data = {"message": f"{task.task}: {e}", "error": type(e).__name__}
    except Exception as e:  # a bug, not a mathematical outcome
        observed = "error"
        status = "error"
        internal = True
        data = {"message": f"{task.task}: internal error {type(e).__name__}: {e}",
                "traceback": traceback.format_exc().splitlines()[-6:]}
    expect = task.arg("expect")
    if expect is not None and not internal:
        ok = _matches(ctx, observed, expect) if observed != "error" or expect.text == "error" else False
        data["expected"] = expect.text
        status = "pass" if ok else "fail"
    data = gtheory._jsonable(data)
    return TaskRecord(f"t{idx}", task.task, task.line, inputs, status, data, time.perf_counter() - t0, internal)


def run_tasks(script: Script, config: Config | None = None) -> Report:
    config = config or resolve_config(script)
    env = Env(config)
    decls = []
    pending = []
    for s in script.statements:
        if isinstance(s, TaskDecl):
            pending.append((len(pending) + 1, s, dict(env.last)))
            continue
        if isinstance(s, (FieldDecl, SetDecl)):
            continue
        name = getattr(s, "name", "")
        try:
            _declare(env, s)
            decls.append({"line": s.line, "name": name, "status": "ok"})
        except Exception as e:
            env.failed[name] = f"{type(e).__name__}: {e}"
            kind = {RingDecl: "ring", IdealDecl: "ideal", QuotientDecl: "quotient",
                    ModuleDecl: "module", FamilyDecl: "family"}[type(s)]
            env.kinds[name] = kind
            if kind in env.last:
                env.last[kind] = name
            decls.append({"line": s.line, "name": name, "status": "error", "message": env.failed[name]})
    if config.jobs > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as ex:
            records = list(ex.map(lambda p: _run_task(env, *p), pending))
    else:
        records = [_run_task(env, *p) for p in pending]
    return Report(config.to_dict(), decls, records)
