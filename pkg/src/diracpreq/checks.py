"""Named check operations for manifests, and the runner."""

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebroid import preq_residual
from .calculus import KVector, d
from .dirac import (
    DiracStructure,
    adm_bracket,
    admissible_solve,
    char_dist_at_point,
    courant_bracket,
    graph_two_form,
    integrability_check,
    is_basic,
    jacobi_residual,
)
from .djacobi import (
    DiracJacobiStructure,
    diracization,
    dj_admissible_solve,
    dj_bracket,
    dj_is_basic,
    dj_jacobi_residual,
    et_homomorphism_residual,
    ext_courant_bracket,
    graph_form_pair,
    graph_jacobi,
    product_chart,
    reeb_solve,
    regraph,
    u_embed,
)
from .errors import EngineError, ParseError, ValidationError
from .lebrun import (
    char_boundary_check,
    conformal_pushforward_check,
    conformal_transform,
    contact_check,
    linearize_at_point,
    pinch_pair,
    vanishing_locus_check,
)
from .linpair import E1Section, span_equal
from .manifest import parse_point
from .preq import (
    GradedFunction,
    build_Lbar,
    ext_bfield,
    graded_bracket,
    graded_hamiltonian,
    jet_test,
    lconn,
    lconn_curvature,
    lconn_rep,
    leaf_classify,
    poisson_jacobi_pair,
    preq_hamiltonian,
    pushforward_check,
    rep_apply,
    shifted,
    in_polarized_domain,
)
from .sampling import random_poly, rng_for


@dataclass
class Arg:
    kind: str
    default: object = None
    required: bool = True
    on: str = None  # chart for scalars and tensors: None = base chart, "Q", or a family chart


def opt(kind, default=None, on=None):
    return Arg(kind, default, False, on)


@dataclass
class Op:
    fn: object
    args: dict


OPS = {}

STRUCTURAL = {"structure", "dirac", "dj", "preq", "int", "str", "bool", "point", "points", "ints", "family", "chart"}


def op(name, **args):
    def deco(fn):
        OPS[name] = Op(fn, args)
        return fn
    return deco


# ------------------------------------------------------------ arg resolution

def _chart_for(on, resolved):
    if on is None:
        for v in resolved.values():
            if isinstance(v, (DiracStructure, DiracJacobiStructure)):
                return v.chart
            if hasattr(v, "Q") and hasattr(v, "base"):
                return v.chart
        return None
    if on == "Q":
        for v in resolved.values():
            if hasattr(v, "Q") and hasattr(v, "base"):
                return v.Q
        return None
    if on == "chart":
        return resolved["chart"]
    if on.startswith("fam:"):
        fam = resolved.get("n")
        return getattr(fam, on[4:])
    raise ValueError(on)


def resolve_args(ld, spec, args, loc):
    extra = set(args) - set(spec.args)
    if extra:
        raise ParseError(f"unknown arguments {sorted(extra)}", loc)
    out = {}
    pending = []
    for name, a in spec.args.items():
        if name not in args:
            if a.required:
                raise ParseError(f"missing argument {name!r}", loc)
            out[name] = a.default
            continue
        if a.kind in STRUCTURAL:
            out[name] = _structural(ld, a.kind, args[name], f"{loc}.{name}")
        else:
            pending.append(name)
    for name in pending:
        a = spec.args[name]
        ch = _chart_for(a.on, out)
        v, aloc = args[name], f"{loc}.{name}"
        if a.kind == "scalar":
            if ch is None:
                raise ValidationError(f"{aloc}: no chart to read the expression on")
            out[name] = ld.scalar(ch, v, aloc)
        elif a.kind == "scalars":
            if not isinstance(v, list):
                raise ParseError("expected a list of expressions", aloc)
            out[name] = [ld.scalar(ch, x, f"{aloc}[{k}]") for k, x in enumerate(v)]
        elif a.kind in ("form", "vector"):
            out[name] = ld.tensor_from(v, ch, a.kind, aloc)
        elif a.kind == "vectors":
            if not isinstance(v, list):
                raise ParseError("expected a list of vectors", aloc)
            out[name] = [ld.tensor_from(x, ch, "vector", f"{aloc}[{k}]") for k, x in enumerate(v)]
        else:
            raise ValueError(a.kind)
    return out


def _structural(ld, kind, v, loc):
    if kind in ("structure", "dirac", "dj"):
        S = ld.structure(v, loc)
        if kind == "dirac" and not isinstance(S, DiracStructure):
            raise ValidationError(f"{loc}: {v!r} is not a Dirac structure")
        if kind == "dj" and not isinstance(S, DiracJacobiStructure):
            raise ValidationError(f"{loc}: {v!r} is not a Dirac-Jacobi structure")
        return S
    if kind == "preq":
        return ld.preq_block(v, loc)
    if kind == "family":
        return ld.family(v, loc)
    if kind == "chart":
        return ld.chart(v, loc)
    if kind == "int":
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError("expected an integer", loc)
        return v
    if kind == "ints":
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
            raise ParseError("expected a list of integers", loc)
        return v
    if kind == "bool":
        if not isinstance(v, bool):
            raise ParseError("expected true or false", loc)
        return v
    if kind == "str":
        if not isinstance(v, str):
            raise ParseError("expected a string", loc)
        return v
    if kind == "point":
        return parse_point(v, loc)
    if kind == "points":
        if not isinstance(v, list):
            raise ParseError("expected a list of points", loc)
        return [parse_point(p, f"{loc}[{k}]") for k, p in enumerate(v)]
    raise ValueError(kind)


# ----------------------------------------------------------------- helpers

def _ok(flag, **witness):
    return ("pass" if flag else "fail"), witness


def _span(rows_a, rows_b):
    """Equality of spans over the fraction field."""
    ra, rb = linalg.rank(rows_a), linalg.rank(rows_b)
    return ra == rb == linalg.rank(rows_a + rows_b), ra, rb


def _fmt_point(p):
    return {k: str(v) for k, v in p.items()}


def _random_section(ch, rng, degree=2, terms=2):
    comps = [random_poly(ch, rng, degree=degree, terms=terms) for _ in range(2 * ch.dim + 2)]
    return E1Section.from_components(ch, comps)


# --------------------------------------------------------- Dirac structures

@op("integrability", structure=Arg("structure"))
def _integrability(a, ctx):
    r = integrability_check(a["structure"])
    if r:
        return "pass", {}
    w = r.witness
    return "fail", {"triple": list(w["triple"]), "value": str(w["value"])}


@op("char_rank", structure=Arg("dirac"), point=Arg("point"))
def _char_rank(a, ctx):
    ker = char_dist_at_point(a["structure"], a["point"])
    return len(ker), {"point": _fmt_point(a["point"]), "basis": [str(v) for v in ker]}


@op("admissible", structure=Arg("structure"), f=Arg("scalar"), factor=opt("scalar"))
def _admissible(a, ctx):
    S = a["structure"]
    res = dj_admissible_solve(S, a["f"]) if isinstance(S, DiracJacobiStructure) else admissible_solve(S, a["f"])
    w = {"status": res.status}
    if res.certified:
        w["X"] = str(res.X)
        if res.phi is not None:
            w["phi"] = str(res.phi)
        return res.status, w
    w["factor"] = str(res.factor)
    if res.witness is not None:
        w["point"] = _fmt_point(res.witness)
    want = a["factor"]
    if want is not None and res.factor is not None:
        q = S.chart.scalar(res.factor) / want
        if not q.is_constant():
            return f"{res.status}:factor_mismatch", w
    return res.status, w


@op("basic", structure=Arg("structure"), f=Arg("scalar"))
def _basic(a, ctx):
    S = a["structure"]
    r = dj_is_basic(S, a["f"]) if isinstance(S, DiracJacobiStructure) else is_basic(S, a["f"])
    return ("basic" if r else "not_basic"), dict(r.witness or {})


@op("bracket", structure=Arg("structure"), f=Arg("scalar"), g=Arg("scalar"), value=Arg("scalar"))
def _bracket(a, ctx):
    S = a["structure"]
    br = dj_bracket if isinstance(S, DiracJacobiStructure) else adm_bracket
    v = br(S, a["f"], a["g"])
    return _ok(v == a["value"], value=str(v), expected=str(a["value"]))


@op("jacobi_random", structure=Arg("structure"), count=opt("int", 25), degree=opt("int", 3))
def _jacobi_random(a, ctx):
    S = a["structure"]
    ch = S.chart
    res = dj_jacobi_residual if isinstance(S, DiracJacobiStructure) else jacobi_residual
    for k in range(a["count"]):
        f, g, h = (random_poly(ch, ctx.rng, degree=a["degree"]) for _ in range(3))
        r = res(S, f, g, h)
        if not r.is_zero():
            return "fail", {"sample": k, "f": str(f), "g": str(g), "h": str(h), "residual": str(r)}
    return "pass", {"samples": a["count"]}


@op("span_equal", a=Arg("structure"), b=Arg("structure"))
def _span_equal(a, ctx):
    r = span_equal(a["a"].frame, a["b"].frame)
    return _ok(bool(r), **{k: str(v) for k, v in (r.witness or {}).items()})


# -------------------------------------------------- Dirac-Jacobi structures

@op("reeb", chart=Arg("chart"), form=Arg("form", on="chart"), vector=opt("vector", on="chart"))
def _reeb(a, ctx):
    E = reeb_solve(a["form"])
    if a["vector"] is None:
        return "pass", {"reeb": str(E)}
    return _ok(E == a["vector"], reeb=str(E), expected=str(a["vector"]))


@op("regraph", structure=Arg("dj"), target=Arg("str"), bivector=opt("vector"), vector=opt("vector"),
    form2=opt("form"), form1=opt("form"))
def _regraph(a, ctx):
    r = regraph(a["structure"], a["target"])
    w = {"first": str(r.first), "second": str(r.second)}
    if a["target"] == "jacobi":
        want = (a["bivector"], a["vector"])
    else:
        want = (a["form2"], a["form1"])
    ok = all(x is None or x == y for x, y in zip(want, (r.first, r.second)))
    return _ok(ok, **w)


@op("diracization", structure=Arg("dj"), sigma=Arg("form"))
def _diracization(a, ctx):
    D = diracization(a["structure"])
    ext = D.chart
    et = ext.unit(ext.exp_units[-1].name)
    target = graph_two_form(d(a["sigma"].lift(ext) * et))
    r = span_equal(D.frame, target.frame)
    return _ok(bool(r), **{k: str(v) for k, v in (r.witness or {}).items()})


@op("u_embedding", structure=Arg("structure"), count=opt("int", 5), degree=opt("int", 2))
def _u_embedding(a, ctx):
    ch = a["structure"].chart
    ext, t, u = product_chart(ch)
    for k in range(a["count"]):
        x, y = _random_section(ch, ctx.rng, a["degree"]), _random_section(ch, ctx.rng, a["degree"])
        lhs = u_embed(ext_courant_bracket(x, y), ext, t, u)
        rhs = courant_bracket(u_embed(x, ext, t, u), u_embed(y, ext, t, u))
        if lhs != rhs:
            return "fail", {"sample": k, "a": str(x), "b": str(y), "difference": str(lhs - rhs)}
    return "pass", {"samples": a["count"]}


@op("et_homomorphism", structure=Arg("dj"), count=opt("int", 5), degree=opt("int", 2))
def _et_hom(a, ctx):
    S = a["structure"]
    D = diracization(S)
    for k in range(a["count"]):
        f = random_poly(S.chart, ctx.rng, degree=a["degree"])
        g = random_poly(S.chart, ctx.rng, degree=a["degree"])
        r = et_homomorphism_residual(S, f, g, D)
        if not r.is_zero():
            return "fail", {"sample": k, "f": str(f), "g": str(g), "residual": str(r)}
    return "pass", {"samples": a["count"]}


# ---------------------------------------------------------- prequantization

def _lbar(ctx, data):
    key = id(data)
    if key not in ctx.cache:
        ctx.cache[key] = build_Lbar(data)
    return ctx.cache[key]


@op("lbar_integrable", preq=Arg("preq"))
def _lbar_int(a, ctx):
    r = integrability_check(_lbar(ctx, a["preq"]))
    if r:
        return "pass", {}
    return "fail", {"triple": list(r.witness["triple"]), "value": str(r.witness["value"])}


@op("lbar_presymplectic", preq=Arg("preq"))
def _lbar_presym(a, ctx):
    data = a["preq"]
    s = data.sigma
    r = span_equal(_lbar(ctx, data).frame, graph_form_pair(d(s), s).frame)
    return _ok(bool(r), sigma=str(s), **{k: str(v) for k, v in (r.witness or {}).items()})


@op("lbar_poisson", preq=Arg("preq"), bivector=Arg("vector"))
def _lbar_poisson(a, ctx):
    data = a["preq"]
    lam, E = poisson_jacobi_pair(data, a["bivector"])
    r = span_equal(_lbar(ctx, data).frame, graph_jacobi(lam, E).frame)
    return _ok(bool(r), bivector=str(lam), vector=str(E), **{k: str(v) for k, v in (r.witness or {}).items()})


@op("lbar_char", preq=Arg("preq"), vectors=Arg("vectors", on="Q"))
def _lbar_char(a, ctx):
    from .djacobi import dj_char_generic

    Lb = _lbar(ctx, a["preq"])
    got = dj_char_generic(Lb)
    rows_g = [X.components() + [f] for X, f in got]
    rows_w = [v.components() + [v.chart.zero] for v in a["vectors"]]
    same, rg, rw = _span(rows_g, rows_w)
    return _ok(same, computed=[f"({X}, {f})" for X, f in got], expected=[str(v) for v in a["vectors"]],
               rank_computed=rg, rank_expected=rw)


@op("preq_hamiltonian", preq=Arg("preq"), g=Arg("scalar"), vector=Arg("vector", on="Q"))
def _preq_ham(a, ctx):
    data = a["preq"]
    X = preq_hamiltonian(data, a["g"], Lbar=_lbar(ctx, data))
    return _ok(X == a["vector"], X=str(X), expected=str(a["vector"]))


@op("pushforward", preq=Arg("preq"))
def _pushforward(a, ctx):
    fails = pushforward_check(a["preq"], _lbar(ctx, a["preq"]))
    n = len(a["preq"].base.frame) + 1
    return _ok(not fails, generators=n, failures=[{"generator": k, "reason": str(r)} for k, r in fails])


@op("leaf", preq=Arg("preq"), point=Arg("point"), gamma=opt("form"), Omega_L=opt("form"))
def _leaf(a, ctx):
    data = a["preq"]
    info = leaf_classify(data, a["point"], _lbar(ctx, data), a["gamma"], a["Omega_L"])
    w = {"point": _fmt_point(a["point"]), "consistent": info.consistent,
         "detail": {k: v for k, v in info.detail.items()}}
    if info.form is not None:
        w["form"] = str(info.form)
    if info.pair is not None:
        w["pair"] = [str(x) for x in info.pair]
    if not info.consistent:
        return "inconsistent", w
    return info.kind, w


@op("preq_residual", preq=Arg("preq"))
def _preq_res(a, ctx):
    data = a["preq"]
    r = preq_residual(data.base, data.Omega, data.beta)
    return _ok(r.is_zero(), residual=str(r), beta=str(data.beta), integrality="asserted by user")


@op("bfield_shift", preq=Arg("preq"), gamma=Arg("form"), shift_beta=Arg("bool"))
def _bfield(a, ctx):
    data, gamma = a["preq"], a["gamma"]
    moved = build_Lbar(shifted(data, gamma, a["shift_beta"]))
    Lb = _lbar(ctx, data)
    target = Lb if a["shift_beta"] else ext_bfield(Lb, gamma.lift(data.Q))
    r = span_equal(moved.frame, target.frame)
    return _ok(bool(r), **{k: str(v) for k, v in (r.witness or {}).items()})


# ----------------------------------------------------------- L-connection

@op("curvature", preq=Arg("preq"), samples=opt("int", 2), degree=opt("int", 2))
def _curvature(a, ctx):
    data = a["preq"]
    D = lconn(data)
    m = len(data.base.frame)
    count = 0
    for _ in range(a["samples"]):
        s = random_poly(data.chart, ctx.rng, degree=a["degree"])
        for i in range(m):
            for j in range(i + 1, m):
                r = lconn_curvature(D, i, j, s)
                count += 1
                if not r:
                    return "fail", {"pair": [i, j], "s": str(s), "value": str(r.value), "expected": str(r.expected)}
    return "pass", {"evaluations": count}


@op("lconn_rep", preq=Arg("preq"), count=opt("int", 5), degree=opt("int", 2),
    g_factor=opt("scalar"), s_factor=opt("scalar"))
def _lconn_rep(a, ctx):
    data = a["preq"]
    ch = data.chart
    D = lconn(data)
    gf = a["g_factor"] if a["g_factor"] is not None else ch.one
    sf = a["s_factor"] if a["s_factor"] is not None else ch.one
    for k in range(a["count"]):
        g = random_poly(ch, ctx.rng, degree=a["degree"]) * gf
        s = random_poly(ch, ctx.rng, degree=a["degree"]) * sf
        phi = GradedFunction(ch, {-1: s})
        lhs = lconn_rep(D, g, phi)
        rhs = rep_apply(data, g, phi)
        if lhs != rhs:
            return "fail", {"sample": k, "g": str(g), "s": str(s), "lconn": str(lhs), "rep": str(rhs)}
    return "pass", {"samples": a["count"]}


@op("lconn_domain", preq=Arg("preq"), s=Arg("scalar"))
def _lconn_domain(a, ctx):
    ok, w = in_polarized_domain(lconn(a["preq"]), a["s"])
    return ("in_domain" if ok else "not_in_domain"), dict(w or {})


# ---------------------------------------------------------- representations

@op("representation", preq=Arg("preq"), count=opt("int", 5), degree=opt("int", 2), grades=opt("ints", [-2, -1, 0, 1, 2]))
def _representation(a, ctx):
    data = a["preq"]
    ch = data.chart
    L = data.base
    for k in range(a["count"]):
        f = random_poly(ch, ctx.rng, degree=a["degree"])
        g = random_poly(ch, ctx.rng, degree=a["degree"])
        phi = GradedFunction(ch, {n: random_poly(ch, ctx.rng, degree=a["degree"]) for n in a["grades"]})
        lhs = rep_apply(data, f, rep_apply(data, g, phi)) - rep_apply(data, g, rep_apply(data, f, phi))
        rhs = rep_apply(data, adm_bracket(L, f, g), phi)
        if lhs != rhs:
            return "fail", {"sample": k, "f": str(f), "g": str(g), "phi": str(phi), "difference": str(lhs - rhs)}
    return "pass", {"samples": a["count"]}


@op("grade_additivity", preq=Arg("preq"), grades=opt("ints", [-2, -1, 0, 1, 2]), degree=opt("int", 1))
def _grades(a, ctx):
    data = a["preq"]
    ch = data.chart
    Lb = _lbar(ctx, data)
    count = 0
    for n in a["grades"]:
        for m in a["grades"]:
            h = random_poly(ch, ctx.rng, degree=a["degree"], terms=2)
            k = random_poly(ch, ctx.rng, degree=a["degree"], terms=2)
            out = graded_bracket(Lb, data, (h, n), (k, m))
            count += 1
            if set(out.grades()) - {n + m}:
                return "fail", {"grades": [n, m], "h": str(h), "k": str(k), "bracket": str(out)}
            if not out.is_zero():
                graded_hamiltonian(Lb, data, out[n + m], n + m)
    return "pass", {"pairs": count}


@op("jet", preq=Arg("preq"), point=Arg("point"), n=Arg("int"))
def _jet(a, ctx):
    data = a["preq"]
    kern, F, adm = jet_test(data, a["point"], a["n"], _lbar(ctx, data))
    same, rk, rf = _span(kern, F) if kern or F else (True, 0, 0)
    w = {"kernel": [[str(x) for x in v] for v in kern], "F": [[str(x) for x in v] for v in F],
         "jets_admissible": adm}
    if not all(adm):
        return "jet_not_admissible", w
    return ("kernel_equals_F" if same else "kernel_exceeds_F"), w


# ------------------------------------------------------------------ LeBrun

@op("lebrun_symplectization", n=Arg("family"))
def _lb_sympl(a, ctx):
    fam = a["n"]
    r = span_equal(fam.symplectization().frame, diracization(fam.contact_dj()).frame)
    return _ok(bool(r), **{k: str(v) for k, v in (r.witness or {}).items()})


@op("lebrun_overlap", n=Arg("family"))
def _lb_overlap(a, ctx):
    g = a["n"].glued_dirac()
    return _ok(bool(g.overlap), **{k: str(v) for k, v in (g.overlap.witness or {}).items()})


@op("lebrun_boundary", n=Arg("family"))
def _lb_boundary(a, ctx):
    r = char_boundary_check(a["n"])
    return _ok(r.passed, kernel=r.kernel, expected=r.expected, basic=r.basic, expected_basic=r.expected_basic)


@op("lebrun_linearize", n=Arg("family"), point=Arg("point"), bivector=Arg("vector", on="fam:R"))
def _lb_linear(a, ctx):
    fam = a["n"]
    lin = linearize_at_point(fam.poisson_bivector(), a["point"])
    return _ok(lin == a["bivector"], linearization=str(lin), expected=str(a["bivector"]))


@op("lebrun_pinch", n=Arg("family"))
def _lb_pinch(a, ctx):
    fam = a["n"]
    lam, E = pinch_pair(fam.eq17_pair())
    ch = E.chart
    want = KVector.basis(ch, "y") * ch.coord("x") - KVector.basis(ch, "x") * ch.coord("y")
    zeros = vanishing_locus_check(E)
    only_origin = all(v == ((p, q) == (0, 0)) for (p, q), v in zeros.items())
    integrable = bool(integrability_check(graph_jacobi(lam, E)))
    w = {"bivector": str(lam), "vector": str(E),
         "vanishes": {f"({p}, {q})": v for (p, q), v in zeros.items()}, "integrable": integrable}
    return _ok(E == want and only_origin and integrable, **w)


def _conformal(fam):
    RQo = fam.RQ.restrict(positive=["r"])
    return conformal_transform(fam.eq17_pair(RQo), "1/r")


@op("lebrun_conformal_pinch", n=Arg("family"))
def _lb_conf_pinch(a, ctx):
    lam, E = pinch_pair(_conformal(a["n"]))
    return "pass", {"bivector": str(lam), "vector": str(E)}


@op("lebrun_contact", n=Arg("family"), points=Arg("points"), pinched=opt("bool", False))
def _lb_contact(a, ctx):
    pair_ = _conformal(a["n"])
    if a["pinched"]:
        pair_ = pinch_pair(pair_)
    r = contact_check(pair_, a["points"])
    return _ok(r.passed, points=[_fmt_point(p) for p in r.points],
               determinants=[str(v) for v in r.determinants], volumes=[str(v) for v in r.volumes])


@op("lebrun_conformal_pushforward", n=Arg("family"), points=Arg("points"))
def _lb_conf_push(a, ctx):
    fam = a["n"]
    lam, E = pinch_pair(_conformal(fam))
    res = conformal_pushforward_check(fam, lam, E, "1/(x^2+y^2)", a["points"])
    return _ok(all(res), results=res)


# ------------------------------------------------------------------ runner

@dataclass
class Context:
    seed: int
    check_id: str
    rng: object = None
    cache: dict = field(default_factory=dict)


@dataclass
class Entry:
    id: str
    op: str
    verdict: str
    expected: object
    outcome: object
    witness: dict
    seconds: float = 0.0


@dataclass
class Report:
    name: str
    seed: int
    entries: list

    @property
    def passed(self):
        return sum(1 for e in self.entries if e.verdict == "pass")

    @property
    def total(self):
        return len(self.entries)

    @property
    def ok(self):
        return self.passed == self.total


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def _same(outcome, expect):
    if isinstance(expect, bool) or isinstance(outcome, bool):
        return outcome == expect
    return outcome == expect or str(outcome) == str(expect)


def run_check(check, seed, cache=None):
    ctx = Context(seed, check.id, rng_for(seed, check.id), cache if cache is not None else {})
    t0 = time.perf_counter()
    try:
        outcome, witness = OPS[check.op].fn(check.args, ctx)
    except EngineError as e:
        outcome = f"error:{type(e).__name__}"
        witness = {"message": str(e), **{k: str(v) for k, v in e.data.items()}}
    except Exception as e:  # a bug in an operation is still a report entry
        outcome = f"error:{type(e).__name__}"
        witness = {"message": str(e)}
    dt = time.perf_counter() - t0
    if _same(outcome, check.expect):
        verdict = "pass"
    elif outcome == "no_certificate":
        verdict = "no-certificate"
    else:
        verdict = "fail"
    return Entry(check.id, check.op, verdict, check.expect, _plain(outcome), _plain(witness), dt)


def run_checks(m, seed=None, only=None):
    """Run every check (or one, by id) and assemble a report ordered by check id."""
    seed = m.seed if seed is None else seed
    checks = m.checks
    if only is not None:
        checks = [m.check(only)]
    cache = {}
    entries = [run_check(c, seed, cache) for c in checks]
    entries.sort(key=lambda e: e.id)
    return Report(m.name, seed, entries)

