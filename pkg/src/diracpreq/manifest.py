"""Manifest loading: charts, named tensors, structures, prequantization blocks and checks.

A manifest is a JSON object::

    {
      "name": "...", "seed": 0,
      "charts":     {"P": {"coords": ["x", {"name": "t", "positive": true}]}},
      "tensors":    {"w": {"chart": "P", "kind": "form", "coeffs": {"dx^dy": "1"}}},
      "structures": {"L": {"kind": "two_form", "form": "w", "loci": [{"x": 0}]}},
      "preq":       {"Q": {"base": "L", "Omega": "w", "alpha_sigma": "a", "beta": ["0", "0"]}},
      "checks":     [{"id": "int", "op": "integrability", "args": {"structure": "L"}}]
    }

Every reference is resolved and every expression parsed here, so a manifest
that loads is runnable.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .algebroid import AnchorRep, LCochain
from .calculus import KForm, KVector, d
from .dirac import DiracStructure, graph_bivector, graph_two_form
from .djacobi import (
    DiracJacobiStructure,
    diracization,
    graph_form_pair,
    graph_from_dirac,
    graph_jacobi,
    regraph,
)
from .errors import EngineError, ParseError, UnknownReference, ValidationError
from .lebrun import LebrunFamily
from .linpair import CouSection, E1Section, validate_frame
from .preq import PreqData, build_Lbar
from .scalar import Chart, Coord, ExpUnit

TOP_KEYS = {"name", "seed", "description", "charts", "tensors", "structures", "preq", "checks"}


@dataclass
class Check:
    id: str
    op: str
    args: dict
    expect: object = "pass"
    raw: dict = field(default_factory=dict)


@dataclass
class Manifest:
    name: str
    seed: int
    charts: dict
    tensors: dict
    structures: dict
    preq: dict
    checks: list
    families: dict = field(default_factory=dict)

    def check(self, cid):
        for c in self.checks:
            if c.id == cid:
                return c
        raise UnknownReference(f"no check with id {cid!r}")


def parse_rational(v, loc):
    if isinstance(v, bool):
        raise ParseError("expected a rational number", loc)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError:
            pass
    raise ParseError(f"expected a rational number, got {v!r}", loc)


def parse_point(v, loc):
    if not isinstance(v, dict):
        raise ParseError("a point is an object of coordinate values", loc)
    return {k: parse_rational(x, f"{loc}.{k}") for k, x in v.items()}


class _Loader:
    def __init__(self, obj):
        self.obj = obj
        self.charts = {}
        self.tensors = {}
        self.structures = {}
        self.preq = {}
        self.families = {}
        self._busy = set()

    # ----------------------------------------------------------- helpers

    def section(self, name):
        v = self.obj.get(name, {})
        if not isinstance(v, dict):
            raise ParseError(f"{name} must be an object", name)
        return v

    def scalar(self, chart, v, loc):
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise ParseError(f"expected an expression, got {v!r}", loc)
        try:
            return chart.scalar(str(v))
        except ParseError as e:
            raise ParseError(str(e), loc) from None
        except EngineError as e:
            raise ParseError(f"{type(e).__name__}: {e}", loc) from None

    def family(self, n, loc):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ParseError("n must be a positive integer", loc)
        if n not in self.families:
            self.families[n] = LebrunFamily(n)
        return self.families[n]

    def chart(self, name, loc):
        if not isinstance(name, str):
            raise ParseError("chart reference must be a name", loc)
        if name not in self.charts:
            raise UnknownReference(f"{loc}: unknown chart {name!r}")
        return self.charts[name]

    # ------------------------------------------------------------ charts

    def load_charts(self):
        for name, spec in self.section("charts").items():
            loc = f"charts.{name}"
            if not isinstance(spec, dict) or not isinstance(spec.get("coords"), list):
                raise ParseError("a chart needs a coords list", loc)
            coords = []
            for k, c in enumerate(spec["coords"]):
                if isinstance(c, str):
                    coords.append(Coord(c))
                elif isinstance(c, dict) and isinstance(c.get("name"), str):
                    flags = {f: bool(c.get(f, False)) for f in ("periodic", "positive", "nonneg")}
                    coords.append(Coord(c["name"], **flags))
                else:
                    raise ParseError("bad coordinate entry", f"{loc}.coords[{k}]")
            units = []
            for k, u in enumerate(spec.get("units", [])):
                if not (isinstance(u, list) and len(u) in (2, 3)):
                    raise ParseError("a unit is [name, base] or [name, base, rate]", f"{loc}.units[{k}]")
                rate = parse_rational(u[2], f"{loc}.units[{k}]") if len(u) == 3 else Fraction(1)
                units.append(ExpUnit(u[0], u[1], rate))
            try:
                self.charts[name] = Chart(name, coords, units)
            except EngineError as e:
                raise ParseError(str(e), loc) from None
            except ValueError as e:
                raise ParseError(str(e), loc) from None

    # ----------------------------------------------------------- tensors

    def tensor_from(self, spec, chart, kind, loc):
        """A named tensor, or an inline list/dict of coefficients on chart."""
        if isinstance(spec, str):
            t = self.tensor(spec, loc)
        elif isinstance(spec, dict) and "d" in spec:
            inner = self.tensor_from(spec["d"], chart, "form", f"{loc}.d")
            t = d(inner)
        else:
            if isinstance(spec, dict) and "coeffs" in spec:
                if "chart" in spec:
                    chart = self.chart(spec["chart"], f"{loc}.chart")
                kind = spec.get("kind", kind)
                spec = spec["coeffs"]
            if chart is None:
                raise ParseError("inline tensor without a chart", loc)
            t = self._build_tensor(chart, kind, spec, loc)
        if kind is not None and t.kind != kind:
            raise ValidationError(f"{loc}: expected a {kind}, got a {t.kind}")
        if chart is not None and not t.chart.same_space(chart):
            raise ValidationError(f"{loc}: tensor lives on {t.chart.name}, expected {chart.name}")
        return t

    def _build_tensor(self, chart, kind, coeffs, loc):
        cls = {"form": KForm, "vector": KVector}.get(kind)
        if cls is None:
            raise ParseError(f"tensor kind must be 'form' or 'vector', got {kind!r}", loc)
        if isinstance(coeffs, list):
            if len(coeffs) != chart.dim:
                raise ParseError(f"expected {chart.dim} coefficients, got {len(coeffs)}", loc)
            return cls.from_list(chart, [self.scalar(chart, c, f"{loc}[{k}]") for k, c in enumerate(coeffs)])
        if isinstance(coeffs, dict):
            table = {}
            for key, c in coeffs.items():
                names = [p.strip() for p in key.split("^")]
                for p in names:
                    bare = p[1:] if kind == "form" and p.startswith("d") and not chart.has_coord(p) else p
                    if not chart.has_coord(bare):
                        raise UnknownReference(f"{loc}: {p!r} is not a coordinate of {chart.name}")
                table[key] = self.scalar(chart, c, f"{loc}.{key}")
            if not table:
                raise ParseError("empty coefficient table; give the degree with a zero entry", loc)
            try:
                return cls.from_names(chart, table)
            except ValueError as e:
                raise ParseError(str(e), loc) from None
        raise ParseError("coefficients must be a list or an object", loc)

    def tensor(self, name, loc):
        if name in self.tensors:
            return self.tensors[name]
        specs = self.section("tensors")
        if name not in specs:
            raise UnknownReference(f"{loc}: unknown tensor {name!r}")
        self._enter("tensor", name)
        spec = specs[name]
        tloc = f"tensors.{name}"
        if not isinstance(spec, dict):
            raise ParseError("a tensor is an object", tloc)
        if "d" in spec:
            inner = self.tensor_from(spec["d"], None, "form", f"{tloc}.d")
            t = d(inner)
        else:
            ch = self.chart(spec.get("chart"), f"{tloc}.chart")
            t = self._build_tensor(ch, spec.get("kind"), spec.get("coeffs"), tloc)
        self._leave("tensor", name)
        self.tensors[name] = t
        return t

    def _enter(self, kind, name):
        if (kind, name) in self._busy:
            raise ValidationError(f"circular reference through {kind} {name!r}")
        self._busy.add((kind, name))

    def _leave(self, kind, name):
        self._busy.discard((kind, name))

    # -------------------------------------------------------- structures

    def loci(self, spec, loc):
        out = []
        for k, l in enumerate(spec.get("loci", [])):
            out.append(parse_point(l, f"{loc}.loci[{k}]"))
        return out

    def structure(self, name, loc):
        if name in self.structures:
            return self.structures[name]
        specs = self.section("structures")
        if not isinstance(name, str) or name not in specs:
            raise UnknownReference(f"{loc}: unknown structure {name!r}")
        self._enter("structure", name)
        sloc = f"structures.{name}"
        try:
            S = self._make_structure(specs[name], sloc)
        except ValidationError as e:
            raise type(e)(f"{sloc}: {e}", **e.data) from None
        self._leave("structure", name)
        self.structures[name] = S
        return S

    def _make_structure(self, spec, loc):
        if not isinstance(spec, dict):
            raise ParseError("a structure is an object", loc)
        kind = spec.get("kind")
        loci = self.loci(spec, loc)
        ch = self.chart(spec["chart"], f"{loc}.chart") if "chart" in spec else None
        if kind == "two_form":
            w = self.tensor_from(spec.get("form"), ch, "form", f"{loc}.form")
            return graph_two_form(w, loci)
        if kind == "bivector":
            L = self.tensor_from(spec.get("bivector"), ch, "vector", f"{loc}.bivector")
            return graph_bivector(L, loci)
        if kind == "jacobi":
            L = self.tensor_from(spec.get("bivector"), ch, "vector", f"{loc}.bivector")
            E = self.tensor_from(spec.get("vector"), ch or L.chart, "vector", f"{loc}.vector")
            return graph_jacobi(L, E, loci)
        if kind == "form_pair":
            w = self.tensor_from(spec.get("form2"), ch, "form", f"{loc}.form2")
            s = self.tensor_from(spec.get("form1"), ch or w.chart, "form", f"{loc}.form1")
            return graph_form_pair(w, s, loci)
        if kind == "from_dirac":
            return graph_from_dirac(self._dirac(spec.get("of"), f"{loc}.of"))
        if kind == "diracization":
            S = self.structure(spec.get("of"), f"{loc}.of")
            if not isinstance(S, DiracJacobiStructure):
                raise ValidationError(f"{loc}: diracization needs a Dirac-Jacobi structure")
            return diracization(S)
        if kind == "regraph":
            S = self.structure(spec.get("of"), f"{loc}.of")
            return regraph(S, spec.get("target", "jacobi")).structure
        if kind == "lbar":
            return build_Lbar(self.preq_block(spec.get("preq"), f"{loc}.preq"))
        if kind == "frame":
            if ch is None:
                raise ParseError("a raw frame needs a chart", loc)
            return self._frame(spec, ch, loci, loc)
        if kind == "lebrun":
            fam = self.family(spec.get("n", 1), f"{loc}.n")
            variant = spec.get("variant")
            table = {
                "symplectization": fam.symplectization,
                "contact": fam.contact_dj,
                "closure_zero": fam.closure_zero,
                "glued_s_end": fam.glued_s_end,
                "lebrun_poisson": fam.lebrun_poisson,
                "lebrun_jacobi": fam.lebrun_jacobi,
            }
            if variant not in table:
                raise ParseError(f"unknown lebrun variant {variant!r}", f"{loc}.variant")
            return table[variant]()
        raise ParseError(f"unknown structure kind {kind!r}", f"{loc}.kind")

    def _dirac(self, name, loc):
        S = self.structure(name, loc)
        if not isinstance(S, DiracStructure):
            raise ValidationError(f"{loc}: {name!r} is not a Dirac structure")
        return S

    def _frame(self, spec, ch, loci, loc):
        ftype = spec.get("type", "cou")
        width = 2 * ch.dim if ftype == "cou" else 2 * ch.dim + 2
        secs = []
        for k, row in enumerate(spec.get("sections", [])):
            rloc = f"{loc}.sections[{k}]"
            if not isinstance(row, list) or len(row) != width:
                raise ParseError(f"a {ftype} section has {width} components", rloc)
            comps = [self.scalar(ch, c, f"{rloc}[{j}]") for j, c in enumerate(row)]
            cls = CouSection if ftype == "cou" else E1Section
            secs.append(cls.from_components(ch, comps))
        if ftype not in ("cou", "e1"):
            raise ParseError("frame type is 'cou' or 'e1'", f"{loc}.type")
        frame = validate_frame(secs, ch)
        return DiracStructure(frame, loci) if ftype == "cou" else DiracJacobiStructure(frame, loci)

    # ------------------------------------------------------------- preq

    def preq_block(self, name, loc):
        if name in self.preq:
            return self.preq[name]
        specs = self.section("preq")
        if not isinstance(name, str) or name not in specs:
            raise UnknownReference(f"{loc}: unknown preq block {name!r}")
        self._enter("preq", name)
        ploc = f"preq.{name}"
        try:
            data = self._make_preq(specs[name], ploc)
        except ValidationError as e:
            raise type(e)(f"{ploc}: {e}", **e.data) from None
        except EngineError as e:
            if isinstance(e, (ParseError, UnknownReference)):
                raise
            raise ValidationError(f"{ploc}: {type(e).__name__}: {e}", **e.data) from None
        self._leave("preq", name)
        self.preq[name] = data
        return data

    def _make_preq(self, spec, loc):
        if not isinstance(spec, dict):
            raise ParseError("a preq block is an object", loc)
        if "lebrun" in spec:
            fam = self.family(spec.get("n", 1), f"{loc}.n")
            variant = spec["lebrun"]
            table = {"preq_s": fam.preq_s, "preq_s_glued": lambda: fam.preq_s(glued=True), "preq_r": fam.preq_r}
            if variant not in table:
                raise ParseError(f"unknown lebrun preq variant {variant!r}", f"{loc}.lebrun")
            return table[variant]()
        base = self._dirac(spec.get("base"), f"{loc}.base")
        ch = base.chart
        Omega = self.tensor_from(spec["Omega"], ch, "form", f"{loc}.Omega") \
            if "Omega" in spec else KForm.zero(ch, 2)
        alpha_s = self.tensor_from(spec["alpha_sigma"], ch, "form", f"{loc}.alpha_sigma") \
            if "alpha_sigma" in spec else KForm.zero(ch, 1)
        if "A" in spec or "alpha" in spec:
            A = self.tensor_from(spec["A"], ch, "vector", f"{loc}.A") if "A" in spec else KVector.zero(ch, 1)
            alpha = self.tensor_from(spec["alpha"], ch, "form", f"{loc}.alpha") if "alpha" in spec else KForm.zero(ch, 1)
            return PreqData(base, Omega, AnchorRep(A, alpha), alpha_s)
        beta = spec.get("beta")
        if not isinstance(beta, list) or len(beta) != len(base.frame):
            raise ParseError(f"beta is a list of {len(base.frame)} expressions", f"{loc}.beta")
        vals = [self.scalar(ch, b, f"{loc}.beta[{k}]") for k, b in enumerate(beta)]
        return PreqData.from_beta(base, Omega, LCochain.from_list(base.frame, vals), alpha_s, spec.get("hint"))

    # ------------------------------------------------------------ checks

    def load_checks(self):
        from .checks import OPS, resolve_args

        raw = self.obj.get("checks", [])
        if not isinstance(raw, list):
            raise ParseError("checks must be a list", "checks")
        out, seen = [], set()
        for k, c in enumerate(raw):
            loc = f"checks[{k}]"
            if not isinstance(c, dict):
                raise ParseError("a check is an object", loc)
            cid, op = c.get("id"), c.get("op")
            if not isinstance(cid, str) or not cid:
                raise ParseError("a check needs a string id", f"{loc}.id")
            if cid in seen:
                raise ValidationError(f"{loc}: duplicate check id {cid!r}")
            seen.add(cid)
            if op not in OPS:
                raise UnknownReference(f"{loc}.op: unknown operation {op!r}")
            args = c.get("args", {})
            if not isinstance(args, dict):
                raise ParseError("args must be an object", f"{loc}.args")
            resolved = resolve_args(self, OPS[op], args, f"{loc}.args")
            out.append(Check(cid, op, resolved, c.get("expect", "pass"), c))
        return out


def parse_manifest(text):
    """Parse and fully resolve a manifest from JSON text."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno} column {e.colno}") from None
    if not isinstance(obj, dict):
        raise ParseError("a manifest is a JSON object", "$")
    extra = set(obj) - TOP_KEYS
    if extra:
        raise ParseError(f"unknown top-level keys {sorted(extra)}", "$")
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ParseError("seed must be an integer", "seed")
    ld = _Loader(obj)
    ld.load_charts()
    for name in ld.section("tensors"):
        ld.tensor(name, f"tensors.{name}")
    for name in ld.section("structures"):
        ld.structure(name, f"structures.{name}")
    for name in ld.section("preq"):
        ld.preq_block(name, f"preq.{name}")
    checks = ld.load_checks()
    return Manifest(obj.get("name", ""), seed, ld.charts, ld.tensors, ld.structures, ld.preq, checks,
                    ld.families)


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read())
