"""Dirac structures on charts."""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .calculus import KForm, KVector, apply, bracket, d, flat, lie_derivative, pair, sharp
from .errors import (
    BracketNotInSpan,
    DivisionByZero,
    NoSolutionOverFractionField,
    NotAdmissible,
    PointOutsideDomain,
)
from .linpair import CouSection, pairing, validate_frame
from .scalar import certify_denominator

HALF = Fraction(1, 2)


class DiracStructure:
    """A validated frame of CouSections plus declared degenerate loci.

    A locus is a dict fixing some coordinates: a full point or a coordinate
    subspace such as {'x1': 0}.
    """

    kind = "dirac"

    def __init__(self, frame, loci=()):
        if frame.kind != "cou":
            raise TypeError("a Dirac structure needs a frame of CouSections")
        self.frame = frame
        self.loci = tuple(dict((k, Fraction(v)) for k, v in l.items()) for l in loci)
        for l in self.loci:
            if not frame.chart.contains(l):
                raise PointOutsideDomain(f"locus {l} is outside the chart domain")

    @property
    def chart(self):
        return self.frame.chart

    def __repr__(self):
        return f"DiracStructure({self.frame})"


@dataclass
class CheckResult:
    passed: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def courant_bracket(e1, e2):
    """[X1,X2] + (L_X1 xi2 - L_X2 xi1 + 1/2 d(i_X2 xi1 - i_X1 xi2))."""
    X = bracket(e1.X, e2.X)
    xi = lie_derivative(e1.X, e2.xi) - lie_derivative(e2.X, e1.xi)
    xi = xi + d(pair(e1.xi, e2.X) - pair(e2.xi, e1.X)) * HALF
    return CouSection(X, xi)


def structure_bracket(a, b):
    if a.kind == "cou":
        return courant_bracket(a, b)
    from .djacobi import ext_courant_bracket

    return ext_courant_bracket(a, b)


def integrability_check(S):
    """<[e_i, e_j], e_k>+ for i < j and all k; pass iff all vanish."""
    secs = S.frame.sections
    for i in range(len(secs)):
        for j in range(i + 1, len(secs)):
            br = structure_bracket(secs[i], secs[j])
            for k in range(len(secs)):
                v = pairing(br, secs[k])
                if not v.is_zero():
                    return CheckResult(False, {"triple": (i, j, k), "value": v})
    return CheckResult(True)


def graph_two_form(omega, loci=()):
    """Frame {d_i + omega(d_i, .)}."""
    ch = omega.chart
    secs = [CouSection(KVector.basis(ch, n), flat(omega, KVector.basis(ch, n))) for n in ch.coord_names]
    return DiracStructure(validate_frame(secs), loci)


def graph_bivector(L, loci=()):
    """Frame {L(., dx_i) + dx_i}."""
    ch = L.chart
    secs = [CouSection(sharp(L, KForm.basis(ch, n)), KForm.basis(ch, n)) for n in ch.coord_names]
    return DiracStructure(validate_frame(secs), loci)


def graph_make(kind, data, loci=()):
    if kind == "two_form":
        return graph_two_form(data, loci)
    if kind == "bivector":
        return graph_bivector(data, loci)
    raise ValueError(f"unknown graph kind {kind!r}")


# ------------------------------------------------------ characteristic data

def _evaluate_rows(rows, point, chart):
    try:
        return [[c.at(point) for c in row] for row in rows]
    except DivisionByZero:
        raise PointOutsideDomain(f"frame is singular at {point}") from None


def kernel_vectors(rows, block, other, chart):
    """Other-parts of combinations whose block-part vanishes."""
    m = len(rows)
    width = len(block)
    eqs = [[row[a] for row in rows] for a in block]
    kern = linalg.nullspace(eqs, m, chart) if width else [[chart.one if i == j else chart.zero for j in range(m)] for i in range(m)]
    vecs = []
    for v in kern:
        vecs.append([linalg.sum_([c * row[a] for c, row in zip(v, rows)]) for a in other])
    vecs = [r for r in linalg.rref(vecs)[0] if any(not x.is_zero() for x in r)] if vecs else []
    return vecs


def _tangent_kernel(S, point=None):
    ch = S.chart
    n = ch.dim
    rows = S.frame.rows()
    if point:
        rows = _evaluate_rows(rows, point, ch)
    vecs = kernel_vectors(rows, range(n, 2 * n), range(n), ch)
    return [KVector.from_list(ch, v) for v in vecs]


def char_dist_at_point(S, p):
    """Basis of L cap T_pM at a rational point p."""
    ch = S.chart
    p = {k: Fraction(v) for k, v in p.items()}
    if set(p) != set(ch.coord_names) or not ch.contains(p):
        raise PointOutsideDomain(f"{p} is not a point of the domain of {ch.name}")
    return _tangent_kernel(S, p)


def char_dist_generic(S, locus=None):
    return _tangent_kernel(S, locus)


# ------------------------------------------------------------ admissibility

@dataclass
class Admissibility:
    status: str  # admissible | not_admissible | no_certificate
    X: "KVector | None" = None
    phi: object = None
    factor: object = None
    witness: "dict | None" = None

    @property
    def certified(self):
        return self.status == "admissible"

    def __bool__(self):
        return self.certified


def _verdict(values, unique, chart):
    """Certify the denominators of a solution; classify a failure."""
    for v in values:
        cert = certify_denominator(v, chart)
        if cert.certified:
            continue
        if unique and cert.witness is not None:
            return "not_admissible", cert.factor, cert.witness
        return "no_certificate", cert.factor, cert.witness
    return "admissible", None, None


def admissible_solve(S, f):
    """Find X with X + df in the span of the frame."""
    ch = S.chart
    f = ch.scalar(f)
    n = ch.dim
    rows = S.frame.rows()
    target = d(f).components()
    cot = [row[n:] for row in rows]
    c = linalg.combination(cot, target, ch)
    if c is None:
        raise NoSolutionOverFractionField(f"df is not in the cotangent image for f = {f}")
    X = [linalg.sum_([ci * row[a] for ci, row in zip(c, rows)]) for a in range(n)]
    unique = linalg.rank(cot) == len(rows)
    status, factor, witness = _verdict(X, unique, ch)
    return Admissibility(status, KVector.from_list(ch, X), None, factor, witness)


def hamiltonian(S, f):
    res = admissible_solve(S, f)
    if not res.certified:
        raise NotAdmissible(f"{f} has no certified hamiltonian vector field ({res.status})",
                            factor=res.factor, witness=res.witness)
    return res.X


def adm_bracket(S, f, g, check=True):
    """{f, g} = X_g . f."""
    ch = S.chart
    f, g = ch.scalar(f), ch.scalar(g)
    Xf, Xg = hamiltonian(S, f), hamiltonian(S, g)
    val = apply(Xg, f)
    if check:
        sec = CouSection(-bracket(Xf, Xg), d(val))
        if S.frame.resolve(sec) is None:
            raise BracketNotInSpan("-[X_f, X_g] + d{f,g} is not a section of L")
    return val


def jacobi_residual(S, f, g, h):
    br = lambda a, b: adm_bracket(S, a, b, check=False)
    return br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)


@dataclass
class Basic:
    basic: bool
    witness: "dict | None" = None

    def __bool__(self):
        return self.basic


def is_basic(S, f):
    """df annihilates L cap TM generically and at every declared locus."""
    ch = S.chart
    f = ch.scalar(f)
    df = d(f)
    for Y in char_dist_generic(S):
        v = pair(df, Y)
        if not v.is_zero():
            return Basic(False, {"where": "generic", "vector": str(Y), "value": str(v)})
    for locus in S.loci:
        dfl = df.at(locus)
        for Y in char_dist_generic(S, locus):
            v = pair(dfl, Y)
            if not v.is_zero():
                return Basic(False, {"where": {k: str(x) for k, x in locus.items()},
                                     "vector": str(Y), "value": str(v)})
    return Basic(True)
