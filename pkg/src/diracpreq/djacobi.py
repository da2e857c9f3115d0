"""Dirac-Jacobi structures: extended bracket, graphs, Reeb fields, brackets, Diracization."""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .calculus import (
    KForm,
    KVector,
    apply,
    bracket,
    d,
    flat,
    lie_derivative,
    pair,
    sharp,
    wedge,
)
from .dirac import Admissibility, Basic, DiracStructure, _verdict, kernel_vectors
from .errors import (
    BracketNotInSpan,
    NoSolutionOverFractionField,
    NotAdmissible,
    NotBasic,
    NotContact,
    PointOutsideDomain,
    RegraphNotInvertible,
)
from .linpair import CouSection, E1Section, validate_frame
from .scalar import Coord, ExpUnit, certify_denominator, unit_certify

HALF = Fraction(1, 2)


class DiracJacobiStructure:
    """A validated frame of E1Sections plus declared degenerate loci."""

    kind = "dirac_jacobi"

    def __init__(self, frame, loci=()):
        if frame.kind != "e1":
            raise TypeError("a Dirac-Jacobi structure needs a frame of E1Sections")
        self.frame = frame
        self.loci = tuple(dict((k, Fraction(v)) for k, v in l.items()) for l in loci)
        for l in self.loci:
            if not frame.chart.contains(l):
                raise PointOutsideDomain(f"locus {l} is outside the chart domain")

    @property
    def chart(self):
        return self.frame.chart

    def __repr__(self):
        return f"DiracJacobiStructure({self.frame})"


def ext_courant_bracket(a, b):
    """The extended Courant bracket on sections of E1(M)."""
    X1, f1, xi1, g1 = a.X, a.f, a.xi, a.g
    X2, f2, xi2, g2 = b.X, b.f, b.xi, b.g
    i21 = pair(xi1, X2)
    i12 = pair(xi2, X1)
    X = bracket(X1, X2)
    f = apply(X1, f2) - apply(X2, f1)
    xi = lie_derivative(X1, xi2) - lie_derivative(X2, xi1) + d(i21 - i12) * HALF
    xi = xi + xi2 * f1 - xi1 * f2
    xi = xi + (d(f1) * g2 - d(f2) * g1 - d(g2) * f1 + d(g1) * f2) * HALF
    g = apply(X1, g2) - apply(X2, g1) + (i21 - i12 - f2 * g1 + f1 * g2) * HALF
    return E1Section(X, f, xi, g)


# --------------------------------------------------------------- embedding

def product_chart(chart, t_name="t", unit_name="et"):
    """chart x R with a coordinate t and the unit e^t."""
    t = chart.fresh_name(t_name)
    u = chart.fresh_name(unit_name if unit_name != t else "e" + t)
    ext = chart.extend([Coord(t)], [ExpUnit(u, t, Fraction(1))], name=f"{chart.name}xR")
    return ext, t, u


def u_embed(e, ext, t, u):
    """(X, f) + (xi, g)  ->  (X + f d_t) + e^t (xi + g dt) on chart x R."""
    n = e.chart.dim
    et = ext.unit(u)
    Xc = [c.lift(ext) for c in e.X.components()] + [e.f.lift(ext)]
    xic = [c.lift(ext) * et for c in e.xi.components()] + [e.g.lift(ext) * et]
    # the t coordinate is appended last on ext
    assert ext.coord_names[n] == t
    return CouSection(KVector.from_list(ext, Xc), KForm.from_list(ext, xic))


def diracization(S, t_name="t", unit_name="et"):
    """The Dirac structure {(X + f d_t) + e^t(xi + g dt)} on chart x R."""
    ext, t, u = product_chart(S.chart, t_name, unit_name)
    secs = [u_embed(e, ext, t, u) for e in S.frame]
    loci = [dict(l) for l in S.loci]
    return DiracStructure(validate_frame(secs), loci)


def diracization_data(S, t_name="t", unit_name="et"):
    ext, t, u = product_chart(S.chart, t_name, unit_name)
    return ext, t, u


# ------------------------------------------------------------------- graphs

def graph_jacobi(L, E, loci=()):
    """Graph of (xi, g) -> (L~xi - gE, xi(E))."""
    ch = L.chart
    secs = []
    for n in ch.coord_names:
        b = KForm.basis(ch, n)
        secs.append(E1Section(sharp(L, b), pair(b, E), b, ch.zero))
    secs.append(E1Section(-E, ch.zero, KForm.zero(ch, 1), ch.one))
    return DiracJacobiStructure(validate_frame(secs), loci)


def graph_form_pair(Omega, sigma, loci=()):
    """Graph of (X, f) -> (i_X Omega + f sigma, -sigma(X))."""
    ch = Omega.chart
    secs = []
    for n in ch.coord_names:
        v = KVector.basis(ch, n)
        secs.append(E1Section(v, ch.zero, flat(Omega, v), -pair(sigma, v)))
    secs.append(E1Section(KVector.zero(ch, 1), ch.one, sigma, ch.zero))
    return DiracJacobiStructure(validate_frame(secs), loci)


def graph_from_dirac(S):
    """{(X, 0) + (xi, g) : X + xi in L}."""
    ch = S.chart
    secs = [E1Section(e.X, ch.zero, e.xi, ch.zero) for e in S.frame]
    secs.append(E1Section(KVector.zero(ch, 1), ch.zero, KForm.zero(ch, 1), ch.one))
    return DiracJacobiStructure(validate_frame(secs), S.loci)


@dataclass
class Regraph:
    kind: str
    first: object  # bivector or 2-form
    second: object  # vector field or 1-form
    structure: DiracJacobiStructure


def regraph(S, target, certify=True):
    """Present S as a Jacobi graph or as a form-pair graph."""
    ch = S.chart
    n = ch.dim
    rows = S.frame.rows()
    if target == "jacobi":
        src, dst = list(range(n + 1, 2 * n + 2)), list(range(n + 1))
    elif target == "form_pair":
        src, dst = list(range(n + 1)), list(range(n + 1, 2 * n + 2))
    else:
        raise ValueError(f"unknown regraph target {target!r}")
    M = [[row[c] for c in src] for row in rows]
    Minv = linalg.inverse(M, ch)
    if Minv is None:
        raise RegraphNotInvertible(f"the {target} block is singular")
    # rows of Minv * frame have src part = identity; read the map from the dst part
    img = [[linalg.sum_([Minv[i][k] * rows[k][c] for k in range(len(rows))]) for c in dst]
           for i in range(n + 1)]
    if certify:
        for row in img:
            for v in row:
                cert = certify_denominator(v, ch)
                if not cert.certified:
                    raise RegraphNotInvertible(f"entry {v} has uncertified denominator {cert.factor}",
                                               factor=cert.factor, witness=cert.witness)
    names = ch.coord_names
    if target == "jacobi":
        # image of (dx_j, 0) is (L~dx_j, E^j); image of (0, 1) is (-E, 0)
        E = KVector.from_list(ch, [-v for v in img[n][:n]])
        L = KVector(ch, 2, {(i, j): img[j][i] for i in range(n) for j in range(i + 1, n)})
        for j in range(n):
            if img[j][n] != E[(j,)]:
                raise RegraphNotInvertible("image is not of Jacobi form")
            if sharp(L, KForm.basis(ch, names[j])).components() != img[j][:n]:
                raise RegraphNotInvertible("image is not skew")
        if not img[n][n].is_zero():
            raise RegraphNotInvertible("image is not of Jacobi form")
        struct = graph_jacobi(L, E, S.loci) if certify else None
        return Regraph("jacobi", L, E, struct)
    # image of (d_j, 0) is (Omega(d_j, .), -sigma_j); image of (0, 1) is (sigma, 0)
    sigma = KForm.from_list(ch, img[n][:n])
    Om = KForm(ch, 2, {(i, j): img[i][j] for i in range(n) for j in range(i + 1, n)})
    for j in range(n):
        if img[j][n] != -sigma[(j,)]:
            raise RegraphNotInvertible("image is not of form-pair type")
        if flat(Om, KVector.basis(ch, names[j])).components() != img[j][:n]:
            raise RegraphNotInvertible("image is not skew")
    if not img[n][n].is_zero():
        raise RegraphNotInvertible("image is not of form-pair type")
    struct = graph_form_pair(Om, sigma, S.loci) if certify else None
    return Regraph("form_pair", Om, sigma, struct)


def dj_graph_make(kind, *args, loci=()):
    if kind == "jacobi":
        return graph_jacobi(*args, loci=loci)
    if kind == "form_pair":
        return graph_form_pair(*args, loci=loci)
    if kind == "from_dirac":
        return graph_from_dirac(*args)
    if kind == "regraph":
        return regraph(*args).structure
    raise ValueError(f"unknown Dirac-Jacobi graph kind {kind!r}")


# --------------------------------------------------------------------- Reeb

def contact_volume(sigma):
    """sigma ^ (d sigma)^m on a (2m+1)-dimensional chart."""
    ch = sigma.chart
    if ch.dim % 2 == 0:
        raise NotContact(f"chart {ch.name} has even dimension")
    m = (ch.dim - 1) // 2
    ds = d(sigma)
    vol = sigma
    for _ in range(m):
        vol = wedge(vol, ds)
    return vol[tuple(range(ch.dim))]


def reeb_solve(sigma):
    """The unique E with sigma(E) = 1 and i_E d sigma = 0."""
    ch = sigma.chart
    n = ch.dim
    v = contact_volume(sigma)
    if v.is_zero():
        raise NotContact("sigma ^ (d sigma)^m vanishes identically", coefficient=v)
    cert = certify_denominator(v, ch)
    ok = cert.certified and unit_certify(v.numerator(), ch).certified
    if not ok:
        c2 = unit_certify(v.numerator(), ch)
        raise NotContact(f"contact volume {v} is not certified nonvanishing",
                         coefficient=v, factor=c2.factor, witness=c2.witness)
    ds = d(sigma).matrix()
    rows = [[ds[i][j] for i in range(n)] for j in range(n)]  # (i_E ds)_j = sum_i E^i ds_ij
    rows.append(sigma.components())
    rhs = [ch.zero] * n + [ch.one]
    sol = linalg.solve(rows, rhs, ch)
    if sol is None:
        raise NotContact("no Reeb field solves the system")
    return KVector.from_list(ch, sol)


# ------------------------------------------------------------ admissibility

def dj_admissible_solve(S, f):
    """(X, phi) with (X, phi) + (df, f) in the span of the frame."""
    ch = S.chart
    f = ch.scalar(f)
    return dj_solve_covector(S, d(f).components() + [f])


def dj_solve_covector(S, target):
    ch = S.chart
    n = ch.dim
    rows = S.frame.rows()
    cot = [row[n + 1:] for row in rows]
    c = linalg.combination(cot, target, ch)
    if c is None:
        raise NoSolutionOverFractionField("(df, f) is not in the cotangent image")
    vals = [linalg.sum_([ci * row[a] for ci, row in zip(c, rows)]) for a in range(n + 1)]
    unique = linalg.rank(cot) == len(rows)
    status, factor, witness = _verdict(vals, unique, ch)
    return Admissibility(status, KVector.from_list(ch, vals[:n]), vals[n], factor, witness)


def dj_hamiltonian(S, f):
    res = dj_admissible_solve(S, f)
    if not res.certified:
        raise NotAdmissible(f"{f} has no certified hamiltonian pair ({res.status})",
                            factor=res.factor, witness=res.witness)
    return res.X, res.phi


def dj_bracket(S, f, g, check=True):
    """{f, g} = X_g . f + f phi_g."""
    ch = S.chart
    f, g = ch.scalar(f), ch.scalar(g)
    Xf, pf = dj_hamiltonian(S, f)
    Xg, pg = dj_hamiltonian(S, g)
    val = apply(Xg, f) + f * pg
    if check:
        ef = E1Section(Xf, pf, d(f), f)
        eg = E1Section(Xg, pg, d(g), g)
        want = E1Section(bracket(Xf, Xg), apply(Xf, pg) - apply(Xg, pf), -d(val), -val)
        if ext_courant_bracket(ef, eg) != want:
            raise BracketNotInSpan("bracket of hamiltonian sections does not match")
    return val


def dj_char_generic(S, locus=None):
    """Generators (X, f) of L cap (TM x R), over the fraction field."""
    ch = S.chart
    n = ch.dim
    rows = S.frame.rows()
    if locus:
        rows = [[c.at(locus) for c in row] for row in rows]
    vecs = kernel_vectors(rows, range(n + 1, 2 * n + 2), range(n + 1), ch)
    return [(KVector.from_list(ch, v[:n]), v[n]) for v in vecs]


def dj_is_basic(S, psi):
    """X.psi + psi f = 0 for (X, f) in L cap (TM x R), generically and on loci."""
    ch = S.chart
    psi = ch.scalar(psi)
    for X, f in dj_char_generic(S):
        v = apply(X, psi) + psi * f
        if not v.is_zero():
            return Basic(False, {"where": "generic", "vector": str(X), "value": str(v)})
    for locus in S.loci:
        dpsi, psil = d(psi).at(locus), psi.at(locus)
        for X, f in dj_char_generic(S, locus):
            v = pair(dpsi, X) + psil * f
            if not v.is_zero():
                return Basic(False, {"where": {k: str(x) for k, x in locus.items()},
                                     "vector": str(X), "value": str(v)})
    return Basic(True)


def dj_basic_bracket(S, psi, h):
    """{psi, h} = X_h . psi + phi_h psi for basic psi and admissible h."""
    ch = S.chart
    psi, h = ch.scalar(psi), ch.scalar(h)
    if not dj_is_basic(S, psi):
        raise NotBasic(f"{psi} is not basic")
    Xh, ph = dj_hamiltonian(S, h)
    return apply(Xh, psi) + ph * psi


def dj_jacobi_residual(S, f, g, h):
    br = lambda a, b: dj_bracket(S, a, b, check=False)
    return br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)


def dj_basic_jacobiator(S, psi, f, h):
    """{{psi,f},h} - {{psi,h},f} - {psi,{f,h}}; zero when the identity holds."""
    bb = lambda a, b: dj_basic_bracket(S, a, b)
    fh = dj_bracket(S, f, h, check=False)
    return bb(bb(psi, f), h) - bb(bb(psi, h), f) - bb(psi, fh)


def et_lift(f, ext, u):
    return f.lift(ext) * ext.unit(u)


def et_homomorphism_residual(S, f, g, D=None):
    """e^t {f,g}_M - {e^t f, e^t g} on the Diracization; zero when g -> e^t g is a homomorphism."""
    from .dirac import adm_bracket

    ch = S.chart
    f, g = ch.scalar(f), ch.scalar(g)
    ext, t, u = product_chart(ch)
    if D is None:
        D = diracization(S)
    lhs = et_lift(dj_bracket(S, f, g, check=False), ext, u)
    rhs = adm_bracket(D, et_lift(f, ext, u), et_lift(g, ext, u), check=False)
    return lhs - rhs
