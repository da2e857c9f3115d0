"""The contact-manifold family: symplectization, the presymplectic closure at s = 0,
the LeBrun-Poisson end at r = 0, their prequantizations, the pinch and the conformal change.

Coordinates on M are (u, q, p) for n = 1 and (u, q1..qn, p1..pn) otherwise,
with sigma_M = du + sum p_i dq_i.  The overlap of the two ends is r = 1/s.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebroid import AnchorRep
from .calculus import KForm, KVector, apply, d, pair, sharp, transport, wedge
from .dirac import char_dist_at_point, graph_bivector, graph_two_form, is_basic
from .djacobi import (
    contact_volume,
    graph_form_pair,
    graph_jacobi,
    product_chart,
    regraph,
)
from .errors import DivisionByZero, FractionalPowerResidue, NonPolynomialAtPoint, RegraphNotInvertible
from .linpair import E1Section, linear_image, span_equal, validate_frame
from .preq import PreqData
from .scalar import Chart, Coord


class LebrunFamily:
    def __init__(self, n=1):
        self.n = n
        if n == 1:
            self.qs, self.ps = ["q"], ["p"]
        else:
            self.qs = [f"q{i}" for i in range(1, n + 1)]
            self.ps = [f"p{i}" for i in range(1, n + 1)]
        self.m_names = ["u"] + self.qs + self.ps
        self.M = Chart("M", self.m_names)
        self.S = Chart("S", self.m_names + [Coord("s", nonneg=True)])
        self.R = Chart("R", self.m_names + [Coord("r", nonneg=True)])
        self.S_open = self.S.restrict("S+", positive=["s"])
        self.R_open = self.R.restrict("R+", positive=["r"])

    def sigma(self, chart):
        table = {"du": 1}
        for q, p in zip(self.qs, self.ps):
            table["d" + q] = p
        return KForm.from_names(chart, table)

    # ------------------------------------------------------------ variants

    def symplectization(self):
        """graph of d(e^t sigma_M) on M x R, on the chart used by diracization."""
        ext, t, u = product_chart(self.M)
        form = self.sigma(ext) * ext.unit(u)
        return graph_two_form(d(form))

    def contact_dj(self):
        s = self.sigma(self.M)
        return graph_form_pair(d(s), s)

    def closure_zero(self, chart=None):
        ch = chart or self.S
        return graph_two_form(d(self.sigma(ch) * ch.coord("s")), loci=[{"s": 0}] if ch is self.S else ())

    def poisson_bivector(self, chart=None):
        ch = chart or self.R
        r = ch.coord("r")
        euler = KVector.basis(ch, "r") * r
        for p in self.ps:
            euler = euler + KVector.basis(ch, p) * ch.coord(p)
        L = wedge(euler, KVector.basis(ch, "u"))
        for q, p in zip(self.qs, self.ps):
            L = L + wedge(KVector.basis(ch, q), KVector.basis(ch, p))
        return L * r

    def lebrun_poisson(self, chart=None):
        ch = chart or self.R
        return graph_bivector(self.poisson_bivector(ch), loci=[{"r": 0}] if ch is self.R else ())

    def glued_s_end(self, chart=None):
        """The s-end with the sign that glues to the LeBrun bivector."""
        ch = chart or self.S
        return graph_two_form(-d(self.sigma(ch) * ch.coord("s")), loci=[{"s": 0}] if ch is self.S else ())

    def overlap(self, frame):
        """Transport a frame on the open s-chart to the open r-chart along s = 1/r."""
        secs = []
        for e in frame:
            X = transport(e.X, {"s": "1/r"}, {"r": "1/s"}, self.R_open)
            xi = transport(e.xi, {"s": "1/r"}, {"r": "1/s"}, self.R_open)
            secs.append(type(e)(X, xi))
        return validate_frame(secs, self.R_open)

    def glued_dirac(self):
        """Both ends and the overlap certificate."""
        s_end = self.glued_s_end()
        r_end = self.lebrun_poisson()
        moved = self.overlap(self.glued_s_end(self.S_open).frame)
        cert = span_equal(moved, self.lebrun_poisson(self.R_open).frame)
        return GluedDirac(s_end, r_end, cert)

    def eq17_pair(self, chart=None):
        """The prequantized LeBrun pair (Lambda - r d_theta ^ d_r, d_theta) on the r-chart times the circle."""
        Q = chart or self.RQ
        lam = self.poisson_bivector(Q)
        r = Q.coord("r")
        lam = lam - wedge(KVector.basis(Q, "theta"), KVector.basis(Q, "r")) * r
        return lam, KVector.basis(Q, "theta")

    @property
    def RQ(self):
        return self.R.extend([Coord("theta", periodic=True)], name="RxU1")

    def lebrun_jacobi(self):
        lam, E = self.eq17_pair()
        return graph_jacobi(lam, E, loci=[{"r": 0}])

    def preq_s(self, glued=False):
        """Omega = 0, beta = -s sigma_M (A = s d_s), trivial connection."""
        base = self.glued_s_end() if glued else self.closure_zero()
        ch = base.chart
        A = KVector.basis(ch, "s") * ch.coord("s")
        return PreqData(base, KForm.zero(ch, 2), AnchorRep(A, KForm.zero(ch, 1)), KForm.zero(ch, 1))

    def preq_r(self):
        """Omega = 0, A = -r d_r, trivial connection."""
        base = self.lebrun_poisson()
        ch = base.chart
        A = KVector.basis(ch, "r") * -ch.coord("r")
        return PreqData(base, KForm.zero(ch, 2), AnchorRep(A, KForm.zero(ch, 1)), KForm.zero(ch, 1))

    def build(self, variant):
        table = {
            "symplectization": self.symplectization,
            "closure_zero": self.closure_zero,
            "lebrun_poisson": self.lebrun_poisson,
            "glued_dirac": self.glued_dirac,
            "lebrun_jacobi": self.lebrun_jacobi,
            "preq_data": lambda: (self.preq_s(), self.preq_r()),
        }
        if variant not in table:
            raise ValueError(f"unknown variant {variant!r}")
        return table[variant]()


@dataclass
class GluedDirac:
    s_end: object
    r_end: object
    overlap: object

    def __bool__(self):
        return bool(self.overlap)


# --------------------------------------------------------------- checks

@dataclass
class BoundaryReport:
    kernel: list
    expected: list
    kernel_ok: bool
    basic: dict = field(default_factory=dict)
    expected_basic: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.kernel_ok and self.basic == self.expected_basic

    def __bool__(self):
        return self.passed


def char_boundary_check(fam=None, points=None, samples=None):
    """At s = 0 the characteristic distribution is ker sigma_M; basic iff constant on s = 0."""
    fam = fam or LebrunFamily()
    S = fam.closure_zero()
    ch = S.chart
    points = points or [{**{x: 0 for x in fam.m_names}, "s": 0},
                        {**{x: 1 for x in fam.m_names}, "s": 0},
                        {**{x: Fraction(k + 2, 3) for k, x in enumerate(fam.m_names)}, "s": 0}]
    ok = True
    kernels, expected = [], []
    for pt in points:
        ker = char_dist_at_point(S, pt)
        # contact distribution at the point: d_p_i and d_q_i - p_i d_u
        want = [KVector.basis(ch, p) for p in fam.ps]
        want += [KVector.basis(ch, q) - KVector.basis(ch, "u") * Fraction(pt[p]) for q, p in zip(fam.qs, fam.ps)]
        kernels.append([str(k) for k in ker])
        expected.append([str(w) for w in want])
        rows_k = [k.components() for k in ker]
        rows_w = [w.components() for w in want]
        same = linalg.rank(rows_k) == linalg.rank(rows_w) == linalg.rank(rows_k + rows_w)
        ok = ok and same
    samples = samples or {"s*u": True, "u": False, "1": True, "s^2*p + s": True, "q + s": False}
    got = {f: bool(is_basic(S, f)) for f in samples}
    return BoundaryReport(kernels, expected, ok, got, dict(samples))


def linearize_at_point(T, point):
    """Degree-one Taylor truncation of each coefficient at point."""
    ch = T.chart
    point = {k: Fraction(v) for k, v in point.items()}
    names = ch.coord_names
    out = {}
    for idx, c in T.coeffs.items():
        try:
            val = c.at(point)
            lin = val
            for x in names:
                slope = c.diff(x).at(point)
                if not slope.is_zero():
                    lin = lin + slope * (ch.coord(x) - point.get(x, 0))
        except DivisionByZero:
            raise NonPolynomialAtPoint(f"coefficient {c} is singular at {point}") from None
        out[idx] = lin
    return type(T)(ch, T.degree, out)


# ----------------------------------------------------------- pinch

def pinch_chart(src, r="r", theta="theta", x="x", y="y"):
    coords = [c for c in src.coords if c.name not in (r, theta)] + [Coord(x), Coord(y)]
    return Chart(src.name + "'", coords, src.exp_units)


def pinch_transform(T, r="r", theta="theta", x="x", y="y", target=None, require_polynomial=True):
    """Rewrite T in rectangular (x, y) with x + iy = sqrt(r) e^{i theta}."""
    src = T.chart
    tgt = target or pinch_chart(src, r, theta, x, y)
    X, Y = tgt.coord(x), tgt.coord(y)
    rho = X * X + Y * Y
    binds = {n: tgt.coord(n) for n in src.coord_names if n not in (r, theta)}
    binds[r] = rho

    def move(c):
        if c.free_symbols() & {theta}:
            raise FractionalPowerResidue(f"coefficient {c} depends on {theta}")
        return c.subs(binds, tgt)

    if isinstance(T, KVector):
        images = []
        for n in src.coord_names:
            if n == r:
                images.append((KVector.basis(tgt, x) * X + KVector.basis(tgt, y) * Y) / (rho * 2))
            elif n == theta:
                images.append(KVector.basis(tgt, y) * X - KVector.basis(tgt, x) * Y)
            else:
                images.append(KVector.basis(tgt, n))
        out = KVector.zero(tgt, T.degree)
        for idx, c in T.coeffs.items():
            term = None
            for k in idx:
                term = images[k] if term is None else wedge(term, images[k])
            out = out + term * move(c)
    else:
        raise TypeError("pinch_transform applies to vector fields and bivectors")
    if require_polynomial:
        bad = [c for c in out.coeffs.values() if not c.is_polynomial()]
        if bad:
            raise FractionalPowerResidue(f"denominator survives the pinch: {bad[0]}", coefficient=str(bad[0]))
    return out


def pinch_pair(pair_, **kw):
    lam, E = pair_
    return pinch_transform(lam, **kw), pinch_transform(E, **kw)


def vanishing_locus_check(E, x="x", y="y", points=None):
    """E vanishes at x = y = 0 and nowhere else among the sample points."""
    ch = E.chart
    others = [n for n in ch.coord_names if n not in (x, y)]
    points = points or [(0, 0), (1, 0), (0, 1), (1, 2), (Fraction(1, 2), Fraction(-1, 3))]
    out = {}
    for a, b in points:
        pt = {n: Fraction(k + 1, 2) for k, n in enumerate(others)}
        pt.update({x: Fraction(a), y: Fraction(b)})
        out[(a, b)] = E.at(pt).is_zero()
    return out


# ---------------------------------------------------- conformal change

def conformal_transform(pair_, a):
    """(a Lambda, a E - Lambda~(da)); with a = 1/f this is (Lambda/f, E/f + X_{1/f})."""
    lam, E = pair_
    a = lam.chart.scalar(a)
    return lam * a, E * a - sharp(lam, d(a))


def conformal_map(e, a):
    """The automorphism carrying graph(Lambda, E) onto the graph of the conformal pair."""
    ch = e.chart
    a = ch.scalar(a)
    lna = d(a) / a
    return E1Section(e.X, e.f + pair(lna, e.X), (e.xi - lna * e.g) / a, e.g / a)


def conformal_unmap(e, a):
    a = e.chart.scalar(a)
    return E1Section(e.X, e.f - apply(e.X, a) / a, e.xi * a + d(a) * e.g, e.g * a)


@dataclass
class ContactReport:
    points: list
    determinants: list
    volumes: list

    @property
    def passed(self):
        return all(not v.is_zero() for v in self.determinants) and all(not v.is_zero() for v in self.volumes)

    def __bool__(self):
        return self.passed


def structure_matrix(lam, E):
    """[[Lambda~, -E], [E, 0]] in the coordinate basis."""
    ch = lam.chart
    n = ch.dim
    Ec = E.components()
    # column j is the image of (dx_j, 0): (Lambda~ dx_j, E^j)
    mat = [[ch.zero] * (n + 1) for _ in range(n + 1)]
    for j in range(n):
        img = sharp(lam, KForm.basis(ch, ch.coord_names[j])).components()
        for i in range(n):
            mat[i][j] = img[i]
        mat[n][j] = Ec[j]
    for i in range(n):
        mat[i][n] = -Ec[i]
    return mat


def contact_check(pair_, points):
    """Nondegeneracy of the Jacobi pair at rational points, by two routes."""
    lam, E = pair_
    ch = lam.chart
    mat = structure_matrix(lam, E)
    dets, vols = [], []
    try:
        J = regraph(graph_jacobi(lam, E), "form_pair", certify=False)
    except (RegraphNotInvertible, DivisionByZero):
        J = None
    for pt in points:
        pt = {k: Fraction(v) for k, v in pt.items()}
        dets.append(linalg.det([[c.at(pt) for c in row] for row in mat], ch))
        if J is None:
            vols.append(ch.zero)
            continue
        try:
            vols.append(contact_volume(J.second).at(pt))
        except DivisionByZero:
            vols.append(ch.zero)
    return ContactReport([dict(p) for p in points], dets, vols)


def conformal_pushforward_check(fam, lam_c, E_c, a, points, x="x", y="y"):
    """Undo the conformal factor and push to P at each point; compare with the lift of L."""
    Qp = lam_c.chart
    J = graph_jacobi(lam_c, E_c)
    R = fam.R
    base = fam.lebrun_poisson()
    results = []
    for pt in points:
        pt = {k: Fraction(v) for k, v in pt.items()}
        secs = [conformal_unmap(e, a) for e in J.frame]
        secs = [s.at(pt) for s in secs]
        secs = [E1Section.from_components(Qp, [Qp.scalar(v) for v in s.components()]) for s in secs]
        frame = validate_frame(secs, Qp)
        # d pi at the point: r = x^2 + y^2, other coordinates unchanged
        cols = Qp.coord_names
        mat = []
        for n in R.coord_names:
            row = []
            for c in cols:
                if n == "r":
                    row.append(2 * pt[x] if c == x else 2 * pt[y] if c == y else 0)
                else:
                    row.append(1 if c == n else 0)
            mat.append(row)
        img = linear_image(frame, mat, "forward", R)
        bp = {n: pt[n] for n in fam.m_names}
        bp["r"] = pt[x] ** 2 + pt[y] ** 2
        lifted = []
        for e in base.frame:
            X = KVector.from_list(R, [c.at(bp) for c in e.X.components()])
            xi = KForm.from_list(R, [c.at(bp) for c in e.xi.components()])
            lifted.append(E1Section(X, R.zero, xi, R.zero))
        lifted.append(E1Section(KVector.zero(R, 1), R.zero, KForm.zero(R, 1), R.one))
        results.append(bool(span_equal(img, validate_frame(lifted, R))))
    return results
