"""Prequantization of a Dirac manifold on the trivial circle bundle Q = P x U(1).

Q carries a periodic fibre coordinate theta (period 1), E = d/dtheta and the
connection sigma = dtheta + alpha_sigma.  Complex functions on Q are handled
through their Fourier modes: a graded function sum_k h_k chi^k has
E (h chi^k) = k tau h chi^k, where tau stands for 2 pi i.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebroid import LCochain, from_pair, preq_residual, rho_star, to_pair, upsilon
from .calculus import KForm, KVector, apply, d, evaluate, pair, wedge
from .dirac import char_dist_generic, hamiltonian
from .djacobi import DiracJacobiStructure, dj_solve_covector
from .errors import (
    BracketNotInSpan,
    NotAdmissible,
    NotInDomain,
    PointOutsideDomain,
    SuppliedDataInvalid,
    XiANotSolvable,
)
from .linpair import E1Section, validate_frame
from .scalar import Coord, certify_denominator


def q_chart(base, fibre="theta"):
    name = base.fresh_name(fibre)
    return base.extend([Coord(name, periodic=True)], name=f"{base.name}xU1"), name


# ------------------------------------------------------------------ data

class PreqData:
    """Base Dirac structure with Omega, a pair A + alpha and the connection potential."""

    def __init__(self, base, Omega, pair_rep, alpha_sigma, beta=None, fibre="theta", check=True):
        self.base = base
        self.chart = base.chart
        self.Omega = Omega
        self.pair = pair_rep
        self.alpha_sigma = alpha_sigma
        self.beta = beta if beta is not None else from_pair(base, pair_rep.A, pair_rep.alpha)
        self.Q, self.theta = q_chart(self.chart, fibre)
        if check:
            self.validate()

    @classmethod
    def from_beta(cls, base, Omega, beta, alpha_sigma, hint=None, **kw):
        if not isinstance(beta, LCochain):
            beta = LCochain.from_list(base.frame, list(beta))
        rep = to_pair(base, beta, hint)
        return cls(base, Omega, rep, alpha_sigma, beta, **kw)

    def validate(self):
        if d(self.alpha_sigma) != self.Omega:
            raise SuppliedDataInvalid("d alpha_sigma differs from Omega", d_alpha=str(d(self.alpha_sigma)))
        iso = self.pair.isotropy()
        if not iso.is_zero():
            raise SuppliedDataInvalid("A + alpha is not isotropic", value=str(iso))
        if from_pair(self.base, self.pair.A, self.pair.alpha) != self.beta:
            raise SuppliedDataInvalid("A + alpha does not represent beta")
        res = preq_residual(self.base, self.Omega, self.beta)
        if not res.is_zero():
            raise SuppliedDataInvalid("prequantization condition fails", residual=str(res))

    @property
    def E(self):
        return KVector.basis(self.Q, self.theta)

    @property
    def sigma(self):
        return KForm.basis(self.Q, self.theta) + self.alpha_sigma.lift(self.Q)

    def lift_scalar(self, f):
        return self.chart.scalar(f).lift(self.Q)

    def pullback(self, xi):
        """pi^* of a form on P."""
        return xi.lift(self.Q)

    def horizontal(self, X):
        """X^H = X - alpha_sigma(X) d/dtheta for vector fields and bivectors."""
        if X.degree == 1:
            return X.lift(self.Q) - self.E * pair(self.alpha_sigma, X).lift(self.Q)
        names = self.chart.coord_names
        hs = [self.horizontal(KVector.basis(self.chart, x)) for x in names]
        out = KVector.zero(self.Q, 2)
        for (i, j), c in X.coeffs.items():
            out = out + wedge(hs[i], hs[j]) * c.lift(self.Q)
        return out

    def beta_of(self, section):
        """<beta, e> for a section of the base structure, resolved in the frame."""
        c = self.base.frame.resolve(section)
        if c is None:
            raise BracketNotInSpan("section is not in the base structure")
        return linalg.sum_([ci * b for ci, b in zip(c, self.beta.as_list())]) if c else self.chart.zero


def _descend(s, base):
    """Read a theta-free scalar on Q back on the base chart."""
    return s.lift(base)


# ---------------------------------------------------------------- Lbar

def lbar_sections(data):
    Q = data.Q
    E = data.E
    out = []
    for e, b in zip(data.base.frame, data.beta.as_list()):
        out.append(E1Section(data.horizontal(e.X) + E * b.lift(Q), Q.zero, data.pullback(e.xi), Q.zero))
    out.append(E1Section(-E, Q.zero, KForm.zero(Q, 1), Q.one))
    A, alpha = data.pair.A, data.pair.alpha
    out.append(E1Section(-data.horizontal(A), Q.one, data.sigma - data.pullback(alpha), Q.zero))
    return out


def build_Lbar(data):
    loci = [dict(l) for l in data.base.loci]
    return DiracJacobiStructure(validate_frame(lbar_sections(data)), loci)


def poisson_jacobi_pair(data, Lam):
    """(Lambda^H + E ^ A^H, E) on Q."""
    return data.horizontal(Lam) + wedge(data.E, data.horizontal(data.pair.A)), data.E


@dataclass
class Witness:
    found: bool
    coefficients: list = field(default_factory=list)
    section: object = None
    residual: object = None

    def __bool__(self):
        return self.found


def forward_image_witness(Lbar, target, theta="theta"):
    """A combination of the Lbar frame projecting to target (a section on the base)."""
    Q = Lbar.chart
    base = target.chart
    names = base.coord_names
    ti = Q.coord_pos(theta)
    rows = Lbar.frame.rows()
    n = Q.dim
    # constrained components: tangent base parts, f, cotangent (all, theta part 0), g
    idx, rhs = [], []
    for x in names:
        idx.append(Q.coord_pos(x))
        rhs.append(target.X.coeff(x).lift(Q))
    idx.append(n)
    rhs.append(target.f.lift(Q))
    for x in names:
        idx.append(n + 1 + Q.coord_pos(x))
        rhs.append(target.xi.coeff(x).lift(Q))
    idx.append(n + 1 + ti)
    rhs.append(Q.zero)
    idx.append(2 * n + 1)
    rhs.append(target.g.lift(Q))
    gens = [[row[k] for k in idx] for row in rows]
    c = linalg.combination(gens, rhs, Q)
    if c is None:
        return Witness(False, residual="target is not a projection of the structure")
    for v in c:
        cert = certify_denominator(v, Q)
        if not cert.certified:
            return Witness(False, c, residual=f"coefficient {v} not certified at {cert.witness}")
    return Witness(True, c, Lbar.frame.combine(c))


def lifted_base_sections(base):
    """Generators of {(X,0) + (xi,g) : X + xi in L}."""
    ch = base.chart
    out = [E1Section(e.X, ch.zero, e.xi, ch.zero) for e in base.frame]
    out.append(E1Section(KVector.zero(ch, 1), ch.zero, KForm.zero(ch, 1), ch.one))
    return out


def pushforward_check(data, Lbar=None):
    Lbar = Lbar or build_Lbar(data)
    fails = []
    for k, s in enumerate(lifted_base_sections(data.base)):
        w = forward_image_witness(Lbar, s, data.theta)
        if not w:
            fails.append((k, w.residual))
    return fails


# ------------------------------------------------------------ leaves

@dataclass
class LeafInfo:
    kind: str  # precontact | lcp
    form: object = None
    pair: tuple = None
    consistent: bool = True
    detail: dict = field(default_factory=dict)


def _point_rows(frame, q):
    try:
        return [[c.at(q) for c in row] for row in frame.rows()]
    except ZeroDivisionError:
        raise PointOutsideDomain(f"frame is singular at {q}") from None


def leaf_classify(data, q, Lbar=None, gamma=None, Omega_L=None):
    """Precontact or locally conformal presymplectic leaf through q."""
    Lbar = Lbar or build_Lbar(data)
    Q = data.Q
    q = {k: Fraction(v) for k, v in q.items()}
    if not Q.contains(q):
        raise PointOutsideDomain(f"{q} is outside the domain")
    basept = {k: v for k, v in q.items() if k != data.theta}
    if set(basept) != set(data.chart.coord_names):
        raise PointOutsideDomain("leaf_classify needs every base coordinate")
    n = Q.dim
    rows = _point_rows(Lbar.frame, q)
    # precontact iff some element with zero tangent part has f != 0
    kern = linalg.nullspace([[r[a] for r in rows] for a in range(n)], len(rows), Q)
    fs = [linalg.sum_([c * r[n] for c, r in zip(v, rows)]) for v in kern]
    precontact = any(not f.is_zero() for f in fs)
    # second route: A in rho(L) at pi(q)
    brows = _point_rows(data.base.frame, basept)
    m = data.chart.dim
    A_pt = [c.at(basept) for c in data.pair.A.components()]
    tan = [r[:m] for r in brows]
    A_in = linalg.combination(tan, A_pt, data.chart) is not None
    info = {"anchor_kernel_has_f": precontact, "A_tangent": A_in}
    if precontact:
        xiA = _solve_xi_A(data, basept)
        form = data.sigma + data.pullback(xiA - data.pair.alpha)
        return LeafInfo("precontact", form=form, consistent=precontact == A_in, detail=info)
    out = LeafInfo("lcp", consistent=precontact == A_in, detail=info)
    if gamma is not None:
        _check_lcp_data(data, gamma, Omega_L)
        g = data.pullback(gamma)
        out.pair = (g, wedge(data.sigma - data.pullback(data.pair.alpha), g) + data.pullback(Omega_L))
    return out


def _solve_xi_A(data, basept):
    ch = data.chart
    m = ch.dim
    rows = data.base.frame.rows()
    A = data.pair.A.components()
    c = linalg.combination([r[:m] for r in rows], A, ch)
    if c is not None:
        xi = [linalg.sum_([ci * r[m + a] for ci, r in zip(c, rows)]) for a in range(m)]
        if all(certify_denominator(v, ch).certified for v in xi):
            return KForm.from_list(ch, xi)
    # fall back to the exact point data
    prow = _point_rows(data.base.frame, basept)
    Apt = [a.at(basept) for a in A]
    c = linalg.combination([r[:m] for r in prow], Apt, ch)
    if c is None:
        raise XiANotSolvable("A is not in the image of the anchor at this point", point=str(basept))
    return KForm.from_list(ch, [linalg.sum_([ci * r[m + a] for ci, r in zip(c, prow)]) for a in range(m)])


def _check_lcp_data(data, gamma, Omega_L):
    ch = data.chart
    A = data.pair.A
    for k, e in enumerate(data.base.frame):
        if not pair(gamma, e.X).is_zero():
            raise SuppliedDataInvalid("gamma does not annihilate the anchor image", generator=k)
    if pair(gamma, A) != ch.one:
        raise SuppliedDataInvalid("gamma(A) is not 1", value=str(pair(gamma, A)))
    if Omega_L is None:
        raise SuppliedDataInvalid("Omega_L is required for the lcp pair")
    fr = data.base.frame
    for i in range(len(fr)):
        for j in range(i + 1, len(fr)):
            want = pair(fr[i].xi, fr[j].X)
            if evaluate(Omega_L, fr[i].X, fr[j].X) != want:
                raise SuppliedDataInvalid("Omega_L differs from the leafwise form", pair=(i, j))
    from .calculus import contract

    if not contract(A, Omega_L).is_zero():
        raise SuppliedDataInvalid("Omega_L does not annihilate A")


# ---------------------------------------------------------- B-fields

def ext_bfield(S, gamma):
    """(X,f) + (xi,g)  ->  (X,f) + (xi + i_X dgamma + f gamma, g - gamma(X))."""
    dg = d(gamma)
    from .calculus import contract

    secs = [E1Section(e.X, e.f, e.xi + contract(e.X, dg) + gamma * e.f, e.g - pair(gamma, e.X))
            for e in S.frame]
    return DiracJacobiStructure(validate_frame(secs), S.loci)


def shifted(data, gamma, shift_beta):
    """PreqData with sigma + pi^*gamma, and beta + rho^*gamma when shift_beta."""
    beta = data.beta + rho_star(data.base, gamma) if shift_beta else data.beta
    Omega = data.Omega + d(gamma)
    alpha = data.alpha_sigma + gamma
    if shift_beta:
        return PreqData.from_beta(data.base, Omega, beta, alpha, fibre=data.theta)
    return PreqData(data.base, Omega, data.pair, alpha, beta, fibre=data.theta)


# -------------------------------------------------- graded functions

class GradedFunction:
    """sum_k h_k chi^k with theta-free coefficients on the base chart."""

    def __init__(self, chart, parts=None):
        self.chart = chart
        self.parts = {}
        for k, h in (parts or {}).items():
            h = chart.scalar(h)
            if not h.is_zero():
                self.parts[int(k)] = h

    def __getitem__(self, k):
        return self.parts.get(k, self.chart.zero)

    def grades(self):
        return sorted(self.parts)

    def __add__(self, other):
        ks = set(self.parts) | set(other.parts)
        return GradedFunction(self.chart, {k: self[k] + other[k] for k in ks})

    def __sub__(self, other):
        ks = set(self.parts) | set(other.parts)
        return GradedFunction(self.chart, {k: self[k] - other[k] for k in ks})

    def __mul__(self, c):
        c = self.chart.scalar(c)
        return GradedFunction(self.chart, {k: h * c for k, h in self.parts.items()})

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        return isinstance(other, GradedFunction) and (self - other).is_zero()

    def is_zero(self):
        return not self.parts

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"({h})chi^{k}" for k, h in sorted(self.parts.items()))

    __repr__ = __str__


def apply_graded(data, Y, phi):
    """Y . phi for a theta-invariant vector field Y on Q."""
    ch = data.chart
    base_part = KVector.from_list(ch, [_descend(Y.coeff(x), ch) for x in ch.coord_names])
    yth = _descend(Y.coeff(data.theta), ch)
    tau = ch.tau
    return GradedFunction(ch, {k: apply(base_part, h) + yth * tau * k * h for k, h in phi.parts.items()})


def preq_hamiltonian(data, g, check=True, Lbar=None):
    """X_{pi^*g} = X_g^H + (<X_g + dg, beta> - g) E."""
    ch = data.chart
    g = ch.scalar(g)
    Xg = hamiltonian(data.base, g)
    from .linpair import CouSection

    b = data.beta_of(CouSection(Xg, d(g)))
    X = data.horizontal(Xg) + data.E * (b - g).lift(data.Q)
    if check:
        Lbar = Lbar or build_Lbar(data)
        gq = data.lift_scalar(g)
        sec = E1Section(X, data.Q.zero, d(gq), gq)
        if Lbar.frame.resolve(sec) is None:
            raise NotAdmissible("lifted hamiltonian is not a section of Lbar")
    return X


def rep_apply(data, g, phi, X=None):
    """{pi^*g, phi} = -X_{pi^*g} . phi."""
    X = X if X is not None else preq_hamiltonian(data, g, check=False)
    return -apply_graded(data, X, phi)


def graded_hamiltonian(Lbar, data, h, n):
    """(X', phi') with (X' chi^n, phi' chi^n) a hamiltonian pair of h chi^n."""
    Q = data.Q
    hq = data.lift_scalar(h)
    dh = d(hq).components()
    dh[Q.coord_pos(data.theta)] = hq * Q.tau * n
    res = dj_solve_covector(Lbar, dh + [hq])
    if not res.certified:
        raise NotAdmissible(f"{h} chi^{n} is not admissible ({res.status})", factor=res.factor,
                            witness=res.witness)
    return res.X, res.phi


def graded_char(Lbar):
    from .djacobi import dj_char_generic

    return dj_char_generic(Lbar)


def graded_is_basic(Lbar, data, k, m, char=None):
    """Whether k chi^m is basic: X.(k chi^m) + f k chi^m = 0 on Lbar cap (TQ x R)."""
    ch = data.chart
    phi = GradedFunction(ch, {m: k})
    for X, f in (char if char is not None else graded_char(Lbar)):
        v = apply_graded(data, X, phi)[m] + _descend(f, ch) * phi[m]
        if not v.is_zero():
            return False
    return True


def graded_bracket(Lbar, data, adm, bas):
    """{h chi^n, k chi^m} = -(X_F . G + phi_F G) for F admissible, G basic."""
    (h, n), (k, m) = adm, bas
    X, ph = graded_hamiltonian(Lbar, data, h, n)
    G = GradedFunction(data.chart, {m: k})
    val = apply_graded(data, X, G)[m] + _descend(ph, data.chart) * k
    return GradedFunction(data.chart, {n + m: -val})


# ----------------------------------------------------- line bundle picture

class LConnection:
    """D_e h = rho(e).h + tau alpha_sigma(rho e) h - tau <e, beta> h on grade -1 coefficients."""

    def __init__(self, data):
        self.data = data
        self.frame = data.base.frame
        self._brackets = None

    def along(self, coeffs, h):
        ch = self.data.chart
        h = ch.scalar(h)
        tau = ch.tau
        out = ch.zero
        for c, e, b in zip(coeffs, self.frame, self.data.beta.as_list()):
            if c.is_zero():
                continue
            term = apply(e.X, h) + tau * pair(self.data.alpha_sigma, e.X) * h - tau * b * h
            out = out + c * term
        return out

    def __call__(self, e, h):
        if isinstance(e, int):
            coeffs = [self.data.chart.one if k == e else self.data.chart.zero for k in range(len(self.frame))]
        else:
            coeffs = self.frame.resolve(e)
            if coeffs is None:
                raise BracketNotInSpan("section is not in the structure")
        return self.along(coeffs, h)

    def bracket_coeffs(self, i, j):
        from .dirac import structure_bracket

        c = self.frame.resolve(structure_bracket(self.frame[i], self.frame[j]))
        if c is None:
            raise BracketNotInSpan(f"[e{i}, e{j}] is not in the structure")
        return c


def lconn(data):
    return LConnection(data)


@dataclass
class CurvatureReport:
    value: object
    expected: object

    @property
    def equal(self):
        return self.value == self.expected

    def __bool__(self):
        return self.equal


def lconn_curvature(D, i, j, s):
    """R_D(e_i, e_j)s next to tau Upsilon(e_i, e_j) s."""
    ch = D.data.chart
    s = ch.scalar(s)
    val = D(i, D(j, s)) - D(j, D(i, s)) - D.along(D.bracket_coeffs(i, j), s)
    ups = upsilon(D.frame)(i, j)
    return CurvatureReport(val, ch.tau * ups * s)


def in_polarized_domain(D, s):
    """D_{Y+0}s = 0 for Y in L cap TP, generically and on the declared loci."""
    data = D.data
    ch = data.chart
    from .linpair import CouSection

    for Y in char_dist_generic(data.base):
        v = D(CouSection(Y, KForm.zero(ch, 1)), s)
        if not v.is_zero():
            return False, {"where": "generic", "vector": str(Y), "value": str(v)}
    for locus in data.base.loci:
        for Y in char_dist_generic(data.base, locus):
            sec = CouSection(Y, KForm.zero(ch, 1))
            c = linalg.combination([[x.at(locus) for x in r] for r in D.frame.rows()],
                                   sec.components(), ch)
            if c is None:
                continue
            v = D.along(c, s).at(locus)
            if not v.is_zero():
                return False, {"where": {k: str(x) for k, x in locus.items()}, "value": str(v)}
    return True, None


def lconn_rep(D, g, s, check_domain=True):
    """g^ s = -(D_{X_g + dg} s + tau g s) on grade -1 coefficients."""
    data = D.data
    ch = data.chart
    g = ch.scalar(g)
    if isinstance(s, GradedFunction):
        if set(s.grades()) - {-1}:
            raise NotInDomain("lconn_rep acts on grade -1 only")
        s = s[-1]
    s = ch.scalar(s)
    if check_domain:
        ok, wit = in_polarized_domain(D, s)
        if not ok:
            raise NotInDomain("section is not polarized", **wit)
    from .linpair import CouSection

    Xg = hamiltonian(data.base, g)
    out = -(D(CouSection(Xg, d(g)), s) + ch.tau * g * s)
    return GradedFunction(ch, {-1: out})


# ------------------------------------------------------ faithfulness jets

def jet_test(data, q, n, Lbar=None):
    """Jets of grade-n admissible test functions at q; their common kernel against F_q.

    Each test covector is xi on a complement S of F + R E, n tau on E and
    zero on F.  Returns (common kernel basis, F_q basis, admissibility of each jet).
    """
    Lbar = Lbar or build_Lbar(data)
    Q = data.Q
    N = Q.dim
    q = {k: Fraction(v) for k, v in q.items()}
    rows = _point_rows(Lbar.frame, q)
    from .dirac import kernel_vectors

    F = kernel_vectors(rows, range(N + 1, 2 * N + 2), range(N + 1), Q)
    F = [v[:N] for v in F if all(x.is_zero() for x in v[N:])]
    F = [r for r in linalg.rref(F)[0] if any(not x.is_zero() for x in r)] if F else []
    E = [Q.one if k == Q.coord_pos(data.theta) else Q.zero for k in range(N)]
    W = F + [E]
    # coordinate vectors completing W to a basis
    comp = []
    for k in range(N):
        ek = [Q.one if a == k else Q.zero for a in range(N)]
        if linalg.rank(W + comp + [ek]) > len(W) + len(comp):
            comp.append(ek)
    basis = W + comp
    Binv = linalg.inverse(basis, Q)
    tau = Q.tau
    covectors = []
    for j in [None] + list(range(len(comp))):
        vals = [Q.zero] * len(F) + [tau * n] + [Q.one if (j is not None and a == j) else Q.zero
                                                 for a in range(len(comp))]
        # covector components: values on the basis, times the inverse basis matrix
        cov = [linalg.sum_([Binv[a][b] * vals[b] for b in range(N)]) for a in range(N)]
        covectors.append(cov)
    kern = linalg.nullspace(covectors, N, Q)
    # each jet with value 1 must be a cotangent image of Lbar_q
    adm = []
    for cov in covectors:
        c = linalg.combination([r[N + 1:] for r in rows], cov + [Q.one], Q)
        adm.append(c is not None)
    return kern, F, adm
