"""Sections of TM+T*M and of E1(M), pairings, frames, images and spans."""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .calculus import KForm, KVector, pair
from .errors import (
    ChartMismatch,
    KindMismatch,
    MinusPairingUndefinedForE1,
    NotIsotropic,
    NotSmooth,
    RankNotCertified,
    ValidationError,
)
from .scalar import certify_denominator

HALF = Fraction(1, 2)


class CouSection:
    """X + xi in TM + T*M."""

    kind = "cou"

    def __init__(self, X, xi):
        if not X.chart.same_space(xi.chart):
            raise ChartMismatch("X and xi live on different charts")
        self.chart = X.chart
        self.X = X
        self.xi = xi

    @classmethod
    def from_components(cls, chart, comps):
        n = chart.dim
        return cls(KVector.from_list(chart, comps[:n]), KForm.from_list(chart, comps[n:]))

    @classmethod
    def zero(cls, chart):
        return cls(KVector.zero(chart, 1), KForm.zero(chart, 1))

    def components(self):
        return self.X.components() + self.xi.components()

    def tangent(self):
        return self.X.components()

    def cotangent(self):
        return self.xi.components()

    def _like(self, other):
        if type(other) is not type(self):
            raise KindMismatch("sections of different kinds")

    def __add__(self, other):
        self._like(other)
        return CouSection(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other):
        self._like(other)
        return CouSection(self.X - other.X, self.xi - other.xi)

    def __neg__(self):
        return CouSection(-self.X, -self.xi)

    def __mul__(self, f):
        return CouSection(self.X * f, self.xi * f)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.X == other.X and self.xi == other.xi

    def is_zero(self):
        return self.X.is_zero() and self.xi.is_zero()

    def map(self, fn, chart=None):
        chart = chart or self.chart
        return type(self).from_components(chart, [fn(c) for c in self.components()])

    def at(self, point):
        return self.map(lambda c: c.at(point))

    def __str__(self):
        return f"[{self.X}] + [{self.xi}]"

    __repr__ = __str__


class E1Section:
    """(X, f) + (xi, g) in (TM x R) + (T*M x R)."""

    kind = "e1"

    def __init__(self, X, f, xi, g):
        if not X.chart.same_space(xi.chart):
            raise ChartMismatch("X and xi live on different charts")
        self.chart = X.chart
        self.X = X
        self.f = X.chart.scalar(f)
        self.xi = xi
        self.g = X.chart.scalar(g)

    @classmethod
    def from_components(cls, chart, comps):
        n = chart.dim
        return cls(KVector.from_list(chart, comps[:n]), comps[n],
                   KForm.from_list(chart, comps[n + 1:2 * n + 1]), comps[2 * n + 1])

    @classmethod
    def zero(cls, chart):
        return cls(KVector.zero(chart, 1), chart.zero, KForm.zero(chart, 1), chart.zero)

    def components(self):
        return self.X.components() + [self.f] + self.xi.components() + [self.g]

    def tangent(self):
        return self.X.components() + [self.f]

    def cotangent(self):
        return self.xi.components() + [self.g]

    def _like(self, other):
        if type(other) is not type(self):
            raise KindMismatch("sections of different kinds")

    def __add__(self, other):
        self._like(other)
        return E1Section(self.X + other.X, self.f + other.f, self.xi + other.xi, self.g + other.g)

    def __sub__(self, other):
        self._like(other)
        return E1Section(self.X - other.X, self.f - other.f, self.xi - other.xi, self.g - other.g)

    def __neg__(self):
        return E1Section(-self.X, -self.f, -self.xi, -self.g)

    def __mul__(self, h):
        h = self.chart.scalar(h)
        return E1Section(self.X * h, self.f * h, self.xi * h, self.g * h)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.X == other.X and self.f == other.f and self.xi == other.xi and self.g == other.g

    def is_zero(self):
        return self.X.is_zero() and self.xi.is_zero() and self.f.is_zero() and self.g.is_zero()

    def map(self, fn, chart=None):
        chart = chart or self.chart
        return type(self).from_components(chart, [fn(c) for c in self.components()])

    def at(self, point):
        return self.map(lambda c: c.at(point))

    def __str__(self):
        return f"([{self.X}], {self.f}) + ([{self.xi}], {self.g})"

    __repr__ = __str__


def section_class(kind):
    return {"cou": CouSection, "e1": E1Section}[kind]


def pairing(a, b, sign="plus"):
    """Symmetric (plus) or antisymmetric (minus) pairing of two sections."""
    if type(a) is not type(b):
        raise KindMismatch("pairing needs sections of the same kind")
    if not a.chart.same_space(b.chart):
        raise ChartMismatch("pairing across charts")
    if sign == "plus":
        out = pair(a.xi, b.X) + pair(b.xi, a.X)
        if isinstance(a, E1Section):
            out = out + a.g * b.f + b.g * a.f
        return out * HALF
    if sign == "minus":
        if isinstance(a, E1Section):
            raise MinusPairingUndefinedForE1("the antisymmetric pairing is not defined on E1 sections")
        return (pair(a.xi, b.X) - pair(b.xi, a.X)) * HALF
    raise ValueError(f"unknown sign {sign!r}")


class StructureFrame:
    """A validated spanning frame of a maximal isotropic subbundle."""

    def __init__(self, chart, kind, sections, minor_cols, minor_det):
        self.chart = chart
        self.kind = kind
        self.sections = tuple(sections)
        self.minor_cols = tuple(minor_cols)
        self.minor_det = minor_det

    def __len__(self):
        return len(self.sections)

    def __iter__(self):
        return iter(self.sections)

    def __getitem__(self, k):
        return self.sections[k]

    @property
    def width(self):
        return len(self.sections[0].components()) if self.sections else 0

    def rows(self):
        return [s.components() for s in self.sections]

    def resolve(self, section):
        """Fraction-field coefficients of section in this frame, or None."""
        return linalg.combination(self.rows(), section.components(), self.chart)

    def combine(self, coeffs):
        out = section_class(self.kind).zero(self.chart)
        for c, s in zip(coeffs, self.sections):
            if not c.is_zero():
                out = out + s * c
        return out

    def at(self, point):
        return [s.at(point) for s in self.sections]

    def __str__(self):
        return "{" + "; ".join(str(s) for s in self.sections) + "}"

    __repr__ = __str__


def validate_frame(sections, chart=None, certify=True):
    """Check isotropy and certified constant full rank; return the frame."""
    sections = list(sections)
    if not sections:
        raise ValidationError("empty frame")
    kind = sections[0].kind
    for s in sections:
        if s.kind != kind:
            raise KindMismatch("mixed section kinds in frame")
        if not s.chart.same_space(sections[0].chart):
            raise ChartMismatch("frame sections on different charts")
    chart = chart or sections[0].chart
    n = chart.dim
    want = n if kind == "cou" else n + 1
    if len(sections) != want:
        raise RankNotCertified(f"frame has {len(sections)} sections, expected {want}")
    for i in range(len(sections)):
        for j in range(i, len(sections)):
            v = pairing(sections[i], sections[j])
            if not v.is_zero():
                raise NotIsotropic(f"<e{i}, e{j}>+ = {v}", pair=(i, j), value=v)
    rows = [s.components() for s in sections]
    if certify:
        for i, row in enumerate(rows):
            for c in row:
                cert = certify_denominator(c, chart)
                if not cert.certified:
                    raise NotSmooth(f"entry {c} of e{i} has denominator factor {cert.factor}",
                                    section=i, factor=cert.factor, witness=cert.witness)
        found = linalg.unit_minor(rows, chart)
        if found is None:
            r = linalg.rank(rows)
            raise RankNotCertified(f"no maximal minor with unit determinant (generic rank {r})", rank=r)
        cols, dv = found
    else:
        if linalg.rank(rows) != want:
            raise RankNotCertified("frame is rank deficient")
        cols, dv = (), None
    return StructureFrame(chart, kind, sections, cols, dv)


# ------------------------------------------------------------- linear images

def _scalarize(matrix, chart):
    return [[chart.scalar(v) for v in row] for row in matrix]


def linear_image(frame, matrix, direction, target):
    """Forward or backward image of a frame under a constant linear map.

    forward: matrix is dim(target) x dim(source), the image is
    {pX + eta : X + p*eta in L}.  backward: matrix is dim(source) x
    dim(target), the image is {Y + i*xi : iY + xi in L}.
    """
    src = frame.chart
    kind = frame.kind
    e1 = kind == "e1"
    rows = frame.rows()
    m = len(rows)
    n_src = src.dim
    P = _scalarize(matrix, src)
    if direction == "forward":
        n_tgt = len(P)
        if any(len(r) != n_src for r in P):
            raise ValueError("forward map must be dim(target) x dim(source)")
        # unknowns (c, eta): sum c_i xi_i - P^T eta = 0
        eqs = []
        for a in range(n_src):
            eqs.append([row[n_src + e1 + a] for row in rows] + [-P[b][a] for b in range(n_tgt)])
        kern = linalg.nullspace(eqs, m + n_tgt, src)
        elems = []
        for v in kern:
            c, eta = v[:m], v[m:]
            X = [sum_c(c, [row[a] for row in rows], src) for a in range(n_src)]
            pX = [linalg.sum_([P[b][a] * X[a] for a in range(n_src)]) for b in range(n_tgt)]
            if e1:
                f = sum_c(c, [row[n_src] for row in rows], src)
                g = sum_c(c, [row[2 * n_src + 1] for row in rows], src)
                elems.append(pX + [f] + eta + [g])
            else:
                elems.append(pX + eta)
    elif direction == "backward":
        if len(P) != n_src:
            raise ValueError("backward map must be dim(source) x dim(target)")
        n_tgt = len(P[0]) if P else 0
        eqs = []
        for a in range(n_src):
            eqs.append([row[a] for row in rows] + [-P[a][b] for b in range(n_tgt)])
        kern = linalg.nullspace(eqs, m + n_tgt, src)
        elems = []
        for v in kern:
            c, Y = v[:m], v[m:]
            xi = [sum_c(c, [row[n_src + e1 + a] for row in rows], src) for a in range(n_src)]
            ixi = [linalg.sum_([P[a][b] * xi[a] for a in range(n_src)]) for b in range(n_tgt)]
            if e1:
                f = sum_c(c, [row[n_src] for row in rows], src)
                g = sum_c(c, [row[2 * n_src + 1] for row in rows], src)
                elems.append(Y + [f] + ixi + [g])
            else:
                elems.append(Y + ixi)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    basis = [r for r in linalg.rref(elems)[0] if any(not v.is_zero() for v in r)] if elems else []
    cls = section_class(kind)
    sections = [cls.from_components(target, [v.lift(target) for v in r]) for r in basis]
    out = validate_frame(sections, target)
    if not annihilator_identities(out):
        raise ValidationError("image fails the annihilator identities")
    return out


def sum_c(c, vals, chart):
    acc = chart.zero
    for a, b in zip(c, vals):
        if not a.is_zero() and not b.is_zero():
            acc = acc + a * b
    return acc


def _subspace_equal(a, b):
    ra, rb = linalg.rank(a) if a else 0, linalg.rank(b) if b else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return linalg.rank(a + b) == ra


def annihilator_identities(frame):
    """rho_V(L) = (L cap V*)^0 and rho_V*(L) = (L cap V)^0 over the fraction field."""
    chart = frame.chart
    tan = [s.tangent() for s in frame]
    cot = [s.cotangent() for s in frame]
    k = len(tan[0])
    m = len(tan)

    def kernel_part(block, other):
        # combinations with block part zero; return the other part
        eqs = [[row[a] for row in block] for a in range(k)]
        kern = linalg.nullspace(eqs, m, chart)
        return [[sum_c(v, [row[a] for row in other], chart) for a in range(k)] for v in kern]

    def annihilator(vecs):
        vecs = [v for v in vecs if any(not x.is_zero() for x in v)]
        if not vecs:
            return [[chart.one if i == j else chart.zero for j in range(k)] for i in range(k)]
        return linalg.nullspace(vecs, k, chart)

    l_cap_vstar = kernel_part(tan, cot)
    l_cap_v = kernel_part(cot, tan)
    return _subspace_equal(tan, annihilator(l_cap_vstar)) and _subspace_equal(cot, annihilator(l_cap_v))


# --------------------------------------------------------------- span checks

@dataclass
class SpanResult:
    equal: bool
    witness: "dict | None" = None

    def __bool__(self):
        return self.equal


def contained(a_sections, b_frame, chart=None, certify=True):
    """Whether every section of a lies in span(b) with certified coefficients."""
    chart = chart or b_frame.chart
    rows = b_frame.rows() if isinstance(b_frame, StructureFrame) else [s.components() for s in b_frame]
    for k, s in enumerate(a_sections):
        c = linalg.combination(rows, s.components(), chart)
        if c is None:
            return SpanResult(False, {"generator": k, "section": str(s), "reason": "not in span"})
        if certify:
            for v in c:
                cert = certify_denominator(v, chart)
                if not cert.certified:
                    return SpanResult(False, {"generator": k, "section": str(s),
                                              "reason": f"coefficient {v} not certified",
                                              "point": cert.witness})
    return SpanResult(True)


def span_equal(a, b):
    """Mutual containment with unit-certified coefficients."""
    if a.kind != b.kind:
        raise KindMismatch("span_equal needs frames of the same kind")
    if not a.chart.same_space(b.chart):
        raise ChartMismatch("span_equal across charts")
    r = contained(a.sections, b, a.chart)
    if not r:
        r.witness["direction"] = "a in b"
        return r
    r = contained(b.sections, a, a.chart)
    if not r:
        r.witness["direction"] = "b in a"
        return r
    return SpanResult(True)
