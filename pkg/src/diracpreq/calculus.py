"""Exterior and Lie calculus on a single chart.

Forms and multivector fields store coefficients on strictly increasing
multi-indices of coordinate positions.  Wedge convention:
(a^b)(u, v) = a(u) b(v) - a(v) b(u).
"""

from .errors import ChartMismatch, DegreeOverflow, DenominatorNotCertified, NotInverse
from .scalar import Scalar, certify_denominator

MAX_VECTOR_DEGREE = 2


def _sort_sign(idx):
    """Sign of the permutation sorting idx, or 0 on a repeated index."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def _same(a, b):
    if not a.same_space(b):
        raise ChartMismatch(f"charts {a.name} and {b.name} differ")


class _Multi:
    kind = ""

    def __init__(self, chart, degree, coeffs=None):
        if degree < 0 or (self.kind == "form" and degree > chart.dim):
            raise DegreeOverflow(f"degree {degree} on a {chart.dim}-dimensional chart")
        if self.kind == "vector" and degree > MAX_VECTOR_DEGREE:
            raise DegreeOverflow(f"multivector degree {degree} is not supported")
        self.chart = chart
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            c = chart.scalar(c)
            if len(idx) != degree:
                raise ValueError(f"index {idx} has the wrong length for degree {degree}")
            sign, key = _sort_sign(idx)
            if sign == 0 or c.is_zero():
                continue
            prev = clean.get(key)
            val = c if sign > 0 else -c
            val = val if prev is None else prev + val
            if val.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = val
        self.coeffs = clean

    @classmethod
    def from_names(cls, chart, table):
        """Build from {('x','y'): coeff} or {'x^y': coeff}; key order gives the sign."""
        coeffs = {}
        degree = None
        for key, c in table.items():
            names = _split_key(key, cls.kind)
            idx = tuple(chart.coord_pos(n) for n in names)
            degree = len(idx) if degree is None else degree
            if len(idx) != degree:
                raise ValueError("mixed degrees in coefficient table")
            sign, s_idx = _sort_sign(idx)
            if sign == 0:
                continue
            val = chart.scalar(c)
            val = val if sign > 0 else -val
            coeffs[s_idx] = coeffs[s_idx] + val if s_idx in coeffs else val
        return cls(chart, degree or 0, coeffs)

    @classmethod
    def from_list(cls, chart, values):
        """Degree-one object from coefficients against the coordinate basis."""
        if len(values) != chart.dim:
            raise ValueError(f"expected {chart.dim} coefficients, got {len(values)}")
        return cls(chart, 1, {(k,): chart.scalar(v) for k, v in enumerate(values)})

    @classmethod
    def zero(cls, chart, degree):
        return cls(chart, degree, {})

    @classmethod
    def basis(cls, chart, name):
        return cls(chart, 1, {(chart.coord_pos(name),): chart.one})

    def _new(self, degree, coeffs):
        return type(self)(self.chart, degree, coeffs)

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        sign, key = _sort_sign(idx)
        if sign == 0:
            return self.chart.zero
        c = self.coeffs.get(key)
        if c is None:
            return self.chart.zero
        return c if sign > 0 else -c

    def coeff(self, *names):
        return self[tuple(self.chart.coord_pos(n) for n in names)]

    def components(self):
        if self.degree != 1:
            raise ValueError("components() needs degree one")
        return [self[(k,)] for k in range(self.chart.dim)]

    def matrix(self):
        """Full antisymmetric coefficient matrix of a degree-two object."""
        if self.degree != 2:
            raise ValueError("matrix() needs degree two")
        n = self.chart.dim
        return [[self[(i, j)] for j in range(n)] for i in range(n)]

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        _same(self.chart, other.chart)
        if other.degree != self.degree:
            raise ValueError("degree mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return self._new(self.degree, out)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        if isinstance(f, _Multi):
            return NotImplemented
        f = self.chart.scalar(f)
        return self._new(self.degree, {k: f * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, f):
        f = self.chart.scalar(f)
        return self * f.inverse()

    def __eq__(self, other):
        if not isinstance(other, _Multi) or type(other) is not type(self):
            return NotImplemented
        if not self.chart.same_space(other.chart) or self.degree != other.degree:
            return False
        return self.coeffs.keys() == other.coeffs.keys() and all(
            self.coeffs[k] == other.coeffs[k] for k in self.coeffs)

    def __hash__(self):
        return hash((type(self).__name__, self.degree, tuple(sorted((k, hash(v)) for k, v in self.coeffs.items()))))

    def map_coeffs(self, fn, chart=None):
        chart = chart or self.chart
        return type(self)(chart, self.degree, {k: fn(v) for k, v in self.coeffs.items()})

    def at(self, point):
        return self.map_coeffs(lambda c: c.at(point))

    def subs(self, bindings):
        return self.map_coeffs(lambda c: c.subs(bindings))

    def lift(self, target):
        """Same object on a chart that contains this chart's coordinates."""
        pos = [target.coord_pos(n) for n in self.chart.coord_names]
        coeffs = {tuple(pos[i] for i in k): v.lift(target) for k, v in self.coeffs.items()}
        return type(self)(target, self.degree, coeffs)

    def denominators(self):
        return [c for c in self.coeffs.values() if not c.is_polynomial()]

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = self.chart.coord_names
        parts = []
        for k in sorted(self.coeffs):
            basis = "^".join(self._label(names[i]) for i in k)
            parts.append(f"({self.coeffs[k]})*{basis}" if basis else f"({self.coeffs[k]})")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


def _split_key(key, kind):
    if isinstance(key, str):
        names = [p.strip() for p in key.split("^")] if key else []
    else:
        names = list(key)
    return names


class KForm(_Multi):
    kind = "form"

    @staticmethod
    def _label(name):
        return f"d{name}"

    @classmethod
    def from_names(cls, chart, table):
        """Keys like 'dx^dy' or ('x', 'y')."""
        fixed = {}
        for key, c in table.items():
            names = _split_key(key, "form")
            names = [_strip_d(chart, n) for n in names]
            fixed[tuple(names)] = c
        return super().from_names(chart, fixed)


def _strip_d(chart, n):
    if chart.has_coord(n):
        return n
    if n.startswith("d") and chart.has_coord(n[1:]):
        return n[1:]
    return n


class KVector(_Multi):
    kind = "vector"

    @staticmethod
    def _label(name):
        return f"∂{name}"


def dx(chart, name):
    return KForm.basis(chart, name)


def partial(chart, name):
    return KVector.basis(chart, name)


# ------------------------------------------------------------------ exterior

def wedge(a, b):
    if isinstance(a, Scalar):
        return b * a
    if isinstance(b, Scalar):
        return a * b
    if type(a) is not type(b):
        raise TypeError("wedge needs two forms or two multivectors")
    _same(a.chart, b.chart)
    deg = a.degree + b.degree
    if deg > a.chart.dim:
        raise DegreeOverflow(f"degree {deg} exceeds chart dimension {a.chart.dim}")
    if isinstance(a, KVector) and deg > MAX_VECTOR_DEGREE:
        raise DegreeOverflow(f"multivector degree {deg} is not supported")
    out = {}
    for i, u in a.coeffs.items():
        for j, v in b.coeffs.items():
            sign, key = _sort_sign(i + j)
            if sign == 0:
                continue
            val = u * v if sign > 0 else -(u * v)
            out[key] = out[key] + val if key in out else val
    return type(a)(a.chart, deg, out)


def d(w):
    """Exterior derivative of a Scalar (0-form) or a KForm."""
    if isinstance(w, Scalar):
        ch = w.chart
        return KForm(ch, 1, {(k,): w.diff(n) for k, n in enumerate(ch.coord_names)})
    if not isinstance(w, KForm):
        raise TypeError("d applies to scalars and forms")
    ch = w.chart
    if w.degree == ch.dim:
        raise DegreeOverflow(f"d of a top-degree form on {ch.name}")
    out = {}
    names = ch.coord_names
    for idx, c in w.coeffs.items():
        for k, n in enumerate(names):
            if k in idx:
                continue
            dc = c.diff(n)
            if dc.is_zero():
                continue
            sign, key = _sort_sign((k,) + idx)
            val = dc if sign > 0 else -dc
            out[key] = out[key] + val if key in out else val
    return KForm(ch, w.degree + 1, out)


def contract(X, w):
    """Interior product i_X w; a Scalar when w has degree one."""
    if not isinstance(X, KVector) or X.degree != 1:
        raise TypeError("contract needs a vector field")
    if not isinstance(w, KForm):
        raise TypeError("contract needs a form")
    _same(X.chart, w.chart)
    ch = w.chart
    if w.degree == 0:
        return KForm.zero(ch, 0)
    out = {}
    for idx, c in w.coeffs.items():
        for p, k in enumerate(idx):
            xk = X.coeffs.get((k,))
            if xk is None:
                continue
            key = idx[:p] + idx[p + 1:]
            val = xk * c
            if p % 2:
                val = -val
            out[key] = out[key] + val if key in out else val
    if w.degree == 1:
        v = out.get((), ch.zero)
        return v
    return KForm(ch, w.degree - 1, out)


def evaluate(w, *vectors):
    """w(X1, ..., Xk)."""
    if len(vectors) != w.degree:
        raise ValueError("wrong number of arguments")
    out = w
    for X in vectors:
        out = contract(X, out)
    return out if isinstance(out, Scalar) else out[()]


def pair(xi, X):
    """xi(X) for a 1-form and a vector field."""
    return contract(X, xi)


def flat(w, X):
    """w~X = w(X, .) = i_X w."""
    return contract(X, w)


def sharp(L, xi):
    """L~xi = L(., xi), components sum_j L^{ij} xi_j."""
    if not isinstance(L, KVector) or L.degree != 2:
        raise TypeError("sharp needs a bivector")
    _same(L.chart, xi.chart)
    ch = L.chart
    out = {}
    for (i, j), c in L.coeffs.items():
        xj, xi_ = xi.coeffs.get((j,)), xi.coeffs.get((i,))
        if xj is not None:
            out[(i,)] = out[(i,)] + c * xj if (i,) in out else c * xj
        if xi_ is not None:
            out[(j,)] = out[(j,)] - c * xi_ if (j,) in out else -(c * xi_)
    return KVector(ch, 1, out)


def bivector_eval(L, a, b):
    """L(a, b) for two 1-forms."""
    return pair(a, sharp(L, b))


def apply(X, f):
    """Directional derivative X.f."""
    ch = X.chart
    f = ch.scalar(f)
    acc = ch.zero
    names = ch.coord_names
    for (k,), c in X.coeffs.items():
        df = f.diff(names[k])
        if not df.is_zero():
            acc = acc + c * df
    return acc


def bracket(X, Y):
    """[X, Y] = XY - YX on vector fields."""
    _same(X.chart, Y.chart)
    ch = X.chart
    out = {}
    for k in range(ch.dim):
        v = apply(X, Y[(k,)]) - apply(Y, X[(k,)])
        if not v.is_zero():
            out[(k,)] = v
    return KVector(ch, 1, out)


def lie_derivative(X, T):
    """L_X T for a Scalar, a form (Cartan formula) or a multivector."""
    if isinstance(T, Scalar):
        return apply(X, T)
    _same(X.chart, T.chart)
    if isinstance(T, KForm):
        if T.degree == 0:
            return KForm(T.chart, 0, {(): apply(X, T[()])})
        out = d(contract(X, T))
        if T.degree < T.chart.dim:
            out = out + contract(X, d(T))
        return out
    if T.degree == 1:
        return bracket(X, T)
    if T.degree == 2:
        ch = T.chart
        cols = [bracket(X, KVector.basis(ch, n)) for n in ch.coord_names]
        out = KVector.zero(ch, 2)
        for (i, j), c in T.coeffs.items():
            ei, ej = KVector.basis(ch, ch.coord_names[i]), KVector.basis(ch, ch.coord_names[j])
            term = KVector(ch, 2, {(i, j): apply(X, c)})
            term = term + c * (wedge(cols[i], ej) + wedge(ei, cols[j]))
            out = out + term
        return out
    raise DegreeOverflow("Lie derivative of this degree is not supported")


# ----------------------------------------------------------------- transport

def transport(T, mapping, inverse, target, certify=True):
    """Move T from its chart to ``target`` along a rational coordinate change.

    ``mapping`` expresses every source coordinate in target coordinates and
    ``inverse`` expresses every target coordinate in source coordinates.
    Vectors are pushed forward by the Jacobian of ``inverse``; forms are
    pulled back along ``mapping``.
    """
    src = T.chart
    fwd = {n: target.scalar(mapping.get(n, n)) for n in src.coord_names}
    back = {n: src.scalar(inverse.get(n, n)) for n in target.coord_names}
    for n in target.coord_names:
        if back[n].subs(fwd, target) != target.coord(n):
            raise NotInverse(f"round trip of {n} fails")
    for n in src.coord_names:
        if fwd[n].subs(back, src) != src.coord(n):
            raise NotInverse(f"round trip of {n} fails")

    def move(c):
        return c.subs(fwd, target)

    if isinstance(T, Scalar):
        out = move(T)
        _certify([out], target, certify)
        return out
    if isinstance(T, KForm):
        # dx_a = sum_b dx_a/dy_b dy_b
        dxs = [d(fwd[n]) for n in src.coord_names]
        out = KForm.zero(target, T.degree)
        for idx, c in T.coeffs.items():
            term = None
            for k in idx:
                term = dxs[k] if term is None else wedge(term, dxs[k])
            if term is None:
                term = KForm(target, 0, {(): target.one})
            out = out + move(c) * term
    else:
        cols = []
        for a in src.coord_names:
            comps = [move(back[b].diff(a)) for b in target.coord_names]
            cols.append(KVector.from_list(target, comps))
        out = KVector.zero(target, T.degree)
        for idx, c in T.coeffs.items():
            term = None
            for k in idx:
                term = cols[k] if term is None else wedge(term, cols[k])
            out = out + move(c) * term
    _certify(list(out.coeffs.values()), target, certify)
    return out


def _certify(values, chart, certify):
    if not certify:
        return
    for c in values:
        cert = certify_denominator(c, chart)
        if not cert.certified:
            raise DenominatorNotCertified(
                f"denominator factor {cert.factor} on {chart.name}", factor=cert.factor, witness=cert.witness)
