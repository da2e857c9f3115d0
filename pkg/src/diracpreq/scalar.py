"""Exact scalars: rational functions over the Gaussian rationals.

A Scalar lives on a Chart.  Its generators are the chart coordinates, the
declared exponential units (formal u with du/dc = rate*u) and the formal
constant ``tau`` standing for 2*pi*i.  The value is stored as (re + i*im)/den
with re, im, den polynomials over QQ, den monic and gcd(re, im, den) = 1.
Since den is real this form is unique for every rational function over QQ(i).
"""

import ast
import itertools
from dataclasses import dataclass
from fractions import Fraction

import flint

from .errors import (
    ChartMismatch,
    DivisionByZero,
    ParseError,
    SubstitutionIntoExpUnitBase,
    UnknownCoordinate,
)

TAU = "tau"
RESERVED = frozenset({TAU, "i"})


def _fmpq(q):
    q = Fraction(q)
    return flint.fmpq(q.numerator, q.denominator)


def _frac(q):
    return Fraction(int(q.p), int(q.q))


@dataclass(frozen=True)
class Coord:
    name: str
    periodic: bool = False
    positive: bool = False
    nonneg: bool = False

    def admits(self, value):
        if self.positive:
            return value > 0
        if self.nonneg:
            return value >= 0
        return True


@dataclass(frozen=True)
class ExpUnit:
    name: str
    base: str
    rate: Fraction = Fraction(1)


class Chart:
    """Coordinates, their domain flags and exponential units."""

    def __init__(self, name, coords, exp_units=()):
        coords = tuple(c if isinstance(c, Coord) else Coord(c) for c in coords)
        units = tuple(
            u if isinstance(u, ExpUnit) else ExpUnit(u[0], u[1], Fraction(u[2]) if len(u) > 2 else Fraction(1))
            for u in exp_units
        )
        names = [c.name for c in coords] + [u.name for u in units]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in chart {name}: {names}")
        for n in names:
            if n in RESERVED or not n.isidentifier():
                raise ValueError(f"invalid generator name {n!r}")
        coord_names = {c.name for c in coords}
        for u in units:
            if u.base not in coord_names:
                raise UnknownCoordinate(f"exp unit {u.name} has unknown base {u.base}")
            if u.rate == 0:
                raise ValueError("exp unit rate must be nonzero")
        self.name = name
        self.coords = coords
        self.exp_units = units
        self.gen_names = tuple(names) + (TAU,)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.gen_names, "deglex")
        self.space = (self.gen_names, tuple((u.name, u.base, u.rate) for u in units))
        self._index = {n: k for k, n in enumerate(self.gen_names)}
        self._coord = {c.name: c for c in coords}
        self._unit = {u.name: u for u in units}
        self._gens = self.ctx.gens()

    def __repr__(self):
        return f"Chart({self.name!r}, {[c.name for c in self.coords]})"

    @property
    def dim(self):
        return len(self.coords)

    @property
    def coord_names(self):
        return tuple(c.name for c in self.coords)

    def coord_info(self, name):
        try:
            return self._coord[name]
        except KeyError:
            raise UnknownCoordinate(f"{name} is not a coordinate of {self.name}") from None

    def has_coord(self, name):
        return name in self._coord

    def unit_info(self, name):
        return self._unit[name]

    def has_unit(self, name):
        return name in self._unit

    def coord_pos(self, name):
        """Position of a coordinate in the chart's ordered coordinate list."""
        self.coord_info(name)
        return self._index[name]

    def same_space(self, other):
        return self is other or self.space == other.space

    def _gen(self, name):
        return Scalar._raw(self, self._gens[self._index[name]])

    def coord(self, name):
        self.coord_info(name)
        return self._gen(name)

    def unit(self, name):
        if name not in self._unit:
            raise UnknownCoordinate(f"{name} is not an exp unit of {self.name}")
        return self._gen(name)

    @property
    def tau(self):
        return self._gen(TAU)

    @property
    def I(self):
        z = self.ctx.from_dict({})
        one = self.ctx.constant(1)
        return Scalar(self, z, one, one)

    def const(self, q):
        return Scalar._raw(self, self.ctx.constant(_fmpq(q)))

    @property
    def zero(self):
        return self.const(0)

    @property
    def one(self):
        return self.const(1)

    def scalar(self, value):
        """Coerce a Scalar, number or expression string to a Scalar here."""
        if isinstance(value, Scalar):
            if not self.same_space(value.chart):
                raise ChartMismatch(f"scalar on {value.chart.name} used on {self.name}")
            return value
        if isinstance(value, str):
            return parse(value, self)
        if isinstance(value, (int, Fraction)):
            return self.const(value)
        raise TypeError(f"cannot make a scalar from {value!r}")

    def parse(self, text):
        return parse(text, self)

    def restrict(self, name=None, positive=(), nonneg=()):
        """Same generators, tighter domain flags."""
        positive, nonneg = set(positive), set(nonneg)
        for n in positive | nonneg:
            self.coord_info(n)
        coords = [
            Coord(c.name, c.periodic, c.positive or c.name in positive,
                  (c.nonneg or c.name in nonneg) and not (c.positive or c.name in positive))
            for c in self.coords
        ]
        return Chart(name or self.name, coords, self.exp_units)

    def extend(self, coords=(), exp_units=(), name=None):
        """A new chart with extra coordinates and units appended."""
        return Chart(name or self.name, self.coords + tuple(coords), self.exp_units + tuple(exp_units))

    def fresh_name(self, stem):
        taken = set(self.gen_names)
        if stem not in taken:
            return stem
        for k in itertools.count(1):
            cand = f"{stem}{k}"
            if cand not in taken:
                return cand

    def contains(self, point):
        """Whether a rational point (coordinate -> value) lies in the domain."""
        for name, value in point.items():
            if not self.coord_info(name).admits(Fraction(value)):
                return False
        return True

    def default_point(self):
        return {c.name: Fraction(1) if c.positive else Fraction(0) for c in self.coords}


def _check_space(a, b):
    if not a.same_space(b):
        raise ChartMismatch(f"charts {a.name} and {b.name} do not share generators")


class Scalar:
    """Immutable canonical rational function; see the module docstring."""

    __slots__ = ("chart", "re", "im", "den")

    def __init__(self, chart, re, im, den):
        # normalizing constructor
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if re.is_zero() and im.is_zero():
            one = chart.ctx.constant(1)
            self.chart, self.re, self.im, self.den = chart, re, im, one
            return
        if not den.is_constant():
            g = den.gcd(re)
            if not im.is_zero():
                g = g.gcd(im)
            if not g.is_constant():
                re, im, den = re / g, im / g, den / g
        lc = den.leading_coefficient()
        if lc != 1:
            re, im, den = re / lc, im / lc, den / lc
        self.chart, self.re, self.im, self.den = chart, re, im, den

    @classmethod
    def _raw(cls, chart, poly):
        s = object.__new__(cls)
        s.chart = chart
        s.re = poly
        s.im = chart.ctx.from_dict({})
        s.den = chart.ctx.constant(1)
        return s

    # coercion -----------------------------------------------------------
    def _co(self, other):
        if isinstance(other, Scalar):
            _check_space(self.chart, other.chart)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.chart.const(other)
        return None

    # predicates ---------------------------------------------------------
    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self):
        return self.im.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def _used(self):
        used = set()
        for p in (self.re, self.im, self.den):
            for m in p.monoms():
                for k, e in enumerate(m):
                    if e:
                        used.add(self.chart.gen_names[k])
        return used

    def free_symbols(self):
        """Generator names (coordinates, units, tau) the value depends on."""
        return self._used()

    def coords_used(self):
        return {n for n in self._used() if self.chart.has_coord(n)}

    def is_constant(self):
        """No coordinate or unit dependence (tau and i allowed)."""
        return self._used() <= {TAU}

    def is_rational(self):
        return self.is_real() and not self._used()

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational constant")
        if self.re.is_zero():
            return Fraction(0)
        return _frac(self.re.leading_coefficient()) / _frac(self.den.leading_coefficient())

    def numerator(self):
        one = self.chart.ctx.constant(1)
        return Scalar(self.chart, self.re, self.im, one)

    def denominator(self):
        return Scalar._raw(self.chart, self.den)

    def real_part(self):
        z = self.chart.ctx.from_dict({})
        return Scalar(self.chart, self.re, z, self.den)

    def imag_part(self):
        z = self.chart.ctx.from_dict({})
        return Scalar(self.chart, self.im, z, self.den)

    def nterms(self):
        return len(self.re) + len(self.im) + len(self.den)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self.den.is_constant() and o.den.is_constant():
            return Scalar(self.chart, self.re + o.re, self.im + o.im, self.den)
        if self.den == o.den:
            return Scalar(self.chart, self.re + o.re, self.im + o.im, self.den)
        g = self.den.gcd(o.den)
        a, b = o.den / g, self.den / g
        return Scalar(self.chart, self.re * a + o.re * b, self.im * a + o.im * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        s = object.__new__(Scalar)
        s.chart, s.re, s.im, s.den = self.chart, -self.re, -self.im, self.den
        return s

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return self.chart.zero
        if self.im.is_zero() and o.im.is_zero():
            re, im = self.re * o.re, self.im
        else:
            re = self.re * o.re - self.im * o.im
            im = self.re * o.im + self.im * o.re
        if self.den.is_constant() and o.den.is_constant():
            s = object.__new__(Scalar)
            s.chart, s.re, s.im, s.den = self.chart, re, im, self.den
            return s
        return Scalar(self.chart, re, im, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("division by zero scalar")
        if self.im.is_zero():
            z = self.chart.ctx.from_dict({})
            return Scalar(self.chart, self.den, z, self.re)
        m = self.re * self.re + self.im * self.im
        return Scalar(self.chart, self.den * self.re, -self.den * self.im, m)

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if self.im.is_zero():
            z = self.chart.ctx.from_dict({})
            return Scalar(self.chart, self.re ** k, z, self.den ** k)
        out = self.chart.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if not self.chart.same_space(other.chart):
                return False
            o = other
        else:
            o = self._co(other)
            if o is None:
                return NotImplemented
        return self.re == o.re and self.im == o.im and self.den == o.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.chart.gen_names, str(self.re), str(self.im), str(self.den)))

    # calculus -----------------------------------------------------------
    def _dpoly(self, p, name):
        ch = self.chart
        out = p.derivative(ch._index[name])
        for u in ch.exp_units:
            if u.base == name:
                k = ch._index[u.name]
                du = p.derivative(k)
                if not du.is_zero():
                    out = out + du * ch._gens[k] * _fmpq(u.rate)
        return out

    def diff(self, name):
        """Partial derivative along a coordinate (units follow their base)."""
        self.chart.coord_info(name)
        dre, dim = self._dpoly(self.re, name), self._dpoly(self.im, name)
        if self.den.is_constant():
            return Scalar(self.chart, dre, dim, self.den)
        dden = self._dpoly(self.den, name)
        return Scalar(
            self.chart,
            dre * self.den - self.re * dden,
            dim * self.den - self.im * dden,
            self.den * self.den,
        )

    # substitution -------------------------------------------------------
    def _images(self, bindings, target):
        src = self.chart
        for key in bindings:
            if src.has_unit(key):
                raise SubstitutionIntoExpUnitBase(
                    f"unit {key} can only change through its base coordinate")
            src.coord_info(key)
        used = self._used()
        images = []
        for name in src.gen_names:
            if name not in used and name not in bindings:
                images.append(target.zero)
            elif name == TAU:
                images.append(target.tau)
            elif src.has_coord(name):
                if name in bindings:
                    images.append(target.scalar(bindings[name]))
                elif target.has_coord(name):
                    images.append(target.coord(name))
                else:
                    raise UnknownCoordinate(f"{name} has no binding and no namesake on {target.name}")
            else:
                images.append(_unit_image(src.unit_info(name), bindings, target))
        return images

    def subs(self, bindings, target=None):
        """Substitute coordinates by Scalars on ``target`` (default: own chart)."""
        target = target or self.chart
        images = self._images(bindings, target)
        return _evaluate(self, images, target)

    def lift(self, target):
        """The same expression read on another chart with the same names."""
        if target.same_space(self.chart):
            return self if target is self.chart else _rechart(self, target)
        return self.subs({}, target)

    def at(self, point):
        """Evaluate coordinates at rational values; remaining units stay formal."""
        ch = self.chart
        imgs = []
        for name in ch.gen_names:
            if name in point:
                ch.coord_info(name)
                imgs.append(ch.const(Fraction(point[name])))
            elif ch.has_unit(name):
                b = ch.unit_info(name).base
                if b in point and Fraction(point[b]) == 0:
                    imgs.append(ch.one)
                else:
                    imgs.append(ch._gen(name))
            else:
                imgs.append(ch._gen(name))
        return _evaluate(self, imgs, ch)

    # printing -----------------------------------------------------------
    def _num_str(self):
        if self.im.is_zero():
            return _pstr(self.re)
        if self.re.is_zero():
            return f"i*({_pstr(self.im)})"
        return f"{_pstr(self.re)} + i*({_pstr(self.im)})"

    def __str__(self):
        num = self._num_str()
        if self.den.is_constant():
            return num
        return f"({num})/({_pstr(self.den)})"

    def __repr__(self):
        return f"Scalar({self})"


def _pstr(p):
    s = str(p)
    return s if s else "0"


def _rechart(s, target):
    out = object.__new__(Scalar)
    out.chart, out.re, out.im, out.den = target, s.re, s.im, s.den
    return out


def _unit_image(u, bindings, target):
    if u.base in bindings:
        b = target.scalar(bindings[u.base])
    elif target.has_coord(u.base):
        b = target.coord(u.base)
    else:
        raise SubstitutionIntoExpUnitBase(f"base {u.base} of unit {u.name} is not available")
    if b.is_zero():
        return target.one
    for v in target.exp_units:
        if v.rate == u.rate and b == target.coord(v.base):
            return target.unit(v.name)
    raise SubstitutionIntoExpUnitBase(
        f"binding {u.base} -> {b} does not preserve the relation of unit {u.name}")


def _evaluate(s, images, target):
    if all(im.den.is_constant() and im.im.is_zero() for im in images):
        polys = [im.re for im in images]
        re = s.re.compose(*polys, ctx=target.ctx)
        imp = s.im.compose(*polys, ctx=target.ctx)
        den = s.den.compose(*polys, ctx=target.ctx)
        if den.is_zero():
            raise DivisionByZero(f"denominator of {s} vanishes under substitution")
        return Scalar(target, re, imp, den)
    cache = {}

    def ev(p):
        acc = target.zero
        for mon, c in p.terms():
            term = target.const(_frac(c))
            for k, e in enumerate(mon):
                if e:
                    key = (k, e)
                    if key not in cache:
                        cache[key] = images[k] ** int(e)
                    term = term * cache[key]
            acc = acc + term
        return acc

    num = ev(s.re)
    if not s.im.is_zero():
        num = num + target.I * ev(s.im)
    den = ev(s.den)
    if den.is_zero():
        raise DivisionByZero(f"denominator of {s} vanishes under substitution")
    return num / den


# ---------------------------------------------------------------- parser

_BINOPS = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div", ast.Pow: "pow"}


def parse(text, chart):
    """Parse an expression of the scalar grammar on ``chart``.

    Integers, ``i``, ``tau``, coordinate and unit names, ``+ - * / ^`` with
    integer exponents and parentheses.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected an expression string, got {type(text).__name__}")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as e:
        raise ParseError(f"cannot parse {text!r}: {e.msg}", location=e.offset) from None
    return _eval_node(tree.body, chart, text)


def _int_exponent(node, text):
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _int_exponent(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    raise ParseError(f"exponent must be an integer in {text!r}", location=node.col_offset + 1)


def _eval_node(node, chart, text):
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return chart.const(node.value)
    if isinstance(node, ast.Name):
        n = node.id
        if n == "i":
            return chart.I
        if n == TAU:
            return chart.tau
        if chart.has_coord(n):
            return chart.coord(n)
        if chart.has_unit(n):
            return chart.unit(n)
        raise UnknownCoordinate(f"unknown symbol {n!r} in {text!r} on chart {chart.name}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, chart, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        kind = _BINOPS[type(node.op)]
        left = _eval_node(node.left, chart, text)
        if kind == "pow":
            return left ** _int_exponent(node.right, text)
        right = _eval_node(node.right, chart, text)
        return arith(left, right, kind)
    raise ParseError(f"unsupported syntax in {text!r}", location=getattr(node, "col_offset", 0) + 1)


def arith(a, b, kind):
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind}")


# -------------------------------------------------------- unit certificate

@dataclass(frozen=True)
class Certificate:
    certified: bool
    factor: "Scalar | None" = None
    witness: "dict | None" = None

    def __bool__(self):
        return self.certified


def _allowed(chart, name):
    if name == TAU or chart.has_unit(name):
        return True
    return chart.coord_info(name).positive


def unit_certify(d, chart=None):
    """Certify that a nonzero polynomial never vanishes on the chart domain.

    Certified iff d is a constant times a monomial in positive coordinates,
    units and tau.  Otherwise returns an offending factor and, when one is
    found, a rational point of the domain where it vanishes.
    """
    chart = chart or d.chart
    if not d.is_polynomial():
        raise ValueError("unit_certify expects a polynomial")
    if d.is_zero():
        raise ValueError("unit_certify expects a nonzero polynomial")
    gens = chart.gen_names
    monoms = list(d.re.monoms()) + list(d.im.monoms())
    content = tuple(int(min(m[k] for m in monoms)) for k in range(len(gens)))
    for k, e in enumerate(content):
        if e and not _allowed(chart, gens[k]):
            f = chart.coord(gens[k])
            return Certificate(False, f, find_zero(f, chart))
    mono = chart.one
    for k, e in enumerate(content):
        if e:
            mono = mono * chart._gen(gens[k]) ** int(e)
    rest = d / mono
    if rest.is_constant() and not (rest.free_symbols() & {TAU}):
        return Certificate(True)
    factor = rest
    if rest.is_real():
        _, facs = rest.re.factor()
        for p, _e in facs:
            fs = Scalar._raw(chart, p)
            if not fs.is_constant():
                factor = Scalar(chart, p, chart.ctx.from_dict({}), chart.ctx.constant(1))
                break
    return Certificate(False, factor, find_zero(factor, chart))


def certify_denominator(s, chart=None):
    """unit_certify applied to the denominator of s; witnesses avoid zeros of the numerator."""
    chart = chart or s.chart
    den = s.denominator()
    if den.is_constant():
        return Certificate(True)
    cert = unit_certify(den, chart)
    if cert.certified or cert.witness is None:
        return cert
    w = find_zero(cert.factor, chart, avoid=s.numerator())
    return Certificate(False, cert.factor, w)


_CANDIDATES = [Fraction(v) for v in (0, 1, -1, 2, Fraction(1, 2), -2, 3, Fraction(-1, 2))]
_MAX_COMBOS = 400


def _univariate_roots(s, name):
    """Common rational roots in ``name`` of all tau/real/imag coefficient polynomials."""
    ch = s.chart
    k = ch._index[name]
    groups = {}
    for p in (s.re, s.im):
        for mon, c in p.terms():
            key = (p is s.im,) + tuple(e for j, e in enumerate(mon) if j != k)
            groups.setdefault(key, {})[mon[k]] = _frac(c)
    g = None
    for coeffs in groups.values():
        deg = max(coeffs)
        up = flint.fmpq_poly([_fmpq(coeffs.get(j, 0)) for j in range(deg + 1)])
        g = up if g is None else g.gcd(up)
    if g is None or g.degree() < 1:
        return []
    roots = []
    _, facs = g.factor()
    for f, _e in facs:
        if f.degree() == 1:
            a, b = f.coeffs()[0], f.coeffs()[1]
            roots.append(-_frac(a) / _frac(b))
    return sorted(roots, key=lambda r: (abs(r), r))


def find_zero(f, chart=None, avoid=None):
    """Search for a rational domain point where the polynomial f vanishes."""
    chart = chart or f.chart
    used = f.free_symbols()
    fixed = {}
    for name in used:
        if chart.has_unit(name):
            fixed[chart.unit_info(name).base] = Fraction(0)
    for name, v in fixed.items():
        if not chart.coord_info(name).admits(v):
            return None
    free = [c.name for c in chart.coords if c.name in used and c.name not in fixed]
    base = chart.default_point()
    base.update(fixed)

    def ok(point):
        if not chart.contains(point):
            return False
        if avoid is not None:
            try:
                v = avoid.at(point)
            except DivisionByZero:
                return False
            if v.is_zero():
                return False
        return True

    if not free:
        if f.at(base).is_zero() and ok(base):
            return base
        return None
    for target in free:
        others = [n for n in free if n != target]
        pools = [[v for v in _CANDIDATES if chart.coord_info(n).admits(v)] for n in others]
        for combo in itertools.islice(itertools.product(*pools), _MAX_COMBOS):
            assign = dict(fixed)
            assign.update(zip(others, combo))
            try:
                g = f.at(assign)
            except DivisionByZero:
                continue
            if g.is_zero():
                continue
            for r in _univariate_roots(g, target):
                point = dict(base)
                point.update(assign)
                point[target] = r
                if ok(point):
                    return point
    return None
