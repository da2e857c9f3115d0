"""Lie algebroid cochains on a Dirac structure: d_L, Upsilon, the prequantization residual."""

from dataclasses import dataclass
from itertools import combinations, product

from . import linalg
from .calculus import KForm, KVector, apply, d, evaluate, pair
from .dirac import structure_bracket
from .errors import BracketNotInSpan, DegreeOverflow, OmegaNotClosed, SolverNeedsExplicitPair
from .linpair import pairing
from .scalar import certify_denominator


def _perm_sign(idx):
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] == idx[j]:
                return 0, None
            if idx[i] > idx[j]:
                sign = -sign
    return sign, tuple(sorted(idx))


class LCochain:
    """An alternating k-cochain on the frame generators of a structure."""

    def __init__(self, frame, degree, values=None):
        self.frame = frame
        self.degree = degree
        self.values = {}
        for idx, v in (values or {}).items():
            sign, key = _perm_sign(idx)
            if sign == 0:
                continue
            v = frame.chart.scalar(v)
            self.values[key] = v if sign > 0 else -v

    @classmethod
    def from_list(cls, frame, vals):
        if len(vals) != len(frame):
            raise ValueError(f"expected {len(frame)} values, got {len(vals)}")
        return cls(frame, 1, {(i,): v for i, v in enumerate(vals)})

    @property
    def chart(self):
        return self.frame.chart

    def __call__(self, *idx):
        sign, key = _perm_sign(idx)
        if sign == 0:
            return self.chart.zero
        v = self.values.get(key, self.chart.zero)
        return v if sign > 0 else -v

    def as_list(self):
        if self.degree != 1:
            raise ValueError("as_list needs a 1-cochain")
        return [self(i) for i in range(len(self.frame))]

    def keys(self):
        return list(combinations(range(len(self.frame)), self.degree))

    def evaluate_on(self, coeffs_list):
        """Multilinear extension: arguments given as frame coefficients."""
        out = self.chart.zero
        for idx in product(range(len(self.frame)), repeat=self.degree):
            c = self.chart.one
            for a, k in zip(coeffs_list, idx):
                c = c * a[k]
                if c.is_zero():
                    break
            if not c.is_zero():
                out = out + c * self(*idx)
        return out

    def _combine(self, other, sgn):
        vals = {k: self(*k) + other(*k) * sgn for k in self.keys()}
        return LCochain(self.frame, self.degree, vals)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return LCochain(self.frame, self.degree, {k: -v for k, v in self.values.items()})

    def is_zero(self):
        return all(v.is_zero() for v in self.values.values())

    def nonzero(self):
        return {k: v for k, v in self.values.items() if not v.is_zero()}

    def __eq__(self, other):
        return isinstance(other, LCochain) and self.degree == other.degree and (self - other).is_zero()

    def __str__(self):
        nz = self.nonzero()
        if not nz:
            return "0"
        return ", ".join(f"{k}: {v}" for k, v in sorted(nz.items()))

    __repr__ = __str__


def LCochain1(frame, vals):
    return LCochain.from_list(frame, vals)


def _frame_of(L):
    return getattr(L, "frame", L)


def _bracket_coeffs(frame):
    """Frame coefficients of [e_i, e_j] for i < j."""
    table = {}
    for i, j in combinations(range(len(frame)), 2):
        br = structure_bracket(frame[i], frame[j])
        c = frame.resolve(br)
        if c is None:
            raise BracketNotInSpan(f"[e{i}, e{j}] is not a section of the structure", pair=(i, j))
        table[(i, j)] = c
    return table


def dL(arg, L, brackets=None):
    """The Lie algebroid differential of a Scalar or an LCochain."""
    frame = _frame_of(L)
    ch = frame.chart
    if not isinstance(arg, LCochain):
        f = ch.scalar(arg)
        return LCochain.from_list(frame, [apply(e.X, f) for e in frame])
    k = arg.degree
    m = len(frame)
    if k + 1 > m:
        raise DegreeOverflow(f"a {k + 1}-cochain on a rank {m} structure")
    if k >= 1 and brackets is None:
        brackets = _bracket_coeffs(frame)
    unit = lambda i: [ch.one if a == i else ch.zero for a in range(m)]
    out = {}
    for idx in combinations(range(m), k + 1):
        v = ch.zero
        for pos, i in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1:]
            term = apply(frame[i].X, arg(*rest))
            v = v + term if pos % 2 == 0 else v - term
        for a, b in combinations(range(k + 1), 2):
            i, j = idx[a], idx[b]
            rest = [unit(x) for p, x in enumerate(idx) if p not in (a, b)]
            term = arg.evaluate_on([brackets[(i, j)]] + rest)
            v = v + term if (a + b) % 2 == 0 else v - term
        out[idx] = v
    return LCochain(frame, k + 1, out)


def upsilon(L):
    """Restriction of the minus pairing to the structure."""
    frame = _frame_of(L)
    vals = {(i, j): pairing(frame[i], frame[j], "minus") for i, j in combinations(range(len(frame)), 2)}
    return LCochain(frame, 2, vals)


def rho_star(L, form):
    """Pull a form on the base back along the anchor."""
    frame = _frame_of(L)
    if not isinstance(form, KForm):
        return dL(form, frame)
    k = form.degree
    vals = {idx: evaluate(form, *[frame[i].X for i in idx]) for idx in combinations(range(len(frame)), k)}
    return LCochain(frame, k, vals)


def is_closed(Omega):
    if Omega.degree >= Omega.chart.dim:
        return True
    return d(Omega).is_zero()


def preq_residual(L, Omega, beta, brackets=None):
    """rho*Omega - Upsilon - d_L beta; zero exactly when the prequantization condition holds."""
    if not is_closed(Omega):
        raise OmegaNotClosed("Omega is not closed", d_omega=str(d(Omega)))
    frame = _frame_of(L)
    if not isinstance(beta, LCochain):
        beta = LCochain.from_list(frame, list(beta))
    return rho_star(frame, Omega) - upsilon(frame) - dL(beta, frame, brackets)


# ----------------------------------------------------------- beta <-> A + alpha

@dataclass
class AnchorRep:
    A: KVector
    alpha: KForm

    def isotropy(self):
        return pair(self.alpha, self.A)

    def __str__(self):
        return f"A = {self.A}, alpha = {self.alpha}"


def from_pair(L, A, alpha):
    """beta_i = 2 <A + alpha, e_i>_+ = alpha(X_i) + xi_i(A)."""
    frame = _frame_of(L)
    return LCochain.from_list(frame, [pair(alpha, e.X) + pair(e.xi, A) for e in frame])


def _hints(names, hint):
    n = len(names)
    if hint is not None:
        if isinstance(hint, str):
            yield {x: hint for x in names}
        else:
            yield {x: hint.get(x, "form") for x in names}
        return
    yield {x: "form" for x in names}
    yield {x: "vector" for x in names}
    for bits in product(("form", "vector"), repeat=n):
        if len(set(bits)) > 1:
            yield dict(zip(names, bits))


def to_pair(L, beta, hint=None):
    """An isotropic A + alpha with from_pair(A, alpha) = beta.

    hint maps each coordinate to 'form' (A^j = 0) or 'vector' (alpha_j = 0);
    either choice makes i_A alpha vanish termwise so the system is linear.
    """
    frame = _frame_of(L)
    ch = frame.chart
    names = ch.coord_names
    n = ch.dim
    if isinstance(beta, LCochain):
        beta = beta.as_list()
    beta = [ch.scalar(b) for b in beta]
    tried = []
    for split in _hints(names, hint):
        for x, v in split.items():
            if v not in ("form", "vector"):
                raise ValueError(f"splitting hint for {x} must be 'form' or 'vector'")
        # unknown j is alpha_j when split 'form', A^j when split 'vector'
        rows = []
        for e in frame:
            X, xi = e.X.components(), e.xi.components()
            rows.append([X[j] if split[names[j]] == "form" else xi[j] for j in range(n)])
        sol = linalg.solve(rows, beta, ch)
        tried.append(split)
        if sol is None or not all(certify_denominator(v, ch).certified for v in sol):
            continue
        A = KVector.from_list(ch, [sol[j] if split[names[j]] == "vector" else ch.zero for j in range(n)])
        alpha = KForm.from_list(ch, [sol[j] if split[names[j]] == "form" else ch.zero for j in range(n)])
        rep = AnchorRep(A, alpha)
        if not rep.isotropy().is_zero() or from_pair(frame, A, alpha).as_list() != beta:
            continue
        return rep
    raise SolverNeedsExplicitPair("no coordinate splitting gives a smooth isotropic pair; supply A + alpha",
                                  tried=len(tried))


def beta_convert(direction, L, *args, **kw):
    if direction == "from_pair":
        return from_pair(L, *args)
    if direction == "to_pair":
        return to_pair(L, *args, **kw)
    raise ValueError(f"unknown direction {direction!r}")
