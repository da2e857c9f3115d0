"""Shared builders and sympy oracles for the test suite."""

import functools
import random

import sympy

from diracpreq.cli import fixture_names, fixture_text
from diracpreq.manifest import parse_manifest

TAU = sympy.Symbol("tau")


@functools.lru_cache(maxsize=None)
def fixture(name):
    return parse_manifest(fixture_text(name))


def all_preq():
    """Every prequantization block shipped with the fixtures, keyed fixture:name."""
    out = {}
    for name in fixture_names():
        for key, data in fixture(name).preq.items():
            out[f"{name}:{key}"] = data
    return out


def rng(*salt):
    return random.Random(":".join(str(s) for s in ("tests",) + salt))


# ----------------------------------------------------------------- sympy

def syms(chart):
    names = chart.coord_names
    table = {n: sympy.Symbol(n) for n in names}
    table["tau"] = TAU
    table["i"] = sympy.I
    for u in chart.exp_units:
        table[u.name] = sympy.exp(u.rate * table[u.base])
    return table


def to_sympy(s, chart=None):
    chart = chart or s.chart
    return sympy.sympify(str(s).replace("^", "**"), locals=syms(chart))


def sym_zero(expr):
    return sympy.simplify(expr) == 0


def bivector_matrix(L):
    """Antisymmetric sympy matrix P with L = sum_{i<j} P_ij d_i ^ d_j."""
    ch = L.chart
    n = ch.dim
    P = sympy.zeros(n, n)
    for (i, j), c in L.coeffs.items():
        v = to_sympy(c, ch)
        P[i, j] = v
        P[j, i] = -v
    return P


def vector_list(X):
    return [to_sympy(c, X.chart) for c in X.components()]


def jacobi_bracket(P, E, xs, f, g):
    """Lambda(df, dg) + f E.g - g E.f, with Lambda(a, b) = sum P_ij a_i b_j."""
    df = [sympy.diff(f, x) for x in xs]
    dg = [sympy.diff(g, x) for x in xs]
    n = len(xs)
    lam = sum(P[i, j] * df[i] * dg[j] for i in range(n) for j in range(n))
    Ef = sum(E[i] * df[i] for i in range(n))
    Eg = sum(E[i] * dg[i] for i in range(n))
    return sympy.expand(lam + f * Eg - g * Ef)


def jacobi_oracle(L, E):
    """Whether (L, E) is Jacobi, by the Jacobi identity on coordinates and 1.

    Coordinate triples give [L, L] = 2 E ^ L; triples containing 1 give [E, L] = 0.
    """
    ch = L.chart
    xs = [sympy.Symbol(n) for n in ch.coord_names]
    P = bivector_matrix(L)
    Ev = vector_list(E) if E is not None else [0] * len(xs)
    br = lambda a, b: jacobi_bracket(P, Ev, xs, a, b)
    fns = xs + [sympy.Integer(1)]
    for a in range(len(fns)):
        for b in range(a + 1, len(fns)):
            for c in range(b + 1, len(fns)):
                f, g, h = fns[a], fns[b], fns[c]
                jac = br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)
                if sympy.simplify(jac) != 0:
                    return False
    return True


def sym_d(form_coeffs, xs):
    """d of a 2-form given as {(i, j): coeff}, returned as {(i, j, k): coeff}."""
    out = {}
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                g = lambda a, b: form_coeffs.get((a, b), 0)
                v = sympy.diff(g(j, k), xs[i]) - sympy.diff(g(i, k), xs[j]) + sympy.diff(g(i, j), xs[k])
                if sympy.simplify(v) != 0:
                    out[(i, j, k)] = v
    return out


def reeb_oracle(sigma):
    """Solve sigma(E) = 1 and i_E d sigma = 0 with sympy."""
    ch = sigma.chart
    xs = [sympy.Symbol(n) for n in ch.coord_names]
    s = [to_sympy(c, ch) for c in sigma.components()]
    n = len(xs)
    es = sympy.symbols(f"e0:{n}")
    ds = [[sympy.diff(s[j], xs[i]) - sympy.diff(s[i], xs[j]) for j in range(n)] for i in range(n)]
    eqs = [sum(es[i] * ds[i][j] for i in range(n)) for j in range(n)]
    eqs.append(sum(es[i] * s[i] for i in range(n)) - 1)
    sol = sympy.solve(eqs, es, dict=True)
    if len(sol) != 1:
        return None
    return [sympy.simplify(sol[0].get(e, e)) for e in es]


# ------------------------------------------------------------ strategies

def poly_strategy(chart, names=None, degree=2, max_terms=4):
    """Hypothesis strategy for small integer polynomials on chart."""
    from fractions import Fraction

    from hypothesis import strategies as st

    names = list(names or chart.coord_names)
    exps = st.tuples(*[st.integers(0, degree) for _ in names]).filter(lambda e: sum(e) <= degree)
    terms = st.dictionaries(exps, st.integers(-4, 4).filter(bool), max_size=max_terms)

    def build(table):
        out = chart.zero
        for e, c in table.items():
            term = chart.const(Fraction(c))
            for n, k in zip(names, e):
                if k:
                    term = term * chart.coord(n) ** k
            out = out + term
        return out

    return terms.map(build)
