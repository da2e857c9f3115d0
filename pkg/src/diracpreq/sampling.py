"""Seeded random polynomials for property suites."""

import random
from fractions import Fraction
from itertools import product


def monomials(names, degree):
    out = []
    for exps in product(range(degree + 1), repeat=len(names)):
        if sum(exps) <= degree:
            out.append(exps)
    return out


def random_poly(chart, rng, names=None, degree=3, terms=4, coeff_range=3):
    """A random polynomial with small integer coefficients in the given coordinates."""
    names = list(names or chart.coord_names)
    monos = monomials(names, degree)
    picked = rng.sample(monos, min(terms, len(monos)))
    out = chart.zero
    for exps in picked:
        c = rng.randint(-coeff_range, coeff_range)
        if c == 0:
            c = 1
        term = chart.const(Fraction(c))
        for n, e in zip(names, exps):
            if e:
                term = term * chart.coord(n) ** e
        out = out + term
    return out


def rng_for(seed, *salt):
    return random.Random(f"{seed}:" + ":".join(str(s) for s in salt))
