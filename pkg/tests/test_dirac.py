import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from diracpreq.calculus import KForm, KVector, apply, d
from diracpreq.dirac import (
    adm_bracket,
    admissible_solve,
    char_dist_at_point,
    courant_bracket,
    graph_bivector,
    graph_make,
    graph_two_form,
    hamiltonian,
    integrability_check,
    is_basic,
    jacobi_residual,
)
from diracpreq.errors import NotAdmissible, PointOutsideDomain
from diracpreq.lebrun import LebrunFamily
from diracpreq.linpair import CouSection
from diracpreq.sampling import random_poly, rng_for
from diracpreq.scalar import Chart

from helpers import fixture, jacobi_bracket, sym_d, to_sympy

R2 = Chart("R2", ["x", "y"])
R3 = Chart("R3", ["x", "y", "z"])
W = graph_two_form(KForm.from_names(R2, {"dx^dy": 1}))
PB = graph_bivector(KVector.from_names(R2, {"x^y": 1}))
EX26 = fixture("example2_6").structures["L"]
seeds = st.integers(0, 10**6)


def cou(chart, X, xi):
    return CouSection(KVector.from_list(chart, X), KForm.from_list(chart, xi))


def test_courant_examples():
    assert courant_bracket(cou(R2, [1, 0], [0, 0]), cou(R2, [0, 1], [0, 0])).is_zero()
    assert courant_bracket(cou(R2, [1, 0], [0, 0]), cou(R2, [0, 0], [0, "x"])) == cou(R2, [0, 0], [0, 1])
    e = cou(R2, ["y", "x^2"], ["x*y", "1"])
    assert courant_bracket(e, e).is_zero()


def test_integrability_examples():
    assert integrability_check(W)
    assert integrability_check(EX26)
    bad = graph_two_form(KForm.from_names(R3, {"dy^dz": "x"}))
    r = integrability_check(bad)
    assert not r
    assert not r.witness["value"].is_zero()
    assert len(set(r.witness["triple"])) == 3


def test_graph_examples():
    assert list(W.frame) == [cou(R2, [1, 0], [0, 1]), cou(R2, [0, 1], [-1, 0])]
    assert list(PB.frame) == [cou(R2, [0, -1], [1, 0]), cou(R2, [1, 0], [0, 1])]
    zero = graph_make("two_form", KForm.zero(R2, 2))
    assert list(zero.frame) == [cou(R2, [1, 0], [0, 0]), cou(R2, [0, 1], [0, 0])]


def test_characteristic_ranks():
    assert len(char_dist_at_point(EX26, {"x1": 1, "x2": 0})) == 0
    assert len(char_dist_at_point(EX26, {"x1": 0, "x2": 0})) == 2
    assert len(char_dist_at_point(W, {"x": 5, "y": -2})) == 0
    with pytest.raises(PointOutsideDomain):
        char_dist_at_point(EX26, {"x1": 0})


def test_hamiltonian_examples():
    assert hamiltonian(W, R2.coord("x")) == -KVector.basis(R2, "y")
    assert hamiltonian(EX26, 1).is_zero()
    res = admissible_solve(EX26, "x1^2")
    assert res.status == "not_admissible"
    assert res.factor == EX26.chart.scalar("x1")
    assert res.witness["x1"] == 0
    with pytest.raises(NotAdmissible):
        hamiltonian(EX26, "x1^2")
    assert admissible_solve(EX26, "x1^3").certified


def test_bracket_examples():
    assert adm_bracket(W, "x", "y") == R2.one
    assert adm_bracket(PB, "x", "y") == R2.one
    assert adm_bracket(W, "x^2*y", "x^2*y").is_zero()


def test_basic_examples():
    assert is_basic(EX26, "x1^2")
    r = is_basic(EX26, "x2")
    assert not r
    assert r.witness["where"] == {"x1": "0"}
    assert is_basic(EX26, 7)


def test_jacobi_residual_examples():
    assert jacobi_residual(W, "x", "y", "x+y").is_zero()
    assert jacobi_residual(W, "x^2", "y", "x*y").is_zero()


def test_lebrun_bivector_jacobi_residual():
    S = LebrunFamily().lebrun_poisson()
    assert integrability_check(S)
    rng = rng_for(1, "lebrun")
    f, g, h = (random_poly(S.chart, rng, degree=2) for _ in range(3))
    assert jacobi_residual(S, f, g, h).is_zero()


@given(seeds)
def test_bivector_bracket_matches_sympy(seed):
    rng = rng_for(seed, "pb")
    S = LebrunFamily().lebrun_poisson()
    ch = S.chart
    f, g = random_poly(ch, rng, degree=2), random_poly(ch, rng, degree=2)
    from helpers import bivector_matrix

    xs = [sympy.Symbol(n) for n in ch.coord_names]
    want = jacobi_bracket(bivector_matrix(LebrunFamily().poisson_bivector()), [0] * len(xs), xs,
                          to_sympy(f), to_sympy(g))
    assert sympy.expand(to_sympy(adm_bracket(S, f, g)) - want) == 0


def ex26_admissible(rng):
    ch = EX26.chart
    return ch.scalar(rng.randint(-3, 3)) + ch.scalar("x1^3") * random_poly(ch, rng, degree=2)


def ex26_basic(rng):
    ch = EX26.chart
    return ch.scalar(rng.randint(-3, 3)) + ch.scalar("x1^2") * random_poly(ch, rng, degree=2)


@pytest.mark.parametrize("name", ["form", "bivector", "example2_6"])
@given(seed=seeds)
def test_hamiltonian_postcondition_and_jacobi(name, seed):
    rng = rng_for(seed, name)
    if name == "example2_6":
        S, fs = EX26, [ex26_admissible(rng) for _ in range(3)]
    else:
        S = W if name == "form" else PB
        fs = [random_poly(R2, rng, degree=3) for _ in range(3)]
    f, g, h = fs
    adm_bracket(S, f, g, check=True)
    assert jacobi_residual(S, f, g, h).is_zero()


@given(seed=seeds)
def test_hamiltonian_flow_preserves_basic(seed):
    rng = rng_for(seed, "basic")
    psi, h = ex26_basic(rng), ex26_admissible(rng)
    assert is_basic(EX26, psi)
    assert is_basic(EX26, apply(hamiltonian(EX26, h), psi))


@given(seed=seeds)
def test_two_form_integrable_iff_closed(seed):
    rng = rng_for(seed, "closed")
    coeffs = {}
    for key in ("dx^dy", "dx^dz", "dy^dz"):
        c = random_poly(R3, rng, degree=1, terms=2)
        coeffs[key] = c if rng.random() < 0.5 else c.diff("x") * 0 + R3.scalar(rng.randint(-2, 2))
    w = KForm.from_names(R3, coeffs)
    xs = sympy.symbols("x y z")
    table = {idx: to_sympy(c) for idx, c in w.coeffs.items()}
    closed = not sym_d(table, xs)
    assert bool(integrability_check(graph_two_form(w))) == closed
    assert closed == d(w).is_zero()
