import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from diracpreq.algebroid import (
    AnchorRep,
    LCochain,
    beta_convert,
    dL,
    from_pair,
    preq_residual,
    rho_star,
    to_pair,
    upsilon,
)
from diracpreq.calculus import KForm, KVector, d, pair
from diracpreq.dirac import graph_bivector, graph_two_form
from diracpreq.errors import OmegaNotClosed
from diracpreq.lebrun import LebrunFamily
from diracpreq.sampling import random_poly, rng_for
from diracpreq.scalar import Chart

from helpers import all_preq, bivector_matrix, to_sympy

R2 = Chart("R2", ["x", "y"])
W = graph_two_form(KForm.from_names(R2, {"dx^dy": 1}))
PREQ = all_preq()
BASES = {k: v.base for k, v in PREQ.items()}
seeds = st.integers(0, 10**6)


def test_dl_of_pulled_back_form():
    gamma = KForm.from_names(R2, {"dy": "x"})
    assert dL(rho_star(W, gamma), W) == rho_star(W, d(gamma))


@pytest.mark.parametrize("key", sorted(BASES))
def test_dl_squared_and_upsilon_closed(key):
    L = BASES[key]
    rng = rng_for(3, key)
    for _ in range(5):
        f = random_poly(L.chart, rng, degree=2)
        assert dL(dL(f, L), L).is_zero()
    if len(L.frame) > 2:
        assert dL(upsilon(L), L).is_zero()


def test_upsilon_of_two_form_graphs():
    fam = LebrunFamily()
    for L, w in [(W, KForm.from_names(R2, {"dx^dy": 1})),
                 (fam.closure_zero(), d(fam.sigma(fam.S) * fam.S.coord("s")))]:
        assert upsilon(L) == rho_star(L, w)
    zero = graph_two_form(KForm.zero(R2, 2))
    assert upsilon(zero).is_zero()


def test_upsilon_of_bivector_graph():
    lam = LebrunFamily().poisson_bivector()
    L = graph_bivector(lam)
    P = bivector_matrix(lam)
    ups = upsilon(L)
    n = lam.chart.dim
    for i in range(n):
        for j in range(n):
            if i != j:
                assert sympy.expand(to_sympy(ups(i, j), lam.chart) - P[i, j]) == 0


def test_residual_examples():
    w = KForm.from_names(R2, {"dx^dy": 1})
    assert preq_residual(W, w, [0, 0]).is_zero()
    fam = LebrunFamily()
    for data in (fam.preq_s(), fam.preq_s(glued=True), fam.preq_r()):
        assert preq_residual(data.base, data.Omega, data.beta).is_zero()
    with pytest.raises(OmegaNotClosed):
        R3 = Chart("R3", ["x", "y", "z"])
        preq_residual(graph_two_form(KForm.zero(R3, 2)), KForm.from_names(R3, {"dy^dz": "x"}), [0, 0, 0])


def test_from_pair_examples():
    fam = LebrunFamily()
    L = fam.closure_zero()
    ch = L.chart
    alpha = -fam.sigma(ch) * ch.coord("s")
    beta = from_pair(L, KVector.zero(ch, 1), alpha)
    assert beta.as_list() == [pair(alpha, e.X) for e in L.frame]
    assert from_pair(L, KVector.zero(ch, 1), KForm.zero(ch, 1)).is_zero()
    assert beta_convert("from_pair", L, KVector.zero(ch, 1), alpha) == beta


def test_s_chart_beta_matches_minus_s_sigma():
    fam = LebrunFamily()
    data = fam.preq_s()
    ch = data.chart
    want = from_pair(data.base, KVector.zero(ch, 1), -fam.sigma(ch) * ch.coord("s"))
    assert data.beta == want


@pytest.mark.parametrize("key", sorted(PREQ))
def test_pair_round_trip(key):
    data = PREQ[key]
    beta = from_pair(data.base, data.pair.A, data.pair.alpha)
    rep = to_pair(data.base, beta)
    assert rep.isotropy().is_zero()
    assert from_pair(data.base, rep.A, rep.alpha) == beta


@pytest.mark.parametrize("key", sorted(PREQ))
def test_residual_independent_of_anchor_rep(key):
    data = PREQ[key]
    L = data.base
    rng = rng_for(5, key)
    c = [random_poly(L.chart, rng, degree=1, terms=2) for _ in L.frame]
    Y = L.frame.combine(c)
    beta2 = from_pair(L, data.pair.A + Y.X, data.pair.alpha + Y.xi)
    assert beta2 == data.beta
    assert preq_residual(L, data.Omega, beta2) == preq_residual(L, data.Omega, data.beta)


@pytest.mark.parametrize("key", sorted(PREQ))
@given(seed=seeds)
def test_exact_adjustment_leaves_residual(key, seed):
    data = PREQ[key]
    L = data.base
    rng = rng_for(seed, key)
    gamma = KForm.from_list(L.chart, [random_poly(L.chart, rng, degree=1, terms=2) for _ in L.chart.coord_names])
    before = preq_residual(L, data.Omega, data.beta)
    after = preq_residual(L, data.Omega + d(gamma), data.beta + rho_star(L, gamma))
    assert before == after


def test_cochain_alternation():
    c = LCochain(W.frame, 2, {(1, 0): R2.scalar("x")})
    assert c(0, 1) == R2.scalar("-x")
    assert c(1, 1).is_zero()
    assert AnchorRep(KVector.basis(R2, "x"), KForm.basis(R2, "y")).isotropy().is_zero()


def _regular_cases():
    from helpers import fixture

    sympl = fixture("symplectic_r2").preq["Q"].base
    su2 = fixture("su2_kernel").preq["Q0"].base
    ch = su2.chart
    return {
        "plane": (sympl, KForm.from_names(sympl.chart, {"dx^dy": 1}), None),
        "su2": (su2, KForm.from_names(ch, {"da^db": "1/t"}), "t"),
    }


@pytest.mark.parametrize("case", ["plane", "su2"])
@given(seed=seeds)
def test_dl_of_foliation_preserving_pair(case, seed):
    # d_L <A' + alpha', .> = rho^*(d alpha' - L_A' Omega_L) when A' preserves the leaves
    from diracpreq.calculus import lie_derivative

    L, Omega_L, transverse = _regular_cases()[case]
    ch = L.chart
    rng = rng_for(seed, case)
    comps = []
    for n in ch.coord_names:
        if n == transverse:
            comps.append(random_poly(ch, rng, names=[n], degree=2))
        else:
            comps.append(random_poly(ch, rng, degree=2))
    A = KVector.from_list(ch, comps)
    alpha = KForm.from_list(ch, [random_poly(ch, rng, degree=2) for _ in ch.coord_names])
    beta = from_pair(L, A, alpha)
    assert dL(beta, L) == rho_star(L, d(alpha) - lie_derivative(A, Omega_L))
