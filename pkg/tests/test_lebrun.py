from fractions import Fraction

import pytest
import sympy

from diracpreq.algebroid import preq_residual
from diracpreq.calculus import KVector
from diracpreq.dirac import char_dist_at_point, integrability_check, is_basic
from diracpreq.djacobi import diracization, graph_jacobi
from diracpreq.errors import FractionalPowerResidue
from diracpreq.lebrun import (
    LebrunFamily,
    char_boundary_check,
    conformal_pushforward_check,
    conformal_transform,
    contact_check,
    linearize_at_point,
    pinch_pair,
    pinch_transform,
    structure_matrix,
    vanishing_locus_check,
)
from diracpreq.linpair import span_equal
from diracpreq.scalar import Chart, Coord

from helpers import to_sympy

FAM = LebrunFamily()


@pytest.mark.parametrize("n", [1, 2])
def test_ends_are_integrable_and_glue(n):
    fam = LebrunFamily(n)
    assert integrability_check(fam.lebrun_poisson())
    assert integrability_check(fam.closure_zero())
    assert integrability_check(fam.glued_s_end())
    assert fam.glued_dirac()


@pytest.mark.parametrize("n", [1, 2])
def test_symplectization_is_diracization(n):
    fam = LebrunFamily(n)
    assert span_equal(fam.symplectization().frame, diracization(fam.contact_dj()).frame)


def test_unglued_sign_does_not_match():
    moved = FAM.overlap(FAM.closure_zero(FAM.S_open).frame)
    assert not span_equal(moved, FAM.lebrun_poisson(FAM.R_open).frame)


def test_residuals_on_both_charts():
    for data in (FAM.preq_s(), FAM.preq_s(glued=True), FAM.preq_r()):
        assert preq_residual(data.base, data.Omega, data.beta).is_zero()


def test_boundary_kernel_at_origin():
    S = FAM.closure_zero()
    ker = char_dist_at_point(S, {"u": 0, "q": 0, "p": 0, "s": 0})
    ch = S.chart
    want = [KVector.basis(ch, "q"), KVector.basis(ch, "p")]
    from diracpreq import linalg

    rows = [k.components() for k in ker]
    wrows = [w.components() for w in want]
    assert linalg.rank(rows) == 2 == linalg.rank(rows + wrows)


def test_boundary_basic_functions():
    S = FAM.closure_zero()
    assert is_basic(S, "s*u")
    assert not is_basic(S, "u")
    assert char_boundary_check(FAM)


def test_linearization_examples():
    R = FAM.R
    origin = {"u": 0, "q": 0, "p": 0, "r": 0}
    assert linearize_at_point(FAM.poisson_bivector(), origin) == KVector.from_names(R, {"q^p": "r"})
    const = KVector.from_names(R, {"u^q": 3, "p^r": "-1/2"})
    assert linearize_at_point(const, origin) == const
    assert linearize_at_point(KVector.from_names(R, {"r^u": "r^2"}), origin).is_zero()


def test_linearization_n2():
    fam = LebrunFamily(2)
    origin = {x: 0 for x in fam.R.coord_names}
    want = KVector.from_names(fam.R, {"q1^p1": "r", "q2^p2": "r"})
    assert linearize_at_point(fam.poisson_bivector(), origin) == want


def test_pinch_of_prequantized_pair():
    lam, E = pinch_pair(FAM.eq17_pair())
    ch = E.chart
    assert E == KVector.basis(ch, "y") * ch.coord("x") - KVector.basis(ch, "x") * ch.coord("y")
    assert all(c.is_polynomial() for c in lam.coeffs.values())
    zeros = vanishing_locus_check(E)
    assert all(v == ((a, b) == (0, 0)) for (a, b), v in zeros.items())
    assert integrability_check(graph_jacobi(lam, E))


def test_pinch_of_basis_vectors():
    Q = Chart("Q", ["u", Coord("r", nonneg=True), Coord("theta", periodic=True)])
    out = pinch_transform(KVector.basis(Q, "theta"))
    ch = out.chart
    assert out == KVector.basis(ch, "y") * ch.coord("x") - KVector.basis(ch, "x") * ch.coord("y")
    with pytest.raises(FractionalPowerResidue):
        pinch_transform(KVector.basis(Q, "r"))
    # r d_r is the Euler field of the plane, divided by two
    half = pinch_transform(KVector.basis(Q, "r") * Q.coord("r"))
    assert half == (KVector.basis(ch, "x") * ch.coord("x") + KVector.basis(ch, "y") * ch.coord("y")) / 2


def test_conformal_factor_one_is_identity():
    lam, E = FAM.eq17_pair()
    assert conformal_transform((lam, E), 1) == (lam, E)


def conformal_pair():
    RQo = FAM.RQ.restrict(positive=["r"])
    return conformal_transform(FAM.eq17_pair(RQo), "1/r")


def test_conformal_then_pinch_is_polynomial():
    lam, E = pinch_pair(conformal_pair())
    for c in list(lam.coeffs.values()) + list(E.coeffs.values()):
        assert c.is_polynomial()
    assert integrability_check(graph_jacobi(lam, E))


@pytest.mark.parametrize("r", [1, 2, Fraction(1, 2)])
def test_contact_samples(r):
    pair_ = conformal_pair()
    pts = [{"u": 0, "q": 0, "p": 0, "r": r, "theta": 0}, {"u": 1, "q": -1, "p": 2, "r": r, "theta": 0}]
    rep = contact_check(pair_, pts)
    assert rep
    # independent determinant of the structure matrix
    mat = sympy.Matrix([[to_sympy(c, pair_[0].chart) for c in row] for row in structure_matrix(*pair_)])
    for pt, det in zip(pts, rep.determinants):
        val = mat.subs({sympy.Symbol(k): v for k, v in pt.items()}).det()
        assert sympy.simplify(val - to_sympy(det, pair_[0].chart)) == 0
        assert val != 0


def test_degenerate_pair_is_not_contact():
    lam, E = FAM.eq17_pair()
    rep = contact_check((lam * 0, E * 0), [{"u": 0, "q": 0, "p": 0, "r": 1, "theta": 0}])
    assert not rep


def test_conformal_pushforward():
    lam, E = pinch_pair(conformal_pair())
    pts = [{"u": 0, "q": 1, "p": 2, "x": 1, "y": 2}, {"u": 0, "q": 0, "p": 0, "x": "1/2", "y": 0}]
    assert all(conformal_pushforward_check(FAM, lam, E, "1/(x^2+y^2)", pts))
