"""End-to-end acceptance suite; prints one [PASS]/[FAIL] line per criterion."""

from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE
from diracpreq.calculus import KVector, d
from diracpreq.checks import run_checks
from diracpreq.dirac import (
    adm_bracket,
    admissible_solve,
    char_dist_at_point,
    graph_two_form,
    integrability_check,
    is_basic,
)
from diracpreq.djacobi import diracization, graph_form_pair, graph_jacobi, reeb_solve
from diracpreq.errors import NotContact
from diracpreq.lebrun import LebrunFamily
from diracpreq.linpair import span_equal
from diracpreq.preq import build_Lbar, graded_char, poisson_jacobi_pair, preq_hamiltonian, pushforward_check

from helpers import all_preq, fixture


@contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        line = f"[FAIL] {label}"
        ACCEPTANCE.append(line)
        print(line)
        raise
    line = f"[PASS] {label}"
    ACCEPTANCE.append(line)
    print(line)


def fixture_checks(name, ids):
    m = fixture(name)
    for cid in ids:
        r = run_checks(m, only=cid)
        e = r.entries[0]
        assert e.verdict == "pass", f"{name}:{cid} -> {e.outcome} (expected {e.expected}) {e.witness}"


def test_example_2_6_suite():
    with criterion("degenerate presymplectic plane: ranks 0/2, x1^2 basic but not admissible, integrable"):
        L = fixture("example2_6").structures["L"]
        assert len(char_dist_at_point(L, {"x1": 1, "x2": 0})) == 0
        assert len(char_dist_at_point(L, {"x1": 0, "x2": 0})) == 2
        res = admissible_solve(L, "x1^2")
        assert res.status == "not_admissible" and res.factor == L.chart.scalar("x1")
        assert is_basic(L, "x1^2")
        assert integrability_check(L)
        fixture_checks("example2_6", ["graph-integrable", "char-rank-regular", "char-rank-degenerate",
                                      "x1sq-not-admissible", "x1sq-basic"])


def test_symplectic_plane():
    with criterion("symplectic plane: {x,y} = 1 on both graphs, graphs agree, Jacobi on 25 random triples"):
        m = fixture("symplectic_r2")
        W, P = m.structures["W"], m.structures["P"]
        one = W.chart.one
        assert adm_bracket(W, "x", "y") == one and adm_bracket(P, "x", "y") == one
        assert span_equal(W.frame, P.frame)
        fixture_checks("symplectic_r2", ["bracket-form", "bracket-bivector", "graphs-span-equal", "jacobi-random"])
        assert m.check("jacobi-random").args["count"] >= 25


def test_lbar_is_dirac_jacobi():
    with criterion("prequantization structure: integrable on all fixtures, matches presymplectic and Poisson graphs"):
        for key, data in all_preq().items():
            assert integrability_check(build_Lbar(data)), key
        for data in (fixture("symplectic_r2").preq["Q"], fixture("example2_6").preq["Q"]):
            sigma = data.sigma
            assert span_equal(build_Lbar(data).frame, graph_form_pair(d(sigma), sigma).frame)
        poisson = [(fixture("symplectic_r2").preq["QP"], fixture("symplectic_r2").tensors["lam"]),
                   (fixture("su2_kernel").preq["Q0"], fixture("su2_kernel").tensors["lam"]),
                   (fixture("su2_kernel").preq["Q1"], fixture("su2_kernel").tensors["lam"]),
                   (LebrunFamily().preq_r(), LebrunFamily().poisson_bivector())]
        for data, lam in poisson:
            J = graph_jacobi(*poisson_jacobi_pair(data, lam))
            assert span_equal(build_Lbar(data).frame, J.frame)


def test_torus_generator():
    with criterion("torus: characteristic generator is 2 x3 d1 - d2 - x3^2 d_theta"):
        data = fixture("torus_preq").preq["Q"]
        gens = graded_char(build_Lbar(data))
        assert len(gens) == 1 and gens[0][1].is_zero()
        want = KVector.from_list(data.Q, ["2*x3", "-1", "0", "-x3^2"])
        X = gens[0][0]
        ratio = X.components()[1] / want.components()[1]
        assert X == want * ratio
        fixture_checks("torus_preq", ["char-generator"])


def test_su2_kernel():
    with criterion("su(2)* dual, c in {0, 1}: hamiltonian of (ct - 1)/t vanishes"):
        for c in (0, 1):
            data = fixture("su2_kernel").preq[f"Q{c}"]
            assert data.pair.A == KVector.basis(data.chart, "t") * data.chart.scalar(f"{c}*t^2 - t")
            assert preq_hamiltonian(data, data.chart.scalar(f"({c}*t - 1)/t")).is_zero()
            fixture_checks("su2_kernel", [f"c{c}-kernel"])


def test_forward_map():
    with criterion("projection: every lifted base generator has a witness in every fixture"):
        for key, data in all_preq().items():
            assert pushforward_check(data) == [], key


def test_diracization():
    with criterion("Diracization: contact graph gives d(e^t sigma); U-embedding and e^t-homomorphism on 5 pairs"):
        m = fixture("diracization_contact")
        C = m.structures["C"]
        D = diracization(C)
        sigma = m.tensors["sigma"]
        assert span_equal(D.frame, graph_two_form(d(sigma.lift(D.chart) * D.chart.unit("et"))).frame)
        assert m.check("u-embedding").args["count"] >= 5 and m.check("et-homomorphism").args["count"] >= 5
        fixture_checks("diracization_contact", ["diracization-graph", "u-embedding", "et-homomorphism"])


def test_l_connection():
    with criterion("L-connection: curvature is tau Upsilon on all fixtures; agrees with the representation"):
        m = fixture("lconnection_suite")
        ids = [c.id for c in m.checks if c.op in ("curvature", "lconn_rep", "lconn_domain")]
        assert len([i for i in ids if i.startswith("curvature")]) == len(m.preq)
        for c in m.checks:
            if c.op == "lconn_rep":
                assert c.args.get("count", 5) >= 5
        fixture_checks("lconnection_suite", ids)


def test_representation_laws():
    with criterion("representation: commutator identity and grade additivity for grades -2..2"):
        ids = ["representation-sympl", "representation-su2c1", "grade-additivity-sympl"]
        fixture_checks("lconnection_suite", ids)
        fixture_checks("symplectic_r2", ["representation", "grade-additivity"])


def test_lebrun_suite():
    with criterion("LeBrun family: residuals, overlap, linearization, pinch, conformal pinch, contact samples"):
        fixture_checks("lebrun_glued", ["residual-s", "residual-s-glued", "residual-r", "overlap", "linearization"])
        m = fixture("lebrun_pinch")
        fixture_checks("lebrun_pinch", [c.id for c in m.checks])
        rs = {p["r"] for p in m.check("contact-samples").args["points"]}
        assert {1, 2} <= {float(r) for r in rs} and 0.5 in {float(r) for r in rs}


def test_negative_controls():
    with criterion("negative controls: non-closed form, non-Jacobi pair and non-contact form are all rejected"):
        r = integrability_check(fixture("symplectic_r2").structures["NotClosed"])
        assert not r and r.witness["triple"]
        assert not integrability_check(fixture("diracization_contact").structures["broken"])
        with pytest.raises(NotContact):
            reeb_solve(fixture("diracization_contact").tensors["du"])
        fixture_checks("symplectic_r2", ["not-closed-fails"])
        fixture_checks("diracization_contact", ["non-jacobi-fails", "non-contact-reeb"])
