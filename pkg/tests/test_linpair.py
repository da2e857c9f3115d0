from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracpreq.calculus import KForm, KVector
from diracpreq.dirac import graph_bivector, graph_two_form
from diracpreq.errors import KindMismatch, MinusPairingUndefinedForE1, NotIsotropic, NotSmooth, RankNotCertified
from diracpreq.linpair import CouSection, E1Section, linear_image, pairing, span_equal, validate_frame
from diracpreq.scalar import Chart

R1 = Chart("R1", ["x"])
R2 = Chart("R2", ["x", "y"])
R3 = Chart("R3", ["x", "y", "z"])
P = Chart("P", ["x1", "x2"])


def cou(chart, X, xi):
    return CouSection(KVector.from_list(chart, X), KForm.from_list(chart, xi))


def e1(chart, X, f, xi, g):
    return E1Section(KVector.from_list(chart, X), chart.scalar(f), KForm.from_list(chart, xi), chart.scalar(g))


def test_plus_pairing_examples():
    assert pairing(cou(R2, [1, 0], [0, 1]), cou(R2, [0, 1], [1, 0])) == R2.one
    a = e1(R1, [0], 1, [0], 0)
    b = e1(R1, [0], 0, [0], 1)
    assert pairing(a, b) == R1.scalar("1/2")


def test_minus_pairing_antisymmetric():
    e = cou(R2, ["x", "y^2"], ["x*y", 3])
    assert pairing(e, e, "minus").is_zero()
    f = cou(R2, [1, "x"], [0, "y"])
    assert pairing(e, f, "minus") == -pairing(f, e, "minus")
    with pytest.raises(MinusPairingUndefinedForE1):
        pairing(e1(R1, [0], 1, [0], 0), e1(R1, [0], 1, [0], 0), "minus")
    with pytest.raises(KindMismatch):
        pairing(e, e1(R2, [0, 0], 1, [0, 0], 0))


def test_valid_frames():
    validate_frame([cou(R2, [1, 0], [0, 1]), cou(R2, [0, 1], [-1, 0])])
    validate_frame([cou(P, [1, 0], [0, "x1^2"]), cou(P, [0, 1], ["-x1^2", 0])])


def test_not_isotropic_reports_pair():
    with pytest.raises(NotIsotropic) as err:
        validate_frame([cou(R1, [1], [1])])
    assert err.value.data["pair"] == (0, 0)


def test_rank_and_smoothness_refusals():
    with pytest.raises(RankNotCertified):
        validate_frame([cou(R2, [1, 0], [0, 0])])
    with pytest.raises(RankNotCertified):
        validate_frame([cou(R2, ["x", 0], [0, 0]), cou(R2, [0, 1], [0, 0])])
    with pytest.raises(NotSmooth):
        validate_frame([cou(R2, [1, 0], [0, "1/x"]), cou(R2, [0, 1], ["-1/x", 0])])


def test_forward_image_under_identity():
    L = graph_two_form(KForm.from_names(R2, {"dx^dy": 1}))
    img = linear_image(L.frame, [[1, 0], [0, 1]], "forward", R2)
    assert span_equal(img, L.frame)


def test_backward_image_along_x_axis():
    L = graph_bivector(KVector.from_names(R2, {"x^y": 1}))
    img = linear_image(L.frame, [[1], [0]], "backward", R1)
    # enumerate {Y + i*xi : iY + xi in L} by hand: only Y = d_x with xi = dy, i*dy = 0
    assert span_equal(img, validate_frame([cou(R1, [1], [0])]))


def test_forward_image_under_zero_map():
    L = graph_two_form(KForm.from_names(R3, {"dx^dy": 2, "dy^dz": -1}))
    img = linear_image(L.frame, [[0] * 3] * 3, "forward", R3)
    want = validate_frame([cou(R3, [0, 0, 0], v) for v in ([1, 0, 0], [0, 1, 0], [0, 0, 1])])
    assert span_equal(img, want)


def test_span_examples():
    w = graph_two_form(KForm.from_names(R2, {"dx^dy": 1}))
    perm = validate_frame(list(reversed(w.frame.sections)))
    assert span_equal(w.frame, perm)
    assert span_equal(w.frame, graph_bivector(KVector.from_names(R2, {"x^y": 1})).frame)
    r = span_equal(w.frame, graph_two_form(KForm.from_names(R2, {"dx^dy": 2})).frame)
    assert not r
    assert r.witness["reason"] == "not in span"


# --------------------------------------------------------- properties

rat = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def skew(n, vals):
    M = [[Fraction(0)] * n for _ in range(n)]
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j], M[j][i] = vals[k], -vals[k]
            k += 1
    return M


def constant_dirac(chart, vals, as_form):
    n = chart.dim
    M = skew(n, vals)
    names = chart.coord_names
    table = {(names[i], names[j]): M[i][j] for i in range(n) for j in range(i + 1, n)}
    if as_form:
        return graph_two_form(KForm.from_names(chart, table)).frame
    return graph_bivector(KVector.from_names(chart, table)).frame


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


@pytest.mark.parametrize("chart", [R2, R3], ids=["2x2", "3x3"])
@given(data=st.data())
def test_forward_image_is_functorial(chart, data):
    n = chart.dim
    vals = data.draw(st.lists(rat, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    frame = constant_dirac(chart, vals, data.draw(st.booleans()))
    A = data.draw(st.lists(st.lists(rat, min_size=n, max_size=n), min_size=n, max_size=n))
    B = data.draw(st.lists(st.lists(rat, min_size=n, max_size=n), min_size=n, max_size=n))
    step = linear_image(linear_image(frame, A, "forward", chart), B, "forward", chart)
    once = linear_image(frame, matmul(B, A), "forward", chart)
    assert span_equal(step, once)


@given(data=st.data())
def test_frames_are_isotropic(data):
    vals = data.draw(st.lists(rat, min_size=3, max_size=3))
    frame = constant_dirac(R3, vals, data.draw(st.booleans()))
    for a in frame:
        for b in frame:
            assert pairing(a, b).is_zero()


def recombine(frame, M):
    secs = []
    for row in M:
        acc = CouSection.zero(frame.chart)
        for c, s in zip(row, frame):
            acc = acc + s * frame.chart.scalar(c)
        secs.append(acc)
    return validate_frame(secs)


invertible = st.builds(
    lambda a, b, swap: matmul([[0, 1], [1, 0]] if swap else [[1, 0], [0, 1]], matmul([[1, a], [0, 1]], [[1, 0], [b, 1]])),
    st.integers(-2, 2), st.integers(-2, 2), st.booleans())


@given(st.lists(rat, min_size=1, max_size=1), invertible, invertible, st.booleans())
def test_span_equal_is_an_equivalence(vals, M, N, as_form):
    a = constant_dirac(R2, vals, as_form)
    b = recombine(a, M)
    c = recombine(b, N)
    assert span_equal(a, a)
    assert bool(span_equal(a, b)) and bool(span_equal(b, a))
    assert bool(span_equal(b, c)) and bool(span_equal(a, c))
    other = constant_dirac(R2, [vals[0] + 1], True)
    assert bool(span_equal(a, other)) == bool(span_equal(other, a))
