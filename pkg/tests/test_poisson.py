import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonkit.exprcore import ONE, ZERO, Chart, NonZero, SymbolicZero, Var, evaluate, parse, simplify
from poissonkit.multivec import apply_vector, bivector, covector, pair, vector_field, zero_field
from poissonkit.poisson import (
    PoissonChart,
    bracket,
    casimir_drift,
    casimir_screen,
    check_jacobi,
    coordinate_jacobiators,
    flow,
    hamiltonian_field,
    jacobi_cross_check,
    jacobiator_magnitude_at,
    numeric_rank,
    rank_at,
    sharp,
)
from strategies import polynomials

QP = Chart("qp", ("q", "p"))
CANON = PoissonChart(QP, bivector(QP, [("q", "p", 1)]))
XYZ = Chart("xyz", ("x", "y", "z"))
PERTURBED = PoissonChart(XYZ, bivector(XYZ, [("x", "y", "z^2"), ("y", "z", "x"), ("z", "x", "y")]))
CYCLIC = PoissonChart(XYZ, bivector(XYZ, [("x", "y", "x"), ("y", "z", "y"), ("z", "x", "z")]))


def E(text):
    return simplify(parse(text))


def test_bracket_examples(gstar):
    assert bracket(gstar, Var("a"), Var("b")) == E("a*b")
    assert bracket(gstar, parse("log(a)"), parse("log(b)")) == ONE
    f = parse("a^2*exp(b)")
    assert bracket(gstar, f, f) == ZERO


def test_sharp_examples(gstar):
    c = gstar.chart
    assert sharp(gstar, covector(c, ["1/a", "0"])) == vector_field(c, {"b": "b"})
    assert sharp(gstar, covector(c, ["0", "1/a"])) == vector_field(c, {"a": "-b"})
    assert sharp(gstar, covector(c, ["0", "0"])).is_zero()


def test_hamiltonian_examples(gstar):
    assert hamiltonian_field(CANON, Var("q")) == vector_field(QP, {"p": 1})
    assert hamiltonian_field(CANON, Var("p")) == vector_field(QP, {"q": -1})
    assert hamiltonian_field(gstar, Var("a")) == vector_field(gstar.chart, {"b": "a*b"})


def test_hamiltonian_field_acts_as_bracket(gstar):
    f, g = parse("a^2*b"), parse("exp(b)/a")
    X = hamiltonian_field(gstar, f)
    assert simplify(apply_vector(X, g) - bracket(gstar, f, g)) == ZERO


def test_jacobi_examples(gstar, so3):
    assert isinstance(check_jacobi(gstar), SymbolicZero)
    assert isinstance(check_jacobi(so3), SymbolicZero)


def test_cyclic_bivector_fails_with_witness():
    v = check_jacobi(CYCLIC)
    assert isinstance(v, NonZero)
    assert jacobiator_magnitude_at(CYCLIC, v.witness) > 1e-6
    assert not jacobi_cross_check(CYCLIC).jacobiator.is_zero


def test_perturbed_bivector_is_poisson():
    # curl(x, y, z^2) = 0, so the z^2 perturbation still satisfies Jacobi
    assert isinstance(check_jacobi(PERTURBED), SymbolicZero)
    assert all(simplify(j) == ZERO for j in coordinate_jacobiators(PERTURBED).values())


@pytest.mark.parametrize("P", [CANON, CYCLIC, PERTURBED], ids=["canon", "cyclic", "perturbed"])
def test_two_jacobi_paths_agree(P):
    assert jacobi_cross_check(P).agree


def test_rank_examples(gstar):
    assert rank_at(gstar, (1, 0)) == 0
    assert rank_at(gstar, (1, 1)) == 2
    QPY = Chart("qpy", ("q", "p", "y"))
    P = PoissonChart(QPY, bivector(QPY, [("q", "p", 1)]))
    for pt in [(0, 0, 0), (1, -2, 5)]:
        assert rank_at(P, pt) == 2


def test_numeric_rank():
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank([[1, 2], [2, 4]]) == 1
    assert numeric_rank([[1e-11, 0], [0, 1]]) == 1
    assert numeric_rank(np.eye(4)) == 4


def test_so3_rank_off_origin(so3):
    assert rank_at(so3, (0, 0, 0)) == 0
    assert rank_at(so3, (0.3, -1, 2)) == 2


def test_flow_examples(so3):
    assert flow(zero_field(QP, 1), (0.5, 0.5), 1.0, 0.1).end == (0.5, 0.5)
    fr = flow(vector_field(QP, {"q": 1}), (0, 0), 1.0, 1e-3)
    assert fr.end == pytest.approx((1, 0), abs=1e-9)
    fr = flow(hamiltonian_field(so3, Var("x")), (0, 1, 0), 1.0, 1e-3)
    assert not fr.escaped
    assert casimir_drift(so3, parse("x^2 + y^2 + z^2"), [fr]) < 1e-6


def test_flow_backwards_and_escape(gstar):
    fr = flow(vector_field(QP, {"q": 1}), (0, 0), -1.0, 1e-2)
    assert fr.end == pytest.approx((-1, 0), abs=1e-9)
    # da/dt = -1 leaves a > 0 in finite time
    esc = flow(vector_field(gstar.chart, {"a": -1}), (0.5, 0), 2.0, 1e-2)
    assert esc.escaped and esc.end[0] > 0
    blow = flow(vector_field(QP, {"q": "q^2"}), (1, 0), 2.0, 1e-3)
    assert blow.escaped


def test_casimir_examples(so3, gstar):
    assert casimir_drift(so3, parse("7"), [flow(hamiltonian_field(so3, Var("y")), (1, 0, 0), 0.5, 1e-2)]) == 0
    assert all(casimir_screen(so3, parse("x^2 + y^2 + z^2")).values())
    assert not all(casimir_screen(gstar, Var("b")).values())


def test_rank_constant_along_flow(so3):
    fr = flow(hamiltonian_field(so3, parse("x + y*z")), (0.3, 0.7, -0.2), 1.0, 1e-2)
    assert {rank_at(so3, p) for p in fr.points} == {2}


# --- properties ---------------------------------------------------------------

SETTINGS = settings(max_examples=40, deadline=None)
POLY = polynomials(["x", "y", "z"], max_leaves=4)


@SETTINGS
@given(POLY, POLY, POLY)
def test_bracket_antisymmetric_and_leibniz(f, g, h):
    P = PoissonChart(XYZ, bivector(XYZ, [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]))
    assert simplify(bracket(P, f, g) + bracket(P, g, f)) == ZERO
    leib = bracket(P, f, g * h) - (bracket(P, f, g) * h + g * bracket(P, f, h))
    assert simplify(leib) == ZERO
    for pt in XYZ.sample_points(20, np.random.default_rng(3)):
        lhs = evaluate(bracket(P, f, g * h), XYZ, pt)
        rhs = evaluate(bracket(P, f, g), XYZ, pt) * evaluate(h, XYZ, pt) + evaluate(g, XYZ, pt) * evaluate(bracket(P, f, h), XYZ, pt)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@SETTINGS
@given(st.lists(POLY, min_size=3, max_size=3), st.lists(POLY, min_size=3, max_size=3))
def test_sharp_is_skew(a, b):
    alpha, beta = covector(XYZ, a), covector(XYZ, b)
    for P in (CYCLIC, PERTURBED):
        assert simplify(pair(beta, sharp(P, alpha)) + pair(alpha, sharp(P, beta))) == ZERO
