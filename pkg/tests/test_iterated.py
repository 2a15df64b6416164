from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dglalab.deformations import mc_lift_probe, pair_problem
from dglalab.dgla import FiniteLie
from dglalab.exact import UNIT, artin_truncated_poly
from dglalab.graded import CochainComplex
from dglalab.iterated import (
    PipelineError, ainfty_relation_check, aj_pipeline, bar_square_check,
    build_b_module, check_module, closed_form_corrected, closed_form_printed, end_module,
    functoriality_check, int_infty, iterint, iterint_closed_form_check, iterint_lemma_checks,
    iterint_monomials, lemma_item, pipeline_first_order_check, poly, q2_unshifted,
    sform_module, symmetrize_linfty, tensor_of,
)

T = sympy.Symbol("t")

small_polys = st.lists(st.integers(-3, 3), min_size=1, max_size=3).map(lambda cs: poly(*cs))


def _sympy_iterint(polys):
    ts = sympy.symbols(f"t1:{len(polys) + 1}")
    expr = sympy.Integer(1)
    for p, t in zip(polys, ts):
        expr *= sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(p))
    # innermost t1 from 0 to t2, ..., outermost tn from 0 to 1
    for i, t in enumerate(ts):
        upper = ts[i + 1] if i + 1 < len(ts) else 1
        expr = sympy.integrate(expr, (t, 0, upper))
    return Fraction(str(expr))


@settings(max_examples=40, deadline=None)
@given(st.lists(small_polys, min_size=1, max_size=3))
def test_iterint_matches_sympy(polys):
    assert iterint(*polys) == _sympy_iterint(polys)


def test_iterint_monomial_closed_form():
    results = iterint_closed_form_check(4, 4)
    assert all(r.passed for r in results)
    assert closed_form_corrected((0, 0)) == Fraction(1, 2)
    assert closed_form_printed((0, 0)) == 1
    assert iterint_monomials((1, 2)) == Fraction(1, 2 * 5)


def test_integration_by_parts_items():
    assert all(r.passed for r in iterint_lemma_checks(200, seed=3))
    p = poly(0, 1, -1)
    lhs, rhs = lemma_item(3, p, [poly(1), poly(0, 2)])
    assert lhs == rhs
    with pytest.raises(ValueError):
        lemma_item(1, poly(1), [poly(1)])


P1 = CochainComplex.from_pairs([("e0", 0), ("f0", 0), ("e1", 1)], {})
P2 = CochainComplex.from_pairs([("u0", 0), ("w0", 0), ("u1", 1), ("w1", 1)], {"w0": {"u1": 1}})


@pytest.mark.parametrize("dm", [end_module(P2), end_module(P2, {"u0", "u1"}),
                                sform_module(end_module(P1))])
def test_module_axioms(dm):
    bad = [r for r in check_module(dm) if not r.passed]
    assert not bad, bad[0].as_dict()


def test_bar_differential_squares_to_zero():
    B = build_b_module(end_module(P2))
    assert bar_square_check(B, samples=150, max_len=3, max_polydeg=3).passed
    assert bar_square_check(B, samples=150, q2_sign=q2_unshifted).passed


def test_ainfty_relations_small():
    B = build_b_module(end_module(P2))
    assert ainfty_relation_check(B, 2, 3).passed
    assert not ainfty_relation_check(B, 2, 2, q2_sign=q2_unshifted).passed


def test_int_infty_on_one_factor_integrates():
    B = build_b_module(end_module(P1))
    # t^2 dt tensor e0 in S1 integrates to e0/3
    assert int_infty(B, tensor_of({("M", "e0", 2, 1): Fraction(1)})) == {"e0": Fraction(1, 3)}
    a = {("A", ("E", "f0", "e0"), 1, 1): Fraction(1)}
    m = {("M", "e0", 0, 1): Fraction(1)}
    # iterated integral of t dt then dt over the ordered simplex is 1/(2*3)
    assert int_infty(B, tensor_of(a, m)) == {"f0": Fraction(1, 6)}


def test_functoriality():
    assert functoriality_check(P2, {"u0", "u1"}, max_len=2, max_polydeg=2).passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetrization_of_repeated_even_input(n):
    B = build_b_module(end_module(P1))
    x = {("A", ("E", "f0", "e0"), 1, 1): Fraction(1)}
    y = {("A", ("E", "f0", "f0"), 0, 1): Fraction(1)}
    for z in (x, y):
        xs = [z] * n
        expected = {k: factorial(n) * c for k, c in int_infty(B, tensor_of(*xs)).items()}
        assert symmetrize_linfty(B, xs) == expected


def test_symmetrization_of_repeated_odd_input_vanishes():
    B = build_b_module(end_module(P1))
    x = {("A", ("E", "f0", "e0"), 1, 0): Fraction(1)}   # shifted degree -1
    assert symmetrize_linfty(B, [x, x], map_=lambda t: t) == {}


# ---- the pipeline


def _lift(datum, x0, order):
    g = datum.g
    problem = pair_problem(FiniteLie(g, [k for k in g.basis if k in datum.sub]), g)
    A = artin_truncated_poly(1, order)
    res = mc_lift_probe(problem, x0, order)
    assert res["lifted"]
    x = {}
    for k, v in res["coefficients"].items():
        for j, c in v.items():
            x[(j, A.basis[k - 1])] = x.get((j, A.basis[k - 1]), 0) + c
    return A, x


@pytest.mark.parametrize("name", ["A3", "A4"])
def test_pipeline_first_order(bundled, name):
    D = bundled(name).ajdata["D"]
    for x0 in ({"u": Fraction(1)}, {"u": Fraction(-3)}):
        chk, res = pipeline_first_order_check(D, x0)
        assert chk.passed, chk.as_dict()
        assert all(c.passed for c in res["checks"])


@pytest.mark.parametrize("name,x0,expected", [
    ("A3", {"u": 1}, {("f", "eps"): -1}),
    ("A4", {"u": 1}, {("f", "eps"): -1, ("f2", "eps^2"): Fraction(1, 2)}),
    ("A4", {"w": 1}, {("f2", "eps"): -1}),
    ("A4", {"u": 1, "w": 1}, {("f", "eps"): -1, ("f2", "eps"): -1,
                              ("f2", "eps^2"): Fraction(1, 2)}),
])
def test_pipeline_second_order_outputs(bundled, name, x0, expected):
    D = bundled(name).ajdata["D"]
    A, x = _lift(D, {k: Fraction(v) for k, v in x0.items()}, 3)
    res = aj_pipeline(D, A, x)
    assert all(c.passed for c in res["checks"])
    assert res["output"] == expected


@pytest.mark.parametrize("c", [2, -1, Fraction(1, 3)])
def test_pipeline_commutes_with_rescaling_eps(bundled, c):
    # eps -> c eps is an automorphism of Q[eps]/eps^3, so the eps^k part scales by c^k
    D = bundled("A4").ajdata["D"]
    A, x = _lift(D, {"u": Fraction(1), "w": Fraction(2)}, 3)
    power = {"eps": 1, "eps^2": 2}
    scaled = {(k, m): v * Fraction(c) ** power[m] for (k, m), v in x.items()}
    base = aj_pipeline(D, A, x)["output"]
    out = aj_pipeline(D, A, scaled)["output"]
    assert out == {(k, m): v * Fraction(c) ** power[m] for (k, m), v in base.items()}


def test_pipeline_rejects_bad_inputs(bundled):
    D = bundled("A4").ajdata["D"]
    A = artin_truncated_poly(1, 3)
    with pytest.raises(PipelineError):
        aj_pipeline(D, A, {("u", UNIT): Fraction(1)})
