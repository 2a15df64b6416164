from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from dglalab.graded import (
    CochainComplex, GradedError, cohomology, direct_sum, quotient_complex, shift, sub_complex,
    DGPair,
)
from dglalab.linalg import Echelon, fmt, kernel, nullspace_rows, rank, solve

small = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=r, max_size=r), min_size=c, max_size=c)))


def columns(cols):
    return [{i: Fraction(x) for i, x in enumerate(col) if x} for col in cols]


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_and_kernel_match_sympy(cols):
    images = columns(cols)
    M = sympy.Matrix(cols).T
    assert rank(images) == M.rank()
    ker = kernel(images)
    assert len(ker) + rank(images) == len(images)
    for z in ker:
        total = {}
        for j, c in z.items():
            for i, x in images[j].items():
                total[i] = total.get(i, 0) + c * x
        assert not any(total.values())


@settings(max_examples=80, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_agrees_with_membership(cols, coeffs):
    images = columns(cols)
    target = {}
    for j, c in enumerate(coeffs[:len(images)]):
        for i, x in images[j].items():
            target[i] = target.get(i, 0) + c * x
    target = {k: v for k, v in target.items() if v}
    sol = solve(images, target)
    assert sol is not None
    back = {}
    for j, c in sol.items():
        for i, x in images[j].items():
            back[i] = back.get(i, 0) + c * x
    assert {k: v for k, v in back.items() if v} == target


def test_solve_reports_inconsistent_systems():
    assert solve([{0: Fraction(1)}], {1: Fraction(1)}) is None


def test_echelon_contains_and_rank():
    e = Echelon()
    e.insert({"a": Fraction(1), "b": Fraction(2)})
    e.insert({"a": Fraction(2), "b": Fraction(4)})
    assert e.rank == 1
    assert e.contains({"a": Fraction(-3), "b": Fraction(-6)})
    assert not e.contains({"b": Fraction(1)})


def test_nullspace_rows_parametrize_by_free_variables():
    free, basis = nullspace_rows([{"x": 1, "y": -1}], ["x", "y", "z"])
    assert free == ["y", "z"]
    assert basis[0] == {"y": 1, "x": 1}


def test_fmt_is_canonical():
    assert fmt(Fraction(3)) == "3"
    assert fmt(Fraction(-2, 5)) == "-2/5"


@st.composite
def three_term_complexes(draw):
    n0, n1, n2 = (draw(st.integers(1, 4)) for _ in range(3))
    A = sympy.Matrix(n1, n0, lambda i, j: draw(small))
    null = A.T.nullspace()
    if null:
        R = sympy.Matrix(n2, len(null), lambda i, j: draw(small))
        B = R * sympy.Matrix.hstack(*null).T
    else:
        B = sympy.zeros(n2, n1)
    return n0, n1, n2, A, B


@settings(max_examples=60, deadline=None)
@given(three_term_complexes())
def test_cohomology_dimensions_match_rank_formula(data):
    n0, n1, n2, A, B = data
    pairs = [(f"a{i}", 0) for i in range(n0)] + [(f"b{i}", 1) for i in range(n1)]
    pairs += [(f"c{i}", 2) for i in range(n2)]
    d = {}
    for j in range(n0):
        d[f"a{j}"] = {f"b{i}": Fraction(int(A[i, j])) for i in range(n1) if A[i, j]}
    for j in range(n1):
        d[f"b{j}"] = {f"c{i}": Fraction(sympy.Rational(B[i, j]).p, sympy.Rational(B[i, j]).q)
                      for i in range(n2) if B[i, j]}
    H = cohomology(CochainComplex.from_pairs(pairs, d))
    rA, rB = A.rank(), B.rank()
    assert H.dims == {0: n0 - rA, 1: n1 - rB - rA, 2: n2 - rB}
    for deg, reps in H.reps.items():
        for j, z in enumerate(reps):
            coords = H.project(deg, z)
            assert coords[j] == 1 and sum(1 for c in coords if c) == 1


def test_rejects_non_complex():
    C = CochainComplex.from_pairs([("a", 0), ("b", 1), ("c", 2)],
                                  {"a": {"b": 1}, "b": {"c": 1}})
    try:
        cohomology(C)
    except GradedError as exc:
        assert "d^2" in str(exc)
    else:
        raise AssertionError("expected a d^2 failure")


def test_shift_and_sum():
    C = CochainComplex.from_pairs([("a", 0), ("b", 1)], {"a": {"b": 1}})
    S = shift(C, 1)
    assert S.degree("a") == -1 and S.d_basis("a") == {"b": -1}
    D = direct_sum(C, C, tags="xy")
    assert cohomology(D).nonzero_dims() == {}


def test_quotient_and_sub_complex():
    V = CochainComplex.from_pairs([("a", 0), ("b", 0), ("c", 1)], {"a": {"c": 1}})
    pair = DGPair(V, {"c"})
    Q, proj = quotient_complex(pair)
    assert cohomology(Q).nonzero_dims() == {0: 2}
    assert cohomology(sub_complex(pair)).nonzero_dims() == {1: 1}
    assert proj({"a": Fraction(1), "c": Fraction(2)}) == {"a": 1}


def test_pair_must_be_subcomplex():
    V = CochainComplex.from_pairs([("a", 0), ("c", 1)], {"a": {"c": 1}})
    try:
        DGPair(V, {"a"})
    except GradedError:
        pass
    else:
        raise AssertionError("a sub that is not d-closed must be rejected")
