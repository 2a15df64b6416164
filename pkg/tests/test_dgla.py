from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dglalab.dgla import (
    AffAlgebra, DGLieAlgebra, EndAlgebra, check_aff_matrix_model, check_cone_relations,
    check_dgla, check_morphism, dgla_fiber_product, dgla_kernel, identity_on_keys, sigma_v,
)
from dglalab.graded import CochainComplex
from dglalab.lie import Cone


def _ok(results):
    bad = [r for r in results if not r.passed]
    assert not bad, bad[0].as_dict()


# V: a0 -> b1, plus a free a1 and c0, so End(V) has degrees -1..1
V = CochainComplex.from_pairs([("a", 0), ("c", 0), ("b", 1), ("e", 1)], {"a": {"b": 1}})
F = {"b", "e"}


def _matrix(x, basis):
    pos = {k: i for i, k in enumerate(basis)}
    M = sympy.zeros(len(basis))
    for (_, a, b), c in x.items():
        M[pos[a], pos[b]] += sympy.Rational(c.numerator, c.denominator)
    return M


def _dV(basis):
    pos = {k: i for i, k in enumerate(basis)}
    M = sympy.zeros(len(basis))
    for n in basis:
        for k, c in V.d_basis(n).items():
            M[pos[k], pos[n]] += c
    return M


@pytest.mark.parametrize("subs", [(), (F,)])
def test_end_axioms(subs):
    _ok(check_dgla(EndAlgebra(V, subs)))


def test_aff_axioms_and_matrix_model():
    for L in (AffAlgebra(V), AffAlgebra(V, F)):
        _ok(check_dgla(L))
        assert check_aff_matrix_model(L).passed


def test_end_matches_matrix_commutator():
    E = EndAlgebra(V)
    basis = list(V.basis)
    D = _dV(basis)
    for a, b in product(E.basis, repeat=2):
        A, B = _matrix({a: Fraction(1)}, basis), _matrix({b: Fraction(1)}, basis)
        s = -1 if E.degree(a) * E.degree(b) % 2 else 1
        assert _matrix(E.bracket_keys(a, b), basis) == A * B - s * B * A
    for a in E.basis:
        A = _matrix({a: Fraction(1)}, basis)
        assert _matrix(E.d_key(a), basis) == D * A - (-1 if E.degree(a) % 2 else 1) * A * D


def test_preserving_keys_are_exactly_the_preserving_matrices():
    E = EndAlgebra(V, (F,))
    for a, b in product(V.basis, repeat=2):
        allowed = ("E", a, b) in E.basis
        assert allowed == (b not in F or a in F)


def test_sigma_v_is_a_morphism():
    W = CochainComplex.from_pairs([("u", 0), ("w", 0), ("z", 1)], {"w": {"z": 1}})
    f = sigma_v(W, {"u": Fraction(1)}, {"u", "z"})
    _ok(check_morphism(f))
    with pytest.raises(ValueError):
        sigma_v(V, {"e": Fraction(1)})


def test_cone_relations_and_axioms():
    g = DGLieAlgebra.from_pairs([("h", 0), ("x", 0), ("y", 0)],
                                table={("h", "x"): {"x": 2}, ("h", "y"): {"y": -2},
                                       ("x", "y"): {"h": 1}})
    C = Cone(g)
    _ok(check_dgla(C))
    assert check_cone_relations(C).passed
    _ok(check_dgla(Cone(EndAlgebra(V))))


def test_flipped_cone_sign_is_caught():
    class Flipped(Cone):
        def d_basis(self, key):
            out = super().d_basis(key)
            if key[0] == "b":
                return {k: (c if k[0] == "x" else -c) for k, c in out.items()}
            return out

    C = Flipped(EndAlgebra(V))
    assert not check_cone_relations(C).passed


def test_asymmetric_table_is_caught():
    g = DGLieAlgebra.from_pairs([("x", 0), ("y", 0)],
                                table={("x", "y"): {"x": 1}, ("y", "x"): {"x": 1}})
    assert any(not r.passed for r in check_dgla(g))


def test_kernel_and_fiber_product():
    E, EF = EndAlgebra(V), EndAlgebra(V, (F,))
    incl = identity_on_keys(EF, E)
    S, p0, p1 = dgla_fiber_product(incl, incl)
    _ok(check_dgla(S))
    assert len(S.basis) == len(EF.basis)
    _ok(check_morphism(p0))
    aff = AffAlgebra(V)
    drop_v = identity_on_keys(aff, aff)
    K = dgla_kernel(drop_v)
    assert K.basis == []


coeff = st.integers(-3, 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(coeff, min_size=16, max_size=16))
def test_jacobi_on_random_elements(cs):
    E = EndAlgebra(V)
    by_deg = {}
    for k in E.basis:
        by_deg.setdefault(E.degree(k), []).append(k)
    it = iter(cs)
    x, y, z = ({k: Fraction(c) for k in by_deg[d] if (c := next(it))} for d in (0, 1, -1))
    dx, dy = 0, 1
    lhs = E.bracket(x, E.bracket(y, z))
    r1 = E.bracket(E.bracket(x, y), z)
    r2 = E.bracket(y, E.bracket(x, z))
    s = -1 if dx * dy % 2 else 1
    for k, c in r2.items():
        r1[k] = r1.get(k, 0) + s * c
    assert _clean(lhs) == _clean(r1)


def _clean(w):
    return {k: c for k, c in w.items() if c}
