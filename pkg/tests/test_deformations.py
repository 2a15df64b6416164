from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dglalab.acceptance import brute_force_order2, p2_lift_report
from dglalab.deformations import (
    DeformationError, DeformedSubcomplex, OperatorRing, aff_gauge_closed_form, aut0_membership,
    bch, dgla_problem, gauge_act, mc_check, mc_lift_probe, phi_map, primary_obstruction, psi_map,
)
from dglalab.dgla import AffAlgebra, DGLieAlgebra, EndAlgebra
from dglalab.exact import UNIT, artin_truncated_poly
from dglalab.graded import CochainComplex
from dglalab.lie import ArtinTensor, Cone
from dglalab.linalg import axpy, scale

A3 = artin_truncated_poly(1, 3)
A4 = artin_truncated_poly(1, 4)

V = CochainComplex.from_pairs([("u0", 0), ("w0", 0), ("u1", 1), ("w1", 1)], {"w0": {"u1": 1}})
F = {"u0", "u1"}
END = EndAlgebra(V)
AFF = AffAlgebra(V)


def _clean(v):
    return {k: c for k, c in v.items() if c}


def picks(size=4):
    """(basis index, maximal-ideal index, coefficient) triples."""
    return st.lists(st.tuples(st.integers(0, 63), st.integers(0, 2), st.integers(-2, 2)),
                    max_size=size)


def _tensor(L, A, ps):
    keys = [k for k in L.base.basis if L.base.degree(k) == 0]
    out = {}
    for i, m, c in ps:
        if c:
            axpy(out, Fraction(c), {(keys[i % len(keys)], A.basis[m % A.dim]): Fraction(1)})
    return out


@settings(max_examples=60, deadline=None)
@given(picks(), picks())
def test_gauge_preserves_mc(pa, pb):
    L = ArtinTensor(END, A3)
    x = gauge_act(L, _tensor(L, A3, pb), {})
    assert mc_check(L, x)
    assert mc_check(L, gauge_act(L, _tensor(L, A3, pa), x))


@settings(max_examples=40, deadline=None)
@given(picks(), picks(), picks())
def test_gauge_action_composes_by_bch(pa, pb, px):
    L = ArtinTensor(END, A4)
    a, b = _tensor(L, A4, pa), _tensor(L, A4, pb)
    x = gauge_act(L, _tensor(L, A4, px), {})
    lhs = gauge_act(L, a, gauge_act(L, b, x))
    assert _clean(lhs) == _clean(gauge_act(L, bch(L, a, b), x))


@settings(max_examples=40, deadline=None)
@given(picks(), picks())
def test_bch_matches_operator_exponentials(pa, pb):
    # in degree 0 the bracket of End(V) tensor A is the commutator of operators
    L = ArtinTensor(END, A4)
    R = OperatorRing(END, A4)
    a, b = _tensor(L, A4, pa), _tensor(L, A4, pb)
    assert _clean(R.compose(R.exp(a), R.exp(b))) == _clean(R.exp(bch(L, a, b)))


def test_bch_low_order_terms():
    g = DGLieAlgebra.from_pairs([("x", 0), ("y", 0), ("z", 0), ("w", 0)],
                                table={("x", "y"): {"z": 1}, ("x", "z"): {"w": 1}})
    A = artin_truncated_poly(1, 4)
    L = ArtinTensor(g, A)
    a, b = L.lift({"x": Fraction(1)}, "eps"), L.lift({"y": Fraction(1)}, "eps")
    # X + Y + [X,Y]/2 + [X,[X,Y]]/12; [Y,[X,Y]] = 0 here
    expected = {("x", "eps"): 1, ("y", "eps"): 1, ("z", "eps^2"): Fraction(1, 2),
                ("w", "eps^3"): Fraction(1, 12)}
    assert bch(L, a, b) == expected


def test_flat_gauge_recovers_mc_element_in_cone():
    L = ArtinTensor(END, A3)
    x = gauge_act(L, L.lift({("E", "w0", "u0"): Fraction(1)}, "eps"), {})
    C = Cone(L)
    assert _clean(gauge_act(C, scale(-1, C.flat(x)), {})) == C.embed(x)


# ---- lifting on a DGLA with a known quadratic obstruction

_Q = DGLieAlgebra.from_pairs([("x", 1), ("y", 1), ("z", 2)], table={("x", "y"): {"z": 1}})


@pytest.mark.parametrize("first,lifts", [
    ({"x": Fraction(1)}, True), ({"y": Fraction(3)}, True),
    ({"x": Fraction(1), "y": Fraction(1)}, False),
])
def test_quadratic_obstruction(first, lifts):
    problem = dgla_problem(_Q)
    res = mc_lift_probe(problem, first, 4)
    assert res["lifted"] is lifts
    _, cls = primary_obstruction(problem, first)
    # 1/2 [x1, x1] = ab z for x1 = a x + b y
    ab = first.get("x", 0) * first.get("y", 0)
    assert tuple(cls) == (ab,)


def test_lift_probe_rejects_non_cocycles():
    g = DGLieAlgebra.from_pairs([("x", 1), ("z", 2)], d={"x": {"z": 1}})
    with pytest.raises(DeformationError):
        mc_lift_probe(dgla_problem(g), {"x": Fraction(1)}, 3)


def test_p2_grassmannian_lifts():
    rep = p2_lift_report()
    probes = rep["probes"]
    assert probes["pure u"]["lifted"] and probes["pure w"]["lifted"]
    mixed = probes["mixed u+w"]
    assert not mixed["lifted"] and mixed["order"] == 2
    assert tuple(mixed["obstruction_class"]) == (-1,)
    assert rep["search"]["found"] is None
    assert rep["search"]["tried"] == 3 ** rep["search"]["shift_rank"]


def test_brute_force_finds_lifts_for_pure_directions():
    rep = p2_lift_report()
    from dglalab.fibers import jacobian
    J = jacobian(V, F)
    found = brute_force_order2(rep["problem"], J, rep["probes"]["pure u"]["first_order"])
    assert found["found"] is not None


# ---- deformed subcomplexes


def test_phi_of_preserving_operator_is_trivial():
    endF = EndAlgebra(V, (F,))
    L = ArtinTensor(END, A3)
    xi = L.lift({("E", "u0", "u0"): Fraction(1), ("E", "u1", "w1"): Fraction(2)}, "eps")
    image = phi_map(endF, END, A3, xi)
    flat = DeformedSubcomplex(V, A3, [{(f, UNIT): Fraction(1)} for f in sorted(F)])
    assert image.same_as(flat)


def test_phi_of_first_order_direction_moves_f():
    endF = EndAlgebra(V, (F,))
    L = ArtinTensor(END, A3)
    xi = L.lift({("E", "w0", "u0"): Fraction(1)}, "eps")
    image = phi_map(endF, END, A3, xi)
    assert image.is_free() and image.is_subcomplex()
    flat = DeformedSubcomplex(V, A3, [{(f, UNIT): Fraction(1)} for f in sorted(F)])
    assert not image.same_as(flat)
    # e^{-xi} u0 = u0 - eps w0
    assert image.contains({("u0", UNIT): Fraction(1), ("w0", "eps"): Fraction(-1)})


def test_phi_sees_the_mixed_obstruction():
    endF = EndAlgebra(V, (F,))
    mixed = {("E", "w0", "u0"): Fraction(1), ("E", "w1", "u1"): Fraction(1)}
    A2 = artin_truncated_poly(1, 2)
    assert phi_map(endF, END, A2, ArtinTensor(END, A2).lift(mixed, "eps")).is_free()
    with pytest.raises(DeformationError):
        phi_map(endF, END, A3, ArtinTensor(END, A3).lift(mixed, "eps"))


def test_aff_gauge_matches_operator_closed_form():
    L = ArtinTensor(AFF, A3)
    xw = L.lift({("E", "w0", "u0"): Fraction(1), ("v", "w0"): Fraction(2),
                 ("v", "u1"): Fraction(-1)}, "eps")
    axpy(xw, Fraction(1), L.lift({("E", "u1", "w1"): Fraction(1), ("v", "u0"): Fraction(1)},
                                 "eps^2"))
    assert _clean(gauge_act(L, xw, {})) == _clean(aff_gauge_closed_form(AFF, A3, xw))


def test_psi_translation_class():
    affF = AffAlgebra(V, F)
    L = ArtinTensor(AFF, A3)
    xw = L.lift({("E", "w0", "u0"): Fraction(1), ("v", "u0"): Fraction(1)}, "eps")
    FA, v, cls, closed = psi_map(affF, AFF, A3, xw)
    # ((e^-xi - 1)/xi)(eps u0) = -eps u0 + eps^2 w0 / 2, and F_A contains u0 - eps w0
    assert v == {("u0", "eps"): Fraction(-1), ("w0", "eps^2"): Fraction(1, 2)}
    assert closed
    assert cls == {("w0", "eps^2"): Fraction(-1, 2)}


def test_aut0_detects_exact_operators():
    L = ArtinTensor(END, A3)
    zeta = L.lift({("E", "w0", "u1"): Fraction(1)}, "eps")
    ok, found = aut0_membership(END, A3, L.d(zeta))
    assert ok and _clean(L.d(found)) == _clean(L.d(zeta))
    closed_not_exact = L.lift({("E", "u0", "u0"): Fraction(1)}, "eps")
    assert aut0_membership(END, A3, closed_not_exact) == (False, None)
