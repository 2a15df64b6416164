from fractions import Fraction

import pytest

from dglalab.acceptance import corrupt_sub_cartan
from dglalab.cartan import (
    CartanError, CartanHomotopy, PeriodDatum, aj_cohomology, aj_value, aj_via_tw2,
    aj_well_defined, cartan_to_cone, check_aj_cube, check_cartan, check_form_extension, cohomology_injective,
    lift_iv, period_map_mc, period_obstruction_check, period_pair,
)
from dglalab.deformations import gauge_act
from dglalab.dgla import DGLieAlgebra, EndAlgebra, check_morphism
from dglalab.exact import artin_truncated_poly
from dglalab.forms import FormAlgebra, forms_extend
from dglalab.graded import CochainComplex, DGPair
from dglalab.lie import ArtinTensor, Cone, LieMap, sgn

CARTAN_FIXTURES = ["A1", "A2", "A3", "A4", "filtration", "obstructed_period"]


def _clean(v):
    return {k: c for k, c in v.items() if c}


@pytest.mark.parametrize("name", CARTAN_FIXTURES)
def test_fixture_cartan_homotopies(bundled, name):
    for c in bundled(name).cartans.values():
        bad = [r for r in check_cartan(c) if not r.passed]
        assert not bad, bad[0].as_dict()
        assert all(r.passed for r in check_morphism(cartan_to_cone(c)))


def test_noncommuting_homotopy_is_rejected():
    V = CochainComplex.from_pairs([("a", 0), ("b", 0)], {})
    g = DGLieAlgebra.from_pairs([("x", 1), ("y", 1)])
    E = EndAlgebra(V)
    c = CartanHomotopy(g, E, {"x": {("E", "a", "b"): Fraction(1)},
                              "y": {("E", "b", "a"): Fraction(1)}})
    failed = {r.name for r in check_cartan(c) if not r.passed}
    assert "[i_x, i_y] = 0" in failed


# ---- forms and cones


def _cone_of_forms_basis(g):
    return [(tag, ((a,), (m,), k)) for tag in "xb" for k in g.basis
            for a in range(2) for m in (0, 1)]


def _cone_forms_iso(g, signed):
    """cone(forms tensor g) -> forms tensor cone(g); flat(w x) -> (+-) w flat x."""
    src, tgt = Cone(FormAlgebra(g, 1)), FormAlgebra(Cone(g), 1)

    def image(key):
        tag, (e, m, k) = key
        s = sgn(sum(m)) if signed and tag == "b" else 1
        return {(e, m, (tag, k)): s}

    return LieMap(src, tgt, image, 0, "iso")


def test_cone_of_forms_needs_the_form_degree_sign(bundled):
    g = bundled("sl2").dglas["sl2"]
    basis = _cone_of_forms_basis(g)
    assert all(r.passed for r in check_morphism(_cone_forms_iso(g, True), basis))
    failed = {r.name for r in check_morphism(_cone_forms_iso(g, False), basis) if not r.passed}
    assert failed == {"iso: chain map", "iso: preserves brackets"}


def test_signed_form_extension_factors_through_the_cone_iso(bundled):
    c = bundled("A4").cartans["i"]
    Fs, FT = FormAlgebra(c.g, 1), FormAlgebra(c.target, 1)
    direct = cartan_to_cone(CartanHomotopy(Fs, FT, forms_extend(c.i, Fs, FT).image))
    via = forms_extend(cartan_to_cone(c), FormAlgebra(Cone(c.g), 1), FT)
    iso = _cone_forms_iso(c.g, True)
    for key in _cone_of_forms_basis(c.g):
        assert _clean(direct.image(key)) == _clean(via(iso.image(key)))
    assert check_form_extension(c).passed


# ---- period data


def test_period_pair_is_a_gauge_pair(bundled):
    fx = bundled("obstructed_period")
    pd = fx.periods["P"]
    A = artin_truncated_poly(1, 2)
    L = ArtinTensor(pd.g, A)
    x = L.lift({"a": Fraction(1)}, "eps")
    lx, a = period_pair(pd, A, x)
    LE = ArtinTensor(pd.cartan.target, A)
    assert _clean(gauge_act(LE, a, {})) == _clean(lx)
    F_A, ix = period_map_mc(pd, A, x)
    assert F_A.is_free() and F_A.is_subcomplex()


def test_period_map_rejects_non_mc(bundled):
    pd = bundled("obstructed_period").periods["P"]
    A = artin_truncated_poly(1, 3)
    with pytest.raises(CartanError):
        period_map_mc(pd, A, ArtinTensor(pd.g, A).lift({"a": Fraction(1)}, "eps"))


def test_obstruction_is_killed_by_the_period_map(bundled):
    pd = bundled("obstructed_period").periods["P"]
    results = period_obstruction_check(pd)
    assert [r.name for r in results] == ["H^2(i) kills the obstruction"]
    assert results[0].passed
    assert any(results[0].detail["class"])


def test_cohomology_injectivity():
    V = CochainComplex.from_pairs([("a", 0), ("b", 1)], {"a": {"b": 1}})
    assert not cohomology_injective(DGPair(V, {"b"}))
    W = CochainComplex.from_pairs([("e0", 0), ("f0", 0), ("e1", 1)], {})
    assert cohomology_injective(DGPair(W, {"e0", "e1"}))


def test_period_obstruction_needs_injectivity(bundled):
    pd = bundled("obstructed_period").periods["P"]
    V = CochainComplex.from_pairs([("e0", 0), ("f0", 1)], {"e0": {"f0": 1}})
    bad = PeriodDatum(pd.g, DGPair(V, {"f0"}), pd.cartan)
    with pytest.raises(CartanError):
        period_obstruction_check(bad)


# ---- Abel-Jacobi in cohomology


def test_aj_on_a1(bundled):
    D = bundled("A1").ajdata["D"]
    res = aj_cohomology(D)
    assert res["matrix"] == {(1, 0): (Fraction(-1),)}
    assert res["values"] == {(1, 0): {"f0": Fraction(-1)}}
    assert aj_well_defined(D).passed


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4"])
def test_aj_data_and_cube(bundled, name):
    D = bundled(name).ajdata["D"]
    assert all(r.passed for r in D.check())
    assert all(r.passed for r in check_aj_cube(D))
    assert aj_well_defined(D).passed


def test_corrupted_cartan_breaks_the_cube(bundled):
    D = corrupt_sub_cartan(bundled("A2").ajdata["D"])
    failed = [r for r in check_aj_cube(D) if not r.passed]
    assert failed and failed[0].witness is not None


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4"])
def test_tw2_representative_integrates_to_aj(bundled, name):
    D = bundled(name).ajdata["D"]
    res = aj_cohomology(D)
    for (p, j), x in ((k, res["source"].reps[k[0]][k[1]]) for k in res["values"]):
        val, fiber, e = aj_via_tw2(D, x)
        assert fiber.is_member(e)
        assert not _clean(fiber.d(e))
        assert _clean(val) == _clean(aj_value(D, x))


def test_lifted_homotopy_translates_by_minus_i_of_v(bundled):
    D = bundled("A1").ajdata["D"]
    iv = lift_iv(D.cartan, D.v)
    assert iv.i.image("x") == {("E", "f0", "e0"): 1, ("v", "f0"): -1}
    assert all(r.passed for r in check_cartan(iv, form_samples=False))
    with pytest.raises(CartanError):
        lift_iv(D.cartan, {"e1": Fraction(1)})
