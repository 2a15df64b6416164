"""Thom-Whitney homotopy fibers of DGLA morphisms and of commutative squares.

A TW element is a pair (x, y(t)) stored in ``Product(g0, g1[t])`` with
keys (0, k) and (1, form key).  A TW^2 element is a quadruple stored in
``Product(g00, g01[s], g10[t], g11[s,t])``: the first coordinate s runs
along the horizontal maps h0: g00 -> g01 and h1: g10 -> g11, the second
coordinate t along the vertical maps v0: g00 -> g10 and v1: g01 -> g11.
"""

from dataclasses import dataclass, field

from .dgla import AffAlgebra, EndAlgebra, check_morphism, complex_of, identity_on_keys
from .forms import FormAlgebra, forms_extend
from .graded import FiniteComplex, cohomology, shift
from .lie import LieMap, Product, sgn
from .linalg import ONE, nullspace_rows, sub
from .report import CheckResult


class FiberError(ValueError):
    pass


def _tag(tag, v):
    return {(tag, k): c for k, c in v.items()}


class TruncatedSubcomplex:
    """Members of a product of form algebras with polynomial degree <= bound.

    ``variables(deg)`` lists ambient keys of total degree ``deg`` within the
    bound; ``constraints(v)`` maps an ambient vector to a tagged vector that
    must vanish for members.
    """

    def __init__(self, ambient, degrees, variables, constraints):
        self.ambient = ambient
        self._degrees = sorted(degrees)
        self._vars = variables
        self._constraints = constraints
        self._cache = {}

    def _solve(self, deg):
        hit = self._cache.get(deg)
        if hit is None:
            keys = self._vars(deg)
            rows = {}
            for k in keys:
                for j, c in self._constraints({k: ONE}).items():
                    rows.setdefault(j, {})[k] = c
            free, basis = nullspace_rows(list(rows.values()), keys)
            hit = self._cache[deg] = (free, basis, {f: i for i, f in enumerate(free)})
        return hit

    def basis(self, deg):
        return self._solve(deg)[1]

    def coords(self, deg, v):
        _, _, pos = self._solve(deg)
        return {pos[k]: c for k, c in v.items() if k in pos}

    def dim(self, deg):
        return len(self.basis(deg))

    def finite_complex(self):
        return FiniteComplex(self._degrees, self.basis, self.coords, self.ambient.d)


class TWFiber:
    """TW(f) for a morphism f: g0 -> g1 of finite DGLAs."""

    def __init__(self, f, name="TW"):
        self.f = f
        self.g0, self.g1 = f.source, f.target
        self.forms = FormAlgebra(self.g1, 1)
        self.ambient = Product(self.g0, self.forms)
        self.name = name

    # element helpers
    def element(self, x, y):
        return self.ambient.pack(x, y)

    def parts(self, e):
        return self.ambient.component(e, 0), self.ambient.component(e, 1)

    def boundary_defect(self, e):
        x, y = self.parts(e)
        return _tag("at0", self.forms.restrict(y, 0, 0)) | _tag(
            "at1", sub(self.forms.restrict(y, 0, 1), self.f(x)))

    def is_member(self, e):
        return not self.boundary_defect(e)

    def check_member(self, e):
        bad = self.boundary_defect(e)
        if bad:
            raise FiberError(f"not a member of {self.name}: {bad}")

    def d(self, e):
        return self.ambient.d(e)

    def bracket(self, a, b):
        return self.ambient.bracket(a, b)

    def linear_path(self, x):
        """(x, t f(x))."""
        return self.element(x, self.forms.monomial(self.f(x), (1,)))

    # explicit quasi-isomorphisms for inclusions
    def is_key_inclusion(self):
        return all(self.f.image(k) == {k: ONE} for k in self.g0.basis)

    def to_quotient(self, e):
        """(x, y) -> integral of y, modulo g0."""
        if not self.is_key_inclusion():
            raise FiberError("tw_to_quotient needs f to be a basis inclusion")
        self.check_member(e)
        _, y = self.parts(e)
        g0keys = set(self.g0.basis)
        return {k: c for k, c in self.forms.integrate(y).items() if k not in g0keys}

    def from_quotient(self, x1):
        """Relative cocycle x1 -> (d x1, d(t x1))."""
        if not self.is_key_inclusion():
            raise FiberError("quotient_to_tw needs f to be a basis inclusion")
        dx = self.g1.d(x1)
        g0keys = set(self.g0.basis)
        if any(k not in g0keys for k in dx):
            raise FiberError("input is not a cocycle modulo g0")
        return self.element(dx, self.forms.d(self.forms.monomial(x1, (1,))))

    def quotient_complex(self):
        """(g1/g0)[-1] on the keys of g1 outside g0."""
        g0keys = set(self.g0.basis)
        keys = [k for k in self.g1.basis if k not in g0keys]
        Q = complex_of(_Quot(self.g1, g0keys), keys)
        return shift(Q, -1)

    # truncation
    def degrees(self):
        ds = {self.g0.degree(k) for k in self.g0.basis} | {self.g1.degree(k) for k in self.g1.basis}
        if not ds:
            return []
        return list(range(min(ds) - 1, max(ds) + 2))

    def truncated(self, bound):
        g0b = [k for k in self.g0.basis]
        g1b = [k for k in self.g1.basis]

        def variables(deg):
            out = [(0, k) for k in g0b if self.g0.degree(k) == deg]
            for k in g1b:
                for delta in (0, 1):
                    if self.g1.degree(k) + delta != deg:
                        continue
                    for a in range(0, bound - delta + 1):
                        out.append((1, ((a,), (delta,), k)))
            return out

        return TruncatedSubcomplex(self.ambient, self.degrees(), variables, self.boundary_defect)

    def functorial(self, other, phi0, phi1):
        """Map TW(self) -> TW(other) from a commuting pair (phi0, phi1)."""
        ext = forms_extend(phi1, self.forms, other.forms)

        def image(key):
            i, k = key
            if i == 0:
                return other.ambient.pack(phi0.image(k), {})
            return other.ambient.pack({}, ext.image(k))

        return LieMap(self.ambient, other.ambient, image, 0, "TW(phi)")


class _Quot:
    """Differential of g1 modulo a key subset, used to build quotient complexes."""

    def __init__(self, g, dropped):
        self.g, self.dropped = g, dropped

    def degree(self, k):
        return self.g.degree(k)

    def d_key(self, k):
        return {j: c for j, c in self.g.d_key(k).items() if j not in self.dropped}


@dataclass
class Square:
    """g00 -h0-> g01, g00 -v0-> g10, g10 -h1-> g11, g01 -v1-> g11."""

    g00: object
    g01: object
    g10: object
    g11: object
    h0: LieMap
    v0: LieMap
    h1: LieMap
    v1: LieMap
    name: str = "square"

    def commutes(self):
        for k in self.g00.basis:
            if sub(self.v1(self.h0.image(k)), self.h1(self.v0.image(k))):
                return CheckResult("square commutes", False, witness=k)
        return CheckResult("square commutes", True)

    def transpose(self):
        return Square(self.g00, self.g10, self.g01, self.g11, self.v0, self.h0, self.v1, self.h1,
                      name=f"{self.name}^T")

    def maps_checked(self):
        out = [self.commutes()]
        for f in (self.h0, self.v0, self.h1, self.v1):
            out.extend(check_morphism(f))
        return out


class TW2Fiber:
    """TW^2 of a commutative square, as quadruples with eight edge conditions."""

    def __init__(self, square, name="TW2"):
        chk = square.commutes()
        if not chk:
            raise FiberError(f"square does not commute at {chk.witness!r}")
        self.sq = square
        self.f01 = FormAlgebra(square.g01, 1)
        self.f10 = FormAlgebra(square.g10, 1)
        self.f11 = FormAlgebra(square.g11, 2)
        self.ambient = Product(square.g00, self.f01, self.f10, self.f11)
        self.h1s = forms_extend(square.h1, self.f10, FormAlgebra(square.g11, 1))
        self.v1s = forms_extend(square.v1, self.f01, FormAlgebra(square.g11, 1))
        self.name = name

    def element(self, w00, w01, w10, w11):
        return self.ambient.pack(w00, w01, w10, w11)

    def parts(self, e):
        return tuple(self.ambient.component(e, i) for i in range(4))

    def boundary_defect(self, e):
        w00, w01, w10, w11 = self.parts(e)
        sq, f11 = self.sq, self.f11
        out = {}
        out.update(_tag("01|0", self.f01.restrict(w01, 0, 0)))
        out.update(_tag("01|1", sub(self.f01.restrict(w01, 0, 1), sq.h0(w00))))
        out.update(_tag("10|0", self.f10.restrict(w10, 0, 0)))
        out.update(_tag("10|1", sub(self.f10.restrict(w10, 0, 1), sq.v0(w00))))
        out.update(_tag("11|s0", f11.restrict(w11, 0, 0)))
        out.update(_tag("11|s1", sub(f11.restrict(w11, 0, 1), self.h1s(w10))))
        out.update(_tag("11|t0", f11.restrict(w11, 1, 0)))
        out.update(_tag("11|t1", sub(f11.restrict(w11, 1, 1), self.v1s(w01))))
        return out

    def is_member(self, e):
        return not self.boundary_defect(e)

    def check_member(self, e):
        bad = self.boundary_defect(e)
        if bad:
            raise FiberError(f"not a member of {self.name}: {sorted(map(str, bad))[:4]}")

    def d(self, e):
        return self.ambient.d(e)

    def bracket(self, a, b):
        return self.ambient.bracket(a, b)

    def double_integral(self, e):
        return self.f11.integrate(self.parts(e)[3])

    def is_inclusion_square(self):
        sq = self.sq
        keys01, keys10 = set(sq.g01.basis), set(sq.g10.basis)
        return (all(sq.v1.image(k) == {k: ONE} for k in keys01)
                and all(sq.h1.image(k) == {k: ONE} for k in keys10))

    def to_double_quotient(self, e):
        """Integral of w11 over the square, modulo g01 + g10."""
        if not self.is_inclusion_square():
            raise FiberError("needs g01 and g10 included in g11 on keys")
        self.check_member(e)
        drop = set(self.sq.g01.basis) | set(self.sq.g10.basis)
        return {k: c for k, c in self.double_integral(e).items() if k not in drop}

    def quotient_complex(self):
        drop = set(self.sq.g01.basis) | set(self.sq.g10.basis)
        keys = [k for k in self.sq.g11.basis if k not in drop]
        return shift(complex_of(_Quot(self.sq.g11, drop), keys), -2)

    def degrees(self):
        sq = self.sq
        ds = set()
        for g in (sq.g00, sq.g01, sq.g10, sq.g11):
            ds |= {g.degree(k) for k in g.basis}
        if not ds:
            return []
        return list(range(min(ds) - 1, max(ds) + 3))

    def truncated(self, bound):
        sq = self.sq

        def variables(deg):
            out = [(0, k) for k in sq.g00.basis if sq.g00.degree(k) == deg]
            for idx, g in ((1, sq.g01), (2, sq.g10)):
                for k in g.basis:
                    delta = deg - g.degree(k)
                    if delta in (0, 1):
                        out.extend((idx, ((a,), (delta,), k)) for a in range(bound - delta + 1))
            for k in sq.g11.basis:
                extra = deg - sq.g11.degree(k)
                for ds_ in (0, 1):
                    dt_ = extra - ds_
                    if dt_ not in (0, 1):
                        continue
                    room = bound - ds_ - dt_
                    for a in range(room + 1):
                        for b in range(room - a + 1):
                            out.append((3, ((a, b), (ds_, dt_), k)))
            return out

        return TruncatedSubcomplex(self.ambient, self.degrees(), variables, self.boundary_defect)


# ---------------------------------------------------------------------------
# named constructions


def nested_tw(square):
    """TW(TW(h0) -> TW(h1)) with the vertical maps applied in the inner variable.

    Inner forms carry s, outer forms carry t.  Membership and the differential
    match TW^2 of the square under ``nested_to_tw2``.
    """
    top, bottom = TWFiber(square.h0, "TW(h0)"), TWFiber(square.h1, "TW(h1)")
    vert = top.functorial(bottom, square.v0, square.v1)
    return TWFiber(vert, name="TW(TW(h0)->TW(h1))")


def nested_to_tw2(e):
    """Re-index a nested element as a quadruple; dt moves past ds with sign (-1)^(dt ds)."""
    out = {}
    for (i, key), c in e.items():
        if i == 0:
            j, k = key
            out[(j, k)] = c
            continue
        (b,), (n,), (j, inner) = key
        if j == 0:
            out[(2, ((b,), (n,), inner))] = c
        else:
            (a,), (m,), k = inner
            out[(3, ((a, b), (m, n), k))] = sgn(m * n) * c
    return out


def tw2_to_nested(e):
    """Inverse of ``nested_to_tw2``."""
    out = {}
    for (i, key), c in e.items():
        if i in (0, 1):
            out[(0, (i, key))] = c
        elif i == 2:
            (b,), (n,), k = key
            out[(1, ((b,), (n,), (0, k)))] = c
        else:
            (a, b), (m, n), k = key
            out[(1, ((b,), (n,), (1, ((a,), (m,), k))))] = sgn(m * n) * c
    return out


def tw_fiber(f, name="TW"):
    return TWFiber(f, name)


def tw2_fiber(square, name="TW2"):
    return TW2Fiber(square, name)


def tw_to_quotient(fiber, e):
    return fiber.to_quotient(e)


def quotient_to_tw(fiber, x1):
    return fiber.from_quotient(x1)


def tw2_to_double_quotient(fiber, e):
    return fiber.to_double_quotient(e)


def zero_lie():
    from .dgla import DGLieAlgebra
    return DGLieAlgebra.from_pairs([], name="0")


def loop_space(g):
    """TW(0 -> g)."""
    return TWFiber(LieMap(zero_lie(), g, lambda k: {}, 0, "0"), name=f"Omega({g.name})")


@dataclass
class JacobianSquare:
    """End(V;F) -> End(V) over Aff(V;F) -> Aff(V), all maps identity on keys.

    Horizontal maps are the inclusions, vertical maps sigma_0.
    """

    V: object
    F: frozenset
    endF: EndAlgebra = field(init=False)
    end: EndAlgebra = field(init=False)
    affF: AffAlgebra = field(init=False)
    aff: AffAlgebra = field(init=False)
    square: Square = field(init=False)

    def __post_init__(self):
        self.F = frozenset(self.F)
        self.endF = EndAlgebra(self.V, (self.F,))
        self.end = EndAlgebra(self.V)
        self.affF = AffAlgebra(self.V, self.F)
        self.aff = AffAlgebra(self.V)
        self.square = Square(
            self.endF, self.end, self.affF, self.aff,
            identity_on_keys(self.endF, self.end, "incl"),
            identity_on_keys(self.endF, self.affF, "sigma0"),
            identity_on_keys(self.affF, self.aff, "incl"),
            identity_on_keys(self.end, self.aff, "sigma0"),
            name="J(V,F)",
        )

    def abel_jacobi_face(self):
        """The transposed square: End(V;F) -> Aff(V;F) over End(V) -> Aff(V)."""
        return self.square.transpose()


def jacobian(V, F):
    return JacobianSquare(V, F)


def grass(V, F):
    J = jacobian(V, F)
    return TWFiber(identity_on_keys(J.endF, J.end, "incl"), name="Grass(V,F)")


def q_bundle(V, F):
    J = jacobian(V, F)
    return TWFiber(identity_on_keys(J.affF, J.aff, "incl"), name="Q(V,F)")


def jac_fiber(V, F):
    return TW2Fiber(jacobian(V, F).square, name="Jac(V,F)")


def bundle_projection(qb, gr):
    pr0 = LieMap(qb.g0, gr.g0, lambda k: {k: ONE} if k[0] == "E" else {}, 0, "pr")
    pr1 = LieMap(qb.g1, gr.g1, lambda k: {k: ONE} if k[0] == "E" else {}, 0, "pr")
    return qb.functorial(gr, pr0, pr1)


def bundle_section(gr, qb, v=None):
    """Section Grass -> Q induced by sigma_v (v a closed degree-0 vector of F)."""
    v = v or {}
    end = gr.g1

    def sig(key):
        out = {key: ONE}
        for k, c in end.act({key: ONE}, v).items():
            out[("v", k)] = -c
        return out

    s0 = LieMap(gr.g0, qb.g0, sig, 0, "sigma")
    s1 = LieMap(gr.g1, qb.g1, sig, 0, "sigma")
    return gr.functorial(qb, s0, s1)


# ---------------------------------------------------------------------------
# cohomology of truncations


def default_bound(amplitude):
    return 2 * amplitude + 2


def tw_cohomology(fiber, degree_bound, only=None):
    """Truncated cohomology at the bound and bound+1 plus the quotient-side answer."""
    if degree_bound < 0:
        raise FiberError("degree bound must be >= 0")
    low = cohomology(fiber.truncated(degree_bound).finite_complex(), only)
    high = cohomology(fiber.truncated(degree_bound + 1).finite_complex(), only)
    out = {
        "bound": degree_bound,
        "dims": low.nonzero_dims(),
        "dims_next": high.nonzero_dims(),
        "stabilized": low.dims == high.dims,
        "heuristic": "stabilization compares bound and bound+1 only",
        "cohomology": low,
    }
    try:
        Q = fiber.quotient_complex()
        out["quotient_dims"] = cohomology(Q).nonzero_dims()
    except FiberError:
        out["quotient_dims"] = None
    return out


def bracket_on_cohomology(L, coh, target_coh):
    """Induced bracket on cohomology: {(p, i, q, j): coordinates in H^(p+q)}.

    ``coh`` supplies representatives; ``target_coh`` must contain their
    brackets (for truncations pass one computed at twice the bound).
    """
    out = {}
    degs = [d for d in coh.degrees() if coh.dims.get(d)]
    for p in degs:
        for q in degs:
            if (p + q) not in target_coh.dims:
                continue
            for i, a in enumerate(coh.reps[p]):
                for j, b in enumerate(coh.reps[q]):
                    br = L.bracket(a, b)
                    out[(p, i, q, j)] = target_coh.project(p + q, br) if br else ()
    return out


def bracket_vanishes(table):
    return all(not any(v) for v in table.values())


def truncated_bracket_check(fiber, bound):
    """Compute representatives at ``bound`` and test their brackets at 2*bound."""
    low = cohomology(fiber.truncated(bound).finite_complex())
    needed = {p + q for p in low.degrees() if low.dims.get(p)
              for q in low.degrees() if low.dims.get(q)}
    high = cohomology(fiber.truncated(2 * bound).finite_complex(), only=needed)
    table = bracket_on_cohomology(fiber.ambient, low, high)
    return table, bracket_vanishes(table)


def finite_bracket_check(L, basis=None):
    """Induced bracket on H* of a finite DGLA."""
    basis = list(basis if basis is not None else L.basis)
    coh = cohomology(complex_of(L, basis))
    table = bracket_on_cohomology(L, coh, coh)
    return table, bracket_vanishes(table)
