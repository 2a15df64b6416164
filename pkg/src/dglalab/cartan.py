"""Cartan homotopies, period data and Abel-Jacobi data.

A Cartan homotopy i: g -> T has degree -1 and satisfies
    [i_x, i_y] = 0,   i_[x,y] = [i_x, d i_y],
so its boundary l = d i + i d is a DGLA morphism.  T is End(V), Aff(V)
or any other Lie structure with a differential.
"""

from dataclasses import dataclass
from itertools import product

from .deformations import OperatorRing, DeformedSubcomplex
from .dgla import AffAlgebra, check_morphism
from .exact import UNIT
from .forms import FormAlgebra, forms_extend
from .graded import DGPair, cohomology, quotient_complex, sub_complex
from .lie import ArtinTensor, Cone, LieMap, artin_extend
from .linalg import ONE, Echelon, axpy, scale, sub
from .report import CheckResult


class CartanError(ValueError):
    pass


class CartanHomotopy:
    def __init__(self, g, target, images, name="i"):
        self.g = g
        self.target = target
        self.name = name
        table = images if callable(images) else dict(images)
        get = table if callable(table) else (lambda k: table.get(k, {}))
        self.i = LieMap(g, target, get, -1, name)
        self.l = LieMap(g, target, self._boundary, 0, f"l[{name}]")

    def _boundary(self, key):
        out = self.target.d(self.i.image(key))
        axpy(out, ONE, self.i(self.g.d_key(key)))
        return out

    @property
    def V(self):
        return self.target.V


def check_cartan(c, form_samples=True):
    g, T = c.g, c.target
    basis = list(g.basis)
    out = []
    bad = None
    for k in basis:
        if any(T.degree(j) != g.degree(k) - 1 for j in c.i.image(k)):
            bad = {"basis": k}
            break
    out.append(CheckResult("i has degree -1", bad is None, witness=bad))
    bad = None
    for a, b in product(basis, repeat=2):
        v = T.bracket(c.i.image(a), c.i.image(b))
        if v:
            bad = {"pair": (a, b), "[i_a,i_b]": v}
            break
    out.append(CheckResult("[i_x, i_y] = 0", bad is None, witness=bad))
    bad = None
    for a, b in product(basis, repeat=2):
        lhs = c.i(g.bracket_keys(a, b))
        rhs = T.bracket(c.i.image(a), T.d(c.i.image(b)))
        if sub(lhs, rhs):
            bad = {"pair": (a, b), "i_[a,b]": lhs, "[i_a, d i_b]": rhs}
            break
    out.append(CheckResult("i_[x,y] = [i_x, d i_y]", bad is None, witness=bad))
    out.extend(check_morphism(c.l, basis))
    if form_samples:
        out.append(check_form_extension(c))
    return out


def check_form_extension(c, max_exp=1):
    """The extension w (x) x -> (-1)^|w| w (x) i_x satisfies the identities again."""
    Fg, FT = FormAlgebra(c.g, 1), FormAlgebra(c.target, 1)
    ext = forms_extend(c.i, Fg, FT)
    keys = [((a,), (dl,), k) for k in c.g.basis for a in range(max_exp + 1) for dl in (0, 1)]
    for x, y in product(keys, repeat=2):
        ix, iy = ext.image(x), ext.image(y)
        if FT.bracket(ix, iy):
            return CheckResult("form extension of i is Cartan", False, witness={"pair": (x, y)})
        lhs = ext(Fg.bracket_keys(x, y))
        rhs = FT.bracket(ix, FT.d(iy))
        if sub(lhs, rhs):
            return CheckResult("form extension of i is Cartan", False, witness={"pair": (x, y)})
    return CheckResult("form extension of i is Cartan", True)


def cartan_to_cone(c):
    """The DGLA morphism cone(Id_g) -> T: x -> l_x, flat x -> i_x."""
    C = Cone(c.g)

    def image(key):
        tag, k = key
        return c.l.image(k) if tag == "x" else c.i.image(k)

    return LieMap(C, c.target, image, 0, "l+i[1]")


def cone_to_cartan(g, phi, name="i"):
    """Inverse of cartan_to_cone: restrict along the flat operator."""
    return CartanHomotopy(g, phi.target, lambda k: phi.image(("b", k)), name)


def lift_iv(c, v):
    """i^v_x = (i_x, -i_x(v)) into Aff(V)."""
    V = c.V
    if V.diff(v) or any(V.degree(k) != 0 for k in v):
        raise CartanError("v must be a closed vector of degree 0")
    aff = AffAlgebra(V)
    end = c.target

    def image(key):
        xi = c.i.image(key)
        out = dict(xi)
        for k, e in end.act(xi, v).items():
            out[("v", k)] = -e
        return out

    return CartanHomotopy(c.g, aff, image, name=f"{c.name}^v")


@dataclass
class PeriodDatum:
    g: object
    pair: DGPair
    cartan: CartanHomotopy

    def check(self):
        F = self.pair.sub
        end = self.cartan.target
        bad = None
        for k in self.g.basis:
            lk = self.cartan.l.image(k)
            for f in F:
                img = end.act(lk, {f: ONE})
                if any(j not in F for j in img):
                    bad = {"x": k, "f": f, "l_x(f)": img}
                    break
            if bad:
                break
        return [CheckResult("l_x(F) in F", bad is None, witness=bad)]


@dataclass
class AbelJacobiDatum:
    g: object
    sub: frozenset
    pair: DGPair
    v: dict
    cartan: CartanHomotopy
    name: str = "D"

    def __post_init__(self):
        self.sub = frozenset(self.sub)

    @property
    def V(self):
        return self.pair.total

    @property
    def F(self):
        return self.pair.sub

    def check(self):
        out = PeriodDatum(self.g, self.pair, self.cartan).check()
        V, F = self.V, self.F
        ok = not V.diff(self.v) and all(V.degree(k) == 0 and k in F for k in self.v)
        out.append(CheckResult("v is a degree-0 cocycle of F", ok, witness=None if ok else self.v))
        bad = None
        for k in self.g.basis:
            if k in self.sub:
                if any(j not in self.sub for j in self.g.d_key(k)):
                    bad = {"d": k}
                    break
                for m in self.sub:
                    if any(j not in self.sub for j in self.g.bracket_keys(k, m)):
                        bad = {"bracket": (k, m)}
                        break
                if bad:
                    break
        out.append(CheckResult("sub is a sub-DGLA", bad is None, witness=bad))
        bad = None
        end = self.cartan.target
        for k in sorted(self.sub, key=str):
            val = end.act(self.cartan.i.image(k), self.v)
            if val:
                bad = {"x": k, "i_x(v)": val}
                break
        out.append(CheckResult("i_x(v) = 0 on sub", bad is None, witness=bad))
        return out


def check_aj_cube(datum):
    """Lower and upper faces of the Abel-Jacobi cube, on basis elements of the subalgebra."""
    end = datum.cartan.target
    iv = lift_iv(datum.cartan, datum.v)
    out = []
    bad = None
    for k in sorted(datum.sub, key=str):
        lhs = iv.i.image(k)
        rhs = dict(datum.cartan.i.image(k))   # sigma_0 is the identity on keys
        if sub(lhs, rhs):
            bad = {"x": k, "i^v_x": lhs, "sigma0(i_x)": rhs}
            break
    out.append(CheckResult("lower face: i^v on sub = sigma_0 i", bad is None, witness=bad))
    bad = None
    for k in sorted(datum.sub, key=str):
        lhs = iv.l.image(k)
        if any(j[0] == "v" for j in lhs):
            bad = {"x": k, "l^v_x": lhs}
            break
        if sub(lhs, datum.cartan.l.image(k)):
            bad = {"x": k, "l^v_x": lhs}
            break
    out.append(CheckResult("upper face: l^v on sub lands in sigma_0(End)", bad is None, witness=bad))
    bad = None
    for k in datum.g.basis:
        lv = iv.l.image(k)
        expect = dict(datum.cartan.l.image(k))
        for j, e in end.act(datum.cartan.l.image(k), datum.v).items():
            expect[("v", j)] = -e
        if sub(lv, expect):
            bad = {"x": k}
            break
    out.append(CheckResult("boundary of i^v is (l, -l(v))", bad is None, witness=bad))
    return out


# ---------------------------------------------------------------------------
# period map


def period_map_mc(pd, artin, x):
    """x in MC(g tensor m_A) -> e^{i_x}(F tensor A)."""
    L = ArtinTensor(pd.g, artin)
    if L.mc_curvature(x):
        raise CartanError("input is not a Maurer-Cartan element")
    end = pd.cartan.target
    ix = artin_extend(pd.cartan.i, L, ArtinTensor(end, artin))(x)
    R = OperatorRing(end, artin)
    op = R.exp(ix)
    basis = [R.act(op, {(f, UNIT): ONE}) for f in end.V.basis if f in pd.pair.sub]
    return DeformedSubcomplex(end.V, artin, basis), ix


def period_pair(pd, artin, x):
    """The MC pair (l_x, e^{-i_x}) for End(V;F) -> End(V)."""
    L = ArtinTensor(pd.g, artin)
    end = pd.cartan.target
    LE = ArtinTensor(end, artin)
    lx = artin_extend(pd.cartan.l, L, LE)(x)
    ix = artin_extend(pd.cartan.i, L, LE)(x)
    return lx, scale(-1, ix)


def cohomology_injective(pair):
    """Is H*(F) -> H*(V) injective?"""
    HF = cohomology(sub_complex(pair))
    HV = cohomology(pair.total)
    for deg in HF.degrees():
        e = Echelon()
        for r in HF.reps[deg]:
            e.insert({j: c for j, c in enumerate(HV.project(deg, r)) if c})
        if e.rank != HF.dims[deg]:
            return False
    return True


def h2_of_i(pd, omega):
    """Matrix of i_omega on H(F) -> H(V/F) for a degree-2 cocycle omega of g."""
    pair = pd.pair
    HF = cohomology(sub_complex(pair))
    Q, proj = quotient_complex(pair)
    HQ = cohomology(Q)
    end = pd.cartan.target
    iw = pd.cartan.i(omega)
    out = {}
    for deg in HF.degrees():
        for j, r in enumerate(HF.reps[deg]):
            val = proj(end.act(iw, r))
            out[(deg, j)] = HQ.project(deg + 1, val) if (deg + 1) in HQ.dims else ()
    return out


def period_obstruction_check(pd, candidates=None):
    """For first-order classes with nonzero primary obstruction, H^2(i) kills it."""
    from .deformations import dgla_problem, primary_obstruction
    from .dgla import complex_of

    if not cohomology_injective(pd.pair):
        raise CartanError("H*(F) -> H*(V) is not injective")
    g = pd.g
    Hg = cohomology(complex_of(g))
    reps = Hg.reps.get(1, [])
    if candidates is None:
        candidates = list(reps)
        candidates += [axpy(dict(a), ONE, b) for i, a in enumerate(reps) for b in reps[i + 1:]]
    problem = dgla_problem(g)
    results, found = [], 0
    for u in candidates:
        val, cls = primary_obstruction(problem, u)
        if not any(cls):
            continue
        found += 1
        matrix = h2_of_i(pd, val)
        ok = all(not any(v) for v in matrix.values())
        results.append(CheckResult("H^2(i) kills the obstruction", ok,
                                   witness=None if ok else {"class": u, "image": matrix},
                                   detail={"first_order": u, "obstruction": val, "class": cls}))
    if not found:
        results.append(CheckResult("no obstructed first-order class (vacuous)", True))
    return results


# ---------------------------------------------------------------------------
# Abel-Jacobi map in cohomology


def aj_cohomology(datum):
    """[x] in H^p(g/sub) -> -[i_x(v) mod F] in H^(p-1)(V/F), as a matrix."""
    from .fibers import _Quot
    from .dgla import complex_of

    g = datum.g
    keys = [k for k in g.basis if k not in datum.sub]
    Qg = complex_of(_Quot(g, datum.sub), keys)
    Hg = cohomology(Qg)
    QV, proj = quotient_complex(datum.pair)
    HV = cohomology(QV)
    end = datum.cartan.target
    matrix, values, checks = {}, {}, []
    for p in Hg.degrees():
        for j, x in enumerate(Hg.reps[p]):
            val = scale(-1, proj(end.act(datum.cartan.i(x), datum.v)))
            values[(p, j)] = val
            if QV.diff(val):
                checks.append(CheckResult("i_x(v) closed mod F", False, witness={"x": x}))
            matrix[(p, j)] = HV.project(p - 1, val) if (p - 1) in HV.dims else ()
    return {"matrix": matrix, "values": values, "source": Hg, "target": HV,
            "checks": checks or [CheckResult("i_x(v) closed mod F", True)]}


def aj_value(datum, x):
    """-i_x(v) mod F for a single relative cocycle x."""
    QV, proj = quotient_complex(datum.pair)
    end = datum.cartan.target
    return scale(-1, proj(end.act(datum.cartan.i(x), datum.v)))


def aj_well_defined(datum):
    """Shifting a representative by dy or by an element of sub leaves the class fixed."""
    res = aj_cohomology(datum)
    HV = res["target"]
    Hg = res["source"]
    g = datum.g
    bad = None
    for p in Hg.degrees():
        for j, x in enumerate(Hg.reps[p]):
            base = HV.project(p - 1, aj_value(datum, x)) if (p - 1) in HV.dims else ()
            shifts = [g.d_key(y) for y in g.basis if g.degree(y) == p - 1]
            shifts += [{z: ONE} for z in datum.sub if g.degree(z) == p]
            for s in shifts:
                moved = axpy(dict(x), ONE, s)
                val = aj_value(datum, moved)
                cls = HV.project(p - 1, val) if (p - 1) in HV.dims else ()
                if cls != base:
                    bad = {"x": x, "shift": s}
                    break
    return CheckResult("AJ class independent of representative", bad is None, witness=bad)


# ---------------------------------------------------------------------------
# explicit TW^2 representative of the Abel-Jacobi class


def tw2_rep_from_class(datum, x):
    """A TW^2 cocycle of the transposed Jacobian square attached to x in g with dx in sub.

    With l, i the lifted operators l^v, i^v into Aff(V):
        w00 = l_dx,  w01 = ds l_x + s l_dx,  w10 = t l_dx + dt i_dx,
        w11 = t ds l_x + s t l_dx + ds dt i_x + s dt i_dx.
    Its double integral is i^v_x, whose translation part is -i_x(v).
    """
    from .fibers import TW2Fiber, jacobian

    g = datum.g
    dx = g.d(x)
    if any(k not in datum.sub for k in dx):
        raise CartanError("dx must lie in the subalgebra")
    iv = lift_iv(datum.cartan, datum.v)
    lx, ldx, ix, idx = iv.l(x), iv.l(dx), iv.i(x), iv.i(dx)
    fiber = TW2Fiber(jacobian(datum.V, datum.F).abel_jacobi_face(), name="Jac^T")

    def one(*terms):
        out = {}
        for exps, mask, vec in terms:
            for k, c in vec.items():
                axpy(out, c, {((exps,), (mask,), k): ONE})
        return out

    def two(*terms):
        out = {}
        for exps, mask, vec in terms:
            for k, c in vec.items():
                axpy(out, c, {(exps, mask, k): ONE})
        return out

    w01 = one((0, 1, lx), (1, 0, ldx))
    w10 = one((1, 0, ldx), (0, 1, idx))
    w11 = two(((0, 1), (1, 0), lx), ((1, 1), (0, 0), ldx),
              ((0, 0), (1, 1), ix), ((1, 0), (0, 1), idx))
    e = fiber.element(ldx, w01, w10, w11)
    return fiber, e


def aj_via_tw2(datum, x):
    """The Abel-Jacobi value through the representative: its double integral modulo F."""
    fiber, e = tw2_rep_from_class(datum, x)
    fiber.check_member(e)
    vals = fiber.to_double_quotient(e)
    return {k[1]: c for k, c in vals.items() if k[0] == "v"}, fiber, e
