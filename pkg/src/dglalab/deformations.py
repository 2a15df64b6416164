"""Maurer-Cartan elements, gauge action, BCH, lifting probes, and the maps phi, psi.

All functions take a Lie structure ``L`` that already carries Artin
coefficients (usually ``ArtinTensor(g, A)``) and plain vectors over its keys.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .exact import UNIT, artin_truncated_poly
from .graded import cohomology
from .lie import ArtinTensor, LieMap
from .linalg import ONE, Echelon, axpy, kernel, scale, solve, sub
from .report import CheckResult

MAX_BCH_ORDER = 8


class DeformationError(ValueError):
    pass


@dataclass(frozen=True)
class MCElement:
    algebra: object
    value: dict


@dataclass(frozen=True)
class GaugeElement:
    algebra: object
    log: dict


# ---------------------------------------------------------------------------
# gauge action and BCH


def _limit(L, default=64):
    A = getattr(L, "artin", None)
    if A is None:
        base = getattr(L, "base", None)
        return _limit(base, default) if base is not None else default
    return (A.nilpotency_index or default) + 1


def gauge_act(L, a, x):
    """e^a * x = x + sum_n ad_a^n / (n+1)! ([a, x] - da)."""
    term = L.bracket(a, x)
    axpy(term, -ONE, L.d(a))
    out = dict(x)
    n = 0
    limit = _limit(L)
    while term:
        if n > limit:
            raise DeformationError("gauge series does not terminate: element is not nilpotent")
        axpy(out, Fraction(1, factorial(n + 1)), term)
        term = L.bracket(a, term)
        n += 1
    return out


@lru_cache(maxsize=None)
def dynkin_coefficients(max_order=MAX_BCH_ORDER):
    """Right-nested words in X, Y with their Dynkin coefficients."""
    coeffs = {}

    def pairs(budget):
        for r in range(budget + 1):
            for s in range(budget + 1 - r):
                if r + s:
                    yield r, s

    def walk(seq, used):
        if seq:
            n = len(seq)
            word = "".join("X" * r + "Y" * s for r, s in seq)
            denom = 1
            for r, s in seq:
                denom *= factorial(r) * factorial(s)
            c = Fraction((-1) ** (n - 1), n * used * denom)
            coeffs[word] = coeffs.get(word, 0) + c
        for r, s in pairs(max_order - used):
            walk(seq + ((r, s),), used + r + s)

    walk((), 0)
    return {w: c for w, c in coeffs.items() if c and not (len(w) > 1 and w[-1] == w[-2])}


def bch(L, a, b):
    """log(e^a e^b) by the Dynkin series."""
    N = _limit(L) - 1
    if N > MAX_BCH_ORDER + 1:
        raise DeformationError(f"BCH is implemented up to order {MAX_BCH_ORDER} (nilpotency <= 9)")
    gens = {"X": a, "Y": b}
    cache = {}

    def nested(word):
        if word in cache:
            return cache[word]
        if len(word) == 1:
            v = gens[word]
        else:
            inner = nested(word[1:])
            v = L.bracket(gens[word[0]], inner) if inner else {}
        cache[word] = v
        return v

    out = {}
    for word, c in sorted(dynkin_coefficients().items(), key=lambda kv: (len(kv[0]), kv[0])):
        if len(word) >= N:
            continue
        v = nested(word)
        if v:
            axpy(out, c, v)
    return out


def mc_check(L, x):
    return not L.mc_curvature(x)


def mc_pair_check(f, L0, L1, x0, a1):
    """x0 in MC(L0) and e^{a1} * 0 = f(x0)."""
    if not mc_check(L0, x0):
        return False
    return not sub(gauge_act(L1, a1, {}), f(x0))


def mc_pair_injective(f_keys, L1, a1):
    """For an inclusion on keys: e^{a1} * 0 must lie in the subalgebra; returns it or None."""
    y = gauge_act(L1, a1, {})
    if all(k[0] in f_keys for k in y):
        return y
    return None


def mc_pair_to_tw(fiber, x0, a1):
    """(x0, e^{a1}) -> (x0, e^{t a1} * 0) in TW(f) with Artin coefficients."""
    ta = fiber.forms.monomial(a1, (1,))
    y = gauge_act(fiber.forms, ta, {})
    e = fiber.element(x0, y)
    return e


# ---------------------------------------------------------------------------
# lifting probes


class LiftProblem:
    """Order-by-order Maurer-Cartan problem in one formal variable.

    ``unknown_basis``: base keys of the unknown (degree 1 for a DGLA,
    degree 0 for the gauge description of an injective pair).
    ``equation(L, x)``: the vector that must vanish, over keys (k, m).
    ``obstruction_complex`` and ``to_complex`` give the cohomology class of
    an obstruction.
    """

    def __init__(self, base, unknown_basis, equation, obstruction_complex, to_complex,
                 obstruction_degree, name="problem"):
        self.base = base
        self.unknown_basis = list(unknown_basis)
        self.equation = equation
        self.obstruction_complex = obstruction_complex
        self.to_complex = to_complex
        self.obstruction_degree = obstruction_degree
        self.name = name

    def evaluate(self, order, coeffs):
        """Coefficient vectors of the equation over Q[eps]/eps^(order+1)."""
        A = artin_truncated_poly(1, order + 1)
        L = ArtinTensor(self.base, A)
        x = {}
        for k, v in coeffs.items():
            if v:
                axpy(x, ONE, L.lift(v, A.basis[k - 1]))
        val = self.equation(L, x)
        return {k: L.coefficient(val, A.basis[k - 1]) for k in range(1, order + 1)}

    def linear(self, u):
        return self.evaluate(1, {1: u})[1]


def dgla_problem(g):
    basis1 = [k for k in g.basis if g.degree(k) == 1]
    from .dgla import complex_of
    return LiftProblem(g, basis1, lambda L, x: L.mc_curvature(x), complex_of(g),
                       lambda v: v, 2, name=g.name)


def pair_problem(f_source, f_target, name="pair"):
    """Gauge description of MC for an inclusion g0 -> g1 on keys."""
    keep = set(f_source.basis)
    basis0 = [k for k in f_target.basis if f_target.degree(k) == 0]

    def equation(L, x):
        y = gauge_act(L, x, {})
        return {k: c for k, c in y.items() if k[0] not in keep}

    from .dgla import complex_of
    from .fibers import _Quot
    quot_keys = [k for k in f_target.basis if k not in keep]
    Q = complex_of(_Quot(f_target, keep), quot_keys)
    return LiftProblem(f_target, basis0, equation, Q, lambda v: v, 1, name=name)


def _solve_affine(rhs, columns):
    """Find coefficients with sum c_j columns[j] = rhs."""
    return solve(columns, rhs)


def mc_lift_probe(problem, first_order, target_order):
    """Lift eps*first_order to an MC element over Q[eps]/eps^target_order.

    Returns a dict with ``lifted`` (bool), the coefficients, and on failure
    the obstruction vector, its order and its cohomology coordinates.
    """
    if target_order < 2:
        raise DeformationError("target_order must be >= 2")
    lin = problem.linear(first_order)
    if lin:
        raise DeformationError("first-order input does not satisfy the linearized equation")
    units = [{k: ONE} for k in problem.unknown_basis]
    lin_cols = [problem.linear(u) for u in units]
    cocycles = [
        {problem.unknown_basis[j]: c for j, c in z.items()} for z in kernel(lin_cols)
    ]
    coeffs = {1: dict(first_order)}
    for n in range(2, target_order):
        base_val = problem.evaluate(n, coeffs)[n]
        columns = list(lin_cols)
        moves = []
        if n >= 3:
            for z in cocycles:
                trial = dict(coeffs)
                trial[n - 1] = axpy(dict(coeffs[n - 1]), ONE, z)
                moves.append(sub(problem.evaluate(n, trial)[n], base_val))
        sol = _solve_affine(scale(-1, base_val), columns + moves)
        if sol is None:
            coh = cohomology(problem.obstruction_complex)
            target = problem.to_complex(base_val)
            cls = coh.project(problem.obstruction_degree, target)
            return {"lifted": False, "order": n, "obstruction": base_val,
                    "class": cls, "coefficients": coeffs}
        x_n = {}
        for j, c in sol.items():
            if j < len(units):
                axpy(x_n, c, units[j])
            else:
                axpy(coeffs[n - 1], c, cocycles[j - len(units)])
        coeffs[n] = x_n
    return {"lifted": True, "order": target_order - 1, "coefficients": coeffs}


def assemble(problem, coeffs, order):
    """The lifted element as a vector over ArtinTensor(base, Q[eps]/eps^order)."""
    A = artin_truncated_poly(1, order)
    L = ArtinTensor(problem.base, A)
    x = {}
    for k, v in coeffs.items():
        if k < order:
            axpy(x, ONE, L.lift(v, A.basis[k - 1]))
    return L, x


def primary_obstruction(problem, first_order):
    """The order-2 coefficient of the equation with x2 = 0 and its class."""
    val = problem.evaluate(2, {1: first_order})[2]
    coh = cohomology(problem.obstruction_complex)
    return val, coh.project(problem.obstruction_degree, problem.to_complex(val))


# ---------------------------------------------------------------------------
# operators on V tensor A


class OperatorRing:
    """End(V) tensor A (unit included) acting on V tensor A."""

    def __init__(self, end, artin):
        self.end = end
        self.A = artin

    def identity(self):
        return {(("E", n, n), UNIT): ONE for n in self.end.V.basis}

    def compose(self, x, y):
        acc = {}
        for (a, m1), c in x.items():
            for (b, m2), e in y.items():
                if a[2] != b[1]:
                    continue
                prod = self.A.mul_basis(m1, m2)
                for m, f in prod.items():
                    axpy(acc, c * e * f, {(("E", a[1], b[2]), m): ONE})
        return acc

    def act(self, x, v):
        """Apply to v over keys (name, m)."""
        acc = {}
        for ((_, a, b), m1), c in x.items():
            for (n, m2), e in v.items():
                if n != b:
                    continue
                for m, f in self.A.mul_basis(m1, m2).items():
                    axpy(acc, c * e * f, {(a, m): ONE})
        return acc

    def series(self, coeff, xi):
        """sum_n coeff(n) xi^n; xi must have coefficients in m_A."""
        if any(m == UNIT for (_, m) in xi):
            raise DeformationError("operator must have coefficients in m_A (nilpotent)")
        out = scale(coeff(0), self.identity())
        power = self.identity()
        n = 0
        while True:
            n += 1
            power = self.compose(power, xi)
            if not power:
                break
            if n > (self.A.nilpotency_index or 0) + 1:
                raise DeformationError("operator is not nilpotent")
            axpy(out, coeff(n), power)
        return out

    def exp(self, xi):
        return self.series(lambda n: Fraction(1, factorial(n)), xi)


def operator_series(coeff, xi, end, artin):
    return OperatorRing(end, artin).series(coeff, xi)


def exp_coeff(n):
    return Fraction(1, factorial(n))


def expm1_over_z_neg(n):
    """Coefficients of (e^{-z} - 1)/z."""
    return Fraction((-1) ** (n + 1), factorial(n + 1))


@dataclass
class DeformedSubcomplex:
    """F_A inside V tensor A given by an A-basis (vectors over (name, m))."""

    V: object
    artin: object
    basis: list

    def k_span(self, with_unit=True):
        """Q-basis vectors m * b for m in A (or only m_A)."""
        ms = ([UNIT] if with_unit else []) + list(self.artin.basis)
        out = []
        for b in self.basis:
            for m in ms:
                out.append(_mul_scalar(self.artin, m, b))
        return [v for v in out if v]

    def echelon(self, with_unit=True):
        e = Echelon()
        for v in self.k_span(with_unit):
            e.insert(v)
        return e

    def contains(self, v):
        return self.echelon().contains(v)

    def reduce_mod_mA(self, v):
        """Residual of v modulo F_A tensor m_A."""
        return self.echelon(with_unit=False).reduce(v)[0]

    def same_as(self, other):
        e = self.echelon()
        return e.rank == other.echelon().rank and all(e.contains(v) for v in other.k_span())

    def is_subcomplex(self):
        e = self.echelon()
        return all(e.contains(d_tensor(self.V, b)) for b in self.basis)

    def is_free(self):
        return self.echelon().rank == len(self.basis) * (1 + self.artin.dim)


def _mul_scalar(A, m, v):
    acc = {}
    for (n, m2), c in v.items():
        for mm, f in A.mul_basis(m, m2).items():
            axpy(acc, c * f, {(n, mm): ONE})
    return acc


def d_tensor(V, v):
    acc = {}
    for (n, m), c in v.items():
        for k, e in V.d_basis(n).items():
            axpy(acc, c * e, {(k, m): ONE})
    return acc


def _in_keys(v, keys):
    return all(k[0] in keys for k in v)


def phi_map(endF, end, artin, xi):
    """e^xi -> e^{-xi}(F tensor A), for xi in End^0(V) tensor m_A."""
    L = ArtinTensor(end, artin)
    if not _in_keys(gauge_act(L, xi, {}), set(endF.basis)):
        raise DeformationError("e^xi * 0 is not in End^1(V;F) tensor m_A")
    F = endF.subs[0]
    R = OperatorRing(end, artin)
    op = R.exp(scale(-1, xi))
    basis = [R.act(op, {(f, UNIT): ONE}) for f in end.V.basis if f in F]
    out = DeformedSubcomplex(end.V, artin, basis)
    if not out.is_subcomplex():
        raise DeformationError("image is not d-closed")
    return out


def psi_map(affF, aff, artin, xw):
    """(xi, w) -> (e^{-xi}(F tensor A), ((e^{-xi} - 1)/xi)(w) mod F_A tensor m_A)."""
    L = ArtinTensor(aff, artin)
    if not _in_keys(gauge_act(L, xw, {}), set(affF.basis)):
        raise DeformationError("e^(xi,w) * 0 is not in Aff^1(V;F) tensor m_A")
    xi = {k: c for k, c in xw.items() if k[0][0] == "E"}
    w = {(k[0][1], k[1]): c for k, c in xw.items() if k[0][0] == "v"}
    R = OperatorRing(aff, artin)
    F = affF.subs[0]
    op = R.exp(scale(-1, xi))
    basis = [R.act(op, {(f, UNIT): ONE}) for f in aff.V.basis if f in F]
    FA = DeformedSubcomplex(aff.V, artin, basis)
    v = R.act(R.series(expm1_over_z_neg, xi), w)
    cls = FA.reduce_mod_mA(v)
    closed = FA.echelon(with_unit=False).contains(d_tensor(aff.V, v))
    return FA, v, cls, closed


def aff_gauge_closed_form(aff, artin, xw):
    """(e^xi * 0, e^xi d(((e^{-xi} - 1)/xi)(w))) computed with operators."""
    xi = {k: c for k, c in xw.items() if k[0][0] == "E"}
    w = {(k[0][1], k[1]): c for k, c in xw.items() if k[0][0] == "v"}
    first = gauge_act(ArtinTensor(aff, artin), xi, {})
    R = OperatorRing(aff, artin)
    u = R.act(R.series(expm1_over_z_neg, xi), w)
    second = R.act(R.exp(xi), d_tensor(aff.V, u))
    out = dict(first)
    for (n, m), c in second.items():
        out[(("v", n), m)] = c
    return out


def aut0_membership(end, artin, xi):
    """e^xi in Aut^0 iff xi = d zeta; returns (bool, zeta)."""
    L = ArtinTensor(end, artin)
    if L.d(xi):
        raise DeformationError("e^xi is not a chain map (d xi != 0)")
    cols = [k for k in end.basis if end.degree(k) == -1]
    images = [{(j, m): c for j, c in end.d_key(k).items()} for k in cols for m in artin.basis]
    keys = [(k, m) for k in cols for m in artin.basis]
    sol = solve(images, xi)
    if sol is None:
        return False, None
    return True, {keys[j]: c for j, c in sol.items() if c}


def gauge_check_sample(L, a, x):
    """One property-suite sample: MC preserved by the gauge action."""
    return mc_check(L, gauge_act(L, a, x))


__all__ = [
    "DeformationError", "DeformedSubcomplex", "GaugeElement", "LiftProblem", "MCElement",
    "OperatorRing", "aff_gauge_closed_form", "assemble", "aut0_membership", "bch",
    "dgla_problem", "dynkin_coefficients", "gauge_act", "mc_check", "mc_lift_probe",
    "mc_pair_check", "mc_pair_injective", "mc_pair_to_tw", "operator_series", "pair_problem",
    "phi_map", "primary_obstruction", "psi_map", "CheckResult", "LieMap",
]
