"""Polynomial differential forms on the interval and the square.

Keys of ``FormAlgebra(base, nvars)`` are ``(exps, dmask, k)``: the form
``x_0^exps[0] ... dx_i (for dmask[i] = 1, in increasing i) tensor k``.
For one variable x_0 = t; for two, x_0 = s and x_1 = t, so the positive
top form is ds dt.

Sign convention (used everywhere): forms are written first.
    d(w (x) x) = dw (x) x + (-1)^|w| w (x) dx
    [w (x) x, n (x) y] = (-1)^(|x||n|) w n (x) [x, y]
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .lie import LieMap, LieStructure, sgn
from .linalg import ONE, axpy, frac


def mask_product(m1, m2):
    """Sign and mask of the wedge of two dx-monomials, or (0, None)."""
    if any(a and b for a, b in zip(m1, m2)):
        return 0, None
    inv = 0
    for i, a in enumerate(m1):
        if a:
            inv += sum(m2[:i])
    return (-1 if inv % 2 else 1), tuple(a + b for a, b in zip(m1, m2))


def form_d(exps, dmask):
    """d of a monomial form as a list of (coefficient, exps, dmask)."""
    out = []
    for i, e in enumerate(exps):
        if e and not dmask[i]:
            s = sgn(sum(dmask[:i]))
            ne = exps[:i] + (e - 1,) + exps[i + 1:]
            nm = dmask[:i] + (1,) + dmask[i + 1:]
            out.append((s * e, ne, nm))
    return out


class FormAlgebra(LieStructure):
    """base tensor Q[x_0..x_{n-1}, dx_0..dx_{n-1}] with the Koszul rules above."""

    def __init__(self, base, nvars=1):
        super().__init__()
        self.base = base
        self.nvars = nvars
        self.name = f"{base.name}[{'s,t' if nvars == 2 else 't'}]"

    def degree(self, key):
        return self.base.degree(key[2]) + sum(key[1])

    def d_basis(self, key):
        exps, dmask, k = key
        out = {}
        for c, ne, nm in form_d(exps, dmask):
            axpy(out, c, {(ne, nm, k): ONE})
        s = sgn(sum(dmask))
        for j, c in self.base.d_key(k).items():
            axpy(out, s * c, {(exps, dmask, j): ONE})
        return out

    def bracket_basis(self, a, b):
        e1, m1, k1 = a
        e2, m2, k2 = b
        s, m = mask_product(m1, m2)
        if not s:
            return {}
        br = self.base.bracket_keys(k1, k2)
        if not br:
            return {}
        s *= sgn(self.base.degree(k1) * sum(m2))
        e = tuple(x + y for x, y in zip(e1, e2))
        return {(e, m, j): s * c for j, c in br.items()}

    # constructors
    def const(self, x):
        z = (0,) * self.nvars
        return {(z, z, k): c for k, c in x.items()}

    def monomial(self, x, exps, dmask=None):
        dmask = dmask or (0,) * self.nvars
        return {(tuple(exps), tuple(dmask), k): c for k, c in x.items()}

    def times(self, coeff_terms, x):
        """sum of c * (monomial form) tensor x for (c, exps, dmask) terms."""
        acc = {}
        for c, exps, dmask in coeff_terms:
            axpy(acc, frac(c), self.monomial(x, exps, dmask))
        return acc

    def poly_degree(self, key):
        return sum(key[0]) + sum(key[1])

    # restriction and integration
    def restrict(self, x, var, value):
        """Set x_var = value and dx_var = 0.  Result lives in one fewer variable
        (in the base itself when nvars == 1)."""
        out = {}
        for (exps, dmask, k), c in x.items():
            if dmask[var]:
                continue
            if value == 0 and exps[var]:
                continue
            coef = c * (frac(value) ** exps[var])
            if self.nvars == 1:
                key = k
            else:
                key = (exps[:var] + exps[var + 1:], dmask[:var] + dmask[var + 1:], k)
            axpy(out, coef, {key: ONE})
        return out

    def integrate_var(self, x, var):
        """Fiber integral over x_var in [0,1]: moves dx_var to the front first."""
        out = {}
        for (exps, dmask, k), c in x.items():
            if not dmask[var]:
                continue
            s = sgn(sum(dmask[:var]))
            coef = s * c / (exps[var] + 1)
            if self.nvars == 1:
                key = k
            else:
                key = (exps[:var] + exps[var + 1:], dmask[:var] + dmask[var + 1:], k)
            axpy(out, coef, {key: ONE})
        return out

    def integrate(self, x):
        """Integral over the whole cube, picking the top-form component."""
        out = {}
        top = (1,) * self.nvars
        for (exps, dmask, k), c in x.items():
            if dmask != top:
                continue
            denom = 1
            for e in exps:
                denom *= e + 1
            axpy(out, c / denom, {k: ONE})
        return out

    def split(self, x):
        """Group terms by base key: {k: [(c, exps, dmask)]}."""
        out = {}
        for (exps, dmask, k), c in x.items():
            out.setdefault(k, []).append((c, exps, dmask))
        return out


def forms_extend(f, src, tgt):
    """Omega tensor f between form algebras, with the Koszul sign for odd f.

    (w (x) x) -> (-1)^(|w| deg f) w (x) f(x).
    """
    def image(key):
        exps, dmask, k = key
        s = sgn(sum(dmask) * f.degree)
        return {(exps, dmask, j): s * c for j, c in f.image(k).items()}
    return LieMap(src, tgt, image, f.degree, f.name)


# ---------------------------------------------------------------------------
# thin public wrappers over a plain graded coefficient space


@dataclass(frozen=True)
class PolyForm:
    """An element of a FormAlgebra, carried with its parent."""

    algebra: FormAlgebra
    terms: dict

    def __add__(self, other):
        return PolyForm(self.algebra, axpy(dict(self.terms), ONE, other.terms))

    def __sub__(self, other):
        return PolyForm(self.algebra, axpy(dict(self.terms), -ONE, other.terms))

    def __rmul__(self, c):
        c = frac(c)
        return PolyForm(self.algebra, {k: c * v for k, v in self.terms.items()} if c else {})

    def __eq__(self, other):
        return isinstance(other, PolyForm) and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))


def polyform(algebra, terms):
    return PolyForm(algebra, dict(terms))


def d_form(w):
    return PolyForm(w.algebra, w.algebra.d(w.terms))


def restrict1(w, endpoint):
    if w.algebra.nvars != 1:
        raise ValueError("restrict1 needs a form in one variable")
    return w.algebra.restrict(w.terms, 0, endpoint)


_EDGES = {"s0": (0, 0), "s1": (0, 1), "t0": (1, 0), "t1": (1, 1)}


def restrict2(w, edge):
    if w.algebra.nvars != 2:
        raise ValueError("restrict2 needs a form in two variables")
    if edge not in _EDGES:
        raise ValueError(f"edge must be one of {sorted(_EDGES)}")
    var, value = _EDGES[edge]
    return PolyForm(FormAlgebra(w.algebra.base, 1), w.algebra.restrict(w.terms, var, value))


def integrate1(w):
    if w.algebra.nvars != 1:
        raise ValueError("integrate1 needs a form in one variable")
    return w.algebra.integrate(w.terms)


def integrate2(w):
    if w.algebra.nvars != 2:
        raise ValueError("integrate2 needs a form in two variables")
    return w.algebra.integrate(w.terms)


def barycentric(a, b, dt1=True):
    """Expand t0^a t1^b (dt1) with t1 = t, t0 = 1 - t into (coef, power) pairs."""
    from math import comb
    terms = {}
    for j in range(a + 1):
        c = comb(a, j) * (-1) ** j
        terms[b + j] = terms.get(b + j, 0) + c
    return [(Fraction(c), p) for p, c in sorted(terms.items()) if c]


def simplex_integral(a, b):
    """a! b! / (a + b + 1)!: the closed form for t0^a t1^b dt1 on the interval."""
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 1))
