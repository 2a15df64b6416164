"""Sparse exact linear algebra over the rationals.

Vectors are plain dicts mapping a hashable basis key to a nonzero
``Fraction``.  Zero coefficients are never stored, so ``not v`` tests for
the zero vector.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x):
    """Coerce ints, strings like ``"3/4"`` and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not allowed in exact computations")
    return Fraction(x)


def vec(pairs=()):
    """Build a clean vector from (key, coefficient) pairs, summing repeats."""
    out = {}
    for k, c in pairs:
        c = frac(c)
        if c:
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def axpy(acc, c, x):
    """In place ``acc += c * x``; returns ``acc``."""
    if not c:
        return acc
    for k, v in x.items():
        s = acc.get(k, ZERO) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)
    return acc


def add(x, y):
    return axpy(dict(x), ONE, y)


def sub(x, y):
    return axpy(dict(x), -ONE, y)


def scale(c, x):
    c = frac(c)
    if not c:
        return {}
    return {k: c * v for k, v in x.items()}


def neg(x):
    return {k: -v for k, v in x.items()}


def lincomb(terms):
    """Sum of ``c * x`` over (c, x) pairs."""
    acc = {}
    for c, x in terms:
        axpy(acc, frac(c), x)
    return acc


def apply_linear(x, image):
    """Extend ``image(key) -> vector`` linearly to the vector ``x``."""
    acc = {}
    for k, c in x.items():
        axpy(acc, c, image(k))
    return acc


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Rows are inserted in order; the pivot of a row is its first nonzero
    entry with respect to ``order`` (a dict key -> position, or None to sort
    keys directly).  Each stored row also remembers which inserted rows it
    is a combination of, which gives kernels and solutions for free.
    """

    def __init__(self, order=None):
        self._order = order
        self.rows = {}      # pivot key -> (row vector, combination)
        self.pivot_list = []
        self.count = 0

    def _key(self, k):
        return self._order[k] if self._order is not None else k

    def reduce(self, v, combo=None):
        """Reduce ``v`` against the stored rows; return (residual, combo)."""
        v = dict(v)
        combo = dict(combo) if combo is not None else {}
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c:
                row, rc = self.rows[p]
                axpy(v, -c, row)
                axpy(combo, -c, rc)
        return v, combo

    def insert(self, v, tag=None):
        """Insert a row; return its residual (empty when dependent)."""
        tag = self.count if tag is None else tag
        self.count += 1
        r, combo = self.reduce(v, {tag: ONE})
        if not r:
            return r, combo
        p = min(r, key=self._key)
        inv = ONE / r[p]
        r = {k: c * inv for k, c in r.items()}
        combo = {k: c * inv for k, c in combo.items()}
        for q, (row, rc) in self.rows.items():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
                axpy(rc, -c, combo)
        self.rows[p] = (r, combo)
        self.pivot_list.append(p)
        return r, combo

    @property
    def rank(self):
        return len(self.rows)

    def contains(self, v):
        return not self.reduce(v)[0]

    def basis(self):
        return [self.rows[p][0] for p in sorted(self.rows, key=self._key)]


def rank(vectors, order=None):
    e = Echelon(order)
    for v in vectors:
        e.insert(v)
    return e.rank


def kernel(images):
    """Basis of the kernel of the map sending basis index j to images[j].

    Returned vectors are dicts over indices ``0..len(images)-1``.
    """
    e = Echelon()
    out = []
    for j, v in enumerate(images):
        r, combo = e.insert(v, tag=j)
        if not r:
            out.append(combo)
    return out


def solve(images, target):
    """Return coefficients c (dict over indices) with sum c_j images[j] = target, or None."""
    e = Echelon()
    for j, v in enumerate(images):
        e.insert(v, tag=j)
    r, combo = e.reduce(target)
    if r:
        return None
    return {k: -c for k, c in combo.items()}


def rref_basis(vectors, order):
    """RREF basis of the span, each row normalized at its pivot."""
    e = Echelon(order)
    for v in vectors:
        e.insert(v)
    return [(p, e.rows[p][0]) for p in sorted(e.rows, key=lambda k: order[k])]


def nullspace_rows(constraints, variables):
    """Solution space of linear constraints, in reduced parametrized form.

    ``constraints`` are vectors over ``variables`` each meaning "this linear
    functional vanishes".  Returns (free, basis) where basis[i] is the
    solution with free variable free[i] = 1 and the other free variables 0.
    A member's coordinates are therefore simply its entries on ``free``.
    """
    order = {k: i for i, k in enumerate(variables)}
    e = Echelon(order)
    for c in constraints:
        e.insert(c)
    pivots = set(e.rows)
    free = [k for k in variables if k not in pivots]
    basis = []
    dependents = {}
    for p, (row, _) in e.rows.items():
        for k, c in row.items():
            if k != p:
                dependents.setdefault(k, []).append((p, c))
    for f in free:
        v = {f: ONE}
        for p, c in dependents.get(f, ()):
            v[p] = -c
        basis.append(v)
    return free, basis


def fmt(c):
    """Canonical string for a rational: ``"3"`` or ``"-2/5"``."""
    c = frac(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
