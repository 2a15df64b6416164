"""Graded Lie structures on (possibly infinite) sets of basis keys.

Every structure answers three questions about basis keys: the degree,
the differential and the bracket.  Elements are sparse vectors over the
keys.  Wrappers build new structures from old ones (coefficients in an
Artin algebra, polynomial forms, mapping cones of the identity, products),
so Maurer-Cartan and gauge computations are written once.
"""

from .exact import UNIT
from .linalg import ONE, ZERO, axpy


def sgn(n):
    return -ONE if n % 2 else ONE


class LieStructure:
    """Base class: subclasses implement degree, d_basis and bracket_basis."""

    name = "L"

    def __init__(self):
        self._dcache = {}
        self._bcache = {}

    def degree(self, key):
        raise NotImplementedError

    def d_basis(self, key):
        raise NotImplementedError

    def bracket_basis(self, a, b):
        raise NotImplementedError

    # cached element-level operations
    def d_key(self, key):
        v = self._dcache.get(key)
        if v is None:
            v = self._dcache[key] = self.d_basis(key)
        return v

    def bracket_keys(self, a, b):
        v = self._bcache.get((a, b))
        if v is None:
            v = self._bcache[(a, b)] = self.bracket_basis(a, b)
        return v

    def d(self, x):
        acc = {}
        for k, c in x.items():
            axpy(acc, c, self.d_key(k))
        return acc

    def bracket(self, x, y):
        acc = {}
        for a, c in x.items():
            for b, e in y.items():
                v = self.bracket_keys(a, b)
                if v:
                    axpy(acc, c * e, v)
        return acc

    def deg(self, x):
        """Degree of a homogeneous element (None for 0)."""
        degs = {self.degree(k) for k in x}
        if len(degs) > 1:
            raise ValueError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop() if degs else None

    def part(self, x, deg):
        return {k: c for k, c in x.items() if self.degree(k) == deg}

    def mc_curvature(self, x):
        """dx + 1/2 [x, x]."""
        acc = self.d(x)
        axpy(acc, ONE / 2, self.bracket(x, x))
        return acc


class AbelianLie(LieStructure):
    """A cochain complex viewed as a DG-Lie algebra with zero bracket."""

    def __init__(self, complex_, name="V"):
        super().__init__()
        self.complex = complex_
        self.name = name

    def degree(self, key):
        return self.complex.degree(key)

    def d_basis(self, key):
        return self.complex.d_basis(key)

    def bracket_basis(self, a, b):
        return {}

    @property
    def basis(self):
        return self.complex.basis


class ArtinTensor(LieStructure):
    """L tensor A: keys (k, m) with m a basis name of m_A (or the unit)."""

    def __init__(self, base, artin):
        super().__init__()
        self.base = base
        self.artin = artin
        self.name = f"{base.name}(x)A"

    def degree(self, key):
        return self.base.degree(key[0])

    def d_basis(self, key):
        k, m = key
        return {(j, m): c for j, c in self.base.d_key(k).items()}

    def bracket_basis(self, a, b):
        prod = self.artin.mul_basis(a[1], b[1])
        if not prod:
            return {}
        br = self.base.bracket_keys(a[0], b[0])
        return {(j, m): c * e for j, c in br.items() for m, e in prod.items()}

    @property
    def basis(self):
        return [(k, m) for k in self.base.basis for m in self.artin.basis]

    def lift(self, x, m):
        """x tensor m for an element x of the base."""
        return {(k, m): c for k, c in x.items()}

    def coefficient(self, x, m):
        return {k: c for (k, mm), c in x.items() if mm == m}

    def monomials(self, x):
        return sorted({m for (_, m) in x}, key=lambda m: (m != UNIT, self.artin.index.get(m, -1)))


class Product(LieStructure):
    """Direct product of Lie structures, keys (i, k)."""

    def __init__(self, *factors):
        super().__init__()
        self.factors = factors
        self.name = " x ".join(f.name for f in factors)

    def degree(self, key):
        return self.factors[key[0]].degree(key[1])

    def d_basis(self, key):
        i, k = key
        return {(i, j): c for j, c in self.factors[i].d_key(k).items()}

    def bracket_basis(self, a, b):
        if a[0] != b[0]:
            return {}
        i = a[0]
        return {(i, j): c for j, c in self.factors[i].bracket_keys(a[1], b[1]).items()}

    def component(self, x, i):
        return {k: c for (j, k), c in x.items() if j == i}

    def pack(self, *parts):
        out = {}
        for i, p in enumerate(parts):
            for k, c in p.items():
                out[(i, k)] = c
        return out


class Cone(LieStructure):
    """Mapping cone of the identity: keys ("x", k) and ("b", k) for the flat copy.

    d(flat x) = x - flat(dx), [flat x, y] = flat[x, y], [flat x, flat y] = 0.
    """

    def __init__(self, base):
        super().__init__()
        self.base = base
        self.name = f"cone({base.name})"

    def degree(self, key):
        tag, k = key
        return self.base.degree(k) - (1 if tag == "b" else 0)

    def d_basis(self, key):
        tag, k = key
        dk = self.base.d_key(k)
        if tag == "x":
            return {("x", j): c for j, c in dk.items()}
        out = {("x", k): ONE}
        for j, c in dk.items():
            axpy(out, -c, {("b", j): ONE})
        return out

    def bracket_basis(self, a, b):
        (ta, ka), (tb, kb) = a, b
        if ta == "b" and tb == "b":
            return {}
        br = self.base.bracket_keys(ka, kb)
        if ta == "x" and tb == "x":
            return {("x", j): c for j, c in br.items()}
        if ta == "b":
            return {("b", j): c for j, c in br.items()}
        s = sgn(self.base.degree(ka))
        return {("b", j): s * c for j, c in br.items()}

    def embed(self, x):
        return {("x", k): c for k, c in x.items()}

    def flat(self, x):
        return {("b", k): c for k, c in x.items()}

    @property
    def basis(self):
        return [("x", k) for k in self.base.basis] + [("b", k) for k in self.base.basis]


class LieMap:
    """Homogeneous linear map between Lie structures, given on keys."""

    def __init__(self, source, target, image, degree=0, name="f"):
        self.source = source
        self.target = target
        self._image = image
        self.degree = degree
        self.name = name
        self._cache = {}

    def image(self, key):
        v = self._cache.get(key)
        if v is None:
            v = self._cache[key] = self._image(key)
        return v

    def __call__(self, x):
        acc = {}
        for k, c in x.items():
            axpy(acc, c, self.image(k))
        return acc

    def compose(self, other, name=None):
        """self after other."""
        return LieMap(other.source, self.target, lambda k: self(other.image(k)),
                      self.degree + other.degree, name or f"{self.name}.{other.name}")


def artin_extend(f, src, tgt):
    """f tensor id_A between ArtinTensor structures."""
    def image(key):
        k, m = key
        return {(j, m): c for j, c in f.image(k).items()}
    return LieMap(src, tgt, image, f.degree, f.name)


def zero_vector():
    return {}


__all__ = [
    "AbelianLie", "ArtinTensor", "Cone", "LieMap", "LieStructure", "Product",
    "artin_extend", "sgn", "ZERO",
]
