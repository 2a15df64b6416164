"""Graded vector spaces, cochain complexes and their exact cohomology."""

from dataclasses import dataclass, field

from .linalg import ONE, ZERO, Echelon, apply_linear, axpy, kernel, scale
from .report import CheckResult


class GradedError(ValueError):
    pass


class GradedVectorSpace:
    """Finite basis of named vectors, each with an integer degree."""

    def __init__(self, degrees):
        self.degrees = {int(k): list(v) for k, v in sorted(degrees.items()) if v}
        self._deg = {}
        for i, names in self.degrees.items():
            for n in names:
                if n in self._deg:
                    raise GradedError(f"basis name {n!r} appears twice")
                self._deg[n] = i
        self.basis = [n for i in sorted(self.degrees) for n in self.degrees[i]]
        self.position = {n: j for j, n in enumerate(self.basis)}

    @classmethod
    def from_pairs(cls, pairs):
        degrees = {}
        for name, deg in pairs:
            degrees.setdefault(deg, []).append(name)
        return cls(degrees)

    def degree(self, name):
        return self._deg[name]

    def __contains__(self, name):
        return name in self._deg

    def names_in(self, deg):
        return self.degrees.get(deg, [])

    def dim(self, deg=None):
        return len(self.basis) if deg is None else len(self.names_in(deg))

    def vector_degree(self, v):
        degs = {self._deg[k] for k in v}
        if len(degs) > 1:
            raise GradedError("vector is not homogeneous")
        return degs.pop() if degs else None

    def pairs(self):
        return [(n, self._deg[n]) for n in self.basis]


@dataclass
class GradedMap:
    """Homogeneous linear map given by images of basis names."""

    source: GradedVectorSpace
    target: GradedVectorSpace
    degree: int
    images: dict = field(default_factory=dict)

    def __post_init__(self):
        for n, v in self.images.items():
            for k in v:
                if self.target.degree(k) != self.source.degree(n) + self.degree:
                    raise GradedError(f"image of {n!r} has wrong degree")

    def image(self, name):
        return self.images.get(name, {})

    def __call__(self, v):
        return apply_linear(v, self.image)

    def compose(self, other):
        """self after other."""
        return GradedMap(
            other.source, self.target, self.degree + other.degree,
            {n: self(other.image(n)) for n in other.source.basis},
        )

    def block(self, deg):
        """Matrix of the block V^deg -> W^(deg+d) as rows over target names."""
        return [[self.image(s).get(t, 0) for s in self.source.names_in(deg)]
                for t in self.target.names_in(deg + self.degree)]


class CochainComplex:
    """A graded space with a degree +1 differential, given on basis names."""

    def __init__(self, space, d=None):
        self.space = space
        d = {k: v for k, v in (d or {}).items() if v}
        self.d = GradedMap(space, space, 1, d)

    @classmethod
    def from_pairs(cls, pairs, d=None):
        return cls(GradedVectorSpace.from_pairs(pairs), d)

    @property
    def basis(self):
        return self.space.basis

    def degree(self, name):
        return self.space.degree(name)

    def d_basis(self, name):
        return self.d.image(name)

    def diff(self, v):
        return self.d(v)

    def degrees(self):
        return sorted(self.space.degrees)


def check_complex(C):
    for n in C.basis:
        dd = C.diff(C.d_basis(n))
        if dd:
            return CheckResult("d^2 = 0", False, witness={"basis": n, "d^2": dd})
    return CheckResult("d^2 = 0", True)


class FiniteComplex:
    """Adapter giving cohomology a uniform view of a finite complex.

    ``basis(deg)`` returns vectors in some ambient coordinates,
    ``coords(deg, v)`` returns their coefficients (dict over indices),
    ``diff(v)`` applies the differential in ambient coordinates.
    """

    def __init__(self, degrees, basis, coords, diff):
        self._degrees = sorted(degrees)
        self._basis = basis
        self._coords = coords
        self.diff = diff

    def degrees(self):
        return self._degrees

    def basis(self, deg):
        return self._basis(deg)

    def coords(self, deg, v):
        return self._coords(deg, v)

    @classmethod
    def of(cls, C):
        pos = {deg: {n: j for j, n in enumerate(C.space.names_in(deg))} for deg in C.degrees()}
        return cls(
            C.degrees(),
            lambda deg: [{n: ONE} for n in C.space.names_in(deg)],
            lambda deg, v: {pos[deg][k]: c for k, c in v.items()},
            C.diff,
        )


class Cohomology:
    """Per-degree cohomology data: dims, representatives and projections."""

    def __init__(self, fc, only=None):
        self.fc = fc
        self.dims, self.reps, self.cocycle_dims, self.boundary_dims, self.ranks = {}, {}, {}, {}, {}
        self._echelons, self._accepted = {}, {}
        degs = fc.degrees() if only is None else [d for d in fc.degrees() if d in only]
        images = {}
        for deg in sorted(set(degs) | {d - 1 for d in degs}):
            images[deg] = [fc.diff(b) for b in fc.basis(deg)]
        for deg in degs:
            basis = fc.basis(deg)
            tgt = deg + 1
            img = [fc.coords(tgt, v) if v else {} for v in images[deg]]
            ker = kernel(img)
            self.ranks[deg] = len(basis) - len(ker)
            prev = deg - 1
            bnd = [fc.coords(deg, v) for v in images.get(prev, []) if v]
            e = Echelon()
            for j, v in enumerate(bnd):
                e.insert(v, tag=("B", j))
            self.boundary_dims[deg] = e.rank
            self.cocycle_dims[deg] = len(ker)
            reps, accepted = [], {}
            for j, z in enumerate(ker):
                r, _ = e.insert(z, tag=("Z", j))
                if r:
                    accepted[("Z", j)] = len(reps)
                    reps.append(z)
            self._echelons[deg] = e
            self._accepted[deg] = accepted
            self.dims[deg] = len(reps)
            self.reps[deg] = [self._ambient(deg, z) for z in reps]

    def _ambient(self, deg, coords):
        basis = self.fc.basis(deg)
        acc = {}
        for j, c in coords.items():
            axpy(acc, c, basis[j])
        return acc

    def project(self, deg, v):
        """Coordinates of the class of the cocycle ``v`` on the representatives."""
        if deg not in self._echelons:
            return ()
        e = self._echelons[deg]
        r, combo = e.reduce(self.fc.coords(deg, v))
        if r:
            raise GradedError("not in the span of cocycles")
        out = [ZERO] * self.dims[deg]
        for t, i in self._accepted[deg].items():
            out[i] -= combo.get(t, 0)
        return tuple(out)

    def is_coboundary(self, deg, v):
        return not any(self.project(deg, v))

    def degrees(self):
        return sorted(self.dims)

    def nonzero_dims(self):
        return {k: v for k, v in sorted(self.dims.items()) if v}


def cohomology(C, only=None):
    """Cohomology of a CochainComplex or FiniteComplex (optionally only some degrees)."""
    if isinstance(C, CochainComplex):
        res = check_complex(C)
        if not res:
            raise GradedError(f"d^2 != 0: {res.witness}")
        C = FiniteComplex.of(C)
    return Cohomology(C, only)


@dataclass
class DGPair:
    """A complex V with a basis-adapted subcomplex F (a subset of names)."""

    total: CochainComplex
    sub: frozenset

    def __post_init__(self):
        self.sub = frozenset(self.sub)
        for n in self.sub:
            if n not in self.total.space:
                raise GradedError(f"{n!r} is not a basis name of V")
        for n in self.sub:
            bad = [k for k in self.total.d_basis(n) if k not in self.sub]
            if bad:
                raise GradedError(f"F is not d-closed: d({n}) leaves F via {bad[0]!r}")

    def in_sub(self, v):
        return all(k in self.sub for k in v)

    def mod_sub(self, v):
        return {k: c for k, c in v.items() if k not in self.sub}


def quotient_complex(P):
    """V/F on the complementary names, with the projection as a GradedMap."""
    V = P.total
    names = [(n, V.degree(n)) for n in V.basis if n not in P.sub]
    Q = CochainComplex.from_pairs(names, {n: P.mod_sub(V.d_basis(n)) for n, _ in names})
    proj = GradedMap(V.space, Q.space, 0, {n: ({n: ONE} if n not in P.sub else {}) for n in V.basis})
    return Q, proj


def sub_complex(P):
    V = P.total
    names = [(n, V.degree(n)) for n in V.basis if n in P.sub]
    return CochainComplex.from_pairs(names, {n: V.d_basis(n) for n, _ in names})


def shift(C, n):
    """C[n]: (C[n])^i = C^(i+n), differential (-1)^n d."""
    pairs = [(name, C.degree(name) - n) for name in C.basis]
    sign = -1 if n % 2 else 1
    return CochainComplex.from_pairs(pairs, {k: scale(sign, C.d_basis(k)) for k in C.basis})


def tensor_artin(C, A):
    """C tensor m_A with basis (name, monomial) and differential d tensor id."""
    pairs = [((n, m), C.degree(n)) for n in C.basis for m in A.basis]
    d = {(n, m): {(k, m): c for k, c in C.d_basis(n).items()} for n in C.basis for m in A.basis}
    return CochainComplex.from_pairs(pairs, d)


def direct_sum(*complexes, tags=None):
    tags = tags or list(range(len(complexes)))
    pairs, d = [], {}
    for t, C in zip(tags, complexes):
        for n in C.basis:
            pairs.append(((t, n), C.degree(n)))
            d[(t, n)] = {(t, k): c for k, c in C.d_basis(n).items()}
    return CochainComplex.from_pairs(pairs, d)


def hypercohomology_tot(g00, g01, g10, g11, h0, v0, h1, v1):
    """Total complex of the square g00 -> g01 + g10 -> g11 and its cohomology.

    ``h0: g00 -> g01``, ``v0: g00 -> g10``, ``h1: g10 -> g11``,
    ``v1: g01 -> g11`` are callables on vectors.  The middle column sits
    in total degree shifted by one, the last by two; D = (-1)^p d + delta
    with delta = (h0, v0) then v1 - h1.
    """
    for n in g00.basis:
        x = {n: ONE}
        if axpy(v1(h0(x)), -ONE, h1(v0(x))):
            raise GradedError(f"square does not commute on {n!r}")
    pairs = []
    for tag, C, p in (("00", g00, 0), ("01", g01, 1), ("10", g10, 1), ("11", g11, 2)):
        pairs.extend(((tag, n), C.degree(n) + p) for n in C.basis)

    def lift(tag, v):
        return {(tag, k): c for k, c in v.items()}

    d = {}
    for n in g00.basis:
        x = {n: ONE}
        acc = lift("00", g00.d_basis(n))
        axpy(acc, ONE, lift("01", h0(x)))
        axpy(acc, ONE, lift("10", v0(x)))
        d[("00", n)] = acc
    for n in g01.basis:
        acc = lift("01", scale(-1, g01.d_basis(n)))
        axpy(acc, ONE, lift("11", v1({n: ONE})))
        d[("01", n)] = acc
    for n in g10.basis:
        acc = lift("10", scale(-1, g10.d_basis(n)))
        axpy(acc, -ONE, lift("11", h1({n: ONE})))
        d[("10", n)] = acc
    for n in g11.basis:
        d[("11", n)] = lift("11", g11.d_basis(n))
    tot = CochainComplex.from_pairs(pairs, d)
    chk = check_complex(tot)
    if not chk:
        raise GradedError(f"total differential does not square to zero: {chk.witness}")
    return tot, cohomology(tot)


def rebase_pair(C, spanning):
    """Present a d-closed subspace spanned by ``spanning`` as an adapted DGPair.

    The subspace gets an RREF basis; each of its vectors takes over the
    name of its pivot.  Returns (pair, change) where ``change[name]`` is
    the old-coordinate vector now called ``name``.
    """
    order = C.space.position
    e = Echelon(order)
    for v in spanning:
        C.space.vector_degree(v)
        e.insert(v)
    rows = {p: e.rows[p][0] for p in e.rows}
    change = {n: rows.get(n, {n: ONE}) for n in C.basis}

    # express an old-coordinate vector in the new basis
    def to_new(v):
        v = dict(v)
        out = {}
        for p in sorted(rows, key=order.get):
            c = v.get(p)
            if c:
                out[p] = c
                axpy(v, -c, rows[p])
        for k, c in v.items():
            out[k] = out.get(k, 0) + c
        return {k: c for k, c in out.items() if c}

    new_d = {n: to_new(C.diff(change[n])) for n in C.basis}
    newC = CochainComplex(C.space, new_d)
    return DGPair(newC, frozenset(rows)), change
