"""Finite DG-Lie algebras and the standard constructions on a DG pair.

End*(V) lives on elementary matrices ("E", target, source) of degree
|target| - |source|.  Aff(V) adds translations ("v", e).  Both the
F-preserving variants are subsets of these keys, so every inclusion and
sigma_0 is the identity on keys.
"""

from itertools import product

from .graded import CochainComplex, GradedError, GradedVectorSpace, check_complex
from .lie import Cone, LieMap, LieStructure, Product, sgn
from .linalg import ONE, axpy, nullspace_rows, scale
from .report import CheckResult


class DGLAError(ValueError):
    pass


class DGLieAlgebra(LieStructure):
    """Finite DGLA from a basis with degrees, a differential and a bracket table.

    The table may give either orientation of a pair; the other one follows
    from graded antisymmetry.  If both are given they must agree, which
    ``check_dgla`` verifies.
    """

    def __init__(self, space, d=None, table=None, name="g"):
        super().__init__()
        self.space = space
        self.name = name
        self._d = {k: v for k, v in (d or {}).items() if v}
        self.table = {k: v for k, v in (table or {}).items()}
        for (a, b), v in self.table.items():
            for k in (a, b, *v):
                if k not in space:
                    raise DGLAError(f"unknown basis element {k!r} in bracket table")

    @classmethod
    def from_pairs(cls, pairs, d=None, table=None, name="g"):
        return cls(GradedVectorSpace.from_pairs(pairs), d, table, name)

    @property
    def basis(self):
        return self.space.basis

    def degree(self, key):
        return self.space.degree(key)

    def d_basis(self, key):
        return self._d.get(key, {})

    def bracket_basis(self, a, b):
        v = self.table.get((a, b))
        if v is not None:
            return v
        v = self.table.get((b, a))
        if v is None:
            return {}
        return scale(-sgn(self.degree(a) * self.degree(b)), v)

    @property
    def complex(self):
        return complex_of(self)


class FiniteLie(LieStructure):
    """A LieStructure with an explicit finite basis wrapped around another."""

    def __init__(self, inner, basis, name=None):
        super().__init__()
        self.inner = inner
        self.basis = list(basis)
        self.name = name or inner.name

    def degree(self, key):
        return self.inner.degree(key)

    def d_basis(self, key):
        return self.inner.d_key(key)

    def bracket_basis(self, a, b):
        return self.inner.bracket_keys(a, b)


def complex_of(L, basis=None):
    basis = list(basis if basis is not None else L.basis)
    return CochainComplex.from_pairs([(k, L.degree(k)) for k in basis],
                                     {k: L.d_key(k) for k in basis})


def _degree_ok(L, v, deg):
    return all(L.degree(k) == deg for k in v)


def check_dgla(L, basis=None, limit_triples=None):
    """Exact check of the DGLA axioms on all basis pairs and triples."""
    basis = list(basis if basis is not None else L.basis)
    members = set(basis)
    deg = {k: L.degree(k) for k in basis}
    out = []

    bad = None
    for k in basis:
        v = L.d_key(k)
        if not _degree_ok(L, v, deg[k] + 1) or any(j not in members for j in v):
            bad = {"basis": k, "d": v}
            break
    out.append(CheckResult("differential has degree +1", bad is None, witness=bad))
    out.append(check_complex(complex_of(L, basis)) if bad is None else
               CheckResult("d^2 = 0", False, witness="skipped"))

    bad = None
    for a, b in product(basis, repeat=2):
        v = L.bracket_keys(a, b)
        if not _degree_ok(L, v, deg[a] + deg[b]) or any(j not in members for j in v):
            bad = {"pair": (a, b), "bracket": v}
            break
    out.append(CheckResult("bracket is homogeneous and closed", bad is None, witness=bad))

    bad = None
    raw = getattr(L, "table", None)
    for a, b in product(basis, repeat=2):
        if raw is not None and (a, b) in raw and (b, a) in raw:
            lhs, rhs = raw[(a, b)], raw[(b, a)]
        else:
            lhs, rhs = L.bracket_keys(a, b), L.bracket_keys(b, a)
        if axpy(dict(lhs), sgn(deg[a] * deg[b]), rhs):
            bad = {"pair": (a, b), "[a,b]": lhs, "[b,a]": rhs}
            break
    out.append(CheckResult("graded antisymmetry", bad is None, witness=bad))

    bad = None
    for a, b in product(basis, repeat=2):
        lhs = L.d(L.bracket_keys(a, b))
        rhs = L.bracket(L.d_key(a), {b: ONE})
        axpy(rhs, sgn(deg[a]), L.bracket({a: ONE}, L.d_key(b)))
        if axpy(lhs, -ONE, rhs):
            bad = {"pair": (a, b), "defect": lhs}
            break
    out.append(CheckResult("Leibniz rule", bad is None, witness=bad))

    bad = None
    count = 0
    for a, b, c in product(basis, repeat=3):
        count += 1
        if limit_triples and count > limit_triples:
            break
        x, y, z = {a: ONE}, {b: ONE}, {c: ONE}
        lhs = L.bracket(x, L.bracket_keys(b, c))
        rhs = L.bracket(L.bracket_keys(a, b), z)
        axpy(rhs, sgn(deg[a] * deg[b]), L.bracket(y, L.bracket_keys(a, c)))
        if axpy(lhs, -ONE, rhs):
            bad = {"triple": (a, b, c), "defect": lhs}
            break
    out.append(CheckResult("graded Jacobi identity", bad is None, witness=bad))
    return out


class DGLAMorphism(LieMap):
    """Degree-0 map between finite Lie structures given on keys."""

    def __init__(self, source, target, images, name="f"):
        if callable(images):
            super().__init__(source, target, images, 0, name)
        else:
            table = dict(images)
            super().__init__(source, target, lambda k: table.get(k, {}), 0, name)


def identity_on_keys(source, target, name="incl"):
    return DGLAMorphism(source, target, lambda k: {k: ONE}, name)


def check_morphism(f, basis=None):
    src, tgt = f.source, f.target
    basis = list(basis if basis is not None else src.basis)
    out = []
    bad = None
    for k in basis:
        img = f.image(k)
        if any(tgt.degree(j) != src.degree(k) + f.degree for j in img):
            bad = {"basis": k, "image": img}
            break
    out.append(CheckResult(f"{f.name}: preserves degrees", bad is None, witness=bad))
    bad = None
    for k in basis:
        lhs = f(src.d_key(k))
        rhs = tgt.d(f.image(k))
        if axpy(lhs, -ONE, rhs):
            bad = {"basis": k, "defect": lhs}
            break
    out.append(CheckResult(f"{f.name}: chain map", bad is None, witness=bad))
    bad = None
    for a, b in product(basis, repeat=2):
        lhs = f(src.bracket_keys(a, b))
        rhs = tgt.bracket(f.image(a), f.image(b))
        if axpy(lhs, -ONE, rhs):
            bad = {"pair": (a, b), "defect": lhs}
            break
    out.append(CheckResult(f"{f.name}: preserves brackets", bad is None, witness=bad))
    return out


# ---------------------------------------------------------------------------
# End and Aff


def _check_adapted(V, sub):
    for n in sub:
        if n not in V.space:
            raise GradedError(f"{n!r} is not a basis vector of V")
        if any(k not in sub for k in V.d_basis(n)):
            raise GradedError(f"subspace is not d-closed at {n!r}")


class EndAlgebra(LieStructure):
    """End*(V) (optionally preserving subspaces) on elementary matrices."""

    def __init__(self, V, subs=(), name=None):
        super().__init__()
        self.V = V
        self.subs = tuple(frozenset(F) for F in subs)
        for F in self.subs:
            _check_adapted(V, F)
        self.name = name or ("End(V)" if not subs else "End(V;F)")
        keys = [("E", a, b) for b in V.basis for a in V.basis if self._allowed(a, b)]
        self.basis = sorted(keys, key=lambda k: (self.degree(k), V.space.position[k[2]],
                                                  V.space.position[k[1]]))

    def _allowed(self, a, b):
        return all(a in F for F in self.subs if b in F)

    def degree(self, key):
        if key[0] == "E":
            return self.V.degree(key[1]) - self.V.degree(key[2])
        return self.V.degree(key[1])

    def _compose_keys(self, x, y):
        if x[2] != y[1]:
            return {}
        return {("E", x[1], y[2]): ONE}

    def compose(self, x, y):
        acc = {}
        for a, c in x.items():
            for b, e in y.items():
                if a[2] == b[1]:
                    axpy(acc, c * e, {("E", a[1], b[2]): ONE})
        return acc

    def act(self, xi, v):
        """Apply an endomorphism to a vector of V."""
        acc = {}
        for (_, a, b), c in xi.items():
            e = v.get(b)
            if e:
                axpy(acc, c * e, {a: ONE})
        return acc

    def d_V_operator(self):
        return {("E", k, n): c for n in self.V.basis for k, c in self.V.d_basis(n).items()}

    def end_d_basis(self, key):
        _, a, b = key
        out = {}
        for k, c in self.V.d_basis(a).items():
            axpy(out, c, {("E", k, b): ONE})
        s = -sgn(self.V.degree(a) - self.V.degree(b))
        for j in self.V.basis:
            c = self.V.d_basis(j).get(b)
            if c:
                axpy(out, s * c, {("E", a, j): ONE})
        return out

    def d_basis(self, key):
        return self.end_d_basis(key)

    def end_bracket(self, a, b):
        out = dict(self._compose_keys(a, b))
        axpy(out, -sgn(self.degree(a) * self.degree(b)), self._compose_keys(b, a))
        return out

    def bracket_basis(self, a, b):
        return self.end_bracket(a, b)

    def identity(self):
        return {("E", n, n): ONE for n in self.V.basis}


class AffAlgebra(EndAlgebra):
    """Aff(V) = End*(V) + V with [(xi,w),(eta,u)] = ([xi,eta], xi(u) - (-1)^{|eta||w|} eta(w))."""

    def __init__(self, V, sub=None, name=None):
        subs = (sub,) if sub is not None else ()
        super().__init__(V, subs, name=name or ("Aff(V)" if sub is None else "Aff(V;F)"))
        trans = [("v", e) for e in V.basis if sub is None or e in sub]
        self.end_basis = list(self.basis)
        self.basis = self.end_basis + trans

    def d_basis(self, key):
        if key[0] == "v":
            return {("v", k): c for k, c in self.V.d_basis(key[1]).items()}
        return self.end_d_basis(key)

    def bracket_basis(self, a, b):
        if a[0] == "E" and b[0] == "E":
            return self.end_bracket(a, b)
        if a[0] == "v" and b[0] == "v":
            return {}
        if a[0] == "E":
            return {("v", k): c for k, c in self.act({a: ONE}, {b[1]: ONE}).items()}
        s = -sgn(self.degree(b) * self.degree(a))
        return {("v", k): s * c for k, c in self.act({b: ONE}, {a[1]: ONE}).items()}

    def split(self, x):
        """(endomorphism part, translation part as a vector of V)."""
        xi = {k: c for k, c in x.items() if k[0] == "E"}
        w = {k[1]: c for k, c in x.items() if k[0] == "v"}
        return xi, w

    def join(self, xi, w):
        out = dict(xi)
        for k, c in w.items():
            out[("v", k)] = c
        return out


def end_dgla(V):
    return EndAlgebra(V)


def end_preserving(V, *subs):
    return EndAlgebra(V, subs)


def aff_dgla(V):
    return AffAlgebra(V)


def aff_preserving(V, F):
    return AffAlgebra(V, F)


ONE_KEY = "__one__"


def block_matrix_model(V):
    """End(V + Q) where the extra basis vector spans the degree-0 line Q."""
    W = CochainComplex.from_pairs(V.space.pairs() + [(ONE_KEY, 0)],
                                  {n: V.d_basis(n) for n in V.basis})
    return EndAlgebra(W, name="End(V+Q)")


def aff_to_matrix(x):
    """(xi, w) -> [[xi, w], [0, 0]] acting on V + Q."""
    out = {}
    for k, c in x.items():
        out[k if k[0] == "E" else ("E", k[1], ONE_KEY)] = c
    return out


def check_aff_matrix_model(aff):
    """Bracket and differential of Aff agree with commutators of block matrices."""
    M = block_matrix_model(aff.V)
    bad = None
    for a, b in product(aff.basis, repeat=2):
        lhs = aff_to_matrix(aff.bracket_keys(a, b))
        rhs = M.bracket(aff_to_matrix({a: ONE}), aff_to_matrix({b: ONE}))
        if axpy(lhs, -ONE, rhs):
            bad = {"pair": (a, b), "defect": lhs}
            break
    if bad is None:
        for a in aff.basis:
            lhs = aff_to_matrix(aff.d_key(a))
            rhs = M.d(aff_to_matrix({a: ONE}))
            if axpy(lhs, -ONE, rhs):
                bad = {"basis": a, "defect": lhs}
                break
    return CheckResult("Aff agrees with the block-matrix model", bad is None, witness=bad)


def sigma_v(V, v, F=None):
    """sigma_v(xi) = (xi, -xi(v)) from End*(V[;F]) to Aff(V[;F])."""
    if V.diff(v):
        raise DGLAError("v must be closed")
    if any(V.degree(k) != 0 for k in v):
        raise DGLAError("v must have degree 0")
    if F is not None and any(k not in F for k in v):
        raise DGLAError("v must lie in F")
    src = EndAlgebra(V, (F,) if F is not None else ())
    tgt = AffAlgebra(V, F)

    def image(key):
        out = {key: ONE}
        for k, c in src.act({key: ONE}, v).items():
            out[("v", k)] = -c
        return out

    return DGLAMorphism(src, tgt, image, name="sigma_v")


def project_aff(aff, end):
    return DGLAMorphism(aff, end, lambda k: {k: ONE} if k[0] == "E" else {}, name="pr")


def cone_id(g):
    return Cone(g)


def cone_basis(C):
    return C.basis


def check_cone_relations(C, basis=None):
    """d(flat x) + flat(dx) = x, [flat x, y] = flat[x, y], [flat x, flat y] = 0."""
    g = C.base
    basis = list(basis if basis is not None else g.basis)
    bad = None
    for k in basis:
        lhs = C.d_key(("b", k))
        axpy(lhs, ONE, C.flat(g.d_key(k)))
        if axpy(lhs, -ONE, {("x", k): ONE}):
            bad = {"d flat": k, "defect": lhs}
            break
    if bad is None:
        for a, b in product(basis, repeat=2):
            lhs = C.bracket_keys(("b", a), ("x", b))
            if axpy(dict(lhs), -ONE, C.flat(g.bracket_keys(a, b))) or C.bracket_keys(("b", a), ("b", b)):
                bad = {"pair": (a, b)}
                break
    return CheckResult("cone(Id) relations", bad is None, witness=bad)


# ---------------------------------------------------------------------------
# subalgebras cut out by linear equations


class SubLie(LieStructure):
    """Subalgebra of a finite structure spanned by RREF solution vectors.

    Keys are (label, j).  The coordinates of a member are read off its
    entries on the free variables, so no solve is needed.
    """

    def __init__(self, ambient, vectors_by_degree, label="w", name="sub"):
        super().__init__()
        self.ambient = ambient
        self.label = label
        self.name = name
        self.vectors = {}
        self.free = {}
        self._deg = {}
        self.basis = []
        j = 0
        for deg in sorted(vectors_by_degree):
            free, vecs = vectors_by_degree[deg]
            for f, v in zip(free, vecs):
                key = (label, j)
                self.vectors[key] = v
                self.free[f] = key
                self._deg[key] = deg
                self.basis.append(key)
                j += 1

    def degree(self, key):
        return self._deg[key]

    def coords(self, x):
        out = {self.free[f]: c for f, c in x.items() if f in self.free}
        if axpy(self.embed(out), -ONE, x):
            raise DGLAError("element is not in the subalgebra")
        return out

    def embed(self, x):
        acc = {}
        for k, c in x.items():
            axpy(acc, c, self.vectors[k])
        return acc

    def d_basis(self, key):
        return self.coords(self.ambient.d(self.vectors[key]))

    def bracket_basis(self, a, b):
        return self.coords(self.ambient.bracket(self.vectors[a], self.vectors[b]))


def _solve_sub(ambient, basis, constraint_of):
    """Per degree: RREF solutions of the linear conditions constraint_of(key)."""
    by_deg = {}
    for k in basis:
        by_deg.setdefault(ambient.degree(k), []).append(k)
    out = {}
    for deg, keys in sorted(by_deg.items()):
        # constraint rows: for each output coordinate, the functional on keys
        rows = {}
        for k in keys:
            for j, c in constraint_of(k).items():
                rows.setdefault(j, {})[k] = c
        free, vecs = nullspace_rows(list(rows.values()), keys)
        out[deg] = (free, vecs)
    return out


def dgla_kernel(f, basis=None, name="ker"):
    basis = list(basis if basis is not None else f.source.basis)
    sols = _solve_sub(f.source, basis, f.image)
    return SubLie(f.source, sols, label="k", name=name)


def dgla_fiber_product(f, g, name="fp"):
    """g0 x_h g1 for f: g0 -> h and g: g1 -> h, with both projections."""
    if f.target is not g.target and getattr(f.target, "basis", None) != getattr(g.target, "basis", None):
        raise DGLAError("morphisms must share their target")
    P = Product(f.source, g.source)
    basis = [(0, k) for k in f.source.basis] + [(1, k) for k in g.source.basis]

    def constraint(key):
        i, k = key
        return f.image(k) if i == 0 else scale(-1, g.image(k))

    sols = _solve_sub(P, basis, constraint)
    S = SubLie(P, sols, label="p", name=name)
    p0 = LieMap(S, f.source, lambda k: P.component(S.vectors[k], 0), 0, "p0")
    p1 = LieMap(S, g.source, lambda k: P.component(S.vectors[k], 1), 0, "p1")
    return S, p0, p1


def restriction_to_quotient(end, pair):
    """End(V) -> Hom(F, V/F), xi -> (xi restricted to F) mod F, on keys."""
    F = pair.sub

    def image(key):
        _, a, b = key
        if b in F and a not in F:
            return {("H", a, b): ONE}
        return {}

    return LieMap(end, None, image, 0, "res")
