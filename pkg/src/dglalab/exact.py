"""Local Artin algebras over the rationals, stored by their maximal ideal.

An algebra is described by a basis of m_A and a multiplication table on
that basis.  The unit is implicit; code that needs the whole algebra
A = Q.1 + m_A uses the reserved key ``UNIT``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .linalg import Echelon, ONE, axpy, fmt, frac, vec

UNIT = "1"


class ArtinError(ValueError):
    pass


def _monomial_name(exps):
    single = len(exps) == 1
    parts = []
    for i, a in enumerate(exps):
        if not a:
            continue
        base = "eps" if single else f"eps{i + 1}"
        parts.append(base if a == 1 else f"{base}^{a}")
    return "*".join(parts)


class ArtinAlgebra:
    """Commutative nilpotent algebra m_A with an explicit product table."""

    def __init__(self, basis, table, nilpotency_index=None, name=None):
        self.basis = tuple(basis)
        if UNIT in self.basis:
            raise ArtinError(f"basis name {UNIT!r} is reserved for the unit")
        if len(set(self.basis)) != len(self.basis):
            raise ArtinError("duplicate basis names")
        self.name = name
        self.index = {b: i for i, b in enumerate(self.basis)}
        self._table = {}
        for (a, b), v in table.items():
            for k in (a, b, *v):
                if k not in self.index:
                    raise ArtinError(f"unknown basis name {k!r}")
            self._table[(a, b)] = vec(v.items())
        self.nilpotency_index = (
            nilpotency_index if nilpotency_index is not None else self.compute_nilpotency()
        )

    @property
    def dim(self):
        return len(self.basis)

    def mul_basis(self, a, b):
        """Product of two basis names (or the unit) as a vector."""
        if a == UNIT:
            return {b: ONE}
        if b == UNIT:
            return {a: ONE}
        v = self._table.get((a, b))
        if v is None:
            v = self._table.get((b, a), {})
        return v

    def mul(self, x, y):
        acc = {}
        for a, c in x.items():
            for b, e in y.items():
                axpy(acc, c * e, self.mul_basis(a, b))
        return acc

    def power_spans(self, limit):
        """Dimensions of m, m^2, ... up to ``limit`` (stops at the first zero)."""
        dims = []
        current = [{b: ONE} for b in self.basis]
        for _ in range(limit):
            e = Echelon({b: i for i, b in enumerate(self.basis)})
            for v in current:
                e.insert(v)
            dims.append(e.rank)
            if not e.rank:
                break
            span = e.basis()
            current = [self.mul(v, {b: ONE}) for v in span for b in self.basis]
        return dims

    def compute_nilpotency(self):
        dims = self.power_spans(self.dim + 2)
        if dims[-1]:
            return None
        return len(dims)

    def element(self, coeffs=None, **kw):
        return ArtinElement(self, vec({**(coeffs or {}), **kw}.items()))

    def __repr__(self):
        label = self.name or "ArtinAlgebra"
        return f"<{label} dim m_A={self.dim} N={self.nilpotency_index}>"


@dataclass(frozen=True)
class ArtinElement:
    """Element of the maximal ideal (or of A when UNIT carries a coefficient)."""

    parent: ArtinAlgebra
    coeffs: dict = field(default_factory=dict)

    def _check(self, other):
        if not isinstance(other, ArtinElement) or other.parent is not self.parent:
            raise ArtinError("parent algebra mismatch")

    def __add__(self, other):
        self._check(other)
        return ArtinElement(self.parent, axpy(dict(self.coeffs), ONE, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return ArtinElement(self.parent, axpy(dict(self.coeffs), -ONE, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ArtinElement(self.parent, {k: v * other for k, v in self.coeffs.items() if other})
        return artin_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, ArtinElement)
            and other.parent is self.parent
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items(), key=lambda kv: str(kv[0]))))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        order = {UNIT: -1, **self.parent.index}
        return " + ".join(
            f"{fmt(c)}*{k}" for k, c in sorted(self.coeffs.items(), key=lambda kv: order[kv[0]])
        )


def artin_mul(a, b):
    a._check(b)
    return ArtinElement(a.parent, a.parent.mul(a.coeffs, b.coeffs))


def artin_truncated_poly(num_vars, order):
    """Q[eps_1..eps_k] modulo all monomials of total degree >= order."""
    if num_vars < 1:
        raise ArtinError("need at least one variable")
    if order < 2:
        raise ArtinError("order must be >= 2 (order 1 gives m_A = 0); use trivial_artin()")
    monos = []
    for deg in range(1, order):
        degree_monos = [
            tuple(sum(1 for c in combo if c == i) for i in range(num_vars))
            for combo in combinations_with_replacement(range(num_vars), deg)
        ]
        monos.extend(sorted(degree_monos, reverse=True))
    names = {m: _monomial_name(m) for m in monos}
    table = {}
    for m1, m2 in product(monos, repeat=2):
        prod = tuple(x + y for x, y in zip(m1, m2))
        if sum(prod) < order:
            table[(names[m1], names[m2])] = {names[prod]: ONE}
    label = f"Q[eps]/eps^{order}" if num_vars == 1 else f"Q[eps1..eps{num_vars}]/m^{order}"
    return ArtinAlgebra([names[m] for m in monos], table, nilpotency_index=order, name=label)


def trivial_artin():
    """The residue field itself: m_A = 0."""
    return ArtinAlgebra([], {}, nilpotency_index=1, name="Q")


def check_artin(A):
    """Commutativity, associativity and nilpotency of m_A, with witnesses."""
    from .report import CheckResult

    results = []
    bad = None
    for a, b in combinations_with_replacement(A.basis, 2):
        if A.mul_basis(a, b) != A.mul_basis(b, a):
            bad = (a, b)
            break
    results.append(CheckResult("commutative", bad is None, witness=bad))
    bad = None
    for a, b, c in product(A.basis, repeat=3):
        left = A.mul(A.mul({a: ONE}, {b: ONE}), {c: ONE})
        right = A.mul({a: ONE}, A.mul({b: ONE}, {c: ONE}))
        if left != right:
            bad = (a, b, c)
            break
    results.append(CheckResult("associative", bad is None, witness=bad))
    dims = A.power_spans(A.dim + 2)
    n = A.nilpotency_index
    ok = n is not None and len(dims) == n and dims[-1] == 0 and (n == 1 or dims[n - 2] > 0)
    witness = None if ok else {"power_dims": dims, "stored_index": n}
    results.append(CheckResult("nilpotent", ok, witness=witness))
    return results


def parse_artin_spec(text):
    """``"vars:order"`` as used by the CLI flag ``--artin``."""
    try:
        k, n = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise ArtinError(f"bad artin spec {text!r}, expected vars:order") from exc
    return artin_truncated_poly(k, n)


__all__ = [
    "ArtinAlgebra", "ArtinElement", "ArtinError", "UNIT", "artin_mul",
    "artin_truncated_poly", "check_artin", "frac", "parse_artin_spec", "trivial_artin",
]
