"""Fixture files: a small line-oriented format for complexes, DGLAs, Cartan
homotopies and Abel-Jacobi data.

    # comment
    space V { e0:0  f0:0  e1:1 }
    d V { e0 -> 0 ; }
    sub F of V { e0 e1 }
    dgla g { space x:1 y:2 ; d x -> 0 ; bracket x x = 2/1*y ; }
    sub gt of g { y }
    morphism f : g -> h { x -> y }
    cartan i : g -> End(V) { x : e0 -> f0 }
    period P { g=g pair=(V,F) cartan=i }
    ajdatum D { g=g sub=gt pair=(V,F) v=e0 cartan=i }
    artin A vars=1 order=3
    artin B { basis a b ; mul a a = b ; }

Statements inside braces end with ``;`` or a newline.  Coefficients are
integers or ``p/q``.  Every object is validated when it is loaded.
"""

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .cartan import AbelJacobiDatum, CartanHomotopy, PeriodDatum, check_cartan
from .dgla import DGLAMorphism, DGLieAlgebra, EndAlgebra, check_dgla, check_morphism
from .exact import ArtinAlgebra, ArtinError, artin_truncated_poly, check_artin
from .graded import CochainComplex, DGPair, GradedError, GradedVectorSpace, check_complex
from .linalg import ONE, axpy
from .report import CheckResult


class FixtureError(ValueError):
    """Parse or validation failure.  ``failed_check`` names the axiom check
    that rejected an object; it is None for syntax and naming errors."""

    def __init__(self, message, line=None, col=None, witness=None, failed_check=None):
        self.line, self.col, self.witness = line, col, witness
        self.failed_check = failed_check
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class Fixture:
    path: str = "<string>"
    digest: str = ""
    complexes: dict = field(default_factory=dict)
    subs: dict = field(default_factory=dict)
    dglas: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    cartans: dict = field(default_factory=dict)
    periods: dict = field(default_factory=dict)
    ajdata: dict = field(default_factory=dict)
    artins: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def dg_pairs(self):
        """Every (complex, sub) pair declared in the file, by sub name."""
        return {name: DGPair(self.complexes[parent], keys)
                for name, (parent, keys) in self.subs.items() if parent in self.complexes}


# ---------------------------------------------------------------------------
# tokenizer


_TOKEN = re.compile(r"\s*(?:(#[^\n]*)|(->|[{}();:=,*+\-])|([^\s{}();:=,*+\-#]+))")


@dataclass
class Tok:
    text: str
    line: int
    col: int


def tokenize(text):
    toks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        pos = 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if not m or m.end() == pos:
                if line[pos:].strip():
                    raise FixtureError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
                break
            if m.group(1):
                break
            text_ = m.group(2) or m.group(3)
            if text_:
                toks.append(Tok(text_, lineno, m.start(m.lastindex) + 1))
            pos = m.end()
        toks.append(Tok("\n", lineno, len(line) + 1))
    return toks


class _Stream:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self, skip_newlines=True):
        j = self.i
        while skip_newlines and j < len(self.toks) and self.toks[j].text == "\n":
            j += 1
        return self.toks[j] if j < len(self.toks) else None

    def next(self, skip_newlines=True):
        while skip_newlines and self.i < len(self.toks) and self.toks[self.i].text == "\n":
            self.i += 1
        if self.i >= len(self.toks):
            last = self.toks[-1] if self.toks else Tok("", 1, 1)
            raise FixtureError("unexpected end of file", last.line, last.col)
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.next()
        if t.text != text:
            raise FixtureError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def block(self):
        """Tokens between braces, split into statements on ';' and newlines."""
        self.expect("{")
        stmts, cur = [], []
        while True:
            t = self.next(skip_newlines=False)
            if t.text == "}":
                break
            if t.text in (";", "\n"):
                if cur:
                    stmts.append(cur)
                cur = []
            else:
                cur.append(t)
        if cur:
            stmts.append(cur)
        return stmts


def _number(tok):
    try:
        return Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        raise FixtureError(f"bad number {tok.text!r}", tok.line, tok.col) from None


def parse_combo(toks, known, where):
    """``2/1*x + y - 3*z`` or ``0`` over names in ``known``."""
    out = {}
    if len(toks) == 1 and toks[0].text == "0":
        return out
    i, sign = 0, 1
    if not toks:
        raise FixtureError("empty linear combination", where.line, where.col)
    while i < len(toks):
        t = toks[i]
        if t.text in "+-":
            sign = 1 if t.text == "+" else -1
            i += 1
            t = toks[i] if i < len(toks) else where
        coeff = ONE
        if i + 1 < len(toks) and toks[i + 1].text == "*":
            coeff = _number(toks[i])
            i += 2
            if i >= len(toks):
                raise FixtureError("missing name after '*'", t.line, t.col)
        name = toks[i]
        if name.text not in known:
            raise FixtureError(f"undeclared name {name.text!r}", name.line, name.col)
        axpy(out, sign * coeff, {name.text: ONE})
        i += 1
        sign = 1
        if i < len(toks) and toks[i].text not in "+-":
            raise FixtureError(f"expected '+' or '-', found {toks[i].text!r}",
                               toks[i].line, toks[i].col)
    return out


def _split_arrow(stmt):
    for j, t in enumerate(stmt):
        if t.text == "->":
            return stmt[:j], stmt[j + 1:], t
    raise FixtureError("expected '->'", stmt[0].line, stmt[0].col)


def _degrees(stmt_tokens):
    """``name : deg`` items, possibly many on one statement."""
    out, i = [], 0
    toks = stmt_tokens
    while i < len(toks):
        if i + 2 >= len(toks):
            raise FixtureError("expected name:degree", toks[i].line, toks[i].col)
        name, colon, deg = toks[i], toks[i + 1], toks[i + 2]
        sign = 1
        if deg.text == "-" and i + 3 < len(toks):
            sign, deg = -1, toks[i + 3]
            i += 1
        if colon.text != ":":
            raise FixtureError("expected ':'", colon.line, colon.col)
        try:
            out.append((name.text, sign * int(deg.text)))
        except ValueError:
            raise FixtureError(f"bad degree {deg.text!r}", deg.line, deg.col) from None
        i += 3
    return out


def _options(stmts):
    """``key=value`` items; values may be ``(a,b)``."""
    flat = [t for s in stmts for t in s]
    out, i = {}, 0
    while i < len(flat):
        key = flat[i]
        if i + 2 >= len(flat) or flat[i + 1].text != "=":
            raise FixtureError("expected key=value", key.line, key.col)
        if flat[i + 2].text == "(":
            j = i + 3
            vals = []
            while j < len(flat) and flat[j].text != ")":
                if flat[j].text != ",":
                    vals.append(flat[j].text)
                j += 1
            out[key.text] = (tuple(vals), key)
            i = j + 1
        else:
            out[key.text] = (flat[i + 2].text, key)
            i += 3
    return out


# ---------------------------------------------------------------------------
# loader


def _fail_checks(results, tok, what, log=None):
    results = [results] if hasattr(results, "passed") else results
    bad = [r for r in results if not r.passed]
    if bad:
        raise FixtureError(f"{what} fails check {bad[0].name!r}", tok.line, tok.col,
                           witness=bad[0].witness, failed_check=bad[0].name)
    if log is not None:
        log.extend(CheckResult(f"{what}: {r.name}", True, detail=r.detail) for r in results)


def _need(table, name, tok, what):
    if name not in table:
        raise FixtureError(f"undeclared {what} {name!r}", tok.line, tok.col)
    return table[name]


def loads(text, path="<string>"):
    fx = Fixture(path=path, digest=hashlib.sha256(text.encode()).hexdigest())
    st = _Stream(tokenize(text))
    spaces = {}
    while st.peek() is not None:
        head = st.next()
        kind = head.text
        if kind == "space":
            name = st.next().text
            items = [x for s in st.block() for x in _degrees(s)]
            try:
                spaces[name] = GradedVectorSpace.from_pairs(items)
            except GradedError as exc:
                raise FixtureError(str(exc), head.line, head.col) from None
            fx.complexes[name] = CochainComplex(spaces[name])
        elif kind == "d":
            nt = st.next()
            space = _need(spaces, nt.text, nt, "space")
            old = fx.complexes[nt.text]
            d = {n: old.d_basis(n) for n in old.basis}
            for stmt in st.block():
                lhs, rhs, arrow = _split_arrow(stmt)
                if len(lhs) != 1 or lhs[0].text not in space:
                    raise FixtureError("expected a basis name before '->'", stmt[0].line, stmt[0].col)
                d[lhs[0].text] = parse_combo(rhs, space, arrow)
            try:
                C = CochainComplex(space, d)
            except GradedError as exc:
                raise FixtureError(str(exc), head.line, head.col) from None
            _fail_checks(check_complex(C), head, f"complex {nt.text}", fx.checks)
            fx.complexes[nt.text] = C
        elif kind == "sub":
            name = st.next().text
            of = st.next()
            if of.text != "of":
                raise FixtureError("expected 'of'", of.line, of.col)
            pt = st.next()
            keys = [t for s in st.block() for t in s]
            if pt.text in fx.complexes:
                known = fx.complexes[pt.text].space
            elif pt.text in fx.dglas:
                known = fx.dglas[pt.text].space
            else:
                raise FixtureError(f"undeclared space or dgla {pt.text!r}", pt.line, pt.col)
            for t in keys:
                if t.text not in known:
                    raise FixtureError(f"undeclared name {t.text!r}", t.line, t.col)
            sub = frozenset(t.text for t in keys)
            if pt.text in fx.complexes:
                try:
                    DGPair(fx.complexes[pt.text], sub)
                except GradedError as exc:
                    raise FixtureError(str(exc), head.line, head.col) from None
            else:
                _check_subalgebra(fx.dglas[pt.text], sub, head)
            fx.subs[name] = (pt.text, sub)
        elif kind == "dgla":
            name = st.next().text
            fx.dglas[name] = _load_dgla(name, st.block(), head, fx.checks)
        elif kind == "morphism":
            name = st.next().text
            st.expect(":")
            src_t = st.next()
            st.expect("->")
            tgt_t = st.next()
            src = _need(fx.dglas, src_t.text, src_t, "dgla")
            tgt = _need(fx.dglas, tgt_t.text, tgt_t, "dgla")
            images = {}
            for stmt in st.block():
                lhs, rhs, arrow = _split_arrow(stmt)
                if len(lhs) != 1 or lhs[0].text not in src.space:
                    raise FixtureError("expected a source basis name", stmt[0].line, stmt[0].col)
                images[lhs[0].text] = parse_combo(rhs, tgt.space, arrow)
            f = DGLAMorphism(src, tgt, images, name=name)
            _fail_checks(check_morphism(f), head, f"morphism {name}", fx.checks)
            fx.morphisms[name] = f
        elif kind == "cartan":
            name = st.next().text
            st.expect(":")
            g_t = st.next()
            st.expect("->")
            end_t = st.next()
            g = _need(fx.dglas, g_t.text, g_t, "dgla")
            m = re.fullmatch(r"End\((\w+)\)", end_t.text)
            if not m:
                st.expect("(")
                vt = st.next()
                st.expect(")")
                if end_t.text != "End":
                    raise FixtureError("expected End(V)", end_t.line, end_t.col)
                vname = vt.text
            else:
                vname = m.group(1)
            V = _need(fx.complexes, vname, end_t, "complex")
            images = {}
            for stmt in st.block():
                if len(stmt) < 4 or stmt[1].text != ":":
                    raise FixtureError("expected 'x : e -> combo'", stmt[0].line, stmt[0].col)
                gen = stmt[0]
                if gen.text not in g.space:
                    raise FixtureError(f"undeclared name {gen.text!r}", gen.line, gen.col)
                lhs, rhs, arrow = _split_arrow(stmt[2:])
                if len(lhs) != 1 or lhs[0].text not in V.space:
                    raise FixtureError("expected a basis vector of V", lhs[0].line if lhs else arrow.line,
                                       lhs[0].col if lhs else arrow.col)
                vec = images.setdefault(gen.text, {})
                for tgt_name, c in parse_combo(rhs, V.space, arrow).items():
                    axpy(vec, c, {("E", tgt_name, lhs[0].text): ONE})
            c = CartanHomotopy(g, EndAlgebra(V), images, name=name)
            c.V_name = vname
            _fail_checks(check_cartan(c), head, f"cartan homotopy {name}", fx.checks)
            fx.cartans[name] = c
        elif kind in ("period", "ajdatum"):
            name = st.next().text
            opts = _options(st.block())
            fx_obj = _load_datum(fx, kind, name, opts, head)
            (fx.periods if kind == "period" else fx.ajdata)[name] = fx_obj
        elif kind == "artin":
            name = st.next().text
            fx.artins[name] = _load_artin(st, name, head, fx.checks)
        else:
            raise FixtureError(f"unknown stanza {kind!r}", head.line, head.col)
    return fx


def _check_subalgebra(g, sub, tok):
    for k in sub:
        if any(j not in sub for j in g.d_key(k)):
            raise FixtureError(f"subalgebra is not d-closed at {k!r}", tok.line, tok.col)
        for m in sub:
            if any(j not in sub for j in g.bracket_keys(k, m)):
                raise FixtureError(f"subalgebra is not bracket-closed at ({k!r}, {m!r})",
                                   tok.line, tok.col)


def _load_dgla(name, stmts, head, log=None):
    items, d_stmts, br_stmts = [], [], []
    for stmt in stmts:
        word = stmt[0].text
        if word == "space":
            items.extend(_degrees(stmt[1:]))
        elif word == "d":
            d_stmts.append(stmt[1:])
        elif word == "bracket":
            br_stmts.append(stmt[1:])
        else:
            raise FixtureError(f"unknown dgla statement {word!r}", stmt[0].line, stmt[0].col)
    try:
        space = GradedVectorSpace.from_pairs(items)
    except GradedError as exc:
        raise FixtureError(str(exc), head.line, head.col) from None
    d, table = {}, {}
    for stmt in d_stmts:
        lhs, rhs, arrow = _split_arrow(stmt)
        if len(lhs) != 1 or lhs[0].text not in space:
            raise FixtureError("expected a basis name before '->'", arrow.line, arrow.col)
        d[lhs[0].text] = parse_combo(rhs, space, arrow)
    for stmt in br_stmts:
        if len(stmt) < 4 or stmt[2].text != "=":
            raise FixtureError("expected 'bracket x y = combo'", stmt[0].line, stmt[0].col)
        a, b = stmt[0], stmt[1]
        for t in (a, b):
            if t.text not in space:
                raise FixtureError(f"undeclared name {t.text!r}", t.line, t.col)
        key = (a.text, b.text)
        if key in table:
            raise FixtureError(f"bracket {key} given twice", a.line, a.col)
        table[key] = parse_combo(stmt[3:], space, stmt[2])
    g = DGLieAlgebra(space, d, table, name=name)
    _fail_checks(check_dgla(g), head, f"dgla {name}", log)
    return g


def _load_datum(fx, kind, name, opts, head):
    def opt(key):
        if key not in opts:
            raise FixtureError(f"{kind} {name} needs {key}=", head.line, head.col)
        return opts[key]

    gname, gt = opt("g")
    g = _need(fx.dglas, gname, gt, "dgla")
    (pv, pt) = opt("pair")
    if not isinstance(pv, tuple) or len(pv) != 2:
        raise FixtureError("pair must be (V,F)", pt.line, pt.col)
    V = _need(fx.complexes, pv[0], pt, "complex")
    parent, F = _need(fx.subs, pv[1], pt, "sub")
    if parent != pv[0]:
        raise FixtureError(f"{pv[1]} is not a sub of {pv[0]}", pt.line, pt.col)
    pair = DGPair(V, F)
    cname, ct = opt("cartan")
    c = _need(fx.cartans, cname, ct, "cartan homotopy")
    if c.g is not g or c.V_name != pv[0]:
        raise FixtureError("cartan homotopy does not match g and V", ct.line, ct.col)
    if kind == "period":
        obj = PeriodDatum(g, pair, c)
    else:
        sname, stok = opts.get("sub", (None, head))
        if sname is None:
            sub = frozenset()
        else:
            parent_s, sub = _need(fx.subs, sname, stok, "sub")
            if parent_s != gname:
                raise FixtureError(f"{sname} is not a sub of {gname}", stok.line, stok.col)
        vtext, vt = opt("v")
        v = parse_combo([Tok(vtext, vt.line, vt.col)], V.space, vt)
        obj = AbelJacobiDatum(g, sub, pair, v, c, name=name)
    _fail_checks(obj.check(), head, f"{kind} {name}", fx.checks)
    return obj


def _load_artin(st, name, head, log=None):
    nxt = st.peek()
    if nxt is not None and nxt.text == "{":
        basis, table = [], {}
        for stmt in st.block():
            word = stmt[0].text
            if word == "basis":
                basis.extend(t.text for t in stmt[1:])
            elif word == "mul":
                if len(stmt) < 5 or stmt[3].text != "=":
                    raise FixtureError("expected 'mul a b = combo'", stmt[0].line, stmt[0].col)
                table[(stmt[1].text, stmt[2].text)] = parse_combo(stmt[4:], set(basis), stmt[3])
            else:
                raise FixtureError(f"unknown artin statement {word!r}", stmt[0].line, stmt[0].col)
        try:
            A = ArtinAlgebra(basis, table, name=name)
        except ArtinError as exc:
            raise FixtureError(str(exc), head.line, head.col) from None
    else:
        vals = {}
        for _ in range(2):
            k = st.next(skip_newlines=False)
            st.expect("=")
            v = st.next(skip_newlines=False)
            vals[k.text] = v
        try:
            A = artin_truncated_poly(int(vals["vars"].text), int(vals["order"].text))
        except (KeyError, ValueError, ArtinError) as exc:
            raise FixtureError(f"bad artin stanza: {exc}", head.line, head.col) from None
        A.name = name
    _fail_checks(check_artin(A), head, f"artin {name}", log)
    return A


def load(path):
    path = Path(path)
    if not path.exists():
        bundled = bundled_path(path.name)
        if bundled is None:
            raise FileNotFoundError(f"no fixture file {str(path)!r}")
        path = bundled
    return loads(path.read_text(), str(path))


def bundled_path(name):
    root = resources.files("dglalab") / "data"
    for cand in (name, f"{name}.dg"):
        p = root / cand
        if p.is_file():
            return Path(str(p))
    return None


def bundled_names():
    root = resources.files("dglalab") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".dg"))


def load_bundled(name):
    p = bundled_path(name)
    if p is None:
        raise FileNotFoundError(f"no bundled fixture {name!r}")
    return loads(p.read_text(), p.name)
