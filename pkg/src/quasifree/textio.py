"""Plain-text format for algebras, finite algebras and morphisms.

Quasi-free algebra::

    algebra lie chain cutoff 9
    gen x1 1
    gen x2 3
    d x2 = 1/2 [x1,x1]

Finite algebra (explicit structure constants)::

    finite com cochain unitary cutoff 4
    basis a 2
    basis b 4
    mul a a = b

Morphism (generators without a ``map`` line go to zero)::

    morphism f
    map x1 = 2 x1
    map x2 = 4 x2

Several morphisms in one file are separated by ``---`` lines.  ``#`` starts
a comment.  Coefficients are exact rationals ``p/q``; a coefficient may be
juxtaposed with what it multiplies (``1/2 [x1,x1]``, ``5 a*a*a``).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Tuple

from .dga import FiniteAlgebra, Morphism, QuasiFreeAlgebra
from .errors import DegreeError, FlavorError, ParseError
from .freealg import Element, Flavor, FreeAlgebra, sign

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/,\[\]()=]))")


def _tokens(text: str, line: int, col0: int) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[j]!r}", line, col0 + j + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return out


class _ExprParser:
    """Recursive descent over one expression; values are Fraction or Element."""

    def __init__(self, free: FreeAlgebra, toks, line: int):
        self.free = free
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        col = tok[2] if tok else (self.toks[-1][2] + len(self.toks[-1][1]) if self.toks else 1)
        return ParseError(msg, self.line, col)

    def take(self, value=None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            raise self.error(f"expected {value!r}" if value else "unexpected end of expression")
        self.i += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return self.as_element(v)

    def as_element(self, v):
        if isinstance(v, Element):
            return v
        if v == 0:
            return self.free.zero()
        if self.free.flavor.unitary:
            return self.free.element({(): v})
        raise self.error("nonzero constant in a reduced algebra", self.toks[0] if self.toks else None)

    def expr(self):
        total = None
        first = True
        while True:
            tok = self.peek()
            s = 1
            if tok is not None and tok[1] in "+-":
                self.take()
                s = -1 if tok[1] == "-" else 1
            elif not first:
                break
            t = self.term()
            t = t if s == 1 else -t
            total = t if total is None else self.add(total, t)
            first = False
            tok = self.peek()
            if tok is None or tok[1] not in "+-":
                return total

    def add(self, a, b):
        if isinstance(a, Element) or isinstance(b, Element):
            return self.as_element(a) + self.as_element(b)
        return a + b

    def term(self):
        v = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok[1] in "+-,])":
                return v
            if tok[1] == "*":
                star = self.take()
                w = self.factor()
                v = self.times(v, w, star)
            else:
                w = self.factor()
                v = self.times(v, w, tok)

    def times(self, a, b, tok):
        if not isinstance(a, Element) or not isinstance(b, Element):
            return a * b
        if self.free.operad == "lie":
            raise self.error("products in a Lie algebra are written [a,b]", tok)
        return self.free.mul(a, b)

    def factor(self):
        tok = self.take()
        kind, val = tok[0], tok[1]
        if kind == "num":
            return Fraction(val)
        if kind == "name":
            if val not in self.free.deg:
                raise self.error(f"unknown generator {val!r}", tok)
            return self.free.gen(val)
        if val == "(":
            v = self.expr()
            self.take(")")
            return v
        if val == "[":
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take("]")
            if not isinstance(a, Element) or not isinstance(b, Element):
                return Fraction(0)
            return self.free.bracket(a, b)
        raise self.error(f"unexpected {val!r}", tok)


def parse_expr(free: FreeAlgebra, text: str, line: int = 1, col0: int = 0) -> Element:
    return _ExprParser(free, _tokens(text, line, col0), line).parse()


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield n, body


def _header(words: List[str], n: int) -> Tuple[Flavor, int]:
    rest = words[1:]
    if len(rest) not in (4, 5) or rest[-2] != "cutoff":
        raise ParseError(f"expected '{words[0]} <com|lie|assoc> <chain|cochain> [unitary|reduced] cutoff <D>'", n, 1)
    operad, direction = rest[0], rest[1]
    unitary = False
    if len(rest) == 5:
        if rest[2] not in ("unitary", "reduced"):
            raise ParseError(f"expected 'unitary' or 'reduced', got {rest[2]!r}", n, 1)
        unitary = rest[2] == "unitary"
    try:
        flavor = Flavor(operad, direction, unitary)
        cutoff = int(rest[-1])
    except FlavorError as e:
        raise ParseError(str(e), n, 1)
    except ValueError:
        raise ParseError(f"cutoff must be an integer, got {rest[-1]!r}", n, 1)
    return flavor, cutoff


def _definition(body: str, n: int, keyword: str, arity: int):
    """Split ``keyword name... = expr``; returns (names, expr text, column offset)."""
    if "=" not in body:
        raise ParseError(f"expected '{keyword} ... = <expr>'", n, len(body.rstrip()) + 1)
    lhs, rhs = body.split("=", 1)
    names = lhs.split()[1:]
    if len(names) != arity:
        raise ParseError(f"'{keyword}' takes {arity} name(s) before '='", n, 1)
    return names, rhs, len(lhs) + 1


def parse_algebra(text: str, name: str = None):
    """Parse a quasi-free (``algebra``) or finite (``finite``) presentation."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty file", 1, 1)
    n0, head = lines[0]
    words = head.split()
    if words[0] == "finite":
        return _parse_finite(lines, name)
    if words[0] != "algebra":
        raise ParseError(f"expected 'algebra' or 'finite', got {words[0]!r}", n0, 1)
    flavor, cutoff = _header(words, n0)
    gens: Dict[str, int] = {}
    dlines = []
    for n, body in lines[1:]:
        w = body.split()
        if w[0] == "gen":
            if len(w) != 3:
                raise ParseError("expected 'gen <name> <degree>'", n, 1)
            if w[1] in gens:
                raise ParseError(f"generator {w[1]!r} declared twice", n, body.index(w[1]) + 1)
            try:
                gens[w[1]] = int(w[2])
            except ValueError:
                raise ParseError(f"degree must be an integer, got {w[2]!r}", n, body.rindex(w[2]) + 1)
        elif w[0] == "d":
            dlines.append((n, body))
        else:
            raise ParseError(f"unknown keyword {w[0]!r}", n, body.index(w[0]) + 1)
    free = FreeAlgebra(flavor, gens)
    diff = {}
    for n, body in dlines:
        (g,), rhs, col0 = _definition(body, n, "d", 1)
        if g not in gens:
            raise ParseError(f"d of undeclared generator {g!r}", n, body.index(g) + 1)
        if g in diff:
            raise ParseError(f"d {g} given twice", n, 1)
        el = parse_expr(free, rhs, n, col0)
        if el.terms and (not el.is_homogeneous() or el.degree != gens[g] + flavor.dsign):
            raise DegreeError(f"line {n}: d {g} must have degree {gens[g] + flavor.dsign}, got {el.degree}")
        diff[g] = el
    return QuasiFreeAlgebra(flavor, gens, diff, cutoff, name=name)


def _parse_finite(lines, name):
    n0, head = lines[0]
    flavor, cutoff = _header(head.split(), n0)
    basis: Dict[int, List[str]] = {}
    deg: Dict[str, int] = {}
    rest = []
    for n, body in lines[1:]:
        w = body.split()
        if w[0] == "basis":
            if len(w) != 3:
                raise ParseError("expected 'basis <name> <degree>'", n, 1)
            try:
                k = int(w[2])
            except ValueError:
                raise ParseError(f"degree must be an integer, got {w[2]!r}", n, body.rindex(w[2]) + 1)
            if w[1] in deg:
                raise ParseError(f"basis element {w[1]!r} declared twice", n, 1)
            deg[w[1]] = k
            basis.setdefault(k, []).append(w[1])
        elif w[0] in ("d", "mul"):
            rest.append((n, body, w[0]))
        else:
            raise ParseError(f"unknown keyword {w[0]!r}", n, body.index(w[0]) + 1)
    # elements of a finite algebra are linear combinations of basis names
    lin = FreeAlgebra(Flavor("assoc", flavor.direction, False), deg)
    diff, mul = {}, {}
    for n, body, kw in rest:
        names, rhs, col0 = _definition(body, n, kw, 1 if kw == "d" else 2)
        for x in names:
            if x not in deg:
                raise ParseError(f"undeclared basis element {x!r}", n, body.index(x) + 1)
        el = parse_expr(lin, rhs, n, col0)
        if any(len(w) != 1 for w in el.terms):
            raise ParseError("right-hand side must be a linear combination of basis elements", n, col0 + 1)
        vec = {w[0]: c for w, c in el.terms.items()}
        if kw == "d":
            diff[names[0]] = vec
        else:
            mul[tuple(names)] = vec
    # fill in the opposite order from graded (anti)symmetry
    for (a, b), v in list(mul.items()):
        if (b, a) in mul or flavor.operad == "assoc":
            continue
        s = sign(deg[a] * deg[b]) * (-1 if flavor.operad == "lie" else 1)
        mul[(b, a)] = {m: s * c for m, c in v.items()}
    return FiniteAlgebra(flavor, basis, diff, mul, cutoff=cutoff, name=name)


def parse_morphisms(text: str, source: QuasiFreeAlgebra, target: QuasiFreeAlgebra,
                    check: bool = True) -> List[Morphism]:
    """All morphisms in a file (blocks separated by ``---``)."""
    blocks: List[List[Tuple[int, str]]] = [[]]
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip() == "---":
            blocks.append([])
        elif body.strip():
            blocks[-1].append((n, body))
    out = []
    for blk in blocks:
        if not blk:
            continue
        label = None
        assignment: Dict[str, Element] = {}
        for n, body in blk:
            w = body.split()
            if w[0] == "morphism":
                label = " ".join(w[1:]) or None
                continue
            if w[0] != "map":
                raise ParseError(f"unknown keyword {w[0]!r}", n, body.index(w[0]) + 1)
            (g,), rhs, col0 = _definition(body, n, "map", 1)
            if g not in source.free.deg:
                raise ParseError(f"{g!r} is not a generator of the source", n, body.index(g) + 1)
            el = parse_expr(target.free, rhs, n, col0)
            if el.terms and (not el.is_homogeneous() or el.degree != source.degree_of(g)):
                raise DegreeError(f"line {n}: {g} has degree {source.degree_of(g)}, image has degree {el.degree}")
            assignment[g] = el
        cut = min(source.cutoff, target.cutoff)
        full = {g: assignment.get(g, target.zero()) for g in source.gens if source.degree_of(g) <= cut}
        out.append(Morphism(source, target, full, check=check, name=label))
    return out


def parse_morphism(text: str, source: QuasiFreeAlgebra, target: QuasiFreeAlgebra,
                   check: bool = True) -> Morphism:
    found = parse_morphisms(text, source, target, check)
    if len(found) != 1:
        raise ParseError(f"expected one morphism, found {len(found)}", 1, 1)
    return found[0]


# ---------------------------------------------------------------------------
# printing


def _flavor_words(flavor: Flavor) -> str:
    return f"{flavor.operad} {flavor.direction} {'unitary' if flavor.unitary else 'reduced'}"


def format_algebra(A) -> str:
    """Canonical text form; ``parse_algebra(format_algebra(A)) == A``."""
    if isinstance(A, FiniteAlgebra):
        return _format_finite(A)
    lines = [f"algebra {_flavor_words(A.flavor)} cutoff {A.cutoff}"]
    lines += [f"gen {g} {A.degree_of(g)}" for g in A.gens]
    lines += [f"d {g} = {A.free.format(A.d[g])}" for g in A.gens if A.d[g].terms]
    return "\n".join(lines) + "\n"


def _lincomb(vec: Dict[str, Fraction], order: Dict[str, int]) -> str:
    items = [(vec[m], m) for m in sorted(vec, key=order.__getitem__) if vec[m]]
    if not items:
        return "0"
    out = []
    for k, (c, m) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        coef = "" if a == 1 else f"{a} "
        lead = ("-" if neg else "") if k == 0 else (" - " if neg else " + ")
        out.append(f"{lead}{coef}{m}")
    return "".join(out)


def _format_finite(F: FiniteAlgebra) -> str:
    lines = [f"finite {_flavor_words(F.flavor)} cutoff {F.cutoff}"]
    order = {}
    for k in sorted(F.basis):
        for m in F.basis[k]:
            order[m] = len(order)
            lines.append(f"basis {m} {k}")
    for m in order:
        if F.diff.get(m):
            lines.append(f"d {m} = {_lincomb(F.diff[m], order)}")
    for (a, b) in sorted(F.mul, key=lambda p: (order[p[0]], order[p[1]])):
        if F.mul[(a, b)]:
            lines.append(f"mul {a} {b} = {_lincomb(F.mul[(a, b)], order)}")
    return "\n".join(lines) + "\n"


def format_morphism(f: Morphism, label: str = None) -> str:
    label = label if label is not None else f.name
    lines = [f"morphism {label}" if label else "morphism"]
    for g in f.domain:
        x = f.assignment[g]
        if x.terms:
            lines.append(f"map {g} = {f.target.free.format(x)}")
    return "\n".join(lines) + "\n"


def format_morphisms(maps) -> str:
    return "---\n".join(format_morphism(f) for f in maps)


def read_algebra(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), name=path)


def format_homotopy(h) -> str:
    """Certificate: the nonzero α_i and β_i of ``h`` on each generator."""
    fmt = h.target.free.format
    lines = ["homotopy"]
    for g in h.domain:
        for i, a in enumerate(h.alphas[g]):
            if a.terms:
                lines.append(f"alpha {g} {i} = {fmt(a)}")
        for i, b in enumerate(h.betas[g]):
            if b.terms:
                lines.append(f"beta {g} {i} = {fmt(b)}")
    return "\n".join(lines) + "\n"
