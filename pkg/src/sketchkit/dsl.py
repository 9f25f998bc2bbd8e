"""Text format for categories, sketches, sequents and structures (``.sk`` files).

Example::

    category Two { objects: X, Y; arrow f: X -> Y; }
    sketch IsoB extends Two {
      objects: ;
      limit X with (W: f) over { nodes: W; };
    }
    sequent IsoSeq = Arrow |- Two |- IsoB;
    structure F : Arrow in Two { map X |-> X; map Y |-> Y; map f |-> f; }

Paths are written in composite order: ``g.f`` is ``f`` followed by ``g`` and
``id(A)`` is the empty path at ``A``.  A sketch or sequent may name a
category wherever a sketch is expected; it then stands for the category's
underlying sketch.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .errors import ParseError, ResolutionError
from .fincat import FiniteCategory, underlying_sketch
from .kernel import (
    COLIMIT,
    LIMIT,
    Commutativity,
    Convergence,
    Edge,
    Graph,
    Path,
    Sketch,
    dualize_sketch,
)
from .models import Structure, dualize_structure
from .sequents import ExactnessSequent, dualize_sequent

KEYWORDS = frozenset({
    "category", "sketch", "sequent", "structure", "extends", "objects", "arrow", "compose",
    "commute", "limit", "colimit", "with", "over", "nodes", "edge", "map", "in", "id",
})

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>\|->|\|-|->|[{}();:,.=])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "kw", "punct", "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "name":
            out.append(Token("kw" if s in KEYWORDS else "name", s, line, col))
        elif kind == "punct":
            out.append(Token("punct", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

CATEGORY, SKETCH, SEQUENT, STRUCTURE = "category", "sketch", "sequent", "structure"


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: str
    value: object
    base: str | None = None  # sketches only: the declaration they extend


@dataclass(frozen=True)
class Document:
    declarations: tuple[Declaration, ...] = ()

    @cached_property
    def _index(self) -> dict[tuple[str, str], Declaration]:
        return {(d.kind, d.name): d for d in self.declarations}

    def _of(self, kind: str) -> dict[str, object]:
        return {d.name: d.value for d in self.declarations if d.kind == kind}

    @property
    def categories(self) -> dict[str, FiniteCategory]:
        return self._of(CATEGORY)

    @property
    def sketches(self) -> dict[str, Sketch]:
        return self._of(SKETCH)

    @property
    def sequents(self) -> dict[str, ExactnessSequent]:
        return self._of(SEQUENT)

    @property
    def structures(self) -> dict[str, Structure]:
        return self._of(STRUCTURE)

    def _get(self, kind: str, name: str):
        d = self._index.get((kind, name))
        if d is None:
            raise ResolutionError(f"no {kind} named {name!r}")
        return d.value

    def category(self, name: str) -> FiniteCategory:
        return self._get(CATEGORY, name)

    def sketch(self, name: str) -> Sketch:
        """A declared sketch, or the underlying sketch of a declared category."""
        d = self._index.get((SKETCH, name))
        if d is not None:
            return d.value
        c = self._index.get((CATEGORY, name))
        if c is not None:
            return underlying_sketch(c.value)
        raise ResolutionError(f"no sketch or category named {name!r}")

    def sequent(self, name: str) -> ExactnessSequent:
        return self._get(SEQUENT, name)

    def structure(self, name: str) -> Structure:
        return self._get(STRUCTURE, name)

    def __len__(self) -> int:
        return len(self.declarations)

    def __iter__(self) -> Iterator[Declaration]:
        return iter(self.declarations)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.decls: list[Declaration] = []
        self.index: dict[tuple[str, str], Declaration] = {}
        self.problems: list[str] = []

    # token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, expected, message: str | None = None):
        t = self.tok
        raise ParseError(message or f"unexpected {t.describe()}", t.line, t.column, tuple(expected))

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "punct") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail([repr(text)])
        t = self.tok
        self.i += 1
        return t

    def name(self) -> str:
        t = self.tok
        if t.kind != "name":
            if t.kind == "kw":
                self.fail(["name"], f"{t.text!r} is a reserved word")
            self.fail(["name"])
        self.i += 1
        return t.text

    def names(self, stop: str = ";") -> list[str]:
        out = []
        if self.at(stop):
            return out
        out.append(self.name())
        while self.at(","):
            self.i += 1
            out.append(self.name())
        return out

    # resolution helpers ---------------------------------------------------

    def problem(self, tok: Token, message: str) -> None:
        self.problems.append(f"line {tok.line}, column {tok.column}: {message}")

    def declare(self, tok: Token, decl: Declaration) -> None:
        if (decl.kind, decl.name) in self.index:
            self.problem(tok, f"{decl.kind} {decl.name!r} is declared twice")
            return
        self.index[(decl.kind, decl.name)] = decl
        self.decls.append(decl)

    def lookup_sketch(self, tok: Token, name: str) -> Sketch | None:
        d = self.index.get((SKETCH, name))
        if d is not None:
            return d.value
        c = self.index.get((CATEGORY, name))
        if c is not None:
            return underlying_sketch(c.value)
        self.problem(tok, f"unknown sketch {name!r}")
        return None

    # grammar --------------------------------------------------------------

    def document(self) -> Document:
        while self.tok.kind != "eof":
            if self.at("category"):
                self.category()
            elif self.at("sketch"):
                self.sketch()
            elif self.at("sequent"):
                self.sequent()
            elif self.at("structure"):
                self.structure()
            else:
                self.fail(["'category'", "'sketch'", "'sequent'", "'structure'"])
        if self.problems:
            raise ResolutionError(self.problems)
        return Document(tuple(self.decls))

    def arrow_decl(self) -> Edge:
        self.expect("arrow")
        n = self.name()
        self.expect(":")
        s = self.name()
        self.expect("->")
        t = self.name()
        self.expect(";")
        return Edge(n, s, t)

    def category(self):
        start = self.expect("category")
        name = self.name()
        self.expect("{")
        self.expect("objects")
        self.expect(":")
        objects = self.names()
        self.expect(";")
        known = set(objects)
        arrows, declared = [], {f"id_{o}" for o in objects}
        while self.at("arrow"):
            tok = self.tok
            a = self.arrow_decl()
            declared.add(a.name)
            bad = [v for v in (a.source, a.target) if v not in known]
            for v in dict.fromkeys(bad):
                self.problem(tok, f"unknown object {v!r} in category {name!r}")
            if not bad:
                arrows.append(a)
        known_arrows = {f"id_{o}" for o in objects} | {a.name for a in arrows}
        compose = []
        while self.at("compose"):
            tok = self.tok
            self.i += 1
            g = self.name()
            self.expect(".")
            f = self.name()
            self.expect("=")
            h = self.name()
            self.expect(";")
            missing = [x for x in (g, f, h) if x not in declared]
            for x in dict.fromkeys(missing):
                self.problem(tok, f"unknown arrow {x!r} in category {name!r}")
            if all(x in known_arrows for x in (g, f, h)):
                compose.append((g, f, h))
        if not self.at("}"):
            self.fail(["'arrow'", "'compose'", "'}'"] if not compose else ["'compose'", "'}'"])
        self.i += 1
        cat = FiniteCategory.build(name, objects, arrows, compose)
        self.declare(start, Declaration(CATEGORY, name, cat))

    def path(self, graph: Graph) -> tuple[Path | None, Token]:
        t = self.tok
        if self.at("id"):
            self.i += 1
            self.expect("(")
            v = self.name()
            self.expect(")")
            return Path(v), t
        if t.kind != "name":
            self.fail(["name", "'id'"])
        edges = [self.name()]
        while self.at("."):
            self.i += 1
            edges.append(self.name())
        edges.reverse()
        e = graph.edge_map.get(edges[0])
        if e is None:
            self.problem(t, f"unknown arrow {edges[0]!r} in path")
            return None, t
        return Path(e.source, tuple(edges)), t

    def convergence(self, graph: Graph) -> Convergence | None:
        kind = LIMIT if self.at("limit") else COLIMIT
        self.i += 1
        apex = self.name()
        self.expect("with")
        self.expect("(")
        legs: list[tuple[str, str, Token]] = []
        if not self.at(")"):
            while True:
                lt = self.tok
                h = self.name()
                self.expect(":")
                legs.append((h, self.name(), lt))
                if not self.at(","):
                    break
                self.i += 1
        self.expect(")")
        self.expect("over")
        self.expect("{")
        self.expect("nodes")
        self.expect(":")
        nodes_tok = self.tok
        nodes = self.names()
        self.expect(";")
        shape_edges = []
        while self.at("edge"):
            self.i += 1
            et = self.tok
            n = self.name()
            self.expect(":")
            s = self.name()
            self.expect("->")
            t = self.name()
            self.expect("|->")
            amb = self.name()
            self.expect(";")
            shape_edges.append((n, s, t, amb, et))
        if not self.at("}"):
            self.fail(["'edge'", "'}'"])
        self.i += 1
        ok = True
        leg_map = {}
        for h, leg, lt in legs:
            if h in leg_map:
                self.problem(lt, f"leg for node {h!r} given twice")
                ok = False
            leg_map[h] = (leg, lt)
        if set(leg_map) != set(nodes) or len(set(nodes)) != len(nodes):
            self.problem(nodes_tok, "legs must be given for exactly the listed nodes")
            return None
        node_of = {}
        for h in nodes:
            leg, lt = leg_map[h]
            e = graph.edge_map.get(leg)
            if e is None:
                self.problem(lt, f"unknown leg arrow {leg!r}")
                ok = False
                continue
            node_of[h] = e.target if kind == LIMIT else e.source
        for n, s, t, amb, et in shape_edges:
            if s not in leg_map or t not in leg_map:
                self.problem(et, f"shape edge {n!r} joins undeclared nodes")
                ok = False
        if not ok:
            return None
        return Convergence(
            kind, apex,
            Graph(tuple(nodes), tuple(Edge(n, s, t) for n, s, t, _, _ in shape_edges)),
            tuple((h, node_of[h]) for h in nodes),
            tuple((n, amb) for n, _, _, amb, _ in shape_edges),
            tuple((h, leg_map[h][0]) for h in nodes),
        )

    def sketch(self):
        start = self.expect("sketch")
        name = self.name()
        base_name = None
        base = Sketch(name)
        if self.at("extends"):
            self.i += 1
            bt = self.tok
            base_name = self.name()
            found = self.lookup_sketch(bt, base_name)
            if found is not None:
                base = found
        self.expect("{")
        self.expect("objects")
        self.expect(":")
        objects = self.names()
        self.expect(";")
        arrows = []
        while self.at("arrow"):
            arrows.append(self.arrow_decl())
        graph = Graph(base.graph.vertices + tuple(objects), base.graph.edges + tuple(arrows))
        comms = []
        while self.at("commute"):
            self.i += 1
            lhs, _ = self.path(graph)
            self.expect("=")
            rhs, _ = self.path(graph)
            self.expect(";")
            if lhs is not None and rhs is not None:
                comms.append(Commutativity(lhs, rhs))
        convs = []
        while self.at("limit") or self.at("colimit"):
            c = self.convergence(graph)
            self.expect(";")
            if c is not None:
                convs.append(c)
        if not self.at("}"):
            self.fail(["'commute'", "'limit'", "'colimit'", "'}'"] if not convs else ["'limit'", "'colimit'", "'}'"])
        self.i += 1
        sk = Sketch(name, graph, base.commutativities + tuple(comms), base.convergences + tuple(convs))
        self.declare(start, Declaration(SKETCH, name, sk, base_name))

    def sequent(self):
        start = self.expect("sequent")
        name = self.name()
        self.expect("=")
        parts = []
        for k in range(3):
            if k:
                self.expect("|-")
            t = self.tok
            parts.append(self.lookup_sketch(t, self.name()))
        self.expect(";")
        if all(p is not None for p in parts):
            self.declare(start, Declaration(SEQUENT, name, ExactnessSequent(name, *parts)))

    def structure(self):
        start = self.expect("structure")
        name = self.name()
        self.expect(":")
        st = self.tok
        sk = self.lookup_sketch(st, self.name())
        self.expect("in")
        ct = self.tok
        cname = self.name()
        cd = self.index.get((CATEGORY, cname))
        if cd is None:
            self.problem(ct, f"unknown category {cname!r}")
        self.expect("{")
        mapping = {}
        while self.at("map"):
            self.i += 1
            mt = self.tok
            k = self.name()
            self.expect("|->")
            v = self.name()
            self.expect(";")
            if k in mapping:
                self.problem(mt, f"{k!r} is mapped twice")
            mapping[k] = (v, mt)
        if not self.at("}"):
            self.fail(["'map'", "'}'"])
        self.i += 1
        if sk is None or cd is None:
            return
        cat: FiniteCategory = cd.value
        before = len(self.problems)
        for k, (v, mt) in mapping.items():
            if sk.graph.has_vertex(k):
                if v not in cat.object_index:
                    self.problem(mt, f"{v!r} is not an object of {cat.name}")
            elif sk.graph.has_edge(k):
                if v not in cat.arrow_index:
                    self.problem(mt, f"{v!r} is not an arrow of {cat.name}")
            else:
                self.problem(mt, f"{k!r} is not an object or arrow of {sk.name}")
        for k in list(sk.vertices) + [e.name for e in sk.edges]:
            if k not in mapping:
                self.problem(start, f"structure {name} does not map {k!r}")
        if len(self.problems) > before:
            return
        F = Structure.from_mapping(sk, cat, {k: v for k, (v, _) in mapping.items()}, name)
        self.declare(start, Declaration(STRUCTURE, name, F))


def parse_document(text: str) -> Document:
    """Parse and resolve a document.

    Raises :class:`ParseError` on the first syntax error and
    :class:`ResolutionError` listing every unresolved reference.
    """
    return _Parser(text).document()


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------


def _names(xs) -> str:
    return ", ".join(xs)


def serialize_category(c: FiniteCategory) -> str:
    ids = c.identity_arrows
    for o in c.objects:
        if c.identity(o) != f"id_{o}":
            raise ValueError(f"category {c.name}: identity of {o} must be named id_{o} to serialize")
    lines = [f"category {c.name} {{", f"  objects: {_names(c.objects)};"]
    for a in c.arrows:
        if a.name not in ids:
            lines.append(f"  arrow {a.name}: {a.source} -> {a.target};")
    for g, f, h in c.composition:
        if g not in ids and f not in ids:
            lines.append(f"  compose {g}.{f} = {h};")
    lines.append("}")
    return "\n".join(lines)


def serialize_sketch(s: Sketch, base: Sketch | None = None, base_name: str | None = None) -> str:
    head = f"sketch {s.name}" + (f" extends {base_name}" if base_name else "") + " {"
    bv = set(base.vertices) if base else set()
    be = {e.name for e in base.edges} if base else set()
    # inherited conditions are removed as a multiset so repeats survive
    inherited = Counter(base.commutativities + base.convergences) if base else Counter()
    lines = [head, f"  objects: {_names(v for v in s.vertices if v not in bv)};"]
    for e in s.edges:
        if e.name not in be:
            lines.append(f"  arrow {e.name}: {e.source} -> {e.target};")
    for c in s.commutativities + s.convergences:
        if inherited[c]:
            inherited[c] -= 1
        else:
            lines.append(f"  {c.render()};")
    lines.append("}")
    return "\n".join(lines)


def serialize_sequent(s: ExactnessSequent) -> str:
    return f"sequent {s.name} = {s.x.name} |- {s.a.name} |- {s.b.name};"


def serialize_structure(F: Structure, name: str | None = None) -> str:
    lines = [f"structure {name or F.name} : {F.sketch.name} in {F.category.name} {{"]
    for k, v in F.objects + F.arrows:
        lines.append(f"  map {k} |-> {v};")
    lines.append("}")
    return "\n".join(lines)


def serialize_document(d: Document) -> str:
    blocks = []
    for decl in d.declarations:
        if decl.kind == CATEGORY:
            blocks.append(serialize_category(decl.value))
        elif decl.kind == SKETCH:
            base = d.sketch(decl.base) if decl.base else None
            blocks.append(serialize_sketch(decl.value, base, decl.base))
        elif decl.kind == SEQUENT:
            blocks.append(serialize_sequent(decl.value))
        else:
            blocks.append(serialize_structure(decl.value, decl.name))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# ---------------------------------------------------------------------------
# Whole-document duality
# ---------------------------------------------------------------------------


def dualize_document(d: Document) -> Document:
    """Dualize every declaration.

    Categories are renamed (``_op`` toggled); sketches keep their names and
    lose their ``extends`` base; references to a category's underlying
    sketch are redirected to the dual category.
    """
    cats = d.categories
    out = []

    def ref(s: Sketch) -> Sketch:
        if s.name in cats and s.name not in d.sketches:
            return underlying_sketch(cats[s.name].dual())
        return dualize_sketch(s)

    for decl in d.declarations:
        v = decl.value
        if decl.kind == CATEGORY:
            dc = FiniteCategory.build(v.dual().name, v.objects,
                                      [(a.name, a.target, a.source) for a in v.arrows
                                       if a.name not in v.identity_arrows],
                                      [(f, g, h) for g, f, h in v.composition
                                       if g not in v.identity_arrows and f not in v.identity_arrows])
            out.append(Declaration(CATEGORY, dc.name, dc))
        elif decl.kind == SKETCH:
            out.append(Declaration(SKETCH, decl.name, dualize_sketch(v)))
        elif decl.kind == SEQUENT:
            out.append(Declaration(SEQUENT, decl.name, ExactnessSequent(v.name, ref(v.x), ref(v.a), ref(v.b))))
        else:
            G = dualize_structure(v)
            G = Structure(ref(v.sketch), G.category, G.objects, G.arrows, G.name)
            out.append(Declaration(STRUCTURE, decl.name, G))
    return Document(tuple(out))


__all__ = [
    "Declaration", "Document", "Token", "dualize_document", "dualize_sequent", "load",
    "parse_document", "serialize_category", "serialize_document", "serialize_sequent",
    "serialize_sketch", "serialize_structure", "tokenize",
]
