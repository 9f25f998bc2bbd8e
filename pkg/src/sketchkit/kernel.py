"""Sketch data model: graphs, paths, conditions, sketches and sketch morphisms.

Everything here is an immutable value.  Vertices and edges are identified by
name; a convergence condition is stored as a concrete tuple (shape, diagram,
apex, legs) and compared up to shape isomorphism by
:func:`conditions_equivalent`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

from .errors import PreconditionError, ResolutionError

LIMIT = "limit"
COLIMIT = "colimit"
KINDS = (LIMIT, COLIMIT)


def dual_kind(kind: str) -> str:
    return COLIMIT if kind == LIMIT else LIMIT


# ---------------------------------------------------------------------------
# Validation reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


# ---------------------------------------------------------------------------
# Graphs and paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str

    def reversed(self) -> Edge:
        return Edge(self.name, self.target, self.source)


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.name: e for e in self.edges}

    def has_vertex(self, name: str) -> bool:
        return name in self.vertex_set

    def has_edge(self, name: str) -> bool:
        return name in self.edge_map

    def edge(self, name: str) -> Edge:
        try:
            return self.edge_map[name]
        except KeyError:
            raise ResolutionError(f"unknown edge {name!r}") from None

    def reversed(self) -> Graph:
        return Graph(self.vertices, tuple(e.reversed() for e in self.edges))

    def is_subgraph_of(self, other: Graph) -> bool:
        if not self.vertex_set <= other.vertex_set:
            return False
        return all(other.edge_map.get(e.name) == e for e in self.edges)

    def edges_between(self, source: str, target: str) -> list[Edge]:
        return [e for e in self.edges if e.source == source and e.target == target]


@dataclass(frozen=True)
class Path:
    """A path ``(start, e1, ..., en)``; the empty path is anchored at ``start``."""

    start: str
    edges: tuple[str, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def end(self, graph: Graph) -> str:
        if not self.edges:
            return self.start
        return graph.edge(self.edges[-1]).target

    def dual(self, graph: Graph) -> Path:
        """The same path read in the opposite graph."""
        return Path(self.end(graph), tuple(reversed(self.edges)))

    def render(self) -> str:
        if not self.edges:
            return f"id({self.start})"
        return ".".join(reversed(self.edges))

    def __str__(self) -> str:
        return self.render()


def path_problems(graph: Graph, path: Path) -> list[str]:
    problems = []
    if not graph.has_vertex(path.start):
        problems.append(f"path starts at undeclared vertex {path.start!r}")
        return problems
    here = path.start
    for name in path.edges:
        e = graph.edge_map.get(name)
        if e is None:
            problems.append(f"path uses undeclared edge {name!r}")
            return problems
        if e.source != here:
            problems.append(f"edge {name!r} starts at {e.source!r}, path is at {here!r}")
            return problems
        here = e.target
    return problems


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Commutativity:
    lhs: Path
    rhs: Path

    @property
    def key(self) -> tuple:
        # an asserted equation is symmetric; membership ignores orientation
        a = (self.lhs.start, self.lhs.edges)
        b = (self.rhs.start, self.rhs.edges)
        return (a, b) if a <= b else (b, a)

    @property
    def start(self) -> str:
        return self.lhs.start

    def edge_names(self) -> set[str]:
        return set(self.lhs.edges) | set(self.rhs.edges)

    def dual(self, graph: Graph) -> Commutativity:
        return Commutativity(self.lhs.dual(graph), self.rhs.dual(graph))

    def render(self) -> str:
        return f"commute {self.lhs.render()} = {self.rhs.render()}"

    def __str__(self) -> str:
        return self.render()


def _pairs(mapping) -> tuple[tuple[str, str], ...]:
    if isinstance(mapping, Mapping):
        return tuple(mapping.items())
    return tuple(tuple(p) for p in mapping)


@dataclass(frozen=True)
class Convergence:
    """A finite limit/colimit condition ``(C, (c_H)_H) = lim/colim (shape, D)``.

    ``nodes`` and ``arrows`` give the diagram D on shape vertices and edges;
    ``legs`` assigns to every shape vertex an ambient edge.  Legs need not be
    pairwise distinct.
    """

    kind: str
    apex: str
    shape: Graph
    nodes: tuple[tuple[str, str], ...]
    arrows: tuple[tuple[str, str], ...]
    legs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", _pairs(self.nodes))
        object.__setattr__(self, "arrows", _pairs(self.arrows))
        object.__setattr__(self, "legs", _pairs(self.legs))

    @cached_property
    def node_map(self) -> dict[str, str]:
        return dict(self.nodes)

    @cached_property
    def arrow_map(self) -> dict[str, str]:
        return dict(self.arrows)

    @cached_property
    def leg_map(self) -> dict[str, str]:
        return dict(self.legs)

    def vertex_names(self) -> set[str]:
        return {self.apex, *self.node_map.values()}

    def edge_names(self) -> set[str]:
        return set(self.arrow_map.values()) | set(self.leg_map.values())

    def dual(self) -> Convergence:
        return Convergence(
            dual_kind(self.kind), self.apex, self.shape.reversed(),
            self.nodes, self.arrows, self.legs,
        )

    def render(self) -> str:
        legs = ", ".join(f"{h}: {self.leg_map.get(h, '?')}" for h in self.shape.vertices)
        body = ["nodes: " + ", ".join(self.shape.vertices) + ";"]
        for e in self.shape.edges:
            body.append(
                f"edge {e.name}: {e.source} -> {e.target} |-> {self.arrow_map.get(e.name, '?')};"
            )
        return f"{self.kind} {self.apex} with ({legs}) over {{ {' '.join(body)} }}"

    def __str__(self) -> str:
        return self.render()


def make_convergence(graph: Graph, kind: str, apex: str, legs, edges=()) -> Convergence:
    """Build a convergence condition, reading the diagram's vertex part off the legs.

    ``legs`` is a sequence of ``(shape_vertex, ambient_edge)``; ``edges`` a
    sequence of ``(shape_edge, shape_source, shape_target, ambient_edge)``.
    """
    legs = _pairs(legs)
    nodes = []
    for h, leg in legs:
        e = graph.edge(leg)
        nodes.append((h, e.target if kind == LIMIT else e.source))
    shape = Graph(
        tuple(h for h, _ in legs),
        tuple(Edge(n, s, t) for n, s, t, _ in edges),
    )
    arrows = tuple((n, amb) for n, _, _, amb in edges)
    return Convergence(kind, apex, shape, tuple(nodes), arrows, legs)


def conditions_equivalent(c1: Convergence, c2: Convergence) -> bool:
    """Decide whether two convergence conditions are equal up to shape isomorphism."""
    if c1.kind != c2.kind or c1.apex != c2.apex:
        return False
    s1, s2 = c1.shape, c2.shape
    if len(s1.vertices) != len(s2.vertices) or len(s1.edges) != len(s2.edges):
        return False
    if c1 == c2:
        return True
    n1, n2 = c1.node_map, c2.node_map
    l1, l2 = c1.leg_map, c2.leg_map

    def profile(c: Convergence) -> Counter:
        out = Counter()
        for e in c.shape.edges:
            out[(e.source, e.target, c.arrow_map.get(e.name))] += 1
        return out

    p1 = profile(c1)
    p2 = profile(c2)
    order = list(s1.vertices)
    image: dict[str, str] = {}
    used: set[str] = set()

    def edges_match() -> bool:
        mapped = Counter()
        for (src, tgt, amb), k in p1.items():
            mapped[(image[src], image[tgt], amb)] += k
        return mapped == p2

    def search(i: int) -> bool:
        if i == len(order):
            return edges_match()
        h = order[i]
        for h2 in s2.vertices:
            if h2 in used or n2.get(h2) != n1.get(h) or l2.get(h2) != l1.get(h):
                continue
            image[h] = h2
            used.add(h2)
            if search(i + 1):
                return True
            used.discard(h2)
            del image[h]
        return False

    return search(0)


# ---------------------------------------------------------------------------
# Sketches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sketch:
    name: str
    graph: Graph = field(default_factory=Graph)
    commutativities: tuple[Commutativity, ...] = ()
    convergences: tuple[Convergence, ...] = ()

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.graph.edges

    @cached_property
    def commutativity_keys(self) -> frozenset:
        return frozenset(c.key for c in self.commutativities)

    def has_commutativity(self, c: Commutativity) -> bool:
        return c.key in self.commutativity_keys

    def has_convergence(self, c: Convergence) -> bool:
        return any(conditions_equivalent(c, d) for d in self.convergences)

    def expresses(self, cond) -> bool:
        """True when every vertex and edge ``cond`` mentions lies in this sketch's graph."""
        g = self.graph
        if isinstance(cond, Commutativity):
            return (
                g.has_vertex(cond.lhs.start)
                and g.has_vertex(cond.rhs.start)
                and all(g.has_edge(e) for e in cond.edge_names())
            )
        return all(g.has_vertex(v) for v in cond.vertex_names()) and all(
            g.has_edge(e) for e in cond.edge_names()
        )

    def renamed(self, name: str) -> Sketch:
        return replace(self, name=name)

    def extended(self, name: str, vertices=(), edges=(), commutativities=(), convergences=()) -> Sketch:
        return Sketch(
            name,
            Graph(self.graph.vertices + tuple(vertices), self.graph.edges + tuple(edges)),
            self.commutativities + tuple(commutativities),
            self.convergences + tuple(convergences),
        )


EMPTY_SKETCH = Sketch("Empty")


def validate_sketch(s: Sketch) -> ValidationReport:
    out: list[Violation] = []
    where = f"sketch {s.name}"
    g = s.graph
    seen: set[str] = set()
    for v in g.vertices:
        if v in seen:
            out.append(Violation(f"{where} / object {v}", "duplicate object name"))
        seen.add(v)
    seen_edges: set[str] = set()
    for e in g.edges:
        loc = f"{where} / arrow {e.name}"
        if e.name in seen_edges:
            out.append(Violation(loc, "duplicate arrow name"))
        if e.name in seen:
            out.append(Violation(loc, "arrow name clashes with an object name"))
        seen_edges.add(e.name)
        for end in (e.source, e.target):
            if not g.has_vertex(end):
                out.append(Violation(loc, f"endpoint {end!r} is not a declared object"))
    for c in s.commutativities:
        loc = f"{where} / {c.render()}"
        bad = path_problems(g, c.lhs) + path_problems(g, c.rhs)
        for p in bad:
            out.append(Violation(loc, p))
        if bad:
            continue
        if c.lhs.start != c.rhs.start:
            out.append(Violation(loc, "paths start at different objects"))
        elif c.lhs.end(g) != c.rhs.end(g):
            out.append(Violation(loc, "paths end at different objects"))
    for i, c in enumerate(s.convergences):
        loc = f"{where} / {c.kind} {c.apex} #{i + 1}"
        for msg in _convergence_problems(g, c):
            out.append(Violation(loc, msg))
    return ValidationReport(tuple(out))


def _convergence_problems(g: Graph, c: Convergence) -> list[str]:
    out = []
    if c.kind not in KINDS:
        out.append(f"unknown kind {c.kind!r}")
        return out
    if not g.has_vertex(c.apex):
        out.append(f"apex {c.apex!r} is not a declared object")
    shape = c.shape
    if len(set(shape.vertices)) != len(shape.vertices):
        out.append("duplicate shape node")
    if len(set(e.name for e in shape.edges)) != len(shape.edges):
        out.append("duplicate shape edge")
    for e in shape.edges:
        if not (shape.has_vertex(e.source) and shape.has_vertex(e.target)):
            out.append(f"shape edge {e.name!r} has an undeclared endpoint")
    if set(c.node_map) != set(shape.vertices):
        out.append("diagram is not defined on exactly the shape nodes")
    if set(c.arrow_map) != {e.name for e in shape.edges}:
        out.append("diagram is not defined on exactly the shape edges")
    if set(c.leg_map) != set(shape.vertices):
        out.append("legs are not given for exactly the shape nodes")
    for h, v in c.node_map.items():
        if not g.has_vertex(v):
            out.append(f"node {h!r} maps to undeclared object {v!r}")
    for e in shape.edges:
        amb = c.arrow_map.get(e.name)
        if amb is None:
            continue
        ae = g.edge_map.get(amb)
        if ae is None:
            out.append(f"shape edge {e.name!r} maps to undeclared arrow {amb!r}")
            continue
        if (ae.source, ae.target) != (c.node_map.get(e.source), c.node_map.get(e.target)):
            out.append(f"shape edge {e.name!r} maps to {amb!r} with mismatched endpoints")
    for h, leg in c.leg_map.items():
        le = g.edge_map.get(leg)
        if le is None:
            out.append(f"leg at {h!r} is undeclared arrow {leg!r}")
            continue
        want = (c.apex, c.node_map.get(h)) if c.kind == LIMIT else (c.node_map.get(h), c.apex)
        if (le.source, le.target) != want:
            out.append(f"leg {leg!r} at {h!r} should go {want[0]} -> {want[1]}")
    return out


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SketchMorphism:
    """Vertex and edge maps; ``source``/``target`` are carried along when known."""

    vertices: tuple[tuple[str, str], ...]
    edges: tuple[tuple[str, str], ...]
    source: Sketch | None = field(default=None, compare=False, repr=False)
    target: Sketch | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _pairs(self.vertices))
        object.__setattr__(self, "edges", _pairs(self.edges))

    @cached_property
    def vertex_map(self) -> dict[str, str]:
        return dict(self.vertices)

    @cached_property
    def edge_map(self) -> dict[str, str]:
        return dict(self.edges)

    @classmethod
    def inclusion(cls, a: Sketch, b: Sketch | None = None) -> SketchMorphism:
        """The name-preserving map out of ``a``; an inclusion when ``a`` is a subsketch of ``b``."""
        return cls(
            tuple((v, v) for v in a.graph.vertices),
            tuple((e.name, e.name) for e in a.graph.edges),
            a,
            a if b is None else b,
        )

    @classmethod
    def identity(cls, a: Sketch) -> SketchMorphism:
        return cls.inclusion(a, a)

    def dual(self) -> SketchMorphism:
        return SketchMorphism(
            self.vertices,
            self.edges,
            None if self.source is None else dualize_sketch(self.source),
            None if self.target is None else dualize_sketch(self.target),
        )

    def is_injective_on_objects(self) -> bool:
        vals = list(self.vertex_map.values())
        return len(vals) == len(set(vals))

    def compose(self, first: SketchMorphism) -> SketchMorphism:
        """``self ∘ first``."""
        return SketchMorphism(
            tuple((v, self.vertex_map[w]) for v, w in first.vertices),
            tuple((e, self.edge_map[f]) for e, f in first.edges),
            first.source,
            self.target,
        )

    def map_path(self, p: Path) -> Path:
        return Path(self.vertex_map[p.start], tuple(self.edge_map[e] for e in p.edges))

    def map_commutativity(self, c: Commutativity) -> Commutativity:
        return Commutativity(self.map_path(c.lhs), self.map_path(c.rhs))

    def map_convergence(self, c: Convergence) -> Convergence:
        return Convergence(
            c.kind,
            self.vertex_map[c.apex],
            c.shape,
            tuple((h, self.vertex_map[v]) for h, v in c.nodes),
            tuple((h, self.edge_map[e]) for h, e in c.arrows),
            tuple((h, self.edge_map[e]) for h, e in c.legs),
        )


def _resolve_morphism(m: SketchMorphism, src: Sketch, dst: Sketch) -> None:
    problems = []
    for v, w in m.vertices:
        if not src.graph.has_vertex(v):
            problems.append(f"morphism maps unknown source object {v!r}")
        if not dst.graph.has_vertex(w):
            problems.append(f"morphism targets unknown object {w!r}")
    for e, f in m.edges:
        if not src.graph.has_edge(e):
            problems.append(f"morphism maps unknown source arrow {e!r}")
        if not dst.graph.has_edge(f):
            problems.append(f"morphism targets unknown arrow {f!r}")
    if problems:
        raise ResolutionError(problems)


def is_graph_morphism(m: SketchMorphism, src: Graph, dst: Graph) -> bool:
    vm, em = m.vertex_map, m.edge_map
    if any(v not in vm for v in src.vertices) or any(e.name not in em for e in src.edges):
        return False
    for e in src.edges:
        image = dst.edge_map[em[e.name]]
        if (image.source, image.target) != (vm[e.source], vm[e.target]):
            return False
    return True


def is_sketch_morphism(m: SketchMorphism, src: Sketch, dst: Sketch) -> bool:
    _resolve_morphism(m, src, dst)
    if not is_graph_morphism(m, src.graph, dst.graph):
        return False
    for c in src.commutativities:
        if not dst.has_commutativity(m.map_commutativity(c)):
            return False
    for c in src.convergences:
        if not dst.has_convergence(m.map_convergence(c)):
            return False
    return True


def is_subsketch_inclusion(a: Sketch, b: Sketch) -> bool:
    if not a.graph.is_subgraph_of(b.graph):
        return False
    if not all(b.has_commutativity(c) for c in a.commutativities):
        return False
    return all(b.has_convergence(c) for c in a.convergences)


def is_regular_subsketch(a: Sketch, b: Sketch) -> bool:
    if not is_subsketch_inclusion(a, b):
        raise PreconditionError(f"{a.name} is not a subsketch of {b.name}")
    for c in b.commutativities:
        if a.expresses(c) and not a.has_commutativity(c):
            return False
    for c in b.convergences:
        if a.expresses(c) and not a.has_convergence(c):
            return False
    return True


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def dualize_sketch(z: Sketch) -> Sketch:
    g = z.graph
    return Sketch(
        z.name,
        g.reversed(),
        tuple(c.dual(g) for c in z.commutativities),
        tuple(c.dual() for c in z.convergences),
    )


def strip_convergence(z: Sketch) -> Sketch:
    return Sketch(z.name, z.graph, z.commutativities, ())


def sketch_union(name: str, parts: Iterable[Sketch]) -> Sketch:
    """Merge sketches by name, keeping first occurrences in order."""
    vertices: dict[str, None] = {}
    edges: dict[str, Edge] = {}
    comms: dict[tuple, Commutativity] = {}
    convs: list[Convergence] = []
    for s in parts:
        for v in s.graph.vertices:
            vertices.setdefault(v)
        for e in s.graph.edges:
            edges.setdefault(e.name, e)
        for c in s.commutativities:
            comms.setdefault(c.key, c)
        for c in s.convergences:
            if not any(conditions_equivalent(c, d) for d in convs):
                convs.append(c)
    return Sketch(name, Graph(tuple(vertices), tuple(edges.values())), tuple(comms.values()), tuple(convs))
