"""Finite categories given by explicit composition tables.

Also: the underlying sketch of a finite category, its inverse
:func:`extract_category`, and exhaustive limit/colimit, mono and iso
oracles.
"""

from __future__ import annotations

import contextlib
from array import array
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from . import _kernels
from .errors import PreconditionError
from .kernel import (
    COLIMIT,
    LIMIT,
    Commutativity,
    Edge,
    Graph,
    Path,
    Sketch,
    ValidationReport,
    Violation,
)


def _ints(values: Iterable[int]) -> array:
    return array("i", values)


class Tables:
    """Integer encoding of a finite category consumed by the search kernels.

    ``comp[g * n_arr + f]`` is the index of ``g . f`` or -1; ``hom_idx``
    holds, for each ordered object pair ``x * n_obj + y``, the arrows x -> y
    in the slice ``hom_ptr[p]:hom_ptr[p + 1]``.
    """

    __slots__ = ("n_obj", "n_arr", "src", "tgt", "comp", "ident", "hom_ptr", "hom_idx")

    def __init__(self, n_obj, n_arr, src, tgt, comp, ident):
        self.n_obj = n_obj
        self.n_arr = n_arr
        self.src = _ints(src)
        self.tgt = _ints(tgt)
        self.comp = _ints(comp)
        self.ident = _ints(ident)
        buckets = [[] for _ in range(n_obj * n_obj)]
        for a in range(n_arr):
            buckets[src[a] * n_obj + tgt[a]].append(a)
        ptr = [0]
        idx = []
        for b in buckets:
            idx.extend(b)
            ptr.append(len(idx))
        self.hom_ptr = _ints(ptr)
        self.hom_idx = _ints(idx)

    def dual(self) -> Tables:
        n = self.n_arr
        comp = [-1] * (n * n)
        for g in range(n):
            for f in range(n):
                comp[g * n + f] = self.comp[f * n + g]
        return Tables(self.n_obj, n, list(self.tgt), list(self.src), comp, list(self.ident))


@dataclass(frozen=True)
class FiniteCategory:
    """A finite category: objects, arrows (identities included) and a composition table.

    ``composition`` lists triples ``(g, f, h)`` meaning ``g . f = h``.
    """

    name: str
    objects: tuple[str, ...]
    arrows: tuple[Edge, ...]
    identities: tuple[tuple[str, str], ...]
    composition: tuple[tuple[str, str, str], ...]

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, name: str, objects, arrows=(), compose: Mapping | Iterable = (),
              identity_prefix: str = "id_") -> FiniteCategory:
        """Build from non-identity data; identities and their compositions are added."""
        objects = tuple(objects)
        ids = tuple((o, f"{identity_prefix}{o}") for o in objects)
        arrows = tuple(Edge(*a) if not isinstance(a, Edge) else a for a in arrows)
        all_arrows = tuple(Edge(i, o, o) for o, i in ids) + arrows
        idm = dict(ids)
        table: dict[tuple[str, str], str] = {}
        for a in all_arrows:
            table[(idm[a.target], a.name)] = a.name
            table[(a.name, idm[a.source])] = a.name
        items = compose.items() if isinstance(compose, Mapping) else (((g, f), h) for g, f, h in compose)
        for (g, f), h in items:
            table[(g, f)] = h
        triples = tuple((g, f, h) for (g, f), h in table.items())
        return cls(name, objects, all_arrows, ids, triples)

    @classmethod
    def poset(cls, name: str, elements, relations) -> FiniteCategory:
        """The poset generated by ``relations`` (pairs ``x <= y``); arrow ``x_y`` for x < y."""
        elements = tuple(elements)
        leq = {(x, x) for x in elements} | set(map(tuple, relations))
        changed = True
        while changed:
            changed = False
            for (x, y), (y2, z) in product(list(leq), repeat=2):
                if y == y2 and (x, z) not in leq:
                    leq.add((x, z))
                    changed = True
        for x, y in leq:
            if x != y and (y, x) in leq:
                raise ValueError(f"relations are not antisymmetric: {x} and {y}")
        order = {e: i for i, e in enumerate(elements)}
        strict = sorted(((x, y) for x, y in leq if x != y), key=lambda p: (order[p[0]], order[p[1]]))

        def arrow(x, y):
            return f"id_{x}" if x == y else f"{x}_{y}"

        compose = {}
        for x, y in strict:
            for y2, z in strict:
                if y == y2:
                    compose[(arrow(y, z), arrow(x, y))] = arrow(x, z)
        return cls.build(name, elements, [(arrow(x, y), x, y) for x, y in strict], compose)

    @classmethod
    def free(cls, name: str, objects, arrows) -> FiniteCategory:
        """Free category on an acyclic graph; composites are named ``g_f`` for ``g . f``."""
        objects = tuple(objects)
        gens = [Edge(*a) if not isinstance(a, Edge) else a for a in arrows]
        paths: list[tuple[str, ...]] = [(e.name,) for e in gens]
        by_name = {e.name: e for e in gens}
        frontier = list(paths)
        while frontier:
            nxt = []
            for p in frontier:
                end = by_name[p[-1]].target
                for e in gens:
                    if e.source == end:
                        q = p + (e.name,)
                        if len(q) > len(gens):
                            raise ValueError("graph has a cycle; the free category is infinite")
                        nxt.append(q)
            paths.extend(nxt)
            frontier = nxt

        def pname(p):
            return "_".join(reversed(p))

        arrows_out = []
        for p in paths:
            arrows_out.append((pname(p), by_name[p[0]].source, by_name[p[-1]].target))
        compose = {}
        pset = set(paths)
        for p in paths:
            for q in paths:
                if by_name[p[-1]].target == by_name[q[0]].source and p + q in pset:
                    compose[(pname(q), pname(p))] = pname(p + q)
        return cls.build(name, objects, arrows_out, compose)

    # -- lookups ----------------------------------------------------------

    @cached_property
    def object_index(self) -> dict[str, int]:
        return {o: i for i, o in enumerate(self.objects)}

    @cached_property
    def arrow_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.arrows)}

    @cached_property
    def arrow_map(self) -> dict[str, Edge]:
        return {a.name: a for a in self.arrows}

    @cached_property
    def identity_map(self) -> dict[str, str]:
        return dict(self.identities)

    @cached_property
    def composition_map(self) -> dict[tuple[str, str], str]:
        return {(g, f): h for g, f, h in self.composition}

    @cached_property
    def identity_arrows(self) -> frozenset[str]:
        return frozenset(self.identity_map.values())

    def source(self, f: str) -> str:
        return self.arrow_map[f].source

    def target(self, f: str) -> str:
        return self.arrow_map[f].target

    def identity(self, obj: str) -> str:
        return self.identity_map[obj]

    def compose(self, g: str, f: str) -> str:
        """``g . f`` (f first)."""
        try:
            return self.composition_map[(g, f)]
        except KeyError:
            raise PreconditionError(f"{g} . {f} is not defined in {self.name}") from None

    def compose_path(self, start: str, arrows: Iterable[str]) -> str:
        acc = self.identity(start)
        for a in arrows:
            acc = self.compose(a, acc)
        return acc

    def hom(self, x: str, y: str) -> list[str]:
        return [a.name for a in self.arrows if a.source == x and a.target == y]

    def graph(self) -> Graph:
        return Graph(self.objects, self.arrows)

    @cached_property
    def tables(self) -> Tables:
        oi, ai = self.object_index, self.arrow_index
        n = len(self.arrows)
        comp = [-1] * (n * n)
        for g, f, h in self.composition:
            if g in ai and f in ai and h in ai:
                comp[ai[g] * n + ai[f]] = ai[h]
        return Tables(
            len(self.objects), n,
            [oi[a.source] for a in self.arrows],
            [oi[a.target] for a in self.arrows],
            comp,
            [ai[self.identity_map[o]] for o in self.objects],
        )

    @cached_property
    def dual_tables(self) -> Tables:
        return self.tables.dual()

    @cached_property
    def _universal_cache(self) -> dict:
        return {}

    def dual(self) -> FiniteCategory:
        name = self.name[:-3] if self.name.endswith("_op") else self.name + "_op"
        return FiniteCategory(
            name,
            self.objects,
            tuple(a.reversed() for a in self.arrows),
            self.identities,
            tuple((f, g, h) for g, f, h in self.composition),
        )

    def is_poset(self) -> bool:
        seen = set()
        for a in self.arrows:
            key = (a.source, a.target)
            if key in seen:
                return False
            seen.add(key)
        return True


# ---------------------------------------------------------------------------
# Validation and the underlying sketch
# ---------------------------------------------------------------------------


def validate_category(c: FiniteCategory) -> ValidationReport:
    out: list[Violation] = []
    where = f"category {c.name}"
    objs = set()
    for o in c.objects:
        if o in objs:
            out.append(Violation(f"{where} / object {o}", "duplicate object name"))
        objs.add(o)
    names = set()
    for a in c.arrows:
        loc = f"{where} / arrow {a.name}"
        if a.name in names:
            out.append(Violation(loc, "duplicate arrow name"))
        if a.name in objs:
            out.append(Violation(loc, "arrow name clashes with an object name"))
        names.add(a.name)
        for end in (a.source, a.target):
            if end not in objs:
                out.append(Violation(loc, f"endpoint {end!r} is not an object"))
    if out:
        return ValidationReport(tuple(out))
    am = c.arrow_map
    idm = c.identity_map
    for o in c.objects:
        i = idm.get(o)
        if i is None:
            out.append(Violation(f"{where} / object {o}", "no identity arrow"))
        elif i not in am or (am[i].source, am[i].target) != (o, o):
            out.append(Violation(f"{where} / object {o}", f"identity {i!r} is not a loop at {o}"))
    table = c.composition_map
    seen_pairs = set()
    for g, f, h in c.composition:
        loc = f"{where} / compose {g}.{f} = {h}"
        if (g, f) in seen_pairs:
            out.append(Violation(loc, "composite given twice"))
        seen_pairs.add((g, f))
        if g not in am or f not in am or h not in am:
            out.append(Violation(loc, "unknown arrow in composition entry"))
            continue
        if am[f].target != am[g].source:
            out.append(Violation(loc, "arrows are not composable"))
            continue
        if (am[h].source, am[h].target) != (am[f].source, am[g].target):
            out.append(
                Violation(loc, f"composite should go {am[f].source} -> {am[g].target}")
            )
    for f in c.arrows:
        for g in c.arrows:
            if f.target == g.source and (g.name, f.name) not in table:
                out.append(Violation(f"{where} / compose {g.name}.{f.name}", "composite missing"))
    if out or any(o not in idm for o in c.objects):
        return ValidationReport(tuple(out))
    for f in c.arrows:
        if table.get((idm[f.target], f.name)) != f.name or table.get((f.name, idm[f.source])) != f.name:
            out.append(Violation(f"{where} / arrow {f.name}", "identity law fails"))
    for f in c.arrows:
        for g in c.arrows:
            if f.target != g.source:
                continue
            gf = table[(g.name, f.name)]
            for h in c.arrows:
                if g.target != h.source:
                    continue
                if table[(h.name, gf)] != table[(table[(h.name, g.name)], f.name)]:
                    out.append(
                        Violation(f"{where} / {h.name}.{g.name}.{f.name}", "associativity fails")
                    )
    return ValidationReport(tuple(out))


def composable_pairs(c: FiniteCategory) -> list[tuple[Edge, Edge]]:
    """Pairs ``(f, g)`` with ``g . f`` defined, in arrow order."""
    return [(f, g) for f in c.arrows for g in c.arrows if f.target == g.source]


def underlying_sketch(c: FiniteCategory) -> Sketch:
    comms = []
    for f, g in composable_pairs(c):
        comms.append(
            Commutativity(Path(f.source, (f.name, g.name)), Path(f.source, (c.compose(g.name, f.name),)))
        )
    for o in c.objects:
        comms.append(Commutativity(Path(o, (c.identity(o),)), Path(o, ())))
    return Sketch(c.name, Graph(c.objects, c.arrows), tuple(comms), ())


@dataclass(frozen=True)
class Extraction:
    category: FiniteCategory | None
    residue: tuple[Commutativity, ...] = ()
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.category is not None


def extract_category(a: Sketch) -> Extraction:
    """Recover the finite category whose underlying sketch ``a`` contains.

    Succeeds when every object has exactly one identity condition and every
    composable pair of edges exactly one composite condition, and the table
    so obtained satisfies the category axioms.  ``residue`` holds the
    commutativities left over.
    """
    g = a.graph
    identity_of: dict[str, list[str]] = {v: [] for v in g.vertices}
    composite_of: dict[tuple[str, str], set[str]] = {}
    used = set()
    for c in a.commutativities:
        for p, q in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
            if len(p.edges) == 1 and q.is_empty and p.start == q.start:
                e = g.edge_map.get(p.edges[0])
                if e is not None and e.source == e.target == p.start:
                    identity_of[p.start].append(e.name)
                    used.add(c.key)
                    break
            if len(p.edges) == 2 and len(q.edges) == 1 and p.start == q.start:
                composite_of.setdefault(p.edges, set()).add(q.edges[0])
                used.add(c.key)
                break
    for v in g.vertices:
        found = sorted(set(identity_of[v]))
        if not found:
            return Extraction(None, reason=f"missing identity condition at {v}")
        if len(found) > 1:
            return Extraction(None, reason=f"ill-formed table: several identities at {v}: {found}")
    compose = []
    for f in g.edges:
        for h in g.edges:
            if f.target != h.source:
                continue
            found = composite_of.get((f.name, h.name), set())
            if not found:
                return Extraction(None, reason=f"missing composite condition for {h.name}.{f.name}")
            if len(found) > 1:
                return Extraction(
                    None, reason=f"ill-formed table: {h.name}.{f.name} has composites {sorted(found)}"
                )
            compose.append((h.name, f.name, next(iter(found))))
    cat = FiniteCategory(
        a.name, g.vertices, g.edges, tuple((v, identity_of[v][0]) for v in g.vertices), tuple(compose)
    )
    report = validate_category(cat)
    if not report.ok:
        return Extraction(None, reason="axiom violation: " + report.violations[0].message
                          + f" ({report.violations[0].location})")
    residue = tuple(c for c in a.commutativities if c.key not in used)
    return Extraction(cat, residue)


# ---------------------------------------------------------------------------
# Diagrams, cones, limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagram:
    """A graph morphism from a finite shape into a category's underlying graph."""

    shape: Graph
    nodes: tuple[tuple[str, str], ...]
    arrows: tuple[tuple[str, str], ...] = ()

    @cached_property
    def node_map(self) -> dict[str, str]:
        return dict(self.nodes)

    @cached_property
    def arrow_map(self) -> dict[str, str]:
        return dict(self.arrows)

    def dual(self) -> Diagram:
        return Diagram(self.shape.reversed(), self.nodes, self.arrows)


@dataclass(frozen=True)
class Cone:
    vertex: str
    legs: tuple[tuple[str, str], ...]
    orientation: str = LIMIT

    @cached_property
    def leg_map(self) -> dict[str, str]:
        return dict(self.legs)


class DiagramPlan:
    """Integer encoding of a diagram for the cone kernels."""

    __slots__ = ("n_nodes", "node_obj", "n_edges", "e_src", "e_tgt", "e_arr", "chk_ptr", "chk_idx")

    def __init__(self, c: FiniteCategory, d: Diagram, reverse: bool = False):
        oi, ai = c.object_index, c.arrow_index
        shape = d.shape
        pos = {h: i for i, h in enumerate(shape.vertices)}
        self.n_nodes = len(shape.vertices)
        self.node_obj = _ints(oi[d.node_map[h]] for h in shape.vertices)
        edges = shape.edges
        self.n_edges = len(edges)
        src = [pos[e.target if reverse else e.source] for e in edges]
        tgt = [pos[e.source if reverse else e.target] for e in edges]
        self.e_src = _ints(src)
        self.e_tgt = _ints(tgt)
        self.e_arr = _ints(ai[d.arrow_map[e.name]] for e in edges)
        checks = [[] for _ in range(self.n_nodes)]
        for k in range(len(edges)):
            checks[max(src[k], tgt[k])].append(k)
        ptr = [0]
        idx = []
        for ch in checks:
            idx.extend(ch)
            ptr.append(len(idx))
        self.chk_ptr = _ints(ptr)
        self.chk_idx = _ints(idx)


def _check_diagram(c: FiniteCategory, d: Diagram) -> None:
    if set(d.node_map) != set(d.shape.vertices) or set(d.arrow_map) != {e.name for e in d.shape.edges}:
        raise PreconditionError("diagram is not defined on exactly its shape")
    for h, o in d.node_map.items():
        if o not in c.object_index:
            raise PreconditionError(f"diagram node {h} maps to unknown object {o!r}")
    for e in d.shape.edges:
        a = c.arrow_map.get(d.arrow_map[e.name])
        if a is None or (a.source, a.target) != (d.node_map[e.source], d.node_map[e.target]):
            raise PreconditionError(f"diagram edge {e.name} is not sent to an arrow between its node images")


def enumerate_cones(c: FiniteCategory, d: Diagram, orientation: str = LIMIT,
                    vertex: str | None = None) -> list[Cone]:
    """Every cone (or cocone) over ``d``, ordered by vertex then legs."""
    _check_diagram(c, d)
    reverse = orientation == COLIMIT
    tables = c.dual_tables if reverse else c.tables
    plan = DiagramPlan(c, d, reverse)
    apex = -1 if vertex is None else c.object_index[vertex]
    shape = d.shape.vertices
    out = []
    for x, legs in _kernels.enumerate_cones(plan, tables, apex):
        out.append(Cone(c.objects[x], tuple((h, c.arrows[a].name) for h, a in zip(shape, legs)), orientation))
    return out


def cone_commutes(c: FiniteCategory, d: Diagram, cone: Cone) -> bool:
    legs = cone.leg_map
    for h in d.shape.vertices:
        a = c.arrow_map.get(legs[h])
        if a is None:
            return False
        want = (cone.vertex, d.node_map[h]) if cone.orientation == LIMIT else (d.node_map[h], cone.vertex)
        if (a.source, a.target) != want:
            return False
    for e in d.shape.edges:
        arrow = d.arrow_map[e.name]
        if cone.orientation == LIMIT:
            if c.compose(arrow, legs[e.source]) != legs[e.target]:
                return False
        elif c.compose(legs[e.target], arrow) != legs[e.source]:
            return False
    return True


_trace: list | None = None


@contextlib.contextmanager
def trace_universal_checks():
    """Record every ``(category, diagram, cone, verdict)`` decided inside the block."""
    global _trace
    previous = _trace
    _trace = []
    try:
        yield _trace
    finally:
        if previous is not None:
            previous.extend(_trace)
        _trace = previous


def _is_universal(c: FiniteCategory, d: Diagram, cone: Cone, orientation: str) -> bool:
    if cone.orientation != orientation:
        raise PreconditionError(f"expected a {orientation} cone, got {cone.orientation}")
    if set(cone.leg_map) != set(d.shape.vertices):
        raise PreconditionError("cone legs do not match the diagram shape")
    _check_diagram(c, d)
    key = (orientation, d.shape, d.nodes, d.arrows, cone.vertex, cone.legs)
    cache = c._universal_cache
    verdict = cache.get(key)
    if verdict is None:
        if cone.vertex not in c.object_index or not cone_commutes(c, d, cone):
            verdict = False
        else:
            reverse = orientation == COLIMIT
            plan = DiagramPlan(c, d, reverse)
            tables = c.dual_tables if reverse else c.tables
            legs = [c.arrow_index[cone.leg_map[h]] for h in d.shape.vertices]
            verdict = bool(_kernels.is_limit(plan, tables, c.object_index[cone.vertex], legs))
        cache[key] = verdict
    if _trace is not None:
        _trace.append((c, d, cone, verdict))
    return verdict


def is_limiting_cone(c: FiniteCategory, d: Diagram, cone: Cone) -> bool:
    return _is_universal(c, d, cone, LIMIT)


def is_colimiting_cone(c: FiniteCategory, d: Diagram, cone: Cone) -> bool:
    return _is_universal(c, d, cone, COLIMIT)


def is_universal_cone(c: FiniteCategory, d: Diagram, cone: Cone) -> bool:
    return _is_universal(c, d, cone, cone.orientation)


def limits(c: FiniteCategory, d: Diagram, orientation: str = LIMIT) -> list[Cone]:
    return [k for k in enumerate_cones(c, d, orientation) if _is_universal(c, d, k, orientation)]


def limit_exists(c: FiniteCategory, d: Diagram, orientation: str = LIMIT) -> bool:
    return bool(limits(c, d, orientation))


# ---------------------------------------------------------------------------
# Mono / iso
# ---------------------------------------------------------------------------


def is_mono(c: FiniteCategory, f: str) -> bool:
    src = c.source(f)
    for x in c.objects:
        hom = c.hom(x, src)
        images = {}
        for u in hom:
            fu = c.compose(f, u)
            if fu in images and images[fu] != u:
                return False
            images[fu] = u
    return True


def inverse(c: FiniteCategory, f: str) -> str | None:
    a, b = c.source(f), c.target(f)
    for g in c.hom(b, a):
        if c.compose(g, f) == c.identity(a) and c.compose(f, g) == c.identity(b):
            return g
    return None


def is_iso(c: FiniteCategory, f: str) -> bool:
    return inverse(c, f) is not None


def isomorphic_objects(c: FiniteCategory, x: str) -> list[str]:
    """Objects isomorphic to ``x``, in declaration order."""
    return [y for y in c.objects if any(is_iso(c, f) for f in c.hom(x, y))]
