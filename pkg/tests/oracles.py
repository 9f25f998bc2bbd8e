"""Brute-force reference implementations used to cross-check the library.

Nothing here calls the library's search kernels, cone enumeration, structure
search or certifier.  The oracles only read plain data off categories and
sketches (object lists, arrow triples, composition tables, conditions) and
recompute everything by exhaustive enumeration.
"""

from __future__ import annotations

from collections import deque
from itertools import product

from sketchkit.kernel import LIMIT, Commutativity, Path, conditions_equivalent


# ---- raw categories ------------------------------------------------------


class RawCat:
    """A category as plain dictionaries, optionally read in the opposite direction."""

    def __init__(self, c, opposite: bool = False):
        self.objects = list(c.objects)
        self.ident = dict(c.identities)
        if opposite:
            self.ends = {a.name: (a.target, a.source) for a in c.arrows}
            self.comp = {(f, g): h for g, f, h in c.composition}
        else:
            self.ends = {a.name: (a.source, a.target) for a in c.arrows}
            self.comp = {(g, f): h for g, f, h in c.composition}

    def hom(self, x, y):
        return [a for a, (s, t) in self.ends.items() if s == x and t == y]

    def after(self, g, f):
        return self.comp[(g, f)]


def raw_is_iso(c, f) -> bool:
    r = RawCat(c)
    s, t = r.ends[f]
    return any(r.after(g, f) == r.ident[s] and r.after(f, g) == r.ident[t] for g in r.hom(t, s))


def raw_is_mono(c, f) -> bool:
    r = RawCat(c)
    s, _ = r.ends[f]
    for x in r.objects:
        hom = r.hom(x, s)
        for u in hom:
            for v in hom:
                if u != v and r.after(f, u) == r.after(f, v):
                    return False
    return True


# ---- limits --------------------------------------------------------------


def _cones(r: RawCat, nodes, edges, vertex):
    """All cones with the given vertex over the diagram (limit direction in ``r``)."""
    homs = [r.hom(vertex, o) for _, o in nodes]
    pos = {h: i for i, (h, _) in enumerate(nodes)}
    out = []
    for legs in product(*homs):
        if all(r.after(arr, legs[pos[s]]) == legs[pos[t]] for s, t, arr in edges):
            out.append(legs)
    return out


def bf_is_limit(c, diagram, cone) -> bool:
    """Exhaustive universal-property check for a (co)limit cone."""
    r = RawCat(c, opposite=cone.orientation != LIMIT)
    nodes = list(diagram.nodes)
    shape_edges = diagram.shape.edges
    if cone.orientation != LIMIT:
        edges = [(e.target, e.source, diagram.arrow_map[e.name]) for e in shape_edges]
    else:
        edges = [(e.source, e.target, diagram.arrow_map[e.name]) for e in shape_edges]
    legs = tuple(cone.leg_map[h] for h, _ in nodes)
    for leg, (_, o) in zip(legs, nodes):
        if leg not in r.ends or r.ends[leg] != (cone.vertex, o):
            return False
    if legs not in _cones(r, nodes, edges, cone.vertex):
        return False
    for w in r.objects:
        for other in _cones(r, nodes, edges, w):
            factor = [u for u in r.hom(w, cone.vertex)
                      if all(r.after(l, u) == m for l, m in zip(legs, other))]
            if len(factor) != 1:
                return False
    return True


def bf_limit_exists(c, diagram, orientation=LIMIT) -> bool:
    from sketchkit.fincat import Cone

    r = RawCat(c, opposite=orientation != LIMIT)
    nodes = list(diagram.nodes)
    if orientation != LIMIT:
        edges = [(e.target, e.source, diagram.arrow_map[e.name]) for e in diagram.shape.edges]
    else:
        edges = [(e.source, e.target, diagram.arrow_map[e.name]) for e in diagram.shape.edges]
    for v in r.objects:
        for legs in _cones(r, nodes, edges, v):
            cone = Cone(v, tuple((h, l) for (h, _), l in zip(nodes, legs)), orientation)
            if bf_is_limit(c, diagram, cone):
                return True
    return False


# ---- posets --------------------------------------------------------------


def poset_order(c) -> set[tuple[str, str]]:
    return {(a.source, a.target) for a in c.arrows}


def meet_exists(c, x, y) -> bool:
    leq = poset_order(c)
    lower = [z for z in c.objects if (z, x) in leq and (z, y) in leq]
    return any(all((w, m) in leq for w in lower) for m in lower)


def join_exists(c, x, y) -> bool:
    leq = poset_order(c)
    upper = [z for z in c.objects if (x, z) in leq and (y, z) in leq]
    return any(all((m, w) in leq for w in upper) for m in upper)


def all_meets(c) -> bool:
    return all(meet_exists(c, x, y) for x in c.objects for y in c.objects)


# ---- structures ----------------------------------------------------------


def _path_value(r: RawCat, om, am, path):
    acc = r.ident[om[path.start]]
    for e in path.edges:
        acc = r.after(am[e], acc)
    return acc


def raw_structures(z, c) -> list[tuple[dict, dict]]:
    """Every graph map z -> c satisfying z's conditions, as (objects, arrows) dicts."""
    from sketchkit.fincat import Cone, Diagram

    r = RawCat(c)
    out = []
    for objs in product(r.objects, repeat=len(z.vertices)):
        om = dict(zip(z.vertices, objs))
        homs = [r.hom(om[e.source], om[e.target]) for e in z.edges]
        for arrs in product(*homs):
            am = dict(zip((e.name for e in z.edges), arrs))
            if any(_path_value(r, om, am, k.lhs) != _path_value(r, om, am, k.rhs)
                   for k in z.commutativities):
                continue
            ok = True
            for k in z.convergences:
                d = Diagram(k.shape, tuple((h, om[v]) for h, v in k.nodes),
                            tuple((h, am[e]) for h, e in k.arrows))
                cone = Cone(om[k.apex], tuple((h, am[e]) for h, e in k.legs), k.kind)
                if not bf_is_limit(c, d, cone):
                    ok = False
                    break
            if ok:
                out.append((om, am))
    return out


def raw_nat_count(F, G) -> int:
    """Number of natural transformations F => G by exhaustion over component tuples."""
    r = RawCat(F.category)
    z = F.sketch
    homs = [r.hom(F.object_map[v], G.object_map[v]) for v in z.vertices]
    n = 0
    for comps in product(*homs):
        t = dict(zip(z.vertices, comps))
        if all(r.after(G.arrow_map[e.name], t[e.source]) == r.after(t[e.target], F.arrow_map[e.name])
               for e in z.edges):
            n += 1
    return n


# ---- constructibility ----------------------------------------------------


def _items(b):
    """Items of b: ('v', name), ('e', name), ('c', key), ('k', index of a representative)."""
    comms = {}
    for k in b.commutativities:
        comms.setdefault(k.key, k)
    convs = []
    for k in b.convergences:
        if not any(conditions_equivalent(k, d) for d in convs):
            convs.append(k)
    return comms, convs


class _State:
    def __init__(self, vs, es, cs, ks):
        self.vs, self.es, self.cs, self.ks = vs, es, cs, ks

    def key(self):
        return (self.vs, self.es, self.cs, self.ks)


def bfs_constructible(a, b, max_states: int = 2_000_000) -> bool | None:
    """Breadth-first search over every single-item step sequence from a to b.

    Each step is one application of one procedure with a single payload.
    Returns None when the state cap is hit.
    """
    comms, convs = _items(b)
    g = b.graph
    edge = g.edge_map

    def path_in(p, vs, es):
        return p.start in vs and all(e in es for e in p.edges)

    def comm_in(p, q, cs):
        return p == q or Commutativity(p, q).key in cs

    start = _State(
        frozenset(a.vertices),
        frozenset(e.name for e in a.edges),
        frozenset(k.key for k in a.commutativities),
        frozenset(i for i, k in enumerate(convs) if a.has_convergence(k)),
    )
    goal = (frozenset(g.vertices), frozenset(edge), frozenset(comms), frozenset(range(len(convs))))

    def successors(s: _State):
        vs, es, cs, ks = s.vs, s.es, s.cs, s.ks
        # P1: one expressible condition
        for key, k in comms.items():
            if key not in cs and path_in(k.lhs, vs, es) and path_in(k.rhs, vs, es):
                yield _State(vs, es, cs | {key}, ks)
        for i, k in enumerate(convs):
            if i not in ks and k.apex in vs and all(v in vs for _, v in k.nodes) \
                    and all(e in es for e in k.edge_names()):
                yield _State(vs, es, cs, ks | {i})
        # P2: an arrow defined as a composite of present arrows
        for key, k in comms.items():
            if key in cs:
                continue
            for one, other in ((k.lhs, k.rhs), (k.rhs, k.lhs)):
                if len(one.edges) != 1:
                    continue
                f = one.edges[0]
                e = edge[f]
                if f in es or f in other.edges or e.source not in vs or e.target not in vs:
                    continue
                if path_in(other, vs, es):
                    yield _State(vs, es | {f}, cs | {key}, ks)
        # P3/P4: a new apex
        for i, k in enumerate(convs):
            if i in ks or k.apex in vs:
                continue
            if all(v in vs for _, v in k.nodes) and all(e in es for _, e in k.arrows):
                yield _State(vs | {k.apex}, es | {e for _, e in k.legs}, cs, ks | {i})
        # P5/P6: an induced arrow into a limit / out of a colimit
        for i, k in enumerate(convs):
            if i not in ks:
                continue
            limit = k.kind == LIMIT
            for f in g.edges:
                if f.name in es:
                    continue
                if (f.target if limit else f.source) != k.apex:
                    continue
                other = f.source if limit else f.target
                if other not in vs:
                    continue
                choices = []
                for h, leg in k.legs:
                    node = k.node_map[h]
                    opts = []
                    for key, cond in comms.items():
                        for p, q in ((cond.lhs, cond.rhs), (cond.rhs, cond.lhs)):
                            if limit:
                                shape_ok = p == Path(other, (f.name, leg))
                                ends = (other, node)
                            else:
                                shape_ok = p == Path(node, (leg, f.name))
                                ends = (node, other)
                            if not shape_ok or len(q.edges) > 1 or q.start != ends[0]:
                                continue
                            q_end = edge[q.edges[0]].target if q.edges else q.start
                            if q_end == ends[1] and path_in(q, vs, es):
                                opts.append((key, q))
                    choices.append(opts)
                for fam in product(*choices):
                    x = {h: q for (h, _), (_, q) in zip(k.legs, fam)}
                    ok = True
                    for se in k.shape.edges:
                        d = k.arrow_map[se.name]
                        if limit:
                            lhs, rhs = Path(other, x[se.source].edges + (d,)), x[se.target]
                        else:
                            lhs, rhs = Path(k.node_map[se.source], (d,) + x[se.target].edges), x[se.source]
                        if not comm_in(lhs, rhs, cs):
                            ok = False
                            break
                    if ok:
                        yield _State(vs, es | {f.name}, cs | {key for key, _ in fam}, ks)

    seen = {start.key()}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s.key() == goal:
            return True
        for t in successors(s):
            kt = t.key()
            if kt not in seen:
                if len(seen) >= max_states:
                    return None
                seen.add(kt)
                queue.append(t)
    return False
